#![allow(dead_code)]

use hortonlab::tree::BinaryTree;

/// Hand encoding of the order-3 example tree: three 3-leaf combs, two of
/// them merged, the third attached as an order-2 side-branch and one more
/// leaf as an order-1 side-branch.
pub const ORDER3_NEWICK: &str = "((((a,(b,c)),(d,(e,f))),(g,(h,i))),j);";

/// Every full binary tree (ordered children) with exactly `leaves` leaves,
/// built by splitting the leaf count between the two root subtrees.
pub fn all_full_binary_trees(leaves: usize) -> Vec<BinaryTree> {
    let mut by_size: Vec<Vec<BinaryTree>> = vec![Vec::new(), vec![BinaryTree::single()]];
    for n in 2..=leaves {
        let mut out = Vec::new();
        for left in 1..n {
            for l in &by_size[left] {
                for r in &by_size[n - left] {
                    out.push(BinaryTree::join(l, r).unwrap());
                }
            }
        }
        by_size.push(out);
    }
    by_size.swap_remove(leaves)
}

pub fn catalan(n: u64) -> u64 {
    (0..n).fold(1u64, |c, k| c * 2 * (2 * k + 1) / (k + 2))
}

/// Real roots of `a z^3 + b z^2 + c z + d` by the trigonometric / Cardano
/// formulas, sorted ascending.
pub fn cubic_real_roots(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    let (b, c, d) = (b / a, c / a, d / a);
    // Depressed cubic t^3 + p t + q with z = t - b/3.
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let shift = -b / 3.0;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let mut roots = if disc > 0.0 {
        let s = disc.sqrt();
        vec![(-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt() + shift]
    } else {
        let r = (-p / 3.0).sqrt();
        let phi = (-q / (2.0 * r.powi(3))).clamp(-1.0, 1.0).acos();
        (0..3)
            .map(|k| 2.0 * r * ((phi + 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos() + shift)
            .collect()
    };
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots
}

/// One Newton polish step set, to tighten the closed-form root.
pub fn newton_polish(coeffs: [f64; 4], mut z: f64) -> f64 {
    for _ in 0..4 {
        let f = ((coeffs[0] * z + coeffs[1]) * z + coeffs[2]) * z + coeffs[3];
        let df = (3.0 * coeffs[0] * z + 2.0 * coeffs[1]) * z + coeffs[2];
        z -= f / df;
    }
    z
}
