//! Truncated power-series inversion.

/// First `n` coefficients of `1 / A(z)` where `a` holds `A`'s coefficients
/// in ascending degree (missing entries are zero).
///
/// Returns `None` when `a[0] == 0`.
pub fn reciprocal(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let a0 = *a.first()?;
    if a0 == 0.0 {
        return None;
    }
    let mut b = Vec::with_capacity(n);
    for k in 0..n {
        if k == 0 {
            b.push(1.0 / a0);
            continue;
        }
        let upper = k.min(a.len() - 1);
        let s: f64 = (1..=upper).map(|j| a[j] * b[k - j]).sum();
        b.push(-s / a0);
    }
    Some(b)
}

/// First `n` coefficients of `-1 / A(z)` for `A(z) = -1 + Σ_{j>=1} tail[j-1] z^j`
/// with non-negative integer `tail`, in exact arithmetic.
///
/// Every coefficient is non-negative; returns `None` on `u128` overflow.
pub fn neg_reciprocal_exact(tail: &[u128], n: usize) -> Option<Vec<u128>> {
    let mut b: Vec<u128> = Vec::with_capacity(n);
    for k in 0..n {
        if k == 0 {
            b.push(1);
            continue;
        }
        let mut s: u128 = 0;
        for j in 1..=k.min(tail.len()) {
            s = s.checked_add(tail[j - 1].checked_mul(b[k - j])?)?;
        }
        b.push(s);
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series() {
        // 1 / (1 - z) = 1 + z + z^2 + ...
        assert_eq!(reciprocal(&[1.0, -1.0], 5).unwrap(), vec![1.0; 5]);
        assert!(reciprocal(&[0.0, 1.0], 3).is_none());
        assert!(reciprocal(&[], 3).is_none());
    }

    #[test]
    fn doubling() {
        // -1 / (-1 + 2z) = Σ 2^k z^k
        assert_eq!(neg_reciprocal_exact(&[2], 5).unwrap(), vec![1, 2, 4, 8, 16]);
        let f = reciprocal(&[-1.0, 2.0], 5).unwrap();
        assert_eq!(f, vec![-1.0, -2.0, -4.0, -8.0, -16.0]);
    }

    #[test]
    fn overflow_detected() {
        assert!(neg_reciprocal_exact(&[u128::MAX / 2], 4).is_none());
    }

    #[test]
    fn product_is_identity() {
        let a = [3.0, -1.5, 0.25, 2.0];
        let b = reciprocal(&a, 12).unwrap();
        for k in 0..12 {
            let c: f64 = (0..=k)
                .filter(|&j| j < a.len())
                .map(|j| a[j] * b[k - j])
                .sum();
            let expected = if k == 0 { 1.0 } else { 0.0 };
            assert!((c - expected).abs() < 1e-9, "k={k} c={c}");
        }
    }
}
