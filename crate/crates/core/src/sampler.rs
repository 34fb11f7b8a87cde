//! Independent Random Attachment trees and Monte Carlo Horton statistics.
//!
//! A tree of order `K` is grown from a single vertex in `K - 1` stages. Each
//! stage gives every leaf two children, which raises every vertex order by
//! one, and then attaches new leaves to every branch of order `j >= 2` as
//! order-1 side-branches. The number attached to an order-`j` branch is drawn
//! with mean `T_{j-1}` and each new leaf picks one of the branch's `s + 1`
//! edges uniformly, `s` being the side-branches the branch already carries.
//! The top edge of the root branch is the imaginary edge above the root.
//!
//! Every sample owns a ChaCha stream selected by its index, so results are
//! identical for any thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric, Poisson};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::tokunaga::TokunagaSequence;
use crate::tree::{horton_statistics, prune, BinaryTree, HortonStatistics, Node};

pub const DEFAULT_MAX_NODES: usize = 10_000_000;

const NONE: u32 = u32::MAX;

/// Law of the number of side-branches attached to a branch; each option is
/// parameterized so that its mean is the Tokunaga coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SideBranchDistribution {
    #[default]
    Poisson,
    /// Failures before the first success, on `{0, 1, 2, ...}`.
    Geometric,
    /// Always exactly the mean; needs integer coefficients.
    Deterministic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplerConfig {
    pub seq: TokunagaSequence,
    #[serde(rename = "K")]
    pub order: u32,
    pub distribution: SideBranchDistribution,
    pub seed: u64,
    pub samples: u64,
    pub max_nodes: usize,
}

impl SamplerConfig {
    pub fn new(seq: TokunagaSequence, order: u32, samples: u64, seed: u64) -> Self {
        Self {
            seq,
            order,
            distribution: SideBranchDistribution::default(),
            seed,
            samples,
            max_nodes: DEFAULT_MAX_NODES,
        }
    }

    pub fn with_distribution(mut self, distribution: SideBranchDistribution) -> Self {
        self.distribution = distribution;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 1 {
            return Err(Error::NonPositiveOrder {
                min: 1,
                got: self.order,
            });
        }
        if self.samples < 1 {
            return Err(Error::InvalidConfig("samples must be at least 1".into()));
        }
        if self.max_nodes > NONE as usize {
            return Err(Error::InvalidConfig(format!(
                "max_nodes must not exceed {}",
                NONE
            )));
        }
        self.seq.validate()?;
        Drawers::new(self).map(|_| ())
    }
}

/// One side-branch count law per order gap `1..K`.
struct Drawers {
    laws: Vec<Law>,
}

enum Law {
    Zero,
    Poisson(Poisson<f64>),
    Geometric(Geometric),
    Fixed(u64),
}

impl Drawers {
    fn new(config: &SamplerConfig) -> Result<Self> {
        let laws = (1..config.order)
            .map(|k| {
                let mean = config.seq.term(k);
                if mean == 0.0 {
                    return Ok(Law::Zero);
                }
                let bad = |what: &str| {
                    Error::InvalidConfig(format!(
                        "cannot build {what} law with mean T_{k} = {mean}"
                    ))
                };
                Ok(match config.distribution {
                    SideBranchDistribution::Poisson => {
                        Law::Poisson(Poisson::new(mean).map_err(|_| bad("Poisson"))?)
                    }
                    SideBranchDistribution::Geometric => Law::Geometric(
                        Geometric::new(1.0 / (1.0 + mean)).map_err(|_| bad("geometric"))?,
                    ),
                    SideBranchDistribution::Deterministic => {
                        if mean.fract() != 0.0 || mean > u64::MAX as f64 {
                            return Err(Error::NonIntegerMean { k, mean });
                        }
                        Law::Fixed(mean as u64)
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { laws })
    }

    /// Draw for a branch of order `j >= 2`, i.e. mean `T_{j-1}`.
    fn draw<R: Rng>(&self, j: u32, rng: &mut R) -> u64 {
        match &self.laws[j as usize - 2] {
            Law::Zero => 0,
            Law::Poisson(p) => p.sample(rng) as u64,
            Law::Geometric(g) => g.sample(rng),
            Law::Fixed(n) => *n,
        }
    }
}

/// Mutable arena used while growing a tree.
struct Grower {
    parent: Vec<u32>,
    kids: Vec<[u32; 2]>,
    order: Vec<u32>,
    root: u32,
    max_nodes: usize,
}

impl Grower {
    fn new(max_nodes: usize) -> Self {
        Self {
            parent: vec![NONE],
            kids: vec![[NONE; 2]],
            order: vec![1],
            root: 0,
            max_nodes,
        }
    }

    fn reserve(&self, extra: u64) -> Result<()> {
        let total = (self.parent.len() as u64).saturating_add(extra);
        if total > self.max_nodes as u64 {
            Err(Error::TreeTooLarge {
                limit: self.max_nodes,
            })
        } else {
            Ok(())
        }
    }

    fn push(&mut self, parent: u32, kids: [u32; 2], order: u32) -> u32 {
        self.parent.push(parent);
        self.kids.push(kids);
        self.order.push(order);
        (self.parent.len() - 1) as u32
    }

    /// Gives two children to every leaf; all existing orders go up by one.
    fn split_leaves(&mut self) -> Result<()> {
        let leaves: Vec<u32> = (0..self.kids.len() as u32)
            .filter(|&v| self.kids[v as usize][0] == NONE)
            .collect();
        self.reserve(2 * leaves.len() as u64)?;
        self.order.iter_mut().for_each(|o| *o += 1);
        for v in leaves {
            let l = self.push(v, [NONE; 2], 1);
            let r = self.push(v, [NONE; 2], 1);
            self.kids[v as usize] = [l, r];
        }
        Ok(())
    }

    /// Vertices from the bottom of the branch containing `v` up to its top.
    fn chain_from(&self, bottom: u32) -> Vec<u32> {
        let mut chain = vec![bottom];
        let mut v = bottom;
        loop {
            let p = self.parent[v as usize];
            if p == NONE || self.order[p as usize] != self.order[v as usize] {
                return chain;
            }
            chain.push(p);
            v = p;
        }
    }

    /// Subdivides the parental edge of `u` (imaginary for the root) and
    /// hangs a new leaf from the new vertex.
    fn attach_above<R: Rng>(&mut self, u: u32, rng: &mut R) {
        let p = self.parent[u as usize];
        let w = self.push(p, [NONE; 2], self.order[u as usize]);
        let leaf = self.push(w, [NONE; 2], 1);
        self.kids[w as usize] = if rng.random::<bool>() {
            [u, leaf]
        } else {
            [leaf, u]
        };
        self.parent[u as usize] = w;
        if p == NONE {
            self.root = w;
        } else {
            let slot = &mut self.kids[p as usize];
            if slot[0] == u {
                slot[0] = w;
            } else {
                slot[1] = w;
            }
        }
    }

    fn attach_side_branches<R: Rng>(&mut self, drawers: &Drawers, rng: &mut R) -> Result<()> {
        // Branch bottoms: vertices whose children share an order.
        let bottoms: Vec<u32> = (0..self.kids.len() as u32)
            .filter(|&v| {
                let [l, r] = self.kids[v as usize];
                l != NONE && self.order[l as usize] == self.order[r as usize]
            })
            .collect();
        for bottom in bottoms {
            let j = self.order[bottom as usize];
            let n = drawers.draw(j, rng);
            if n == 0 {
                continue;
            }
            self.reserve(n.saturating_mul(2))?;
            let gaps = self.chain_from(bottom);
            for _ in 0..n {
                let u = gaps[rng.random_range(0..gaps.len())];
                self.attach_above(u, rng);
            }
        }
        Ok(())
    }

    fn into_tree(self) -> BinaryTree {
        let mut nodes: Vec<Node> = Vec::with_capacity(self.parent.len());
        let mut stack = vec![(self.root, None::<usize>, false)];
        while let Some((v, parent, right)) = stack.pop() {
            let out = nodes.len();
            nodes.push(Node {
                parent,
                children: None,
                label: None,
            });
            if let Some(p) = parent {
                let slot = nodes[p].children.get_or_insert((usize::MAX, usize::MAX));
                if right {
                    slot.1 = out;
                } else {
                    slot.0 = out;
                }
            }
            let [l, r] = self.kids[v as usize];
            if l != NONE {
                stack.push((r, Some(out), true));
                stack.push((l, Some(out), false));
            }
        }
        BinaryTree {
            nodes,
            root: Some(0),
        }
    }
}

fn sample_with(config: &SamplerConfig, drawers: &Drawers, sample_index: u64) -> Result<BinaryTree> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(sample_index);
    let mut g = Grower::new(config.max_nodes);
    for _ in 2..=config.order {
        g.split_leaves()?;
        g.attach_side_branches(drawers, &mut rng)?;
    }
    Ok(g.into_tree())
}

/// Tree number `sample_index` of the ensemble described by `config`.
pub fn sample_tree(config: &SamplerConfig, sample_index: u64) -> Result<BinaryTree> {
    config.validate()?;
    let drawers = Drawers::new(config)?;
    sample_with(config, &drawers, sample_index)
}

/// All `config.samples` trees in index order.
pub fn sample_trees(config: &SamplerConfig, exec: Execution) -> Result<Vec<BinaryTree>> {
    config.validate()?;
    let drawers = Drawers::new(config)?;
    exec::map_collect(config.samples, exec, |i| sample_with(config, &drawers, i))
}

/// Exact integer power sums of per-tree statistics, so any reduction order
/// gives the same totals.
#[derive(Debug, Clone, PartialEq)]
struct Moments {
    order: usize,
    n: u64,
    /// Per order k: (Σ N_k, Σ N_k²).
    branches: Vec<[u128; 2]>,
    /// Per pair (i, j), flattened as `(i-1) * K + (j-1)`: (Σ N_ij, Σ N_ij², Σ N_ij N_j).
    pairs: Vec<[u128; 3]>,
}

impl Moments {
    fn zero(order: u32) -> Self {
        let k = order as usize;
        Self {
            order: k,
            n: 0,
            branches: vec![[0; 2]; k],
            pairs: vec![[0; 3]; k * k],
        }
    }

    fn of(stats: &HortonStatistics, order: u32) -> Self {
        let mut m = Self::zero(order);
        m.n = 1;
        for (slot, &nk) in m.branches.iter_mut().zip(&stats.branch_counts) {
            let x = nk as u128;
            *slot = [x, x * x];
        }
        for (&(i, j), &nij) in &stats.side_branch_counts {
            if j as usize > m.order {
                continue;
            }
            let x = nij as u128;
            let nj = stats.branches(j) as u128;
            m.pairs[(i as usize - 1) * m.order + (j as usize - 1)] = [x, x * x, x * nj];
        }
        m
    }

    fn merge(mut self, other: Self) -> Self {
        self.n += other.n;
        for (a, b) in self.branches.iter_mut().zip(&other.branches) {
            a[0] += b[0];
            a[1] += b[1];
        }
        for (a, b) in self.pairs.iter_mut().zip(&other.pairs) {
            a[0] += b[0];
            a[1] += b[1];
            a[2] += b[2];
        }
        self
    }

    fn mean(&self, sum: u128) -> f64 {
        sum as f64 / self.n as f64
    }

    /// Unbiased sample covariance from exact sums.
    fn cov(&self, sum_x: u128, sum_y: u128, sum_xy: u128) -> f64 {
        if self.n < 2 {
            return f64::NAN;
        }
        let n = self.n as i128;
        let num = n * sum_xy as i128 - sum_x as i128 * sum_y as i128;
        num as f64 / (n * (n - 1)) as f64
    }

    fn report(&self, order: u32) -> SimulationReport {
        let k = self.order;
        let root_n = (self.n as f64).sqrt();
        let mean_nk: Vec<Estimate> = self
            .branches
            .iter()
            .map(|&[s, s2]| Estimate {
                mean: self.mean(s),
                se: self.cov(s, s, s2).max(0.0).sqrt() / root_n,
            })
            .collect();
        let mut pairs = Vec::new();
        for i in 1..=k {
            for j in i + 1..=k {
                let [s, s2, cross] = self.pairs[(i - 1) * k + (j - 1)];
                let [sj, sj2] = self.branches[j - 1];
                let mean = self.mean(s);
                let mean_j = self.mean(sj);
                let t_hat = mean / mean_j;
                // Delta method for a ratio of means.
                let var_d = self.cov(s, s, s2) - 2.0 * t_hat * self.cov(s, sj, cross)
                    + t_hat * t_hat * self.cov(sj, sj, sj2);
                pairs.push(PairEstimate {
                    i: i as u32,
                    j: j as u32,
                    mean,
                    se: self.cov(s, s, s2).max(0.0).sqrt() / root_n,
                    t_hat,
                    t_hat_se: var_d.max(0.0).sqrt() / root_n / mean_j,
                });
            }
        }
        SimulationReport {
            order,
            samples: self.n,
            mean_nk,
            pairs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(samples)`; NaN for one sample.
    pub se: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairEstimate {
    pub i: u32,
    pub j: u32,
    /// Mean of `N_ij`.
    pub mean: f64,
    pub se: f64,
    /// `mean N_ij / mean N_j`.
    pub t_hat: f64,
    pub t_hat_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    #[serde(rename = "K")]
    pub order: u32,
    pub samples: u64,
    /// `mean_nk[k-1]` estimates the expected number of order-k branches.
    pub mean_nk: Vec<Estimate>,
    /// Every pair `1 <= i < j <= K`, ordered by `i` then `j`.
    pub pairs: Vec<PairEstimate>,
}

impl SimulationReport {
    pub fn branches(&self, k: u32) -> Option<&Estimate> {
        self.mean_nk.get((k as usize).checked_sub(1)?)
    }

    pub fn pair(&self, i: u32, j: u32) -> Option<&PairEstimate> {
        self.pairs.iter().find(|p| p.i == i && p.j == j)
    }
}

/// Monte Carlo means of `N_k`, `N_ij` and `T_ij = N_ij / N_j`.
pub fn estimate(config: &SamplerConfig, exec: Execution) -> Result<SimulationReport> {
    config.validate()?;
    let drawers = Drawers::new(config)?;
    let order = config.order;
    let moments = exec::map_reduce(
        config.samples,
        exec,
        || Moments::zero(order),
        |i| {
            let t = sample_with(config, &drawers, i)?;
            Ok(Moments::of(&horton_statistics(&t)?, order))
        },
        Moments::merge,
    )?;
    Ok(moments.report(order))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairComparison {
    pub i: u32,
    pub j: u32,
    pub t_hat_pruned: f64,
    pub se_pruned: f64,
    pub t_hat_direct: f64,
    pub se_direct: f64,
    pub t_theory: f64,
    /// `|pruned - direct|` in combined standard errors.
    pub z_direct: f64,
    /// `|pruned - theory|` in pruned-ensemble standard errors.
    pub z_theory: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PruneInvarianceReport {
    #[serde(rename = "K")]
    pub order: u32,
    pub samples: u64,
    /// Sampled order-(K+1) trees whose pruned statistics are not an exact
    /// index shift of their own.
    pub identity_violations: u64,
    pub pairs: Vec<PairComparison>,
    pub max_discrepancy_se: f64,
    pub max_theory_discrepancy_se: f64,
}

fn z_score(diff: f64, se: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else if se > 0.0 {
        diff.abs() / se
    } else {
        f64::INFINITY
    }
}

/// True when pruning shifted every branch and side-branch count down by one order.
pub fn shift_identities_hold(before: &HortonStatistics, after: &HortonStatistics) -> bool {
    if before.order < 2 || after.order + 1 != before.order {
        return false;
    }
    let branches = (2..=before.order).all(|k| before.branches(k) == after.branches(k - 1));
    let forward = before
        .side_branch_counts
        .iter()
        .filter(|(&(i, _), _)| i >= 2)
        .all(|(&(i, j), &n)| after.side_branches(i - 1, j - 1) == n);
    let backward = after
        .side_branch_counts
        .iter()
        .all(|(&(i, j), &n)| before.side_branches(i + 1, j + 1) == n);
    branches && forward && backward
}

/// Seed of the order-(K+1) ensemble; ChaCha seeds derived from distinct
/// `u64`s give unrelated streams.
fn lifted_seed(seed: u64) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15
}

/// Compares Tokunaga estimates of pruned order-(K+1) trees with a directly
/// sampled order-K ensemble and with the generating sequence.
pub fn prune_invariance_check(
    config: &SamplerConfig,
    exec: Execution,
) -> Result<PruneInvarianceReport> {
    if config.order < 3 {
        return Err(Error::NonPositiveOrder {
            min: 3,
            got: config.order,
        });
    }
    let direct = estimate(config, exec)?;
    let mut lifted = config.clone();
    lifted.order += 1;
    lifted.seed = lifted_seed(config.seed);
    lifted.validate()?;
    let drawers = Drawers::new(&lifted)?;
    let order = config.order;
    let (moments, violations) = exec::map_reduce(
        lifted.samples,
        exec,
        || (Moments::zero(order), 0u64),
        |i| {
            let t = sample_with(&lifted, &drawers, i)?;
            let before = horton_statistics(&t)?;
            let after = horton_statistics(&prune(&t))?;
            let bad = u64::from(!shift_identities_hold(&before, &after));
            Ok((Moments::of(&after, order), bad))
        },
        |(a, x), (b, y)| (a.merge(b), x + y),
    )?;
    let pruned = moments.report(order);
    let pairs: Vec<PairComparison> = pruned
        .pairs
        .iter()
        .zip(&direct.pairs)
        .map(|(p, d)| {
            let t_theory = config.seq.term(p.j - p.i);
            PairComparison {
                i: p.i,
                j: p.j,
                t_hat_pruned: p.t_hat,
                se_pruned: p.t_hat_se,
                t_hat_direct: d.t_hat,
                se_direct: d.t_hat_se,
                t_theory,
                z_direct: z_score(p.t_hat - d.t_hat, p.t_hat_se.hypot(d.t_hat_se)),
                z_theory: z_score(p.t_hat - t_theory, p.t_hat_se),
            }
        })
        .collect();
    let max = |f: fn(&PairComparison) -> f64| pairs.iter().map(f).fold(0.0, f64::max);
    Ok(PruneInvarianceReport {
        order,
        samples: config.samples,
        identity_violations: violations,
        max_discrepancy_se: max(|p| p.z_direct),
        max_theory_discrepancy_se: max(|p| p.z_theory),
        pairs,
    })
}
