//! Expected Horton numbers of mean self-similar trees.
//!
//! For a Tokunaga sequence `T_k` the expected branch counts of an order-`K`
//! tree satisfy `N_k = 2 N_{k+1} + Σ_{j=1}^{K-k} T_j N_{k+j}` with
//! `N_K = 1`. [`zeta_by_recursion`] solves this triangular system from the
//! top down; [`zeta1_by_series`] gets `N_1` for every `K` at once as the
//! coefficients of `-1 / t̂(z)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::series;
use crate::tokunaga::TokunagaSequence;

/// Relative fluctuation above which a ratio tail counts as not converging.
pub const DIVERGENCE_THRESHOLD: f64 = 1e-3;
/// Number of trailing ratios inspected by the divergence check.
pub const DIVERGENCE_WINDOW: usize = 5;

/// Expected branch counts `zeta[k-1] = N_k[K]` and their normalization
/// `xi[k-1] = N_k[K] / N_1[K]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZetaTable {
    #[serde(rename = "K")]
    pub order: u32,
    pub zeta: Vec<f64>,
    pub xi: Vec<f64>,
}

impl ZetaTable {
    fn new(order: u32, zeta: Vec<f64>) -> Self {
        let first = zeta[0];
        let xi = zeta.iter().map(|z| z / first).collect();
        Self { order, zeta, xi }
    }
}

fn require_order(k: u32, min: u32) -> Result<()> {
    if k < min {
        Err(Error::NonPositiveOrder { min, got: k })
    } else {
        Ok(())
    }
}

pub fn zeta_by_recursion(seq: &TokunagaSequence, order: u32) -> Result<ZetaTable> {
    require_order(order, 1)?;
    seq.validate()?;
    let n = order as usize;
    let terms: Vec<f64> = (1..n as u32).map(|j| seq.term(j)).collect();
    let mut zeta = vec![0.0; n];
    zeta[n - 1] = 1.0;
    for k in (0..n - 1).rev() {
        let side: f64 = (1..n - k).map(|j| terms[j - 1] * zeta[k + j]).sum();
        let v = 2.0 * zeta[k + 1] + side;
        if !v.is_finite() {
            return Err(Error::Overflow { order });
        }
        zeta[k] = v;
    }
    Ok(ZetaTable::new(order, zeta))
}

/// Integer version of [`zeta_by_recursion`]; needs integer `T_j`.
pub fn zeta_by_recursion_exact(seq: &TokunagaSequence, order: u32) -> Result<Vec<u128>> {
    require_order(order, 1)?;
    seq.validate()?;
    let n = order as usize;
    let terms = seq.integer_terms(n - 1)?;
    let mut zeta = vec![0u128; n];
    zeta[n - 1] = 1;
    for k in (0..n - 1).rev() {
        let mut v = zeta[k + 1].checked_mul(2);
        for j in 1..n - k {
            v = v.and_then(|acc| {
                terms[j - 1]
                    .checked_mul(zeta[k + j])
                    .and_then(|x| acc.checked_add(x))
            });
        }
        zeta[k] = v.ok_or(Error::Overflow { order })?;
    }
    Ok(zeta)
}

/// `N_1[K]` for `K = 1..=k_max` (index `K - 1`) as coefficients of `-1 / t̂(z)`.
pub fn zeta1_by_series(seq: &TokunagaSequence, k_max: u32) -> Result<Vec<f64>> {
    require_order(k_max, 1)?;
    seq.validate()?;
    let n = k_max as usize;
    // Coefficient K-1 of the reciprocal only needs t(0..=K-1).
    let coeffs = seq.coefficients(n - 1);
    let recip = series::reciprocal(&coeffs, n).expect("t(0) = -1");
    recip
        .into_iter()
        .enumerate()
        .map(|(i, b)| {
            if b.is_finite() {
                Ok(-b)
            } else {
                Err(Error::Overflow {
                    order: i as u32 + 1,
                })
            }
        })
        .collect()
}

/// Integer version of [`zeta1_by_series`]; needs integer `T_j`.
pub fn zeta1_by_series_exact(seq: &TokunagaSequence, k_max: u32) -> Result<Vec<u128>> {
    require_order(k_max, 1)?;
    seq.validate()?;
    let n = k_max as usize;
    let mut tail = seq.integer_terms(n.saturating_sub(1))?;
    if let Some(t1) = tail.first_mut() {
        *t1 += 2;
    } else {
        tail.push(2);
    }
    series::neg_reciprocal_exact(&tail, n).ok_or(Error::Overflow { order: k_max })
}

/// `N_1[K + 1]` for the geometric family, from the partial-fraction expansion
/// of `-1 / t̂` around its two real poles.
pub fn zeta1_geometric_closed_form(a: f64, c: f64, k: u32) -> Result<f64> {
    let (p1, p2) = crate::tokunaga::geometric_roots(a, c)?;
    let e = k as i32 + 1;
    let v = ((1.0 - c * p2) / p2.powi(e) - (1.0 - c * p1) / p1.powi(e)) / (2.0 * c * (p1 - p2));
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow { order: k + 1 })
    }
}

/// Checks `N_{j+1}[K+1] == N_j[K]` for all `1 <= j <= K < k_max`, to a relative
/// tolerance of `1e-12`.
pub fn check_shift_property(seq: &TokunagaSequence, k_max: u32) -> Result<bool> {
    require_order(k_max, 2)?;
    let mut prev = zeta_by_recursion(seq, 1)?;
    for order in 2..=k_max {
        let next = zeta_by_recursion(seq, order)?;
        let shifted = &next.zeta[1..];
        let holds = shifted
            .iter()
            .zip(&prev.zeta)
            .all(|(a, b)| (a - b).abs() <= 1e-12 * b.abs());
        if !holds {
            return Ok(false);
        }
        prev = next;
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    /// Last ratio `N_1[Kmax] / N_1[Kmax - 1]`.
    pub r_estimate: f64,
    /// `1 / w0` from the generating function, when it has a root.
    pub r_theory: Option<f64>,
    /// `(j, |xi_Kmax(j) - R^(1-j)|)` for `j = 1..=jmax`, against `r_theory`
    /// when available and `r_estimate` otherwise.
    pub per_j_errors: Vec<(u32, f64)>,
    /// `N_1[K+1] / N_1[K]` for `K = 1..Kmax-1` (index `K - 1`).
    pub ratio_sequence: Vec<f64>,
    /// No convergence detected up to `Kmax`: the last ratios fluctuate by
    /// more than [`DIVERGENCE_THRESHOLD`] relative to the final one.
    pub diverged: bool,
}

pub fn verify_strong_horton(
    seq: &TokunagaSequence,
    k_max: u32,
    j_max: u32,
) -> Result<ConvergenceReport> {
    require_order(j_max, 2)?;
    if k_max < j_max {
        return Err(Error::InvalidConfig(format!(
            "Kmax ({k_max}) must be at least jmax ({j_max})"
        )));
    }
    let first = zeta1_by_series(seq, k_max)?;
    let ratio_sequence: Vec<f64> = first.windows(2).map(|w| w[1] / w[0]).collect();
    let r_estimate = *ratio_sequence.last().expect("k_max >= 2");
    let r_theory = seq.horton_exponent(1e-12).ok().map(|e| e.r);
    let r = r_theory.unwrap_or(r_estimate);
    let table = zeta_by_recursion(seq, k_max)?;
    let per_j_errors = (1..=j_max)
        .map(|j| {
            let predicted = r.powi(1 - j as i32);
            (j, (table.xi[j as usize - 1] - predicted).abs())
        })
        .collect();
    let tail = &ratio_sequence[ratio_sequence.len().saturating_sub(DIVERGENCE_WINDOW)..];
    let fluctuation = tail
        .iter()
        .map(|x| (x - r_estimate).abs() / r_estimate)
        .fold(0.0, f64::max);
    Ok(ConvergenceReport {
        r_estimate,
        r_theory,
        per_j_errors,
        ratio_sequence,
        diverged: fluctuation > DIVERGENCE_THRESHOLD,
    })
}
