//! Tokunaga side-branching sequences and the Horton exponent.
//!
//! A sequence `T_1, T_2, ...` of non-negative reals fixes the generating
//! function `t̂(z) = -1 + 2z + Σ_k T_k z^k`. Its unique zero `w0` in
//! `(0, 1/2]` gives the Horton exponent `R = 1 / w0`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Bisection step budget; enough to reach adjacent floats on `(0, 1/2]`.
const MAX_BISECTIONS: usize = 200;
const SCAN_STEPS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum TokunagaSequence {
    /// `T_k = a c^(k-1)`.
    Geometric { a: f64, c: f64 },
    /// `T_1, T_2`, then zeros.
    Shallow { t1: f64, t2: f64 },
    /// `T_k = a k c^(k-1)`.
    Differentiated { a: f64, c: f64 },
    /// `T_1..T_m` as listed, zero afterwards.
    Explicit { terms: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootMethod {
    ClosedForm,
    Bisection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentResult {
    pub w0: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub method: RootMethod,
    /// `|t̂(w0)|`.
    pub residual: f64,
}

impl TokunagaSequence {
    pub fn geometric(a: f64, c: f64) -> Result<Self> {
        let s = Self::Geometric { a, c };
        s.validate()?;
        Ok(s)
    }

    pub fn shallow(t1: f64, t2: f64) -> Result<Self> {
        let s = Self::Shallow { t1, t2 };
        s.validate()?;
        Ok(s)
    }

    pub fn differentiated(a: f64, c: f64) -> Result<Self> {
        let s = Self::Differentiated { a, c };
        s.validate()?;
        Ok(s)
    }

    pub fn explicit(terms: Vec<f64>) -> Result<Self> {
        let s = Self::Explicit { terms };
        s.validate()?;
        Ok(s)
    }

    /// No side-branching at all.
    pub fn none() -> Self {
        Self::Explicit { terms: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::NegativeParam(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        let non_negative = |name: String, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::NegativeParam(format!(
                    "{name} must be non-negative, got {v}"
                )))
            }
        };
        match self {
            Self::Geometric { a, c } | Self::Differentiated { a, c } => {
                positive("a", *a)?;
                positive("c", *c)
            }
            Self::Shallow { t1, t2 } => {
                non_negative("T1".into(), *t1)?;
                non_negative("T2".into(), *t2)
            }
            Self::Explicit { terms } => terms
                .iter()
                .enumerate()
                .try_for_each(|(i, &t)| non_negative(format!("T{}", i + 1), t)),
        }
    }

    /// `T_k` for `k >= 1`; zero for `k == 0`.
    pub fn term(&self, k: u32) -> f64 {
        if k == 0 {
            return 0.0;
        }
        match self {
            Self::Geometric { a, c } => a * c.powi(k as i32 - 1),
            Self::Differentiated { a, c } => a * k as f64 * c.powi(k as i32 - 1),
            Self::Shallow { t1, t2 } => match k {
                1 => *t1,
                2 => *t2,
                _ => 0.0,
            },
            Self::Explicit { terms } => terms.get(k as usize - 1).copied().unwrap_or(0.0),
        }
    }

    /// `limsup T_k^(1/k)`; zero for finitely supported sequences.
    pub fn growth_rate(&self) -> f64 {
        match self {
            Self::Geometric { c, .. } | Self::Differentiated { c, .. } => *c,
            Self::Shallow { .. } | Self::Explicit { .. } => 0.0,
        }
    }

    /// Radius of convergence of `t̂`, `None` when it is a polynomial.
    pub fn radius(&self) -> Option<f64> {
        match self {
            Self::Geometric { c, .. } | Self::Differentiated { c, .. } => Some(1.0 / c),
            _ => None,
        }
    }

    /// Coefficients `t(0..=n)` of `t̂`: `-1`, `T_1 + 2`, `T_2`, `T_3`, ...
    pub fn coefficients(&self, n: usize) -> Vec<f64> {
        (0..=n)
            .map(|j| match j {
                0 => -1.0,
                1 => self.term(1) + 2.0,
                _ => self.term(j as u32),
            })
            .collect()
    }

    /// Terms as integers when every `T_k` with `k <= n` is a non-negative integer.
    pub fn integer_terms(&self, n: usize) -> Result<Vec<u128>> {
        (1..=n as u32)
            .map(|k| {
                let v = self.term(k);
                if v.fract() == 0.0 && v >= 0.0 && v < u128::MAX as f64 {
                    Ok(v as u128)
                } else {
                    Err(Error::NonIntegerSequence { k, value: v })
                }
            })
            .collect()
    }

    /// `t̂(z)` from the family's closed form.
    pub fn t_hat(&self, z: f64) -> Result<f64> {
        if let Some(radius) = self.radius() {
            if z.abs() >= radius {
                return Err(Error::OutOfDomain { z, radius });
            }
        }
        Ok(match self {
            Self::Geometric { a, c } => -1.0 + 2.0 * z + a * z / (1.0 - c * z),
            Self::Differentiated { a, c } => {
                let d = 1.0 - c * z;
                -1.0 + 2.0 * z + a * z / (d * d)
            }
            Self::Shallow { t1, t2 } => -1.0 + (t1 + 2.0) * z + t2 * z * z,
            Self::Explicit { terms } => {
                let mut coeffs = Vec::with_capacity(terms.len() + 2);
                coeffs.push(-1.0);
                coeffs.push(2.0 + terms.first().copied().unwrap_or(0.0));
                coeffs.extend(terms.iter().skip(1));
                horner(&coeffs, z)
            }
        })
    }

    /// Horton exponent, using closed forms where the family has one.
    ///
    /// `tol` bounds the final bisection bracket width; bisection always runs
    /// to adjacent floats, so any positive `tol` down to `1e-15` is met.
    pub fn horton_exponent(&self, tol: f64) -> Result<ExponentResult> {
        self.validate()?;
        check_tol(tol)?;
        let closed = match self {
            Self::Geometric { a, c } => Some(geometric_roots(*a, *c)?.1),
            Self::Shallow { t1, t2 } => Some(shallow_root(*t1, *t2)),
            Self::Explicit { terms } if terms.iter().skip(2).all(|&t| t == 0.0) => {
                Some(shallow_root(
                    terms.first().copied().unwrap_or(0.0),
                    terms.get(1).copied().unwrap_or(0.0),
                ))
            }
            _ => None,
        };
        if let Some(w0) = closed {
            return self.result(w0, RootMethod::ClosedForm);
        }
        let w0 = match self {
            Self::Differentiated { a, c } => {
                let cubic = differentiated_cubic(*a, *c)?;
                let upper = 0.5f64.min(1.0 / c);
                bisect_scanned(|z| Ok(horner_desc(&cubic, z)), upper, false)?
            }
            _ => return self.horton_exponent_bisection(tol),
        };
        self.result(w0, RootMethod::Bisection)
    }

    /// Horton exponent by bracketing and bisecting `t̂` directly, ignoring
    /// any closed form.
    pub fn horton_exponent_bisection(&self, tol: f64) -> Result<ExponentResult> {
        self.validate()?;
        check_tol(tol)?;
        let (upper, open) = match self.radius() {
            Some(r) if r <= 0.5 => (r, true),
            _ => (0.5, false),
        };
        let w0 = bisect_scanned(|z| self.t_hat(z), upper, open)?;
        self.result(w0, RootMethod::Bisection)
    }

    fn result(&self, w0: f64, method: RootMethod) -> Result<ExponentResult> {
        Ok(ExponentResult {
            w0,
            r: 1.0 / w0,
            method,
            residual: self.t_hat(w0)?.abs(),
        })
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "tolerance must be positive, got {tol}"
        )))
    }
}

/// Zero of `-1 + (t1 + 2) z + t2 z^2` in `(0, 1/2]`, written in the
/// cancellation-free form `2 / (b + sqrt(b^2 + 4 t2))`; reduces to
/// `1 / (t1 + 2)` when `t2 == 0`.
fn shallow_root(t1: f64, t2: f64) -> f64 {
    let b = t1 + 2.0;
    2.0 / (b + (b * b + 4.0 * t2).sqrt())
}

/// Both positive roots `p1 > p2` of `1 - (a + c + 2) z + 2 c z^2`.
pub fn geometric_roots(a: f64, c: f64) -> Result<(f64, f64)> {
    TokunagaSequence::Geometric { a, c }.validate()?;
    let s = a + c + 2.0;
    let big = s + (s * s - 8.0 * c).sqrt();
    Ok((big / (4.0 * c), 2.0 / big))
}

/// Coefficients of `2c^2 z^3 - c(c+4) z^2 + (a+2c+2) z - 1`, highest degree first.
pub fn differentiated_cubic(a: f64, c: f64) -> Result<[f64; 4]> {
    TokunagaSequence::Differentiated { a, c }.validate()?;
    Ok([2.0 * c * c, -c * (c + 4.0), a + 2.0 * c + 2.0, -1.0])
}

/// Polynomial with coefficients in ascending degree.
pub(crate) fn horner(coeffs: &[f64], z: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
}

fn horner_desc(coeffs: &[f64], z: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * z + c)
}

/// Zero of an increasing `f` with `f(0) < 0` on `(0, upper]`.
///
/// Scans `upper / 64, 2 upper / 64, ...` for the first non-negative value and
/// bisects the last sign change until the bracket stops shrinking (adjacent
/// floats). With `open == true` the endpoint is a pole and is approached
/// geometrically instead of evaluated.
fn bisect_scanned<F>(f: F, upper: f64, open: bool) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let step = upper / SCAN_STEPS as f64;
    let mut lo = 0.0;
    let mut hi = None;
    let last = if open { SCAN_STEPS - 1 } else { SCAN_STEPS };
    for i in 1..=last {
        let z = if i == SCAN_STEPS {
            upper
        } else {
            step * i as f64
        };
        if f(z)? >= 0.0 {
            hi = Some(z);
            break;
        }
        lo = z;
    }
    if hi.is_none() && open {
        for m in 7..=52 {
            let z = upper * (1.0 - 0.5f64.powi(m));
            if z <= lo {
                continue;
            }
            if f(z)? >= 0.0 {
                hi = Some(z);
                break;
            }
            lo = z;
        }
    }
    let mut hi = hi.ok_or(Error::NoRootInDomain { bound: upper })?;
    let mut f_hi = f(hi)?;
    if f_hi == 0.0 {
        return Ok(hi);
    }
    let mut f_lo = f(lo)?;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid < 0.0 {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    Ok(if f_hi.abs() <= f_lo.abs() { hi } else { lo })
}
