//! The auxiliary function `f(x) = x - sum c_j ln|Q_j(x)|`: evaluation,
//! certified global minimization and the rational rewrite.

mod minimize;
mod rational;

use serde::Serialize;
use thiserror::Error;

use crate::intpoly::{comp_horner, IntPoly, UNIT_ROUNDOFF};

pub use minimize::{global_min, local_minima, Argmin, MinimizationReport};
pub use rational::{rationalize, weighted_sup, Rationalized, WeightedSup};

/// Default tolerance on the minimum.
pub const DEFAULT_TOL: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AuxError {
    #[error("auxiliary function has no terms")]
    Empty,
    #[error("weight {weight} of term {index} is negative or not finite")]
    BadWeight { index: usize, weight: f64 },
    #[error("polynomial of term {0} is zero")]
    ZeroPoly(usize),
    #[error("terms {0} and {1} have the same polynomial")]
    Duplicate(usize, usize),
    #[error("x = {0} is not a positive real")]
    NonPositive(f64),
    #[error("tolerance {0} must be positive")]
    BadTolerance(f64),
    #[error("function is unbounded below near the origin")]
    DivergentAtOrigin,
    #[error("tail cutoff too small: bound {bound} at A = {cutoff} is below m = {m}")]
    CutoffTooSmall { cutoff: f64, bound: f64, m: f64 },
    #[error("weight {weight} of term {index} is not an integer multiple of 1/{q}")]
    NotRepresentable { index: usize, weight: f64, q: u64 },
}

/// `f(x) = x - sum_j c_j ln|Q_j(x)|` with `c_j >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuxFunction {
    terms: Vec<(IntPoly, f64)>,
}

impl AuxFunction {
    pub fn new(terms: Vec<(IntPoly, f64)>) -> Result<Self, AuxError> {
        if terms.is_empty() {
            return Err(AuxError::Empty);
        }
        for (i, (q, c)) in terms.iter().enumerate() {
            if !(c.is_finite() && *c >= 0.0) {
                return Err(AuxError::BadWeight {
                    index: i,
                    weight: *c,
                });
            }
            if q.is_zero() {
                return Err(AuxError::ZeroPoly(i));
            }
            if let Some(j) = terms[..i].iter().position(|(p, _)| p == q) {
                return Err(AuxError::Duplicate(j, i));
            }
        }
        Ok(AuxFunction { terms })
    }

    /// `{(x, c)}`, the single-term function `x - c ln x`.
    pub fn linear(c: f64) -> Result<Self, AuxError> {
        Self::new(vec![(IntPoly::x(), c)])
    }

    pub fn terms(&self) -> &[(IntPoly, f64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn polys(&self) -> impl Iterator<Item = &IntPoly> {
        self.terms.iter().map(|(q, _)| q)
    }

    pub fn weights(&self) -> Vec<f64> {
        self.terms.iter().map(|(_, c)| *c).collect()
    }

    /// `r = sum deg Q_j`.
    pub fn r(&self) -> usize {
        self.terms.iter().map(|(q, _)| q.deg()).sum()
    }

    /// `t = sum c_j deg Q_j`.
    pub fn t(&self) -> f64 {
        self.terms.iter().map(|(q, c)| c * q.deg() as f64).sum()
    }

    /// Drop terms whose weight is below `threshold`.
    pub fn prune(&self, threshold: f64) -> AuxFunction {
        AuxFunction {
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| *c >= threshold)
                .cloned()
                .collect(),
        }
    }

    pub fn evaluator(&self) -> Evaluator {
        Evaluator::new(self)
    }

    /// `f(x)`; `+inf` exactly at roots of terms with positive weight.
    pub fn eval(&self, x: f64) -> Result<f64, AuxError> {
        eval_f(self, x)
    }
}

/// Value of the auxiliary function at `x > 0`.
pub fn eval_f(af: &AuxFunction, x: f64) -> Result<f64, AuxError> {
    if !(x.is_finite() && x > 0.0) {
        return Err(AuxError::NonPositive(x));
    }
    Ok(af.evaluator().value(x))
}

struct Term {
    c: f64,
    q: IntPoly,
    dq: IntPoly,
    qf: Vec<f64>,
    dqf: Vec<f64>,
    /// Extra conversion error when coefficients exceed 53 bits.
    wide: bool,
}

/// `f`, `f'` and whether any term needed exact evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub x: f64,
    pub f: f64,
    pub df: f64,
    pub exact: bool,
}

/// Precompiled evaluator for `f` and `f'`, skipping zero-weight terms.
pub struct Evaluator {
    terms: Vec<Term>,
}

impl Evaluator {
    fn new(af: &AuxFunction) -> Self {
        let terms = af
            .terms
            .iter()
            .filter(|(_, c)| *c > 0.0)
            .map(|(q, c)| {
                let dq = q.derivative();
                Term {
                    c: *c,
                    qf: q.coeffs_f64(),
                    dqf: dq.coeffs_f64(),
                    wide: q.coeffs().iter().any(|a| a.bits() > 53),
                    q: q.clone(),
                    dq,
                }
            })
            .collect();
        Evaluator { terms }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.sample(x).f
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.sample(x).df
    }

    /// Evaluate `f(x)` and `f'(x)` together.
    pub fn sample(&self, x: f64) -> Sample {
        let mut f = x;
        let mut df = 1.0;
        let mut exact = false;
        for t in &self.terms {
            let mut q = comp_horner(&t.qf, x);
            let mut d = comp_horner(&t.dqf, x);
            if t.wide {
                q.error_bound += UNIT_ROUNDOFF * q.scale;
                d.error_bound += UNIT_ROUNDOFF * d.scale;
            }
            let good = q.value.is_finite()
                && d.value.is_finite()
                && q.value != 0.0
                && q.error_bound <= 1e-12 * q.value.abs()
                && d.error_bound <= 1e-12 * (q.value.abs() + d.value.abs());
            let (ln_q, ratio) = if good {
                (q.value.abs().ln(), d.value / q.value)
            } else {
                exact = true;
                let ln_q = t.q.ln_abs_exact(x);
                if ln_q == f64::NEG_INFINITY {
                    return Sample {
                        x,
                        f: f64::INFINITY,
                        df: f64::NAN,
                        exact,
                    };
                }
                let qv = t.q.eval_at_f64_exact(x);
                let dv = t.dq.eval_at_f64_exact(x);
                (ln_q, dv / qv)
            };
            f -= t.c * ln_q;
            df -= t.c * ratio;
        }
        Sample { x, f, df, exact }
    }
}
