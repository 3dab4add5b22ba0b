use serde::Serialize;

use super::{global_min, AuxError, AuxFunction};
use crate::intpoly::IntPoly;

/// `f(x) = x - (t/r) ln|Q(x)|` with `Q = prod Q_j^{a_j}` kept factored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rationalized {
    pub factors: Vec<(IntPoly, u64)>,
    pub t: f64,
    pub r: u64,
}

impl Rationalized {
    pub fn exponents(&self) -> Vec<u64> {
        self.factors.iter().map(|(_, a)| *a).collect()
    }

    /// Expanded `Q`, or `None` when its degree exceeds `max_degree`.
    pub fn expand(&self, max_degree: u64) -> Option<IntPoly> {
        if self.r > max_degree {
            return None;
        }
        Some(
            self.factors
                .iter()
                .fold(IntPoly::one(), |acc, (q, a)| acc * q.pow(*a as u32)),
        )
    }
}

/// Rewrite `af` with integer exponents `a_j = round(q c_j)`.
///
/// Each `q c_j` must be an integer up to a relative error of `1e-9`; the
/// worst offender is reported otherwise.
pub fn rationalize(af: &AuxFunction, q: u64) -> Result<Rationalized, AuxError> {
    let qf = q as f64;
    let mut worst: Option<(usize, f64)> = None;
    let mut factors = Vec::with_capacity(af.len());
    for (i, (poly, c)) in af.terms().iter().enumerate() {
        let v = qf * c;
        let a = v.round();
        let dev = (v - a).abs() / v.abs().max(1.0);
        if dev > 1e-9 && worst.is_none_or(|(_, d)| dev > d) {
            worst = Some((i, dev));
        }
        factors.push((poly.clone(), a as u64));
    }
    if let Some((index, _)) = worst {
        return Err(AuxError::NotRepresentable {
            index,
            weight: af.terms()[index].1,
            q,
        });
    }
    let r = factors.iter().map(|(p, a)| p.deg() as u64 * a).sum();
    Ok(Rationalized {
        factors,
        t: af.t(),
        r,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedSup {
    pub value: f64,
    pub argmax: Option<f64>,
    /// `-ln(value)`, the matching auxiliary-function minimum.
    pub m: f64,
}

/// `sup_{x>0} |Q(x)|^{t/r} e^{-x}` for `Q` given in factored form.
pub fn weighted_sup(
    factors: &[(IntPoly, u64)],
    t: f64,
    r: u64,
    tol: f64,
) -> Result<WeightedSup, AuxError> {
    let s = t / r as f64;
    let terms = factors
        .iter()
        .filter(|(_, a)| *a > 0)
        .map(|(q, a)| (q.clone(), s * *a as f64))
        .collect();
    let report = global_min(&AuxFunction::new(terms)?, tol)?;
    let argmax = report.argmins.iter().find(|a| a.f == report.m).map(|a| a.x);
    Ok(WeightedSup {
        value: (-report.m).exp(),
        argmax,
        m: report.m,
    })
}
