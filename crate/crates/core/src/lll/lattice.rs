use num_bigint::{BigInt, Sign};
use num_traits::{FromPrimitive, Zero};

use super::{LatticeBasis, LllError};
use crate::intpoly::IntPoly;

/// Parameters of the search lattice.
///
/// The base polynomial `Q` is kept in factored form (`Q = prod f^e`) so that
/// large auxiliary sets never need to be expanded.
#[derive(Debug, Clone)]
pub struct SearchLatticeSpec {
    pub base: Vec<(IntPoly, u32)>,
    /// Degree of the candidate polynomial `R`.
    pub k: usize,
    /// Current weight total.
    pub t: f64,
    /// Current degree total `sum e * deg f`.
    pub r: usize,
    pub points: Vec<f64>,
    /// Natural log of the fixed-point scale `S` applied before rounding.
    /// Kept in log form because useful scales overflow `f64` once the
    /// auxiliary set has large total degree.
    pub ln_scale: f64,
    /// Minimum distance between a control point and a real root of `Q`.
    pub eps_root: f64,
}

impl SearchLatticeSpec {
    pub fn new(
        base_poly: IntPoly,
        k: usize,
        t: f64,
        r: usize,
        points: Vec<f64>,
        scale: f64,
    ) -> Self {
        SearchLatticeSpec {
            base: vec![(base_poly, 1)],
            k,
            t,
            r,
            points,
            ln_scale: scale.ln(),
            eps_root: 1e-3,
        }
    }

    pub fn with_factors(
        base: Vec<(IntPoly, u32)>,
        k: usize,
        t: f64,
        points: Vec<f64>,
        scale: f64,
    ) -> Self {
        let r = base.iter().map(|(f, e)| f.deg() * *e as usize).sum();
        SearchLatticeSpec {
            base,
            k,
            t,
            r,
            points,
            ln_scale: scale.ln(),
            eps_root: 1e-3,
        }
    }

    /// Replace the scale by `exp(ln_scale)`.
    pub fn with_ln_scale(mut self, ln_scale: f64) -> Self {
        self.ln_scale = ln_scale;
        self
    }

    /// The expanded base polynomial `Q`.
    pub fn base_poly(&self) -> IntPoly {
        self.base
            .iter()
            .fold(IntPoly::one(), |acc, (f, e)| acc * f.pow(*e))
    }

    fn base_roots(&self) -> Vec<f64> {
        self.base
            .iter()
            .filter(|(f, _)| !f.is_constant())
            .flat_map(|(f, _)| f.real_roots_f64().unwrap_or_default())
            .collect()
    }

    fn near_root(&self, roots: &[f64], x: f64) -> bool {
        roots.iter().any(|r| (x - r).abs() < self.eps_root)
    }

    /// Remove control points too close to a root of `Q`; returns how many
    /// were dropped.
    pub fn drop_points_near_roots(&mut self) -> usize {
        let roots = self.base_roots();
        let before = self.points.len();
        let kept: Vec<f64> = self
            .points
            .iter()
            .copied()
            .filter(|&x| !self.near_root(&roots, x))
            .collect();
        self.points = kept;
        before - self.points.len()
    }

    /// Remove control points whose whole column would round to zero at the
    /// current scale; returns how many were dropped.
    pub fn drop_negligible_points(&mut self) -> usize {
        let ln_s = self.ln_scale;
        let cutoff = 0.5f64.ln();
        let before = self.points.len();
        let kept: Vec<f64> = self
            .points
            .iter()
            .copied()
            .filter(|&x| ln_s + self.log_weight(x).1 + (self.k as f64 * x.ln()).max(0.0) >= cutoff)
            .collect();
        self.points = kept;
        before - self.points.len()
    }

    fn validate(&self) -> Result<(), LllError> {
        if !(self.t.is_finite() && self.t > 0.0) {
            return Err(LllError::Invalid(format!(
                "weight total t = {} must be positive",
                self.t
            )));
        }
        if !(self.ln_scale.is_finite() && self.ln_scale >= 0.0) {
            return Err(LllError::Invalid(format!(
                "scale exp({}) must be at least 1",
                self.ln_scale
            )));
        }
        if self.points.is_empty() {
            return Err(LllError::NoPoints);
        }
        if let Some(&x) = self.points.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(LllError::BadPoint(x));
        }
        if self.base.iter().any(|(f, _)| f.is_zero()) {
            return Err(LllError::Invalid("base polynomial is zero".into()));
        }
        let roots = self.base_roots();
        if let Some(&x) = self.points.iter().find(|&&x| self.near_root(&roots, x)) {
            return Err(LllError::PointNearRoot(x, self.eps_root));
        }
        Ok(())
    }

    /// Sign and natural log of `|Q(x) exp(-x (r + k) / t)|`.
    fn log_weight(&self, x: f64) -> (bool, f64) {
        let mut negative = false;
        let mut ln = -x * (self.r + self.k) as f64 / self.t;
        for (f, e) in &self.base {
            ln += *e as f64 * f.ln_abs_at(x);
            if f.sign_at_f64(x) == Sign::Minus && e % 2 == 1 {
                negative = !negative;
            }
        }
        (negative, ln)
    }
}

/// Rows `l = 0..=k`: the rounded values `S Q(x_i) x_i^l exp(-x_i (r+k)/t)`
/// followed by the `l`-th unit vector.
pub fn build_search_lattice(spec: &SearchLatticeSpec) -> Result<LatticeBasis, LllError> {
    spec.validate()?;
    let n = spec.points.len();
    let mut rows = vec![Vec::with_capacity(n + spec.k + 1); spec.k + 1];
    for &x in &spec.points {
        let (negative, ln_w) = spec.log_weight(x);
        for (l, row) in rows.iter_mut().enumerate() {
            let v = round_exp(spec.ln_scale + ln_w + l as f64 * x.ln())
                .ok_or(LllError::NonFinite(x))?;
            row.push(if negative { -v } else { v });
        }
    }
    for i in 0..n {
        if rows.iter().all(|row| row[i].is_zero()) {
            return Err(LllError::ZeroColumn(i));
        }
    }
    for (l, row) in rows.iter_mut().enumerate() {
        row.extend((0..=spec.k).map(|m| BigInt::from((m == l) as i32)));
    }
    Ok(LatticeBasis::new(rows))
}

/// `round(exp(ln))` as an integer, also beyond the range of `f64`.
fn round_exp(ln: f64) -> Option<BigInt> {
    const DIRECT: f64 = 700.0;
    if !ln.is_finite() {
        return (ln == f64::NEG_INFINITY).then(BigInt::zero);
    }
    if ln < DIRECT {
        return BigInt::from_f64(ln.exp().round());
    }
    // exp(ln) = mantissa * 2^shift with the mantissa near 2^62.
    let shift = (ln / std::f64::consts::LN_2).floor() as usize - 62;
    let mantissa = (ln - shift as f64 * std::f64::consts::LN_2).exp();
    Some(BigInt::from_f64(mantissa.round())? << shift)
}

/// Decode the coefficient blocks of the `n_vectors` shortest rows as
/// primitive polynomials, dropping zeros and duplicates up to sign.
pub fn extract_candidates(
    reduced: &LatticeBasis,
    spec: &SearchLatticeSpec,
    n_vectors: usize,
) -> Vec<IntPoly> {
    let width = spec.k + 1;
    let mut rows: Vec<&Vec<BigInt>> = reduced.rows.iter().collect();
    rows.sort_by_cached_key(|r| super::dot(r, r));
    let mut out: Vec<IntPoly> = Vec::new();
    for row in rows.into_iter().take(n_vectors) {
        let block = row[row.len().saturating_sub(width)..].to_vec();
        let p = IntPoly::new(block);
        if p.is_zero() {
            continue;
        }
        let p = p.primitive_part();
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}
