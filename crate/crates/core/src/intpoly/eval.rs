use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

use super::{IntPoly, PolyError};

pub(crate) const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

fn gamma(k: usize) -> f64 {
    let ku = k as f64 * UNIT_ROUNDOFF;
    ku / (1.0 - ku)
}

/// Result of a compensated floating-point evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloatEval {
    pub value: f64,
    /// Rigorous bound on `|value - p(x)|` (up to the usual first-order
    /// analysis of compensated Horner).
    pub error_bound: f64,
    /// `sum |a_i| |x|^i`, the magnitude scale of the evaluation.
    pub scale: f64,
}

impl FloatEval {
    /// Error bound relative to the computed value; infinite at an exact zero.
    pub fn condition(&self) -> f64 {
        self.error_bound / self.value.abs()
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Compensated Horner over plain `f64` coefficients.
pub(crate) fn comp_horner(coeffs: &[f64], x: f64) -> FloatEval {
    let n = coeffs.len();
    if n == 0 {
        return FloatEval {
            value: 0.0,
            error_bound: 0.0,
            scale: 0.0,
        };
    }
    let mut s = coeffs[n - 1];
    let mut c = 0.0;
    let ax = x.abs();
    let mut scale = coeffs[n - 1].abs();
    for &a in coeffs[..n - 1].iter().rev() {
        let (p, pi) = two_prod(s, x);
        let (ns, sigma) = two_sum(p, a);
        s = ns;
        c = c.mul_add(x, pi + sigma);
        scale = scale.mul_add(ax, a.abs());
    }
    let value = s + c;
    let g = gamma(2 * n);
    let error_bound = 2.0 * UNIT_ROUNDOFF * value.abs() + 2.0 * g * g * scale;
    FloatEval {
        value,
        error_bound,
        scale,
    }
}

impl IntPoly {
    /// Exact value at a rational point (Horner).
    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// `b^d p(a/b)` for `b > 0`, an integer with the sign of `p(a/b)`.
    pub(crate) fn eval_homogeneous(&self, num: &BigInt, den: &BigInt) -> BigInt {
        let Some(d) = self.degree() else {
            return BigInt::zero();
        };
        let mut acc = self.coeffs[d].clone();
        let mut den_pow = BigInt::one();
        for c in self.coeffs[..d].iter().rev() {
            den_pow *= den;
            acc = acc * num + c * &den_pow;
        }
        acc
    }

    /// Sign of `p` at a rational point, computed exactly.
    pub fn sign_at(&self, x: &BigRational) -> Sign {
        let v = self.eval_homogeneous(x.numer(), x.denom());
        v.sign()
    }

    pub(crate) fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::INFINITY))
            .collect()
    }

    /// Compensated Horner evaluation in double precision with an error bound.
    ///
    /// The returned bound covers rounding in the evaluation and in the
    /// conversion of coefficients wider than 53 bits. A non-finite result is
    /// reported as [`PolyError::OutOfRange`]; callers fall back to
    /// [`IntPoly::eval_exact`].
    pub fn eval_float(&self, x: f64) -> Result<FloatEval, PolyError> {
        let coeffs = self.coeffs_f64();
        let mut r = comp_horner(&coeffs, x);
        if !r.value.is_finite() || !r.error_bound.is_finite() {
            return Err(PolyError::OutOfRange(x));
        }
        if self.coeffs.iter().any(|c| c.bits() > 53) {
            r.error_bound += UNIT_ROUNDOFF * r.scale;
        }
        Ok(r)
    }

    /// Value at a double-precision point, computed exactly and rounded once
    /// at the end. Used where compensated evaluation is too ill-conditioned.
    pub fn eval_at_f64_exact(&self, x: f64) -> f64 {
        let Some(d) = self.degree() else {
            return 0.0;
        };
        if x == 0.0 {
            return self.coeffs[0].to_f64().unwrap_or(f64::INFINITY);
        }
        let (mant, exp, sign) = x.integer_decode();
        let mut m = BigInt::from(mant);
        if sign < 0 {
            m = -m;
        }
        if exp >= 0 {
            let xi = m << exp as usize;
            let v = self.eval_homogeneous(&xi, &BigInt::one());
            return bigint_ldexp(&v, 0);
        }
        // x = m / 2^k; p(x) = N / 2^(k d) with N = sum a_i m^i 2^(k (d - i)).
        let k = (-exp) as usize;
        let den = BigInt::one() << k;
        let v = self.eval_homogeneous(&m, &den);
        bigint_ldexp(&v, -((k * d) as i64))
    }

    /// `ln |p(x)|`, falling back to exact evaluation when the compensated
    /// result is not accurate to about ten digits. Returns `-inf` at a root.
    pub fn ln_abs_at(&self, x: f64) -> f64 {
        if let Ok(fe) = self.eval_float(x) {
            if fe.value != 0.0 && fe.error_bound <= 1e-10 * fe.value.abs() {
                return fe.value.abs().ln();
            }
        }
        self.ln_abs_exact(x)
    }

    pub(crate) fn ln_abs_exact(&self, x: f64) -> f64 {
        let Some(d) = self.degree() else {
            return f64::NEG_INFINITY;
        };
        if x == 0.0 {
            return bigint_ln(&self.coeffs[0]);
        }
        let (mant, exp, sign) = x.integer_decode();
        let mut m = BigInt::from(mant);
        if sign < 0 {
            m = -m;
        }
        if exp >= 0 {
            return bigint_ln(&self.eval_homogeneous(&(m << exp as usize), &BigInt::one()));
        }
        let k = (-exp) as usize;
        let v = self.eval_homogeneous(&m, &(BigInt::one() << k));
        bigint_ln(&v) - (k * d) as f64 * std::f64::consts::LN_2
    }
}

/// `ln |v|` for arbitrarily large integers.
fn bigint_ln(v: &BigInt) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = v.bits();
    if bits <= 1000 {
        return v.abs().to_f64().unwrap().ln();
    }
    let drop = bits - 64;
    let top = (v.abs() >> drop as usize).to_f64().unwrap();
    top.ln() + drop as f64 * std::f64::consts::LN_2
}

/// `v * 2^shift` rounded to `f64` without overflowing intermediate values.
fn bigint_ldexp(v: &BigInt, shift: i64) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    let bits = v.bits() as i64;
    let keep = 96i64;
    let (top, extra) = if bits > keep {
        let drop = bits - keep;
        ((v.abs() >> drop as usize), drop)
    } else {
        (v.abs(), 0)
    };
    let mut f = top.to_f64().unwrap_or(f64::INFINITY);
    let mut e = shift + extra;
    // Apply the binary exponent in steps that stay inside the f64 range.
    while e > 0 {
        let step = e.min(1000);
        f *= 2f64.powi(step as i32);
        e -= step;
    }
    while e < 0 {
        let step = (-e).min(1000);
        f /= 2f64.powi(step as i32);
        e += step;
    }
    if v.is_negative() {
        -f
    } else {
        f
    }
}
