//! Dense univariate polynomials over the integers.
//!
//! Coefficients are stored little-endian (`coeffs[i]` multiplies `x^i`) and
//! the vector never carries trailing zeros, so the zero polynomial is the
//! empty vector. Everything in this module is exact.

mod eval;
mod parse;
mod roots;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use eval::FloatEval;
pub(crate) use eval::{comp_horner, UNIT_ROUNDOFF};
pub use roots::{Bound, RootInterval};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("polynomial is zero")]
    Zero,
    #[error("polynomial is constant")]
    Constant,
    #[error("polynomial is not monic (leading coefficient {0})")]
    NotMonic(BigInt),
    #[error("polynomial has odd degree {0}")]
    OddDegree(usize),
    #[error("polynomial is not reciprocal: coefficient of x^{index} is {low} but coefficient of x^{mirror} is {high}")]
    NotReciprocal {
        index: usize,
        mirror: usize,
        low: BigInt,
        high: BigInt,
    },
    #[error("floating-point evaluation out of range at x = {0}")]
    OutOfRange(f64),
    #[error("division is not exact")]
    InexactDivision,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::new(vec![c.into()])
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    /// The identity polynomial `x`.
    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    /// `x - a`.
    pub fn linear_root(a: impl Into<BigInt>) -> Self {
        Self::new(vec![-a.into(), BigInt::one()])
    }

    pub fn monomial(c: impl Into<BigInt>, k: usize) -> Self {
        let mut v = vec![BigInt::zero(); k + 1];
        v[k] = c.into();
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(One::is_one)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Gcd of the coefficients (non-negative; zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().unwrap().is_negative() {
            g = -g;
        }
        self.div_scalar_exact(&g)
    }

    pub fn div_scalar_exact(&self, d: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c / d).collect())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// Reverse the sign of the variable: `p(-x)`.
    pub fn negate_variable(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    /// `p(x + a)` by repeated synthetic division.
    pub fn taylor_shift(&self, a: &BigInt) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = &c[j + 1] * a;
                c[j] += t;
            }
        }
        Self::new(c)
    }

    /// Pseudo-remainder `lc(d)^(deg a - deg d + 1) * a mod d`, always with
    /// exactly that exponent.
    pub fn pseudo_rem(&self, d: &Self) -> Self {
        assert!(!d.is_zero(), "pseudo-remainder by zero polynomial");
        let dd = d.deg();
        let lc = d.leading().unwrap();
        if self.coeffs.len() <= dd {
            return self.clone();
        }
        let mut r = self.coeffs.clone();
        for n in (dd..r.len()).rev() {
            let top = std::mem::take(&mut r[n]);
            for c in r[..n].iter_mut() {
                *c *= lc;
            }
            if !top.is_zero() {
                let shift = n - dd;
                for (i, dc) in d.coeffs[..dd].iter().enumerate() {
                    r[shift + i] -= &top * dc;
                }
            }
        }
        r.truncate(dd);
        Self::new(r)
    }

    /// Exact division over Q returning integer quotient and remainder when
    /// the divisor is monic or divides evenly; returns `None` if a non-integer
    /// quotient coefficient would be produced.
    pub fn div_rem(&self, d: &Self) -> Option<(Self, Self)> {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.deg();
        let lc = d.leading().unwrap();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Some((Self::zero(), self.clone()));
        }
        let mut q = vec![BigInt::zero(); r.len() - dd];
        while r.len() > dd {
            let n = r.len() - 1;
            let (qc, rem) = r[n].div_rem(lc);
            if !rem.is_zero() {
                return None;
            }
            let shift = n - dd;
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[shift + i] -= &qc * dc;
            }
            q[shift] = qc;
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        Some((Self::new(q), Self::new(r)))
    }

    /// Quotient `self / d`, failing unless `d` divides `self` in `Z[x]`.
    pub fn div_exact(&self, d: &Self) -> Result<Self, PolyError> {
        match self.div_rem(d) {
            Some((q, r)) if r.is_zero() => Ok(q),
            _ => Err(PolyError::InexactDivision),
        }
    }

    pub fn divides(&self, other: &Self) -> bool {
        other.div_exact(self).is_ok()
    }

    /// Primitive gcd over `Z[x]` via the primitive remainder sequence.
    /// The result is primitive with positive leading coefficient, except
    /// that `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.primitive_part();
        }
        if other.is_zero() {
            return self.primitive_part();
        }
        let (mut a, mut b) = if self.deg() >= other.deg() {
            (self.primitive_part(), other.primitive_part())
        } else {
            (other.primitive_part(), self.primitive_part())
        };
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        a.primitive_part()
    }

    /// Square-free part `p / gcd(p, p')`, primitive.
    pub fn square_free_part(&self) -> Self {
        if self.is_constant() {
            return self.primitive_part();
        }
        let g = self.gcd(&self.derivative());
        self.primitive_part()
            .div_exact(&g)
            .expect("gcd divides its argument")
            .primitive_part()
    }

    fn require_monic(&self) -> Result<(), PolyError> {
        match self.degree() {
            None => Err(PolyError::Zero),
            Some(0) => Err(PolyError::Constant),
            Some(_) if !self.is_monic() => {
                Err(PolyError::NotMonic(self.leading().unwrap().clone()))
            }
            Some(_) => Ok(()),
        }
    }

    /// Sum of the roots: the negated coefficient of `x^(d-1)`.
    pub fn trace(&self) -> Result<BigInt, PolyError> {
        self.require_monic()?;
        Ok(-self.coeff(self.deg() - 1))
    }

    /// Trace divided by the degree.
    pub fn abs_trace(&self) -> Result<BigRational, PolyError> {
        let t = self.trace()?;
        Ok(BigRational::new(t, BigInt::from(self.deg())))
    }

    /// Power sums `S_1..S_k` of the roots via Newton's identities.
    pub fn power_sums(&self, k: usize) -> Result<Vec<BigInt>, PolyError> {
        self.require_monic()?;
        let d = self.deg();
        // a(j) = coefficient of x^(d-j), so a(0) = 1.
        let a = |j: usize| -> BigInt {
            if j > d {
                BigInt::zero()
            } else {
                self.coeff(d - j)
            }
        };
        let mut s: Vec<BigInt> = Vec::with_capacity(k);
        for n in 1..=k {
            let mut acc = a(n) * BigInt::from(n);
            for i in 1..n {
                acc += a(i) * &s[n - i - 1];
            }
            s.push(-acc);
        }
        Ok(s)
    }

    /// `X^m Q(X + 1/X - 2)` for monic `Q` of degree `m`.
    pub fn to_reciprocal(&self) -> Result<Self, PolyError> {
        self.require_monic()?;
        let m = self.deg();
        // R(u) = Q(u - 2), then X^m u^k = X^(m-k) (X^2 + 1)^k.
        let r = self.taylor_shift(&BigInt::from(-2));
        let x2p1 = Self::from_i64(&[1, 0, 1]);
        let mut acc = Self::zero();
        let mut power = Self::one();
        for (k, rk) in r.coeffs.iter().enumerate() {
            if !rk.is_zero() {
                let term = Self::monomial(rk.clone(), m - k);
                acc = acc + &term * &power;
            }
            power = &power * &x2p1;
        }
        Ok(acc)
    }

    /// Inverse of [`IntPoly::to_reciprocal`].
    pub fn from_reciprocal(&self) -> Result<Self, PolyError> {
        self.require_monic()?;
        let d = self.deg();
        if d % 2 == 1 {
            return Err(PolyError::OddDegree(d));
        }
        for i in 0..=d / 2 {
            let (lo, hi) = (self.coeff(i), self.coeff(d - i));
            if lo != hi {
                return Err(PolyError::NotReciprocal {
                    index: i,
                    mirror: d - i,
                    low: lo,
                    high: hi,
                });
            }
        }
        let m = d / 2;
        let x2p1 = Self::from_i64(&[1, 0, 1]);
        let powers: Vec<Self> = std::iter::successors(Some(Self::one()), |p| Some(p * &x2p1))
            .take(m + 1)
            .collect();
        let mut rest = self.clone();
        let mut r = vec![BigInt::zero(); m + 1];
        for k in (0..=m).rev() {
            let rk = rest.coeff(m + k);
            if !rk.is_zero() {
                rest = rest - &Self::monomial(rk.clone(), m - k) * &powers[k];
            }
            r[k] = rk;
        }
        debug_assert!(rest.is_zero());
        Ok(Self::new(r).taylor_shift(&BigInt::from(2)))
    }

    /// Ordering used for deterministic reports: by degree, then by
    /// coefficients from the leading one down.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl From<Vec<BigInt>> for IntPoly {
    fn from(v: Vec<BigInt>) -> Self {
        Self::new(v)
    }
}

impl Add for IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: IntPoly) -> IntPoly {
        &self + &rhs
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: IntPoly) -> IntPoly {
        &self - &rhs
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl Mul for IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: IntPoly) -> IntPoly {
        &self * &rhs
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({self})")
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        parse::write_poly(self, "x", f)
    }
}

impl IntPoly {
    /// Render with a custom variable name.
    pub fn display_var<'a>(&'a self, var: &'a str) -> impl fmt::Display + 'a {
        struct D<'a>(&'a IntPoly, &'a str);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                parse::write_poly(self.0, self.1, f)
            }
        }
        D(self, var)
    }
}

impl std::str::FromStr for IntPoly {
    type Err = PolyError;
    fn from_str(s: &str) -> Result<Self, PolyError> {
        parse::parse_poly(s)
    }
}

impl serde::Serialize for IntPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for IntPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod proptests;
