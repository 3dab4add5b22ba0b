//! Real roots: Sturm sequences, isolation and refinement.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::eval::comp_horner;
use super::{IntPoly, PolyError};

/// One end of a counting interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bound {
    NegInf,
    Finite(BigRational),
    PosInf,
}

impl From<BigRational> for Bound {
    fn from(q: BigRational) -> Self {
        Bound::Finite(q)
    }
}

impl From<i64> for Bound {
    fn from(v: i64) -> Self {
        Bound::Finite(BigRational::from_integer(v.into()))
    }
}

/// Half-open interval `(lo, hi]` holding exactly one distinct real root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: BigRational,
    pub hi: BigRational,
    pub multiplicity: usize,
}

impl RootInterval {
    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo < x && x <= &self.hi
    }

    pub fn midpoint_f64(&self) -> f64 {
        ((&self.lo + &self.hi) / BigRational::from_integer(2.into()))
            .to_f64()
            .unwrap_or(f64::NAN)
    }
}

/// Sturm sequence of a square-free primitive polynomial, each member scaled
/// by a positive constant so that sign patterns are preserved.
#[derive(Debug, Clone)]
pub(crate) struct SturmChain {
    chain: Vec<IntPoly>,
}

impl SturmChain {
    pub(crate) fn new(square_free: &IntPoly) -> Self {
        let mut chain = vec![square_free.clone()];
        if square_free.is_constant() {
            return SturmChain { chain };
        }
        chain.push(square_free.derivative().primitive_part_keep_sign());
        loop {
            let n = chain.len();
            let (a, b) = (&chain[n - 2], &chain[n - 1]);
            if b.is_constant() {
                break;
            }
            let r = a.pseudo_rem(b);
            if r.is_zero() {
                break;
            }
            // prem = lc^(delta+1) * rem, so -rem has the sign of -prem times
            // sign(lc)^(delta+1).
            let delta = a.deg() - b.deg();
            let lc_neg = b.leading().unwrap().is_negative();
            let flip = !(lc_neg && (delta + 1) % 2 == 1);
            let next = if flip { -r } else { r };
            chain.push(next.primitive_part_keep_sign());
        }
        SturmChain { chain }
    }

    fn variations<I: Iterator<Item = Sign>>(signs: I) -> usize {
        let mut last = Sign::NoSign;
        let mut count = 0;
        for s in signs {
            if s == Sign::NoSign {
                continue;
            }
            if last != Sign::NoSign && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    fn variations_at(&self, b: &Bound) -> usize {
        match b {
            Bound::PosInf => {
                Self::variations(self.chain.iter().map(|p| p.leading().unwrap().sign()))
            }
            Bound::NegInf => Self::variations(self.chain.iter().map(|p| {
                let s = p.leading().unwrap().sign();
                if p.deg() % 2 == 1 {
                    -s
                } else {
                    s
                }
            })),
            Bound::Finite(x) => Self::variations(self.chain.iter().map(|p| p.sign_at(x))),
        }
    }

    /// Distinct roots in `(lo, hi]`.
    pub(crate) fn count(&self, lo: &Bound, hi: &Bound) -> usize {
        let (vl, vh) = (self.variations_at(lo), self.variations_at(hi));
        vl.saturating_sub(vh)
    }
}

impl IntPoly {
    /// Divide by the (positive) content, keeping the sign of every value.
    fn primitive_part_keep_sign(&self) -> IntPoly {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            self.clone()
        } else {
            self.div_scalar_exact(&g)
        }
    }

    /// Yun square-free decomposition of the primitive part: pairs
    /// `(part, multiplicity)` with pairwise coprime, square-free, primitive
    /// parts whose product (with multiplicities) is `pp(self)`. Constant
    /// parts are omitted.
    pub fn square_free_decomposition(&self) -> Vec<(IntPoly, usize)> {
        let p = self.primitive_part();
        if p.is_constant() {
            return Vec::new();
        }
        let dp = p.derivative();
        let a0 = p.gcd(&dp);
        let mut b = p.div_exact(&a0).expect("gcd divides");
        let mut c = dp.div_exact(&a0).expect("gcd divides derivative");
        let mut d = &c - &b.derivative();
        let mut out = Vec::new();
        let mut i = 1;
        while !b.is_constant() {
            let a = b.gcd(&d);
            b = b.div_exact(&a).expect("gcd divides");
            c = d.div_exact(&a).expect("gcd divides");
            d = &c - &b.derivative();
            if !a.is_constant() {
                out.push((a.primitive_part(), i));
            }
            i += 1;
        }
        out
    }

    /// Number of distinct real roots in `(lo, hi]`.
    pub fn sturm_count(&self, lo: &Bound, hi: &Bound) -> Result<usize, PolyError> {
        if self.is_zero() {
            return Err(PolyError::Zero);
        }
        if self.is_constant() {
            return Ok(0);
        }
        let chain = SturmChain::new(&self.square_free_part());
        Ok(chain.count(lo, hi))
    }

    /// Integer `B` with every complex root of modulus `< B` (Cauchy).
    pub fn cauchy_bound(&self) -> BigInt {
        let lc = self.leading().map(|c| c.abs()).unwrap_or_else(BigInt::one);
        let m = self.coeffs[..self.deg()]
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default();
        BigInt::one() + (m + &lc - BigInt::one()) / lc
    }

    /// Fujiwara bound on the modulus of every complex root, rounded up.
    pub fn root_modulus_bound(&self) -> f64 {
        let d = self.deg();
        if d == 0 {
            return 0.0;
        }
        let lc = self.leading().unwrap().to_f64().unwrap().abs();
        let mut best: f64 = 0.0;
        for k in 1..=d {
            let a = self.coeffs[d - k].to_f64().unwrap_or(f64::INFINITY).abs();
            let mut ratio = a / lc;
            if k == d {
                ratio /= 2.0;
            }
            best = best.max(ratio.powf(1.0 / k as f64));
        }
        2.0 * best * (1.0 + 1e-12)
    }

    fn isolate_in(
        chain: &SturmChain,
        lo: BigRational,
        hi: BigRational,
        width: &BigRational,
    ) -> Vec<(BigRational, BigRational)> {
        let two = BigRational::from_integer(2.into());
        let mut out = Vec::new();
        let n = chain.count(&Bound::Finite(lo.clone()), &Bound::Finite(hi.clone()));
        let mut stack = vec![(lo, hi, n)];
        while let Some((lo, hi, n)) = stack.pop() {
            if n == 0 {
                continue;
            }
            if n == 1 && &(&hi - &lo) <= width {
                out.push((lo, hi));
                continue;
            }
            let mid = (&lo + &hi) / &two;
            let nl = chain.count(&Bound::Finite(lo.clone()), &Bound::Finite(mid.clone()));
            // Push the right half first so the left one pops first.
            stack.push((mid.clone(), hi, n - nl));
            stack.push((lo, mid, nl));
        }
        out
    }

    /// Isolating intervals of every distinct real root, sorted, each of
    /// width at most `width`, with multiplicities.
    pub fn isolate_real_roots(&self, width: &BigRational) -> Result<Vec<RootInterval>, PolyError> {
        self.isolate_real_roots_in(width, false)
    }

    fn isolate_real_roots_in(
        &self,
        width: &BigRational,
        positive_only: bool,
    ) -> Result<Vec<RootInterval>, PolyError> {
        if self.is_zero() {
            return Err(PolyError::Zero);
        }
        if self.is_constant() {
            return Ok(Vec::new());
        }
        let parts = self.square_free_decomposition();
        let sf = self.square_free_part();
        let chain = SturmChain::new(&sf);
        let b = BigRational::from_integer(self.cauchy_bound());
        let lo = if positive_only {
            BigRational::zero()
        } else {
            -b.clone()
        };
        let isolated = Self::isolate_in(&chain, lo, b, width);
        let part_chains: Vec<(SturmChain, usize)> = parts
            .iter()
            .map(|(p, m)| (SturmChain::new(p), *m))
            .collect();
        Ok(isolated
            .into_iter()
            .map(|(lo, hi)| {
                let (l, h) = (Bound::Finite(lo.clone()), Bound::Finite(hi.clone()));
                let multiplicity = part_chains
                    .iter()
                    .find(|(c, _)| c.count(&l, &h) == 1)
                    .map(|(_, m)| *m)
                    .unwrap_or(1);
                RootInterval {
                    lo,
                    hi,
                    multiplicity,
                }
            })
            .collect())
    }

    /// True iff every root is real and strictly positive (counted with
    /// multiplicity). Constants are not totally positive.
    pub fn is_totally_positive(&self) -> Result<bool, PolyError> {
        if self.is_zero() {
            return Err(PolyError::Zero);
        }
        if self.is_constant() {
            return Ok(false);
        }
        let mut counted = 0;
        for (part, m) in self.square_free_decomposition() {
            counted += m * SturmChain::new(&part).count(&Bound::from(0), &Bound::PosInf);
        }
        Ok(counted == self.deg())
    }

    /// Exact sign of `p(x)` at a double, using a filtered float evaluation.
    pub fn sign_at_f64(&self, x: f64) -> Sign {
        sign_at_f64(self, &self.coeffs_f64(), x)
    }

    /// Distinct strictly positive real roots, each to full double precision.
    pub fn positive_roots_f64(&self) -> Result<Vec<f64>, PolyError> {
        self.roots_f64(true)
    }

    /// Distinct real roots, each to full double precision.
    pub fn real_roots_f64(&self) -> Result<Vec<f64>, PolyError> {
        self.roots_f64(false)
    }

    fn roots_f64(&self, positive_only: bool) -> Result<Vec<f64>, PolyError> {
        let width = BigRational::new(BigInt::one(), BigInt::from(1u64 << 20));
        let sf = self.square_free_part();
        let intervals = sf.isolate_real_roots_in(&width, positive_only)?;
        let coeffs = sf.coeffs_f64();
        Ok(intervals
            .iter()
            .map(|iv| refine_root(&sf, &coeffs, iv))
            .collect())
    }
}

fn sign_at_f64(p: &IntPoly, coeffs: &[f64], x: f64) -> Sign {
    let fe = comp_horner(coeffs, x);
    if fe.value.is_finite() && fe.value.abs() > fe.error_bound * 2.0 {
        return if fe.value > 0.0 {
            Sign::Plus
        } else {
            Sign::Minus
        };
    }
    let q = BigRational::from_float(x).expect("finite");
    p.sign_at(&q)
}

/// Bisect an isolating interval of a square-free polynomial down to adjacent
/// doubles.
fn refine_root(sf: &IntPoly, coeffs: &[f64], iv: &RootInterval) -> f64 {
    let hi_q = iv.hi.clone();
    if sf.sign_at(&hi_q) == Sign::NoSign {
        return hi_q.to_f64().unwrap();
    }
    let mut lo = iv.lo.to_f64().unwrap();
    let mut hi = iv.hi.to_f64().unwrap();
    let mut s_lo = sign_at_f64(sf, coeffs, lo);
    let s_hi = sign_at_f64(sf, coeffs, hi);
    if s_lo == Sign::NoSign {
        // The root is at lo only if lo rounded onto it; nudge inward.
        lo = lo.next_up();
        s_lo = sign_at_f64(sf, coeffs, lo);
        if s_lo == Sign::NoSign {
            return lo;
        }
    }
    if s_lo == s_hi {
        // Endpoint rounding lost the bracket; fall back to the midpoint.
        return iv.midpoint_f64();
    }
    loop {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        match sign_at_f64(sf, coeffs, mid) {
            Sign::NoSign => return mid,
            s if s == s_lo => lo = mid,
            _ => hi = mid,
        }
    }
    lo + (hi - lo) / 2.0
}
