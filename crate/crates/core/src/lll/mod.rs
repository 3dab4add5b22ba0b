//! Exact integral LLL reduction and the lattice used to look for small
//! auxiliary polynomials.

mod lattice;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use lattice::{build_search_lattice, extract_candidates, SearchLatticeSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LllError {
    #[error("basis is empty")]
    Empty,
    #[error("rows have different lengths")]
    Ragged,
    #[error("rows are linearly dependent")]
    Dependent,
    #[error("delta must lie in (1/4, 1), got {0}")]
    BadDelta(BigRational),
    #[error("control point {0} lies within {1} of a root of the base polynomial")]
    PointNearRoot(f64, f64),
    #[error("control point {0} must be positive and finite")]
    BadPoint(f64),
    #[error("no control points")]
    NoPoints,
    #[error("column {0} of the value block is identically zero")]
    ZeroColumn(usize),
    #[error("lattice entry is not finite at control point {0}")]
    NonFinite(f64),
    #[error("invalid parameter: {0}")]
    Invalid(String),
}

/// A lattice basis given by integer rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBasis {
    pub rows: Vec<Vec<BigInt>>,
    pub delta: BigRational,
}

impl LatticeBasis {
    pub fn new(rows: Vec<Vec<BigInt>>) -> Self {
        LatticeBasis {
            rows,
            delta: BigRational::new(3.into(), 4.into()),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn with_delta(mut self, delta: BigRational) -> Self {
        self.delta = delta;
        self
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn validate(&self) -> Result<(), LllError> {
        let quarter = BigRational::new(1.into(), 4.into());
        if self.delta <= quarter || self.delta >= BigRational::one() {
            return Err(LllError::BadDelta(self.delta.clone()));
        }
        let Some(first) = self.rows.first() else {
            return Err(LllError::Empty);
        };
        if self.rows.iter().any(|r| r.len() != first.len()) {
            return Err(LllError::Ragged);
        }
        Ok(())
    }

    /// Determinant of the Gram matrix (fraction-free elimination).
    pub fn gram_determinant(&self) -> BigInt {
        let n = self.rows.len();
        let mut g: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| dot(&self.rows[i], &self.rows[j])).collect())
            .collect();
        bareiss_det(&mut g)
    }

    /// Whitespace-separated rows, one per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    /// Gram–Schmidt coefficients `mu[i][j]` and squared norms `b*_i . b*_i`.
    pub fn gram_schmidt(&self) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
        let n = self.rows.len();
        let mut mu = vec![vec![BigRational::zero(); n]; n];
        let mut bstar: Vec<Vec<BigRational>> = Vec::with_capacity(n);
        let mut norms = Vec::with_capacity(n);
        for i in 0..n {
            let bi: Vec<BigRational> = self.rows[i]
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect();
            let mut v = bi.clone();
            for j in 0..i {
                if norms[j] == BigRational::zero() {
                    continue;
                }
                let m = rdot(&bi, &bstar[j]) / &norms[j];
                for (vk, bk) in v.iter_mut().zip(&bstar[j]) {
                    *vk -= &m * bk;
                }
                mu[i][j] = m;
            }
            norms.push(rdot(&v, &v));
            bstar.push(v);
        }
        (mu, norms)
    }

    /// Check size reduction and the Lovász condition exactly.
    pub fn is_reduced(&self) -> bool {
        let (mu, norms) = self.gram_schmidt();
        let half = BigRational::new(1.into(), 2.into());
        for i in 0..self.rows.len() {
            for j in 0..i {
                if mu[i][j].abs() > half {
                    return false;
                }
            }
            if i > 0 {
                let m = &mu[i][i - 1];
                let rhs = (&self.delta - m * m) * &norms[i - 1];
                if norms[i] < rhs {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Display for LatticeBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub(crate) fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rdot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn bareiss_det(m: &mut [Vec<BigInt>]) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * prev
}

/// Integral LLL state; vectors and Gram data are 1-indexed as in the
/// textbook formulation, `d[0] = 1`.
struct Integral {
    b: Vec<Vec<BigInt>>,
    d: Vec<BigInt>,
    lam: Vec<Vec<BigInt>>,
}

impl Integral {
    fn redi(&mut self, k: usize, l: usize) {
        let two_lam: BigInt = &self.lam[k][l] << 1u32;
        if two_lam.abs() <= self.d[l] {
            return;
        }
        // Nearest integer to lam / d with d > 0.
        let q = (two_lam + &self.d[l]).div_floor(&(&self.d[l] << 1u32));
        let bl = self.b[l].clone();
        for (x, y) in self.b[k].iter_mut().zip(&bl) {
            *x -= &q * y;
        }
        self.lam[k][l] -= &q * &self.d[l];
        for i in 1..l {
            let t = &q * &self.lam[l][i];
            self.lam[k][i] -= t;
        }
    }

    fn swapi(&mut self, k: usize, kmax: usize) {
        self.b.swap(k, k - 1);
        for j in 1..k - 1 {
            let t = self.lam[k][j].clone();
            self.lam[k][j] = self.lam[k - 1][j].clone();
            self.lam[k - 1][j] = t;
        }
        let lam = self.lam[k][k - 1].clone();
        let bb = (&self.d[k - 2] * &self.d[k] + &lam * &lam) / &self.d[k - 1];
        for i in k + 1..=kmax {
            let t = self.lam[i][k].clone();
            self.lam[i][k] = (&self.d[k] * &self.lam[i][k - 1] - &lam * &t) / &self.d[k - 1];
            self.lam[i][k - 1] = (&bb * &t + &lam * &self.lam[i][k]) / &self.d[k];
        }
        self.d[k - 1] = bb;
    }
}

/// LLL-reduce a basis with exact integer arithmetic.
pub fn lll_reduce(basis: &LatticeBasis) -> Result<LatticeBasis, LllError> {
    basis.validate()?;
    let n = basis.rows.len();
    let (num, den) = (basis.delta.numer().clone(), basis.delta.denom().clone());
    let mut st = Integral {
        b: std::iter::once(Vec::new())
            .chain(basis.rows.iter().cloned())
            .collect(),
        d: vec![BigInt::zero(); n + 1],
        lam: vec![vec![BigInt::zero(); n + 1]; n + 1],
    };
    st.d[0] = BigInt::one();
    st.d[1] = dot(&st.b[1], &st.b[1]);
    if st.d[1].is_zero() {
        return Err(LllError::Dependent);
    }
    let mut k = 2;
    let mut kmax = 1;
    while k <= n {
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = dot(&st.b[k], &st.b[j]);
                for i in 1..j {
                    u = (&st.d[i] * u - &st.lam[k][i] * &st.lam[j][i]) / &st.d[i - 1];
                }
                if j < k {
                    st.lam[k][j] = u;
                } else {
                    if u.is_zero() {
                        return Err(LllError::Dependent);
                    }
                    st.d[k] = u;
                }
            }
        }
        loop {
            st.redi(k, k - 1);
            let l = &st.lam[k][k - 1];
            let lhs = (&st.d[k] * &st.d[k - 2] + l * l) * &den;
            let rhs = &st.d[k - 1] * &st.d[k - 1] * &num;
            if lhs < rhs {
                st.swapi(k, kmax);
                if k > 2 {
                    k -= 1;
                }
            } else {
                break;
            }
        }
        for l in (1..k - 1).rev() {
            st.redi(k, l);
        }
        k += 1;
    }
    st.b.remove(0);
    Ok(LatticeBasis {
        rows: st.b,
        delta: basis.delta.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_fixed() {
        let id = LatticeBasis::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(lll_reduce(&id).unwrap(), id);
    }

    #[test]
    fn small_example() {
        let b = LatticeBasis::from_i64(&[&[1, 1, 1], &[-1, 0, 2], &[3, 5, 6]]);
        let r = lll_reduce(&b).unwrap();
        assert_eq!(dot(&r.rows[0], &r.rows[0]), BigInt::from(1));
        assert!(r.is_reduced());
        assert_eq!(r.gram_determinant(), b.gram_determinant());
    }

    #[test]
    fn shortest_vector_oracle_for_small_example() {
        // Exhaustive search over coefficient vectors in [-10, 10]^3.
        let rows = [[1i64, 1, 1], [-1, 0, 2], [3, 5, 6]];
        let mut best = i64::MAX;
        for a in -10i64..=10 {
            for b in -10i64..=10 {
                for c in -10i64..=10 {
                    if (a, b, c) == (0, 0, 0) {
                        continue;
                    }
                    let v: Vec<i64> = (0..3)
                        .map(|j| a * rows[0][j] + b * rows[1][j] + c * rows[2][j])
                        .collect();
                    best = best.min(v.iter().map(|x| x * x).sum());
                }
            }
        }
        assert_eq!(best, 1);
    }

    #[test]
    fn dimension_one() {
        let b = LatticeBasis::from_i64(&[&[5]]);
        assert_eq!(lll_reduce(&b).unwrap(), b);
    }

    #[test]
    fn rejects_bad_input() {
        let dep = LatticeBasis::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(lll_reduce(&dep), Err(LllError::Dependent));
        let ragged = LatticeBasis::from_i64(&[&[1, 2], &[2]]);
        assert_eq!(lll_reduce(&ragged), Err(LllError::Ragged));
        let bad = LatticeBasis::from_i64(&[&[1]]).with_delta(BigRational::one());
        assert!(matches!(lll_reduce(&bad), Err(LllError::BadDelta(_))));
        let zero = LatticeBasis::from_i64(&[&[0, 0]]);
        assert_eq!(lll_reduce(&zero), Err(LllError::Dependent));
    }

    #[test]
    fn finds_short_relation() {
        // Relations a + 2b + 3c = 0; the shortest is (1, 1, -1).
        let b = LatticeBasis::from_i64(&[&[1, 0, 0, 1000], &[0, 1, 0, 2000], &[0, 0, 1, 3000]]);
        let r = lll_reduce(&b).unwrap();
        assert!(r.is_reduced());
        assert!(r.rows[0][3].is_zero());
        assert_eq!(dot(&r.rows[0], &r.rows[0]), BigInt::from(3));
    }

    #[test]
    fn text_dump() {
        let b = LatticeBasis::from_i64(&[&[1, -2], &[0, 3]]);
        assert_eq!(b.to_text(), "1 -2\n0 3\n");
    }
}
