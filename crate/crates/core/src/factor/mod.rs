//! Factorization over the integers: square-free decomposition, modular
//! factorization at a small good prime, Hensel lifting and recombination.

mod hensel;
mod zmod;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::intpoly::IntPoly;
use zmod::ZPoly;

/// `unit * prod factor^multiplicity`, each factor primitive, irreducible and
/// with positive leading coefficient. Factors are sorted canonically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factorization {
    #[serde(serialize_with = "crate::util::ser_display")]
    pub unit: BigInt,
    pub factors: Vec<(IntPoly, usize)>,
}

impl Factorization {
    pub fn expand(&self) -> IntPoly {
        self.factors
            .iter()
            .fold(IntPoly::constant(self.unit.clone()), |acc, (f, m)| {
                acc * f.pow(*m as u32)
            })
    }

    /// Total number of irreducible factors counted with multiplicity.
    pub fn count(&self) -> usize {
        self.factors.iter().map(|(_, m)| m).sum()
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.unit)?;
        for (p, m) in &self.factors {
            write!(f, " * ({p})")?;
            if *m > 1 {
                write!(f, "^{m}")?;
            }
        }
        Ok(())
    }
}

/// Square-free parts of `p / content(p)` with their multiplicities.
pub fn squarefree_decompose(p: &IntPoly) -> Vec<(IntPoly, usize)> {
    p.square_free_decomposition()
}

/// Complete factorization into irreducibles over the integers.
///
/// The zero polynomial has no factorization; it is returned as unit 0 with
/// no factors.
pub fn factor(p: &IntPoly) -> Factorization {
    let Some(lc) = p.leading() else {
        return Factorization {
            unit: BigInt::zero(),
            factors: Vec::new(),
        };
    };
    let c = p.content();
    let unit = if lc.is_negative() { -c } else { c };
    let mut f = p.primitive_part();
    if f.is_constant() {
        return Factorization {
            unit: p.coeff(0),
            factors: Vec::new(),
        };
    }
    let mut factors = Vec::new();
    let zeros = f.coeffs().iter().take_while(|c| c.is_zero()).count();
    if zeros > 0 {
        factors.push((IntPoly::x(), zeros));
        f = IntPoly::new(f.coeffs()[zeros..].to_vec());
    }
    let parts = f.square_free_decomposition();
    let split: Vec<Vec<(IntPoly, usize)>> = parts
        .par_iter()
        .map(|(part, m)| {
            factor_square_free(part)
                .into_iter()
                .map(|g| (g, *m))
                .collect()
        })
        .collect();
    factors.extend(split.into_iter().flatten());
    factors.sort_by(|a, b| a.0.canonical_cmp(&b.0));
    Factorization { unit, factors }
}

/// True iff `p` (degree at least 1) is irreducible in Z[x].
pub fn is_irreducible(p: &IntPoly) -> bool {
    if p.is_constant() {
        return false;
    }
    let fz = factor(p);
    fz.factors.len() == 1 && fz.factors[0].1 == 1 && fz.unit.abs().is_one()
}

fn to_zpoly(p: &IntPoly) -> ZPoly {
    p.coeffs().to_vec()
}

fn choose_prime(f: &IntPoly) -> BigInt {
    let lc = f.leading().unwrap();
    let fz = to_zpoly(f);
    (3u64..)
        .filter(|&n| zmod::is_small_prime(n))
        .map(BigInt::from)
        .find(|p| {
            if (lc % p).is_zero() {
                return false;
            }
            let fp = zmod::reduce(&fz, p);
            let g = zmod::gcd(&fp, &zmod::derivative(&fp, p), p);
            zmod::deg(&g) == 0
        })
        .expect("a square-free polynomial has finitely many bad primes")
}

/// Factor a primitive, square-free polynomial with positive leading
/// coefficient and nonzero constant term.
fn factor_square_free(f: &IntPoly) -> Vec<IntPoly> {
    let d = f.deg();
    if d <= 1 {
        return vec![f.clone()];
    }
    let p = choose_prime(f);
    let monic = zmod::make_monic(&zmod::reduce(&to_zpoly(f), &p), &p);
    let mut rng = ChaCha8Rng::seed_from_u64(0x7ace_5eed ^ d as u64);
    let mut modular = Vec::new();
    for (g, k) in zmod::distinct_degree(&monic, &p) {
        modular.extend(zmod::equal_degree(&g, k, &p, &mut rng));
    }
    if modular.len() == 1 {
        return vec![f.clone()];
    }
    modular.sort();

    let lc = f.leading().unwrap().clone();
    let norm = zmod::abs_ceil_sqrt(&f.coeffs().iter().map(|c| c * c).sum::<BigInt>());
    let limit = (norm << d) * &lc * 2u32;
    let mut modulus = p.clone();
    while modulus <= limit {
        modulus *= &p;
    }
    let lc_inv = zmod::inverse(&lc, &modulus).unwrap();
    let target = zmod::scale(&to_zpoly(f), &lc_inv, &modulus);
    let lifted = hensel::lift(&target, &modular, &p, &modulus);
    recombine(f.clone(), lifted, &modulus)
}

fn recombine(mut f: IntPoly, mut us: Vec<ZPoly>, modulus: &BigInt) -> Vec<IntPoly> {
    let mut out = Vec::new();
    let mut k = 1;
    'outer: while 2 * k <= us.len() {
        let lc = f.leading().unwrap().clone();
        let lc_f0 = &lc * f.coeff(0);
        let mut subset: Vec<usize> = (0..k).collect();
        loop {
            let t0 = subset
                .iter()
                .fold(lc.clone(), |acc, &i| (acc * &us[i][0]) % modulus);
            let t0 = zmod::symmetric(&t0, modulus);
            if !t0.is_zero() && (&lc_f0 % &t0).is_zero() {
                let g = subset
                    .iter()
                    .fold(vec![lc.clone()], |acc, &i| zmod::mul(&acc, &us[i], modulus));
                let g = IntPoly::new(g.iter().map(|c| zmod::symmetric(c, modulus)).collect())
                    .primitive_part();
                if let Ok(q) = f.div_exact(&g) {
                    out.push(g);
                    f = q;
                    for &i in subset.iter().rev() {
                        us.remove(i);
                    }
                    continue 'outer;
                }
            }
            if !next_combination(&mut subset, us.len()) {
                break;
            }
        }
        k += 1;
    }
    if !f.is_constant() {
        out.push(f);
    }
    out
}

/// Advance `idx` to the next k-subset of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> IntPoly {
        s.parse().unwrap()
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(
            squarefree_decompose(&(p("x - 1").pow(2) * p("x"))),
            vec![(p("x"), 1), (p("x - 1"), 2)]
        );
        assert_eq!(
            squarefree_decompose(&p("x^2 - 3*x + 1")),
            vec![(p("x^2 - 3*x + 1"), 1)]
        );
        assert_eq!(
            squarefree_decompose(&p("x^4 - 2*x^2 + 1")),
            vec![(p("x^2 - 1"), 2)]
        );
    }

    #[test]
    fn factor_examples() {
        let f = factor(&p("x^2 - 1"));
        assert_eq!(f.factors, vec![(p("x - 1"), 1), (p("x + 1"), 1)]);
        assert_eq!(f.unit, BigInt::one());

        let f = factor(&p("x^3 - 4*x^2 + 4*x - 1"));
        assert_eq!(f.factors, vec![(p("x - 1"), 1), (p("x^2 - 3*x + 1"), 1)]);

        let q = p("x^4 - 7*x^3 + 13*x^2 - 7*x + 1");
        assert_eq!(factor(&q).factors, vec![(q, 1)]);
    }

    #[test]
    fn units_and_constants() {
        let f = factor(&p("-6*x^2 + 6"));
        assert_eq!(f.unit, BigInt::from(-6));
        assert_eq!(f.expand(), p("-6*x^2 + 6"));
        let f = factor(&IntPoly::constant(-4));
        assert_eq!(f.unit, BigInt::from(-4));
        assert!(f.factors.is_empty());
        assert_eq!(f.to_string(), "-4");
        assert_eq!(
            factor(&p("2*x^3 - 2*x")).to_string(),
            "2 * (x - 1) * (x) * (x + 1)"
        );
    }

    #[test]
    fn irreducibility_examples() {
        assert!(is_irreducible(&p("x - 2")));
        assert!(!is_irreducible(&p("x^2 - 1")));
        assert!(is_irreducible(&p("x^3 - 5*x^2 + 6*x - 1")));
        assert!(!is_irreducible(&p("2*x + 2")));
    }

    #[test]
    fn needs_recombination() {
        // x^4 + 1 splits into quadratics modulo every prime.
        assert!(is_irreducible(&p("x^4 + 1")));
        let a = p("x^4 + 1") * p("x^4 - 7*x^3 + 13*x^2 - 7*x + 1") * p("3*x^2 + 2*x - 5");
        let f = factor(&a);
        assert_eq!(f.expand(), a);
        assert_eq!(f.count(), 4);
    }

    #[test]
    fn combinations_enumerate_all() {
        let mut idx = vec![0, 1];
        let mut seen = 1;
        while next_combination(&mut idx, 5) {
            seen += 1;
        }
        assert_eq!(seen, 10);
    }
}
