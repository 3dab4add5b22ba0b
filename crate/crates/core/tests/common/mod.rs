//! Independent oracles shared by the integration suites.
#![allow(dead_code, clippy::needless_range_loop)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use traceforge::IntPoly;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Divide `f` by the monic `g` over `i64`; `Some(q)` when exact.
fn div_monic(f: &[i64], g: &[i64]) -> Option<Vec<i64>> {
    let (n, d) = (f.len() - 1, g.len() - 1);
    if n < d {
        return None;
    }
    let mut r = f.to_vec();
    let mut q = vec![0i64; n - d + 1];
    for s in (0..=n - d).rev() {
        let c = r[s + d];
        q[s] = c;
        for (i, gc) in g.iter().enumerate() {
            r[s + i] = r[s + i].checked_sub(c.checked_mul(*gc)?)?;
        }
    }
    r[..d].iter().all(|c| *c == 0).then_some(q)
}

fn binom(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// Smallest-degree monic factor of monic `f` found by exhaustive search
/// over the coefficient box implied by the root bound `b`.
fn smallest_factor(f: &[i64], b: i64) -> Option<Vec<i64>> {
    let n = f.len() - 1;
    if f[0] == 0 {
        return Some(vec![0, 1]);
    }
    for d in 1..=n / 2 {
        let bounds: Vec<i64> = (0..d)
            .map(|i| binom(d, d - i) * b.pow((d - i) as u32))
            .collect();
        let mut g = vec![0i64; d + 1];
        g[d] = 1;
        // Odometer over g_1..g_{d-1}; g_0 runs over divisors of f_0.
        let a0 = f[0].abs();
        let divisors: Vec<i64> = (1..=a0.min(bounds[0]))
            .filter(|v| a0 % v == 0)
            .flat_map(|v| [v, -v])
            .collect();
        let mut idx: Vec<i64> = (1..d).map(|i| -bounds[i]).collect();
        loop {
            for (i, v) in idx.iter().enumerate() {
                g[i + 1] = *v;
            }
            for &g0 in &divisors {
                g[0] = g0;
                if div_monic(f, &g).is_some() {
                    return Some(g.clone());
                }
            }
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] <= bounds[k + 1] {
                    break;
                }
                idx[k] = -bounds[k + 1];
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }
    None
}

/// Complete factorization of a monic `i64` polynomial by brute force,
/// as sorted `(factor, multiplicity)` pairs.
pub fn brute_factor(f: &[i64]) -> Vec<(Vec<i64>, usize)> {
    assert_eq!(*f.last().unwrap(), 1, "monic input");
    let b = 1 + f[..f.len() - 1].iter().map(|c| c.abs()).max().unwrap_or(0);
    let mut rest = f.to_vec();
    let mut out: Vec<(Vec<i64>, usize)> = Vec::new();
    while rest.len() > 1 {
        let g = smallest_factor(&rest, b).unwrap_or_else(|| rest.clone());
        rest = div_monic(&rest, &g).unwrap();
        match out.iter_mut().find(|(h, _)| *h == g) {
            Some((_, m)) => *m += 1,
            None => out.push((g, 1)),
        }
    }
    out.sort();
    out
}

pub fn random_poly(rng: &mut impl Rng, deg: usize, bound: i64, monic: bool) -> IntPoly {
    loop {
        let mut c: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-bound..=bound)).collect();
        if monic {
            c[deg] = 1;
        }
        if c[deg] != 0 {
            return IntPoly::from_i64(&c);
        }
    }
}

pub fn to_i64(p: &IntPoly) -> Vec<i64> {
    p.coeffs().iter().map(|c| c.to_i64().unwrap()).collect()
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Exact Gram-Schmidt data `(mu, |b*|^2)`, computed from scratch.
pub fn gram_schmidt(rows: &[Vec<BigInt>]) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
    let n = rows.len();
    let q = |v: &[BigInt]| -> Vec<BigRational> {
        v.iter()
            .map(|x| BigRational::from_integer(x.clone()))
            .collect()
    };
    let mut star: Vec<Vec<BigRational>> = Vec::new();
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    let mut norms = Vec::new();
    for i in 0..n {
        let mut v = q(&rows[i]);
        for j in 0..i {
            let num: BigRational = q(&rows[i]).iter().zip(&star[j]).map(|(a, b)| a * b).sum();
            mu[i][j] = num / &norms[j];
            for (x, s) in v.iter_mut().zip(&star[j]) {
                *x -= &mu[i][j] * s;
            }
        }
        norms.push(v.iter().map(|x| x * x).sum::<BigRational>());
        star.push(v);
    }
    (mu, norms)
}

/// Determinant of the Gram matrix, by exact elimination.
pub fn gram_det(rows: &[Vec<BigInt>]) -> BigRational {
    let (_, norms) = gram_schmidt(rows);
    norms.iter().fold(BigRational::one(), |acc, x| acc * x)
}

pub fn check_reduced(rows: &[Vec<BigInt>], delta: &BigRational) -> Result<(), String> {
    let (mu, norms) = gram_schmidt(rows);
    let half = BigRational::new(1.into(), 2.into());
    for i in 0..rows.len() {
        for j in 0..i {
            if mu[i][j].abs() > half {
                return Err(format!("mu[{i}][{j}] = {}", mu[i][j]));
            }
        }
        if i > 0 {
            let lhs = &norms[i] + &mu[i][i - 1] * &mu[i][i - 1] * &norms[i - 1];
            if lhs < delta * &norms[i - 1] {
                return Err(format!("Lovasz fails at {i}"));
            }
        }
    }
    Ok(())
}

/// Squared length of a shortest nonzero vector, by enumerating the box
/// `|x_i| <= sqrt(R (G^-1)_ii)` that contains every vector of norm `<= R`.
pub fn shortest_sq(rows: &[Vec<i64>], radius_sq: i64) -> i64 {
    let n = rows.len();
    let g: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    rows[i]
                        .iter()
                        .zip(&rows[j])
                        .map(|(a, b)| (a * b) as f64)
                        .sum()
                })
                .collect()
        })
        .collect();
    let inv = invert(&g);
    let bounds: Vec<i64> = (0..n)
        .map(|i| ((radius_sq as f64 * inv[i][i]).sqrt() + 1e-6).floor() as i64)
        .collect();
    let mut best = radius_sq;
    let mut x: Vec<i64> = bounds.iter().map(|b| -b).collect();
    loop {
        if x.iter().any(|v| *v != 0) {
            let v: i64 = (0..rows[0].len())
                .map(|c| (0..n).map(|i| x[i] * rows[i][c]).sum::<i64>())
                .map(|e| e * e)
                .sum();
            best = best.min(v);
        }
        let mut k = 0;
        while k < n {
            x[k] += 1;
            if x[k] <= bounds[k] {
                break;
            }
            x[k] = -bounds[k];
            k += 1;
        }
        if k == n {
            return best;
        }
    }
}

fn invert(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| (i == j) as i32 as f64).collect())
        .collect();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs()))
            .unwrap();
        m.swap(c, p);
        inv.swap(c, p);
        let d = m[c][c];
        for k in 0..n {
            m[c][k] /= d;
            inv[c][k] /= d;
        }
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                for k in 0..n {
                    m[r][k] -= f * m[c][k];
                    inv[r][k] -= f * inv[c][k];
                }
            }
        }
    }
    inv
}

/// Maximum over `(c1, c2)` of `min_x x - c1 ln x - c2 ln|x - 1|`.
///
/// A grid of step `1e-3` on `[0, 1.5]^2` is searched coarse to fine: a
/// `1e-2` pass, then the `1e-3` grid around its winner, then two zooms. The
/// inner minimum is a fine scan on `(0, 12]` polished by golden section.
pub fn two_term_grid_oracle() -> (f64, f64, f64) {
    let xs: Vec<f64> = (1..=24_000)
        .map(|i| i as f64 * 5e-4)
        .filter(|x| (x - 1.0).abs() > 1e-9)
        .collect();
    let l1: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let l2: Vec<f64> = xs.iter().map(|x| (x - 1.0).abs().ln()).collect();
    let f = |c1: f64, c2: f64, x: f64| x - c1 * x.ln() - c2 * (x - 1.0).abs().ln();
    let inner = |c1: f64, c2: f64| -> f64 {
        let mut best = (f64::INFINITY, 0usize);
        let mut best_hi = (f64::INFINITY, 0usize);
        for i in 0..xs.len() {
            let v = xs[i] - c1 * l1[i] - c2 * l2[i];
            let slot = if xs[i] < 1.0 { &mut best } else { &mut best_hi };
            if v < slot.0 {
                *slot = (v, i);
            }
        }
        let mut m = f64::INFINITY;
        for (_, i) in [best, best_hi] {
            let (mut a, mut b) = (xs[i.saturating_sub(1)], xs[(i + 1).min(xs.len() - 1)]);
            if a < 1.0 && b > 1.0 {
                b = 1.0 - 1e-12;
            }
            if a < 1.0 && xs[i] > 1.0 {
                a = 1.0 + 1e-12;
            }
            let phi = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..80 {
                let x1 = b - phi * (b - a);
                let x2 = a + phi * (b - a);
                if f(c1, c2, x1) < f(c1, c2, x2) {
                    b = x2;
                } else {
                    a = x1;
                }
            }
            m = m.min(f(c1, c2, 0.5 * (a + b))).min(f(c1, c2, xs[i]));
        }
        m
    };
    let search = |lo1: f64, lo2: f64, span: f64, step: f64| -> (f64, f64, f64) {
        let n = (span / step).round() as usize;
        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        for i in 0..=n {
            for j in 0..=n {
                let (c1, c2) = (lo1 + i as f64 * step, lo2 + j as f64 * step);
                if c1 < 0.0 || c2 < 0.0 || c1 > 1.5 || c2 > 1.5 {
                    continue;
                }
                let v = inner(c1, c2);
                if v > best.0 {
                    best = (v, c1, c2);
                }
            }
        }
        best
    };
    let (_, a, b) = search(0.0, 0.0, 1.5, 1e-2);
    let (_, a, b) = search(a - 2e-2, b - 2e-2, 4e-2, 1e-3);
    let (_, a, b) = search(a - 2e-3, b - 2e-3, 4e-3, 1e-4);
    search(a - 2e-4, b - 2e-4, 4e-4, 1e-5)
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}
