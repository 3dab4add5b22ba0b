//! Quadratic Hensel lifting of a modular factorization along a binary tree.

use num_bigint::BigInt;
use num_traits::One;

use super::zmod::{self, ZPoly};

/// One lifting step from modulus `m` to `m2` (`m2` divides `m^2`).
///
/// Input: `f ≡ g h (mod m)`, `s g + t h ≡ 1 (mod m)`, `g` and `h` monic.
/// Output satisfies the same relations mod `m2`.
fn step(f: &ZPoly, g: &ZPoly, h: &ZPoly, s: &ZPoly, t: &ZPoly, m2: &BigInt) -> [ZPoly; 4] {
    let e = zmod::sub(f, &zmod::mul(g, h, m2), m2);
    let (q, r) = zmod::divrem(&zmod::mul(s, &e, m2), h, m2);
    let g2 = zmod::add(
        g,
        &zmod::add(&zmod::mul(t, &e, m2), &zmod::mul(&q, g, m2), m2),
        m2,
    );
    let h2 = zmod::add(h, &r, m2);
    let b = zmod::sub(
        &zmod::add(&zmod::mul(s, &g2, m2), &zmod::mul(t, &h2, m2), m2),
        &[BigInt::one()],
        m2,
    );
    let (c, d) = zmod::divrem(&zmod::mul(s, &b, m2), &h2, m2);
    let s2 = zmod::sub(s, &d, m2);
    let t2 = zmod::sub(
        t,
        &zmod::add(&zmod::mul(t, &b, m2), &zmod::mul(&c, &g2, m2), m2),
        m2,
    );
    [g2, h2, s2, t2]
}

/// Lift `target ≡ g0 h0 (mod p)` to `target ≡ g h (mod modulus)`.
fn lift_pair(
    target: &ZPoly,
    g0: &ZPoly,
    h0: &ZPoly,
    p: &BigInt,
    modulus: &BigInt,
) -> (ZPoly, ZPoly) {
    let (mut s, mut t) = zmod::bezout(g0, h0, p);
    let (mut g, mut h) = (g0.clone(), h0.clone());
    let mut m = p.clone();
    while &m < modulus {
        let sq = &m * &m;
        let m2 = if &sq > modulus { modulus.clone() } else { sq };
        let f = zmod::reduce(target, &m2);
        [g, h, s, t] = step(&f, &g, &h, &s, &t, &m2);
        m = m2;
    }
    (g, h)
}

/// Lift monic factors `parts` of `target` mod `p` (pairwise coprime, product
/// equal to the monic `target` mod `p`) to factors mod `modulus`.
pub(crate) fn lift(target: &ZPoly, parts: &[ZPoly], p: &BigInt, modulus: &BigInt) -> Vec<ZPoly> {
    if parts.len() == 1 {
        return vec![zmod::reduce(target, modulus)];
    }
    let mid = parts.len() / 2;
    let (left, right) = parts.split_at(mid);
    let prod = |fs: &[ZPoly]| {
        fs.iter()
            .fold(vec![BigInt::one()], |acc, f| zmod::mul(&acc, f, p))
    };
    let (g, h) = lift_pair(target, &prod(left), &prod(right), p, modulus);
    let mut out = lift(&g, left, p, modulus);
    out.extend(lift(&h, right, p, modulus));
    out
}
