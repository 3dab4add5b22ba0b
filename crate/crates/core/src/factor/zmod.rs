//! Dense polynomials over Z/mZ, coefficients kept in `[0, m)`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;

pub(crate) type ZPoly = Vec<BigInt>;

pub(crate) fn trim(mut a: ZPoly) -> ZPoly {
    while a.last().is_some_and(Zero::is_zero) {
        a.pop();
    }
    a
}

pub(crate) fn reduce(a: &[BigInt], m: &BigInt) -> ZPoly {
    trim(a.iter().map(|c| c.mod_floor(m)).collect())
}

pub(crate) fn deg(a: &[BigInt]) -> usize {
    a.len().saturating_sub(1)
}

pub(crate) fn inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

pub(crate) fn add(a: &[BigInt], b: &[BigInt], m: &BigInt) -> ZPoly {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    trim(
        (0..n)
            .map(|i| (a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z)).mod_floor(m))
            .collect(),
    )
}

pub(crate) fn sub(a: &[BigInt], b: &[BigInt], m: &BigInt) -> ZPoly {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    trim(
        (0..n)
            .map(|i| (a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).mod_floor(m))
            .collect(),
    )
}

pub(crate) fn mul(a: &[BigInt], b: &[BigInt], m: &BigInt) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    reduce(&out, m)
}

pub(crate) fn scale(a: &[BigInt], k: &BigInt, m: &BigInt) -> ZPoly {
    reduce(&a.iter().map(|c| c * k).collect::<Vec<_>>(), m)
}

/// Division by `b` whose leading coefficient is a unit mod `m`.
pub(crate) fn divrem(a: &[BigInt], b: &[BigInt], m: &BigInt) -> (ZPoly, ZPoly) {
    let db = deg(b);
    let inv = inverse(b.last().expect("nonzero divisor"), m).expect("unit leading coefficient");
    let mut r = reduce(a, m);
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = (r.last().unwrap() * &inv).mod_floor(m);
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] = (&r[shift + j] - &c * bj).mod_floor(m);
        }
        q[shift] = c;
        r = trim(r);
    }
    (trim(q), r)
}

pub(crate) fn rem(a: &[BigInt], b: &[BigInt], m: &BigInt) -> ZPoly {
    divrem(a, b, m).1
}

pub(crate) fn make_monic(a: &[BigInt], p: &BigInt) -> ZPoly {
    match a.last() {
        None => Vec::new(),
        Some(lc) => scale(a, &inverse(lc, p).expect("field element"), p),
    }
}

pub(crate) fn derivative(a: &[BigInt], m: &BigInt) -> ZPoly {
    reduce(
        &a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect::<Vec<_>>(),
        m,
    )
}

/// Monic gcd over the field Z/pZ.
pub(crate) fn gcd(a: &[BigInt], b: &[BigInt], p: &BigInt) -> ZPoly {
    let (mut a, mut b) = (reduce(a, p), reduce(b, p));
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    make_monic(&a, p)
}

/// `(s, t)` with `s a + t b = 1` over Z/pZ, `deg s < deg b`, `deg t < deg a`.
pub(crate) fn bezout(a: &[BigInt], b: &[BigInt], p: &BigInt) -> (ZPoly, ZPoly) {
    let (mut r0, mut r1) = (reduce(a, p), reduce(b, p));
    let (mut s0, mut s1) = (vec![BigInt::one()], Vec::new());
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1, p);
        let s2 = sub(&s0, &mul(&q, &s1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
    }
    assert_eq!(r0.len(), 1, "bezout on non-coprime inputs");
    let inv = inverse(&r0[0], p).unwrap();
    let s = rem(&scale(&s0, &inv, p), b, p);
    let num = sub(&[BigInt::one()], &mul(&s, a, p), p);
    let (t, r) = divrem(&num, b, p);
    debug_assert!(r.is_empty());
    (s, t)
}

pub(crate) fn powmod(base: &[BigInt], e: &BigUint, f: &[BigInt], m: &BigInt) -> ZPoly {
    let mut result = vec![BigInt::one()];
    let base = rem(base, f, m);
    let bits = e.bits();
    for i in (0..bits).rev() {
        result = rem(&mul(&result, &result, m), f, m);
        if e.bit(i) {
            result = rem(&mul(&result, &base, m), f, m);
        }
    }
    rem(&result, f, m)
}

/// Distinct-degree factorization of a monic square-free `f` over Z/pZ.
pub(crate) fn distinct_degree(f: &[BigInt], p: &BigInt) -> Vec<(ZPoly, usize)> {
    let x = vec![BigInt::zero(), BigInt::one()];
    let pe = p.to_biguint().unwrap();
    let mut f = f.to_vec();
    let mut h = x.clone();
    let mut out = Vec::new();
    let mut i = 1;
    while deg(&f) >= 2 * i {
        h = powmod(&h, &pe, &f, p);
        let g = gcd(&f, &sub(&h, &x, p), p);
        if deg(&g) > 0 {
            f = divrem(&f, &g, p).0;
            h = rem(&h, &f, p);
            out.push((g, i));
        }
        i += 1;
    }
    if deg(&f) > 0 {
        let d = deg(&f);
        out.push((f, d));
    }
    out
}

/// Cantor–Zassenhaus splitting of `g`, a product of distinct monic
/// irreducibles of degree `d` over Z/pZ with `p` odd.
pub(crate) fn equal_degree<R: Rng>(g: &[BigInt], d: usize, p: &BigInt, rng: &mut R) -> Vec<ZPoly> {
    let n = deg(g);
    if n == d {
        return vec![g.to_vec()];
    }
    let pu = p.to_biguint().unwrap();
    let e = (pu.pow(d as u32) - 1u32) / 2u32;
    loop {
        let a: ZPoly = trim(
            (0..n)
                .map(|_| BigInt::from(rng.gen_range(0..=u64::MAX)).mod_floor(p))
                .collect(),
        );
        if deg(&a) == 0 {
            continue;
        }
        let b = sub(&powmod(&a, &e, g, p), &[BigInt::one()], p);
        let h = gcd(g, &b, p);
        let dh = deg(&h);
        if dh > 0 && dh < n {
            let rest = divrem(g, &h, p).0;
            let mut out = equal_degree(&h, d, p, rng);
            out.extend(equal_degree(&rest, d, p, rng));
            return out;
        }
    }
}

/// Symmetric representative in `(-m/2, m/2]`.
pub(crate) fn symmetric(c: &BigInt, m: &BigInt) -> BigInt {
    let r = c.mod_floor(m);
    if (&r << 1u32) > *m {
        r - m
    } else {
        r
    }
}

pub(crate) fn is_small_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

pub(crate) fn abs_ceil_sqrt(v: &BigInt) -> BigInt {
    let v = v.abs();
    let r = v.sqrt();
    if &r * &r == v {
        r
    } else {
        r + 1
    }
}
