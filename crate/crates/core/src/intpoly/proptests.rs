use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use super::{Bound, IntPoly};

fn poly(max_deg: usize, bound: i64) -> impl Strategy<Value = IntPoly> {
    prop::collection::vec(-bound..=bound, 1..=max_deg + 1).prop_map(|c| IntPoly::from_i64(&c))
}

fn nonzero(max_deg: usize, bound: i64) -> impl Strategy<Value = IntPoly> {
    poly(max_deg, bound).prop_filter("nonzero", |p| !p.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ring_laws(a in poly(6, 20), b in poly(6, 20), c in poly(4, 20)) {
        prop_assert_eq!((a.clone() + b.clone()) * c.clone(), a.clone() * c.clone() + b.clone() * c.clone());
        prop_assert_eq!(a.clone() * b.clone(), b.clone() * a.clone());
        prop_assert_eq!(a.clone() - a.clone(), IntPoly::zero());
    }

    #[test]
    fn division_by_monic(a in poly(8, 50), b in poly(4, 50)) {
        let mut c = b.coeffs().to_vec();
        c.push(BigInt::from(1));
        let d = IntPoly::new(c);
        let (q, r) = a.div_rem(&d).unwrap();
        prop_assert!(r.is_zero() || r.deg() < d.deg());
        prop_assert_eq!(q * d, a - r);
    }

    #[test]
    fn gcd_divides_both(a in nonzero(5, 9), b in nonzero(5, 9), g in nonzero(3, 5)) {
        let x = a * g.clone();
        let y = b * g.clone();
        let d = x.gcd(&y);
        prop_assert!(d.divides(&x) && d.divides(&y));
        prop_assert!(g.primitive_part().divides(&d));
    }

    #[test]
    fn text_round_trip(a in poly(10, 1000)) {
        let s = a.to_string();
        prop_assert_eq!(s.parse::<IntPoly>().unwrap(), a);
    }

    #[test]
    fn taylor_shift_inverts(a in poly(8, 30), s in -5i64..=5) {
        let back = a.taylor_shift(&BigInt::from(s)).taylor_shift(&BigInt::from(-s));
        prop_assert_eq!(back, a.clone());
        let at = BigRational::from_integer(BigInt::from(2));
        let shifted = a.taylor_shift(&BigInt::from(s)).eval_exact(&at);
        prop_assert_eq!(shifted, a.eval_exact(&(at + BigRational::from_integer(BigInt::from(s)))));
    }

    #[test]
    fn sturm_counts_constructed_roots(roots in prop::collection::btree_set(-20i64..=20, 1..7), extra in 0usize..3) {
        let mut p = IntPoly::one();
        for &r in &roots {
            p = p * IntPoly::linear_root(r);
        }
        // Irreducible quadratics add no real roots.
        for _ in 0..extra {
            p = p * "x^2 + 1".parse::<IntPoly>().unwrap();
        }
        prop_assert_eq!(p.sturm_count(&Bound::NegInf, &Bound::PosInf).unwrap(), roots.len());
        let positive = roots.iter().filter(|r| **r > 0).count();
        prop_assert_eq!(p.sturm_count(&Bound::from(0), &Bound::PosInf).unwrap(), positive);
        let found = p.real_roots_f64().unwrap();
        prop_assert_eq!(found.len(), roots.len());
        for (f, r) in found.iter().zip(&roots) {
            prop_assert!((f - *r as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn reciprocal_round_trip(a in poly(5, 20)) {
        let mut c = a.coeffs().to_vec();
        c.push(BigInt::from(1));
        let q = IntPoly::new(c);
        prop_assume!(!q.is_constant());
        let p = q.to_reciprocal().unwrap();
        prop_assert_eq!(p.deg(), 2 * q.deg());
        let rev: Vec<BigInt> = p.coeffs().iter().rev().cloned().collect();
        prop_assert_eq!(rev.as_slice(), p.coeffs());
        prop_assert_eq!(p.from_reciprocal().unwrap(), q.clone());
        prop_assert_eq!(p.trace().unwrap(), q.trace().unwrap() + p.deg());
    }

    #[test]
    fn float_eval_is_bounded(a in poly(12, 1000), x in -4.0f64..4.0) {
        let fe = a.eval_float(x).unwrap();
        let exact = a.eval_at_f64_exact(x);
        prop_assert!((fe.value - exact).abs() <= fe.error_bound + exact.abs() * 1e-15);
    }

    #[test]
    fn squarefree_decomposition_multiplies_back(a in nonzero(3, 6), b in nonzero(2, 6)) {
        let p = a.clone() * b.clone().pow(2) * b;
        let mut back = IntPoly::one();
        for (f, m) in p.square_free_decomposition() {
            back = back * f.pow(m as u32);
        }
        let (b, p) = (back.primitive_part(), p.primitive_part());
        prop_assert!(b == p || b == p.scale(&BigInt::from(-1)));
    }
}
