mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use traceforge::{factor, lll_reduce, IntPoly, LatticeBasis, LllError};

fn small_poly(max_deg: usize, bound: i64) -> impl Strategy<Value = IntPoly> {
    (
        1..=max_deg,
        prop::collection::vec(-bound..=bound, max_deg + 1),
        1..=3i64,
    )
        .prop_map(|(d, mut c, lc)| {
            c.truncate(d + 1);
            c[d] = lc;
            IntPoly::from_i64(&c)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn factorization_multiplies_back(parts in prop::collection::vec(small_poly(4, 6), 1..4), sign in prop::bool::ANY, k in 1i64..4) {
        let mut p = IntPoly::constant(if sign { k } else { -k });
        for q in &parts {
            p = p * q.clone();
        }
        let fz = factor(&p);
        prop_assert_eq!(fz.expand(), p);
        for (f, _) in &fz.factors {
            prop_assert!(f.content() == BigInt::from(1));
            prop_assert!(f.leading().unwrap() > &BigInt::from(0));
        }
        prop_assert!(fz.count() >= parts.iter().filter(|q| !q.is_constant()).count());
    }

    #[test]
    fn factorization_matches_brute_force(c in prop::collection::vec(-3i64..=3, 1..=6)) {
        let mut coeffs = c;
        coeffs.push(1);
        let p = IntPoly::from_i64(&coeffs);
        let oracle = common::brute_factor(&coeffs);
        let mut ours: Vec<(Vec<i64>, usize)> = factor(&p).factors.iter().map(|(f, m)| (common::to_i64(f), *m)).collect();
        ours.sort();
        prop_assert_eq!(ours, oracle);
    }

    #[test]
    fn lll_invariants(n in 1usize..=6, seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = common::rng(seed);
        let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-30..=30)).collect()).collect();
        let basis = LatticeBasis::new(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect());
        match lll_reduce(&basis) {
            Err(LllError::Dependent) => prop_assert!(common::gram_det(&basis.rows) == BigRational::from_integer(0.into())),
            Err(e) => prop_assert!(false, "{e}"),
            Ok(red) => {
                prop_assert_eq!(common::gram_det(&red.rows), common::gram_det(&basis.rows));
                common::check_reduced(&red.rows, &common::rational(3, 4)).map_err(TestCaseError::fail)?;
            }
        }
    }
}

#[test]
fn brute_force_oracle_sanity() {
    assert_eq!(common::brute_factor(&[-1, 1]), vec![(vec![-1, 1], 1)]);
    assert_eq!(common::brute_factor(&[1, -2, 1]), vec![(vec![-1, 1], 2)]);
    assert_eq!(
        common::brute_factor(&[0, -1, 0, 1]),
        vec![(vec![-1, 1], 1), (vec![0, 1], 1), (vec![1, 1], 1)]
    );
    assert_eq!(
        common::brute_factor(&[1, 0, 0, 0, 1]),
        vec![(vec![1, 0, 0, 0, 1], 1)]
    );
    assert_eq!(common::brute_factor(&[1, 0, -3, 0, 1]).len(), 2);
}
