//! Shared inputs for the kernel benchmarks.

use traceforge::catalog::Catalog;
use traceforge::{IntPoly, LatticeBasis, MaxMinProblem, SearchLatticeSpec};

fn p(s: &str) -> IntPoly {
    s.parse().expect("fixture polynomial parses")
}

/// A degree-12 product of small irreducibles, the factorization workload.
pub fn product_poly() -> IntPoly {
    [
        "x^4 - 7*x^3 + 13*x^2 - 7*x + 1",
        "x^3 - 5*x^2 + 6*x - 1",
        "x^2 - 3*x + 1",
        "x^2 + x + 1",
        "x - 2",
    ]
    .iter()
    .fold(IntPoly::one(), |acc, s| acc * p(s))
}

/// Minimal polynomial of sqrt 2 + sqrt 3 + sqrt 5: irreducible, yet split
/// into factors of degree at most 2 modulo every prime, the bad case for
/// recombination.
pub fn swinnerton_dyer() -> IntPoly {
    p("x^8 - 40*x^6 + 352*x^4 - 960*x^2 + 576")
}

/// A search lattice of degree `k` over the first catalog entries.
pub fn search_lattice(k: usize) -> LatticeBasis {
    let base: Vec<(IntPoly, u32)> = Catalog::paper()
        .entries
        .iter()
        .take(4)
        .map(|e| (e.poly.clone(), 1))
        .collect();
    let r: usize = base.iter().map(|(q, _)| q.deg()).sum();
    let t = 2.2;
    let n = 4 * (r + k);
    let points: Vec<f64> = (1..=n).map(|i| 8.0 * i as f64 / n as f64).collect();
    let mut spec = SearchLatticeSpec::with_factors(base, k, t, points, 1.0)
        .with_ln_scale(1.6 * (r + k) as f64 / t);
    spec.drop_points_near_roots();
    spec.drop_negligible_points();
    traceforge::build_search_lattice(&spec).expect("fixture lattice builds")
}

/// The max-min LP for the first `polys` catalog entries on `points`
/// log-spaced control points.
pub fn maxmin_problem(polys: usize, points: usize) -> MaxMinProblem {
    let qs: Vec<IntPoly> = Catalog::paper()
        .entries
        .iter()
        .take(polys)
        .map(|e| e.poly.clone())
        .collect();
    let xs = traceforge::optimizer::log_spaced(points, 1e-3, 8.0);
    let xs: Vec<f64> = xs
        .into_iter()
        .filter(|&x| qs.iter().all(|q| q.ln_abs_at(x).is_finite()))
        .collect();
    MaxMinProblem::from_polys(&qs, &xs).expect("fixture problem builds")
}
