//! Exact integer-polynomial, lattice and optimization kernels for auxiliary-function
//! lower bounds on the absolute trace of totally positive algebraic integers.

#![allow(clippy::needless_range_loop)]

mod util;

pub mod intpoly;

pub use intpoly::{Bound, FloatEval, IntPoly, PolyError, RootInterval};
pub mod factor;

pub use factor::{factor, is_irreducible, squarefree_decompose, Factorization};
pub mod lll;

pub use lll::{
    build_search_lattice, extract_candidates, lll_reduce, LatticeBasis, LllError, SearchLatticeSpec,
};
pub mod auxfun;

pub use auxfun::{
    eval_f, global_min, local_minima, rationalize, weighted_sup, AuxError, AuxFunction,
    MinimizationReport,
};
pub mod catalog;

pub use catalog::{parse_catalog, serialize_catalog, Catalog, CatalogError};
pub mod optimizer;
pub use optimizer::{
    silp_optimize, solve_maxmin, MaxMinProblem, MaxMinSolution, OptError, OptimizationTrace,
};
pub mod search;
pub use search::{run_sweep, search_step, seed, SearchConfig, SearchError, SearchState};
