//! The recursive search: for each degree `k`, look for an integer polynomial
//! `R` that is small against the current auxiliary function, split it into
//! irreducible factors, re-optimize, and keep what earns weight.

mod state;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::auxfun::{global_min, AuxError, AuxFunction};
use crate::factor::factor;
use crate::intpoly::IntPoly;
use crate::lll::{
    build_search_lattice, extract_candidates, lll_reduce, LllError, SearchLatticeSpec,
};
use crate::optimizer::{log_spaced, silp_optimize_with, OptError, SilpOptions};

pub use state::{load_state, save_state, StateFileError};

/// Weights below this count as zero and evict their polynomial.
pub const EVICTION_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub k_min: usize,
    pub k_max: usize,
    /// Right end `A` of the uniform control interval `(0, A]`.
    pub interval_cap: f64,
    pub candidates_per_step: usize,
    /// End the sweep after this many consecutive unproductive steps; `None`
    /// sweeps the whole degree range regardless.
    #[serde(default)]
    pub max_stale_steps: Option<usize>,
    /// Factors above this degree are discarded before optimization.
    pub max_factor_degree: usize,
    /// Uniform control points per unit of `r + k`.
    pub points_per_degree: usize,
    /// Lattice scale `S`; `None` picks `e^{m (r+k)/t}` so that a polynomial
    /// meeting the target has value entries of order one.
    pub scale: Option<f64>,
    /// LLL parameter as `numerator / denominator`.
    pub delta: (u32, u32),
    /// Stopping gap for the inner re-optimization.
    pub stop_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            k_min: 3,
            k_max: 82,
            interval_cap: 16.0,
            candidates_per_step: 3,
            max_stale_steps: None,
            max_factor_degree: 30,
            points_per_degree: 4,
            scale: None,
            delta: (99, 100),
            stop_tol: 1e-6,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |s: &str| Err(SearchError::Config(s.to_string()));
        if self.k_min < 1 || self.k_min > self.k_max {
            return bad("need 1 <= k_min <= k_max");
        }
        if !(self.interval_cap.is_finite() && self.interval_cap > 0.0) {
            return bad("interval cap must be positive");
        }
        if self.candidates_per_step == 0 || self.points_per_degree == 0 {
            return bad("candidates and point density must be positive");
        }
        if self.scale.is_some_and(|s| !(s.is_finite() && s > 0.0)) {
            return bad("scale must be positive");
        }
        let (a, b) = self.delta;
        if !(4 * a > b && a < b) {
            return bad("delta must lie in (1/4, 1)");
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("invalid search config: {0}")]
    Config(String),
    #[error(transparent)]
    Lattice(#[from] LllError),
    #[error(transparent)]
    Optimizer(#[from] OptError),
    #[error(transparent)]
    Aux(#[from] AuxError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepOutcome {
    Admitted,
    /// No candidate factor earned a nonzero weight.
    Stale,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub k: usize,
    pub outcome: StepOutcome,
    pub candidates: Vec<IntPoly>,
    pub admitted: Vec<IntPoly>,
    pub evicted: Vec<IntPoly>,
    pub m_before: f64,
    pub m_after: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchState {
    pub af: AuxFunction,
    pub m: f64,
    /// Local minima of the current function, reused as control points.
    pub argmins: Vec<f64>,
    pub history: Vec<StepRecord>,
}

impl SearchState {
    /// State for a fixed polynomial set, with weights from a fresh
    /// optimization.
    pub fn from_polys(polys: &[IntPoly], cfg: &SearchConfig) -> Result<SearchState, SearchError> {
        let (af, _) = optimize(polys, &[], cfg)?;
        Self::from_aux(af.prune(EVICTION_THRESHOLD))
    }

    /// State around an existing function, weights taken as given.
    pub fn from_aux(af: AuxFunction) -> Result<SearchState, SearchError> {
        let report = global_min(&af, 1e-9)?;
        Ok(SearchState {
            m: report.m,
            argmins: report.argmins.iter().map(|a| a.x).collect(),
            af,
            history: Vec::new(),
        })
    }

    pub fn polys(&self) -> Vec<IntPoly> {
        self.af.polys().cloned().collect()
    }
}

fn optimize(
    polys: &[IntPoly],
    hint: &[f64],
    cfg: &SearchConfig,
) -> Result<(AuxFunction, f64), SearchError> {
    let mut points = hint.to_vec();
    points.extend(log_spaced(64, 1e-3, cfg.interval_cap.max(4.0)));
    let opts = SilpOptions {
        stop_tol: cfg.stop_tol,
        ..SilpOptions::default()
    };
    let (af, trace) = silp_optimize_with(polys, &points, &opts)?;
    Ok((af, trace.m()))
}

/// The optimized single-term function `x - c ln x`.
pub fn seed() -> SearchState {
    SearchState::from_polys(&[IntPoly::x()], &SearchConfig::default())
        .expect("the linear seed always optimizes")
}

/// `n` uniform points on `(0, a]`.
fn uniform_points(n: usize, a: f64) -> Vec<f64> {
    (1..=n).map(|i| a * i as f64 / n as f64).collect()
}

/// Irreducible factors of the LLL candidates for degree `k`.
fn candidate_factors(
    state: &SearchState,
    k: usize,
    cfg: &SearchConfig,
) -> Result<Vec<IntPoly>, SearchError> {
    let base: Vec<(IntPoly, u32)> = state.af.polys().map(|q| (q.clone(), 1)).collect();
    let r: usize = base.iter().map(|(q, _)| q.deg()).sum();
    let t = state.af.t();
    let ln_scale = cfg.scale.map_or(state.m * (r + k) as f64 / t, f64::ln);
    let mut points = uniform_points(cfg.points_per_degree * (r + k), cfg.interval_cap);
    points.extend(state.argmins.iter().copied());
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut spec = SearchLatticeSpec::with_factors(base, k, t, points, 1.0).with_ln_scale(ln_scale);
    spec.drop_points_near_roots();
    spec.drop_negligible_points();
    let lattice = build_search_lattice(&spec)?;
    let delta = num_rational::BigRational::new(cfg.delta.0.into(), cfg.delta.1.into());
    let reduced = lll_reduce(&lattice.with_delta(delta))?;
    let candidates = extract_candidates(&reduced, &spec, cfg.candidates_per_step);

    let mut factors: Vec<IntPoly> = candidates
        .par_iter()
        .flat_map_iter(|c| factor(c).factors.into_iter().map(|(f, _)| f))
        .filter(|f| !f.is_constant() && f.deg() <= cfg.max_factor_degree)
        .collect();
    factors.sort_by(|a, b| a.canonical_cmp(b));
    factors.dedup();
    Ok(factors)
}

/// One step of the recursive search at degree `k`.
///
/// The state only changes when some new factor earns a nonzero weight and
/// the re-optimized minimum does not fall below the current one.
pub fn search_step(
    state: &SearchState,
    k: usize,
    cfg: &SearchConfig,
) -> Result<SearchState, SearchError> {
    cfg.validate()?;
    let step = state.history.len();
    let mut record = StepRecord {
        step,
        k,
        outcome: StepOutcome::Stale,
        candidates: Vec::new(),
        admitted: Vec::new(),
        evicted: Vec::new(),
        m_before: state.m,
        m_after: state.m,
        error: None,
    };
    let current = state.polys();
    let factors = candidate_factors(state, k, cfg)?;
    let fresh: Vec<IntPoly> = factors
        .iter()
        .filter(|f| !current.contains(f))
        .cloned()
        .collect();
    record.candidates = factors;
    let stale = |mut record: StepRecord| {
        let mut next = state.clone();
        record.outcome = StepOutcome::Stale;
        next.history.push(record);
        next
    };
    if fresh.is_empty() {
        return Ok(stale(record));
    }

    let mut union = current.clone();
    union.extend(fresh.iter().cloned());
    let (af, m) = optimize(&union, &state.argmins, cfg)?;
    let admitted: Vec<IntPoly> = af
        .terms()
        .iter()
        .filter(|(q, c)| *c >= EVICTION_THRESHOLD && fresh.contains(q))
        .map(|(q, _)| q.clone())
        .collect();
    if admitted.is_empty() || m < state.m {
        return Ok(stale(record));
    }
    let pruned = af.prune(EVICTION_THRESHOLD);
    record.evicted = current
        .iter()
        .filter(|q| !pruned.polys().any(|p| p == *q))
        .cloned()
        .collect();
    record.admitted = admitted;
    let mut next = SearchState::from_aux(pruned)?;
    record.m_after = next.m;
    record.outcome = StepOutcome::Admitted;
    next.history = state.history.clone();
    next.history.push(record);
    Ok(next)
}

/// Apply `search_step` for every `k` in `k_min..=k_max`, recording failures
/// and carrying on past unproductive steps unless `max_stale_steps` is set.
pub fn run_sweep(state: SearchState, cfg: &SearchConfig) -> Result<SearchState, SearchError> {
    run_sweep_with(state, cfg, |_| {})
}

/// `run_sweep` with a callback after every step, e.g. for checkpoints.
pub fn run_sweep_with(
    mut state: SearchState,
    cfg: &SearchConfig,
    mut on_step: impl FnMut(&SearchState),
) -> Result<SearchState, SearchError> {
    cfg.validate()?;
    let mut stale_run = 0;
    for k in cfg.k_min..=cfg.k_max {
        if cfg.max_stale_steps.is_some_and(|cap| stale_run >= cap) {
            break;
        }
        state = match search_step(&state, k, cfg) {
            Ok(next) => next,
            Err(e) => {
                let mut next = state.clone();
                next.history.push(StepRecord {
                    step: state.history.len(),
                    k,
                    outcome: StepOutcome::Failed,
                    candidates: Vec::new(),
                    admitted: Vec::new(),
                    evicted: Vec::new(),
                    m_before: state.m,
                    m_after: state.m,
                    error: Some(e.to_string()),
                });
                next
            }
        };
        let productive = state
            .history
            .last()
            .is_some_and(|r| r.outcome == StepOutcome::Admitted);
        stale_run = if productive { 0 } else { stale_run + 1 };
        on_step(&state);
    }
    Ok(state)
}
