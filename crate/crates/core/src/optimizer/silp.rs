use serde::Serialize;

use super::{solve_maxmin, MaxMinProblem, OptError};
use crate::auxfun::{global_min, AuxFunction};
use crate::intpoly::IntPoly;

#[derive(Debug, Clone, PartialEq)]
pub struct SilpOptions {
    /// Stop once `m_i - m'_i` is at most this.
    pub stop_tol: f64,
    pub max_iter: usize,
    /// Tolerance handed to the inner global minimization.
    pub min_tol: f64,
    /// Control points closer than this (relative to `max(1, x)`) merge.
    pub dedup: f64,
}

impl Default for SilpOptions {
    fn default() -> Self {
        SilpOptions {
            stop_tol: 1e-6,
            max_iter: 200,
            min_tol: 1e-9,
            dedup: 1e-9,
        }
    }
}

/// Per-iteration record of the two-sided certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationTrace {
    /// Running maximum of the true minima `m'_i`.
    pub lower: Vec<f64>,
    /// Running minimum of the LP values `m_i`.
    pub upper: Vec<f64>,
    pub raw_lower: Vec<f64>,
    pub raw_upper: Vec<f64>,
    pub control_sizes: Vec<usize>,
    /// Weights attaining the final lower bound.
    pub weights: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub stop_tol: f64,
    /// Whether the one-time unbounded remedy fired.
    pub remedied: bool,
}

impl OptimizationTrace {
    pub fn gap(&self) -> f64 {
        match (self.upper.last(), self.lower.last()) {
            (Some(u), Some(l)) => u - l,
            _ => f64::INFINITY,
        }
    }

    /// The certified value `m'_p`.
    pub fn m(&self) -> f64 {
        self.lower.last().copied().unwrap_or(f64::NEG_INFINITY)
    }
}

/// `n` geometrically spaced points in `(lo, hi]`.
pub fn log_spaced(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let ratio = (hi / lo).ln();
    (1..=n)
        .map(|k| lo * (ratio * k as f64 / n as f64).exp())
        .collect()
}

/// Add `extra` to `points`, dropping roots of any polynomial and merging
/// near-duplicates. Returns how many points were genuinely new.
fn merge_points(
    polys: &[IntPoly],
    points: &mut Vec<f64>,
    extra: impl IntoIterator<Item = f64>,
    dedup: f64,
) -> usize {
    let before = points.len();
    let mut all: Vec<f64> = std::mem::take(points);
    let old = all.clone();
    all.extend(extra.into_iter().filter(|x| x.is_finite() && *x > 0.0));
    all.sort_by(f64::total_cmp);
    for x in all {
        if let Some(&last) = points.last() {
            if x - last <= dedup * last.max(1.0) {
                continue;
            }
        }
        if old.binary_search_by(|p| p.total_cmp(&x)).is_err()
            && polys.iter().any(|q| !q.ln_abs_at(x).is_finite())
        {
            continue;
        }
        points.push(x);
    }
    points.len().saturating_sub(before)
}

fn reach(polys: &[IntPoly]) -> f64 {
    polys
        .iter()
        .map(|q| 2.0 * q.root_modulus_bound())
        .fold(4.0, f64::max)
}

/// Semi-infinite LP with the default options and the given stopping gap.
pub fn silp_optimize(
    polys: &[IntPoly],
    initial_points: &[f64],
    stop_tol: f64,
) -> Result<(AuxFunction, OptimizationTrace), OptError> {
    silp_optimize_with(
        polys,
        initial_points,
        &SilpOptions {
            stop_tol,
            ..SilpOptions::default()
        },
    )
}

/// Alternate between the finite LP on the control set and the true global
/// minimum of the resulting function, feeding every local minimum back in.
///
/// An empty `initial_points` means 64 log-spaced points in `(1e-3, A]`.
pub fn silp_optimize_with(
    polys: &[IntPoly],
    initial_points: &[f64],
    opts: &SilpOptions,
) -> Result<(AuxFunction, OptimizationTrace), OptError> {
    if polys.is_empty() {
        return Err(OptError::NoPolys);
    }
    if !(opts.stop_tol.is_finite() && opts.stop_tol > 0.0) {
        return Err(OptError::BadTolerance(opts.stop_tol));
    }
    AuxFunction::new(polys.iter().map(|q| (q.clone(), 0.0)).collect())?;
    if let Some(&x) = initial_points
        .iter()
        .find(|x| !(x.is_finite() && **x > 0.0))
    {
        return Err(OptError::BadPoint(x));
    }
    let a = reach(polys);
    let seed = if initial_points.is_empty() {
        log_spaced(64, 1e-3, a)
    } else {
        initial_points.to_vec()
    };
    let mut points = Vec::new();
    merge_points(polys, &mut points, seed, opts.dedup);
    if points.is_empty() {
        return Err(OptError::NoPoints);
    }

    let mut trace = OptimizationTrace {
        lower: Vec::new(),
        upper: Vec::new(),
        raw_lower: Vec::new(),
        raw_upper: Vec::new(),
        control_sizes: Vec::new(),
        weights: vec![0.0; polys.len()],
        iterations: 0,
        converged: false,
        stop_tol: opts.stop_tol,
        remedied: false,
    };
    let make = |c: &[f64]| AuxFunction::new(polys.iter().cloned().zip(c.iter().copied()).collect());

    while trace.iterations < opts.max_iter {
        let prob = MaxMinProblem::from_polys(polys, &points)?;
        let sol = match solve_maxmin(&prob) {
            Err(OptError::Unbounded { .. }) if !trace.remedied => {
                trace.remedied = true;
                merge_points(polys, &mut points, log_spaced(32, 1e-3, a), opts.dedup);
                continue;
            }
            other => other?,
        };
        trace.iterations += 1;
        let report = global_min(&make(&sol.c)?, opts.min_tol)?;

        let upper = trace.upper.last().map_or(sol.dual, |u| u.min(sol.dual));
        let improved = trace.lower.last().is_none_or(|l| report.m > *l);
        let lower = if improved {
            report.m
        } else {
            *trace.lower.last().unwrap()
        };
        if improved {
            trace.weights = sol.c.clone();
        }
        trace.raw_upper.push(sol.dual);
        trace.raw_lower.push(report.m);
        trace.upper.push(upper);
        trace.lower.push(lower);
        trace.control_sizes.push(points.len());
        if upper - lower <= opts.stop_tol {
            trace.converged = true;
            break;
        }

        let mut extra: Vec<f64> = report.argmins.iter().map(|a| a.x).collect();
        if report.boundary_infimum.is_some_and(|b| b <= report.m) {
            extra.push(1e-9);
        }
        if merge_points(polys, &mut points, extra, opts.dedup) == 0 {
            break;
        }
    }
    if !trace.converged {
        return Err(OptError::NotConverged(Box::new(trace)));
    }
    Ok((make(&trace.weights)?, trace))
}
