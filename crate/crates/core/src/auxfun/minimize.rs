use std::f64::consts::PI;

use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use super::{AuxError, AuxFunction, Evaluator, Sample};

const INITIAL_NODES: usize = 64;
const MAX_NODES: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Argmin {
    pub x: f64,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizationReport {
    /// Global minimum of `f` over `(0, inf)`.
    pub m: f64,
    /// Interior local minima, sorted by `x`.
    pub argmins: Vec<Argmin>,
    /// Cutoff `A`: the scan covers `(0, A]`, the analytic bound covers the rest.
    pub tail_cutoff: f64,
    /// Analytic lower bound on `f` over `[A, inf)`.
    pub tail_bound: f64,
    pub tolerance: f64,
    pub t: f64,
    pub r: usize,
    /// `lim f(x)` as `x -> 0+` when no term vanishes at 0.
    pub boundary_infimum: Option<f64>,
    pub intervals: usize,
    pub samples: usize,
    /// Samples where some term needed exact evaluation.
    pub escalations: usize,
}

struct IntervalScan {
    minima: Vec<Argmin>,
    lowest: f64,
    samples: usize,
    escalations: usize,
}

fn sign_changes(s: &[Sample]) -> usize {
    s.windows(2)
        .filter(|w| (w[0].df < 0.0) != (w[1].df < 0.0))
        .count()
}

fn refine_minimum(ev: &Evaluator, mut lo: f64, mut hi: f64, counter: &mut usize) -> Argmin {
    for _ in 0..200 {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi || hi - lo <= 1e-14 * mid.abs().max(1.0) {
            break;
        }
        let s = ev.sample(mid);
        *counter += s.exact as usize;
        if s.df < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = lo + (hi - lo) / 2.0;
    let s = ev.sample(x);
    *counter += s.exact as usize;
    Argmin { x, f: s.f }
}

/// Sample `f'` at nested Chebyshev-Lobatto interior nodes of `(a, b)`,
/// doubling until the sign-change count is unchanged over two doublings,
/// then bisect every `-` to `+` change.
fn scan_interval(ev: &Evaluator, a: f64, b: f64) -> IntervalScan {
    let mid = (a + b) / 2.0;
    let half = (b - a) / 2.0;
    let node = |j: usize, n: usize| mid - half * (PI * j as f64 / n as f64).cos();
    let mut escalations = 0;
    let mut take = |x: f64| {
        let s = ev.sample(x);
        escalations += s.exact as usize;
        s
    };
    let mut n = INITIAL_NODES;
    let mut samples: Vec<Sample> = (1..n).map(|j| take(node(j, n))).collect();
    let mut history = vec![sign_changes(&samples)];
    while n < MAX_NODES {
        let len = history.len();
        if len >= 3 && history[len - 1] == history[len - 2] && history[len - 2] == history[len - 3]
        {
            break;
        }
        let m = 2 * n;
        let mut next = Vec::with_capacity(m - 1);
        for j in 1..m {
            if j % 2 == 0 {
                next.push(samples[j / 2 - 1]);
            } else {
                next.push(take(node(j, m)));
            }
        }
        samples = next;
        n = m;
        history.push(sign_changes(&samples));
    }
    let mut lowest = f64::INFINITY;
    for s in &samples {
        lowest = lowest.min(s.f);
    }
    let mut minima = Vec::new();
    for w in samples.windows(2) {
        if w[0].df < 0.0 && w[1].df >= 0.0 {
            let am = refine_minimum(ev, w[0].x, w[1].x, &mut escalations);
            lowest = lowest.min(am.f);
            minima.push(am);
        }
    }
    IntervalScan {
        minima,
        lowest,
        samples: samples.len(),
        escalations,
    }
}

struct Tail {
    /// Bound on the modulus of every root of every weighted term.
    radius: f64,
    /// `sum c_j ln|lc_j|`.
    lead: f64,
    t: f64,
}

impl Tail {
    fn new(af: &AuxFunction) -> Self {
        let mut radius: f64 = 0.0;
        let mut lead = 0.0;
        for (q, c) in af.terms().iter().filter(|(_, c)| *c > 0.0) {
            radius = radius.max(q.root_modulus_bound());
            let lc = q.leading().unwrap().abs();
            lead += c * lc
                .to_f64()
                .map(f64::ln)
                .unwrap_or_else(|| lc.bits() as f64 * std::f64::consts::LN_2);
        }
        Tail {
            radius,
            lead,
            t: af.t(),
        }
    }

    /// Lower bound for `f` valid at `x >= radius`, using `|Q(x)| <= |lc| (2x)^d`.
    fn bound(&self, x: f64) -> f64 {
        x - self.t * (2.0 * x).ln() - self.lead
    }

    /// Smallest `x >= max(radius, t)` (up to bisection) with `bound(x) >= m`.
    fn crossing(&self, m: f64) -> f64 {
        let lo0 = self.radius.max(self.t).max(1e-300);
        if self.bound(lo0) >= m {
            return lo0;
        }
        let mut lo = lo0;
        let mut hi = lo0.max(1.0) * 2.0;
        while self.bound(hi) < m {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..100 {
            let mid = lo + (hi - lo) / 2.0;
            if mid <= lo || mid >= hi {
                break;
            }
            if self.bound(mid) >= m {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

/// Global minimum of `f` over `(0, inf)`.
pub fn global_min(af: &AuxFunction, tol: f64) -> Result<MinimizationReport, AuxError> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(AuxError::BadTolerance(tol));
    }
    let ev = af.evaluator();
    let weighted: Vec<_> = af.terms().iter().filter(|(_, c)| *c > 0.0).collect();

    let mut breaks: Vec<f64> = weighted
        .par_iter()
        .flat_map_iter(|(q, _)| q.positive_roots_f64().unwrap_or_default())
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    // f(0+) is finite unless some weighted term vanishes at 0; it can never
    // tend to -inf because the weights are nonnegative.
    let barrier_at_zero = weighted.iter().any(|(q, _)| q.coeff(0) == 0.into());
    let boundary_infimum = if barrier_at_zero {
        None
    } else {
        let v: f64 = weighted
            .iter()
            .map(|(q, c)| -c * q.coeff(0).abs().to_f64().unwrap().ln())
            .sum();
        if v == f64::NEG_INFINITY {
            return Err(AuxError::DivergentAtOrigin);
        }
        Some(v)
    };

    // Any value of f bounds m from above, and the tail crossing is monotone
    // in m, so a cutoff chosen from a coarse upper estimate stays valid.
    let tail = Tail::new(af);
    let mut reach = (2.0 * tail.radius).max(tail.t).max(1.0);
    if let Some(&last) = breaks.last() {
        reach = reach.max(2.0 * last);
    }
    let mut probes: Vec<f64> = vec![reach];
    let mut prev = 0.0;
    for &b in &breaks {
        probes.push((prev + b) / 2.0);
        prev = b;
    }
    probes.push((prev + reach) / 2.0);
    let m_upper = probes
        .iter()
        .map(|&x| ev.value(x))
        .chain(boundary_infimum)
        .fold(f64::INFINITY, f64::min);
    let cutoff = reach.max(tail.crossing(m_upper) * (1.0 + 1e-9));

    let mut edges = vec![0.0];
    edges.extend(breaks.iter().copied());
    edges.push(cutoff);
    let scans: Vec<IntervalScan> = edges
        .par_windows(2)
        .map(|w| scan_interval(&ev, w[0], w[1]))
        .collect();

    let mut m = ev.value(cutoff);
    for s in &scans {
        m = m.min(s.lowest);
    }
    if let Some(b) = boundary_infimum {
        m = m.min(b);
    }
    let tail_bound = tail.bound(cutoff);
    if tail_bound < m {
        return Err(AuxError::CutoffTooSmall {
            cutoff,
            bound: tail_bound,
            m,
        });
    }

    let mut argmins: Vec<Argmin> = scans
        .iter()
        .flat_map(|s| s.minima.iter().copied())
        .collect();
    argmins.sort_by(|a, b| a.x.total_cmp(&b.x));
    Ok(MinimizationReport {
        m,
        argmins,
        tail_cutoff: cutoff,
        tail_bound,
        tolerance: tol,
        t: af.t(),
        r: af.r(),
        boundary_infimum,
        intervals: scans.len(),
        samples: scans.iter().map(|s| s.samples).sum(),
        escalations: scans.iter().map(|s| s.escalations).sum(),
    })
}

/// Positions of all interior local minima, ascending.
pub fn local_minima(af: &AuxFunction, tol: f64) -> Result<Vec<f64>, AuxError> {
    Ok(global_min(af, tol)?.argmins.iter().map(|a| a.x).collect())
}
