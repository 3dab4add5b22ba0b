use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::{Catalog, CatalogError, Decimal, PAPER_COROLLARY, PAPER_T};
use crate::auxfun::{global_min, MinimizationReport, DEFAULT_TOL};
use crate::factor::factor;
use crate::intpoly::IntPoly;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Minimizer tolerance, also the base of the bound slack.
    pub tol: f64,
    /// Reference value for `t`, if one is documented for the catalog.
    pub expected_t: Option<f64>,
    pub t_tolerance: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            tol: DEFAULT_TOL,
            expected_t: None,
            t_tolerance: 1e-4,
        }
    }
}

impl VerifyOptions {
    /// Options for the embedded reference catalog.
    pub fn paper() -> Self {
        VerifyOptions {
            expected_t: Some(PAPER_T.parse().unwrap()),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub poly: IntPoly,
    pub abs_trace: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub catalog: String,
    pub m: f64,
    pub t: f64,
    pub claimed_bound: Decimal,
    pub slack: f64,
    pub argmin: Option<f64>,
    pub checks: Vec<Check>,
    /// Totally positive irreducible factors below the bound.
    pub exceptions_found: Vec<TraceRecord>,
    /// Indices of entries that are not irreducible.
    pub reducible_entries: Vec<usize>,
    pub minimization: MinimizationReport,
    pub passed: bool,
}

pub(crate) fn rational_text(q: &BigRational) -> String {
    match Decimal::from_rational(q) {
        Some(d) if d.scale() <= 12 => d.to_string(),
        _ => format!("{}/{}", q.numer(), q.denom()),
    }
}

impl VerificationReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "catalog {}", self.catalog).unwrap();
        writeln!(
            s,
            "m = {:.9}  (claimed {}, slack {:.3e})",
            self.m, self.claimed_bound, self.slack
        )
        .unwrap();
        writeln!(s, "t = {:.9}", self.t).unwrap();
        if let Some(x) = self.argmin {
            writeln!(s, "argmin x = {x:.9}").unwrap();
        }
        writeln!(
            s,
            "cutoff A = {:.6}, tail bound {:.6}, {} intervals, {} samples, {} exact evaluations",
            self.minimization.tail_cutoff,
            self.minimization.tail_bound,
            self.minimization.intervals,
            self.minimization.samples,
            self.minimization.escalations
        )
        .unwrap();
        for c in &self.checks {
            writeln!(
                s,
                "[{}] {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            )
            .unwrap();
        }
        writeln!(s, "overall: {}", if self.passed { "PASS" } else { "FAIL" }).unwrap();
        s
    }
}

struct Audit {
    exception_check: Check,
    factor_check: Check,
    found: Vec<TraceRecord>,
    reducible: Vec<usize>,
}

/// Totally positive, or `x` itself, whose root 0 the catalogs list as an
/// exception.
fn nonnegative_roots(f: &IntPoly) -> bool {
    *f == IntPoly::x() || f.is_totally_positive().unwrap_or(false)
}

fn audit(cat: &Catalog, bound: &BigRational) -> Audit {
    let factored: Vec<_> = cat.entries.par_iter().map(|e| factor(&e.poly)).collect();

    let mut found: Vec<(IntPoly, BigRational)> = Vec::new();
    for f in factored
        .iter()
        .flat_map(|fz| fz.factors.iter().map(|(g, _)| g))
    {
        if !f.is_monic() || found.iter().any(|(g, _)| g == f) {
            continue;
        }
        if !nonnegative_roots(f) {
            continue;
        }
        let tr = f.abs_trace().expect("monic");
        if &tr < bound {
            found.push((f.clone(), tr));
        }
    }
    found.sort_by(|a, b| a.0.canonical_cmp(&b.0));
    let missing: Vec<String> = cat
        .exceptions
        .iter()
        .filter(|x| !found.iter().any(|(g, _)| g == *x))
        .map(|x| x.to_string())
        .collect();
    let extra: Vec<String> = found
        .iter()
        .filter(|(g, _)| !cat.exceptions.contains(g))
        .map(|(g, tr)| format!("{g} (abs trace {})", rational_text(tr)))
        .collect();
    let listed: Vec<String> = found
        .iter()
        .map(|(g, tr)| format!("{g}: {}", rational_text(tr)))
        .collect();
    let exception_check = Check {
        name: "exception audit",
        passed: missing.is_empty() && extra.is_empty(),
        detail: if missing.is_empty() && extra.is_empty() {
            format!(
                "{} exceptions reproduced [{}]",
                found.len(),
                listed.join("; ")
            )
        } else {
            format!(
                "missing [{}], unexpected [{}]",
                missing.join("; "),
                extra.join("; ")
            )
        },
    };

    let mut problems = Vec::new();
    for i in 0..cat.entries.len() {
        for j in 0..i {
            if cat.entries[i].poly == cat.entries[j].poly {
                problems.push(format!("entries {j} and {i} are equal"));
                continue;
            }
            for (g, _) in &factored[i].factors {
                if factored[j].factors.iter().any(|(h, _)| h == g) {
                    problems.push(format!("entries {j} and {i} share the factor {g}"));
                }
            }
        }
    }
    let reducible: Vec<usize> = factored
        .iter()
        .enumerate()
        .filter(|(_, fz)| {
            !(fz.factors.len() == 1
                && fz.factors[0].1 == 1
                && fz.unit.magnitude().to_u32() == Some(1))
        })
        .map(|(i, _)| i)
        .collect();
    let factor_check = Check {
        name: "factor audit",
        passed: problems.is_empty(),
        detail: if problems.is_empty() {
            format!(
                "{} entries, no shared irreducible factors, {} reducible",
                cat.entries.len(),
                reducible.len()
            )
        } else {
            problems.join("; ")
        },
    };
    Audit {
        exception_check,
        factor_check,
        found: found
            .into_iter()
            .map(|(poly, tr)| TraceRecord {
                poly,
                abs_trace: rational_text(&tr),
            })
            .collect(),
        reducible,
    }
}

/// Run the bound, t-value, exception and factor checks on a catalog.
pub fn verify_theorem(
    cat: &Catalog,
    opts: &VerifyOptions,
) -> Result<VerificationReport, CatalogError> {
    let bound = cat.bound()?.clone();
    let af = cat.aux_function()?;
    let (minimization, audit) =
        rayon::join(|| global_min(&af, opts.tol), || audit(cat, bound.value()));
    let minimization = minimization?;
    let m = minimization.m;

    let argmin = minimization.argmins.iter().find(|a| a.f == m).map(|a| a.x);
    let slack_at = |x: Option<f64>| -> f64 {
        cat.entries
            .iter()
            .map(|e| {
                let ln = match x {
                    Some(x) => e.poly.ln_abs_at(x),
                    None => e.poly.ln_abs_at(0.0),
                };
                e.weight.half_ulp() * if ln.is_finite() { ln.abs() } else { 0.0 }
            })
            .sum()
    };
    let slack = opts.tol + slack_at(argmin);
    let claimed = bound.to_f64();
    let bound_check = Check {
        name: "bound",
        passed: m >= claimed - slack,
        detail: format!("m = {m:.9} vs claimed {bound} - slack {slack:.3e}"),
    };

    let t = cat.t_exact().to_f64().unwrap();
    let t_check = match opts.expected_t {
        Some(e) => Check {
            name: "t-value",
            passed: (t - e).abs() <= opts.t_tolerance,
            detail: format!(
                "t = {t:.9} vs reference {e} (tolerance {:.1e})",
                opts.t_tolerance
            ),
        },
        None => Check {
            name: "t-value",
            passed: true,
            detail: format!("t = {t:.9}, no reference value"),
        },
    };

    let checks = vec![
        bound_check,
        t_check,
        audit.exception_check,
        audit.factor_check,
    ];
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerificationReport {
        catalog: cat.name.clone(),
        m,
        t,
        claimed_bound: bound,
        slack,
        argmin,
        checks,
        exceptions_found: audit.found,
        reducible_entries: audit.reducible,
        minimization,
        passed,
    })
}

#[derive(Debug, Clone, Default)]
pub struct CorollaryOptions {
    pub expected_constant: Option<Decimal>,
    pub expected_exceptions: Vec<IntPoly>,
}

impl CorollaryOptions {
    pub fn paper() -> Self {
        CorollaryOptions {
            expected_constant: Some(PAPER_COROLLARY.parse().unwrap()),
            expected_exceptions: vec![
                "x^2 - 3*x + 1".parse().unwrap(),
                "x^4 - 7*x^3 + 13*x^2 - 7*x + 1".parse().unwrap(),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReciprocalImage {
    pub source: IntPoly,
    pub image: IntPoly,
    pub factorization: String,
    /// `trace(P) = trace(Q) + deg P`.
    pub trace_identity: bool,
    /// Irreducible reciprocal factors of even degree below the corollary
    /// constant.
    pub below: Vec<TraceRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorollaryReport {
    pub constant: Decimal,
    pub images: Vec<ReciprocalImage>,
    pub checks: Vec<Check>,
    /// Reciprocal exceptions beyond the expected list.
    pub findings: Vec<TraceRecord>,
    pub passed: bool,
}

impl CorollaryReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "corollary constant = {}", self.constant).unwrap();
        for im in &self.images {
            writeln!(s, "{}  ->  {}  [{}]", im.source, im.image, im.factorization).unwrap();
        }
        for c in &self.checks {
            writeln!(
                s,
                "[{}] {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            )
            .unwrap();
        }
        for f in &self.findings {
            writeln!(
                s,
                "finding: {} has abs trace {} and is not listed",
                f.poly, f.abs_trace
            )
            .unwrap();
        }
        writeln!(s, "overall: {}", if self.passed { "PASS" } else { "FAIL" }).unwrap();
        s
    }
}

fn is_palindromic(p: &IntPoly) -> bool {
    let c = p.coeffs();
    c.iter().eq(c.iter().rev())
}

/// Derive the reciprocal corollary from a catalog's bound and exceptions.
pub fn verify_corollary(
    cat: &Catalog,
    opts: &CorollaryOptions,
) -> Result<CorollaryReport, CatalogError> {
    let bound = cat.bound()?;
    let half = BigRational::new(1.into(), 2.into());
    let constant_q = bound.value() * &half + BigRational::from_integer(1.into());
    let constant =
        Decimal::from_rational(&constant_q).expect("decimal inputs give decimal outputs");
    let mut checks = Vec::new();
    if let Some(e) = &opts.expected_constant {
        checks.push(Check {
            name: "constant",
            passed: e.value() == constant.value(),
            detail: format!("{bound}/2 + 1 = {constant}, expected {e}"),
        });
    }

    let mut images = Vec::new();
    let mut derived: Vec<IntPoly> = Vec::new();
    for src in cat.exceptions.iter().filter(|x| x.is_monic()) {
        let image = src.to_reciprocal().map_err(|e| CatalogError::Syntax {
            line: 0,
            reason: format!("reciprocal of {src}: {e}"),
        })?;
        let fz = factor(&image);
        let trace_identity = match (image.trace(), src.trace()) {
            (Ok(tp), Ok(tq)) => tp == tq + image.deg(),
            _ => false,
        };
        let mut below = Vec::new();
        for (g, _) in &fz.factors {
            if g.deg() % 2 == 1
                || !g.is_monic()
                || !is_palindromic(g)
                || !g.is_totally_positive().unwrap_or(false)
            {
                continue;
            }
            let tr = g.abs_trace().expect("monic");
            if tr < constant_q {
                below.push(TraceRecord {
                    poly: g.clone(),
                    abs_trace: rational_text(&tr),
                });
                if !derived.contains(g) {
                    derived.push(g.clone());
                }
            }
        }
        images.push(ReciprocalImage {
            source: src.clone(),
            image,
            factorization: fz.to_string(),
            trace_identity,
            below,
        });
    }

    let bad_traces: Vec<String> = images
        .iter()
        .filter(|im| !im.trace_identity)
        .map(|im| im.source.to_string())
        .collect();
    checks.push(Check {
        name: "trace identity",
        passed: bad_traces.is_empty(),
        detail: if bad_traces.is_empty() {
            format!(
                "trace(P) = trace(Q) + deg P for all {} images",
                images.len()
            )
        } else {
            format!("fails for [{}]", bad_traces.join("; "))
        },
    });
    let missing: Vec<String> = opts
        .expected_exceptions
        .iter()
        .filter(|x| !derived.contains(x))
        .map(|x| x.to_string())
        .collect();
    checks.push(Check {
        name: "reciprocal exceptions",
        passed: missing.is_empty(),
        detail: if missing.is_empty() {
            format!(
                "{} expected exceptions reproduced",
                opts.expected_exceptions.len()
            )
        } else {
            format!("not reproduced: [{}]", missing.join("; "))
        },
    });
    let findings: Vec<TraceRecord> = images
        .iter()
        .flat_map(|im| im.below.iter())
        .filter(|r| !opts.expected_exceptions.contains(&r.poly))
        .cloned()
        .collect();
    let passed = checks.iter().all(|c| c.passed);
    Ok(CorollaryReport {
        constant,
        images,
        checks,
        findings,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CandidateError {
    #[error("candidate is constant")]
    Constant,
    #[error("candidate is not monic")]
    NotMonic,
    #[error("candidate is reducible: {0}")]
    Reducible(String),
    #[error("candidate is not totally positive")]
    NotTotallyPositive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// The candidate divides a catalog entry and falls below the bound.
    Exception { abs_trace: String },
    /// The bound must hold; `holds` is the numerical sanity check.
    BoundApplies {
        abs_trace: String,
        bound: f64,
        holds: bool,
        divides_entry: bool,
    },
}

/// Classify a monic irreducible totally positive polynomial against a
/// catalog whose minimum is `bound`.
pub fn check_candidate(p: &IntPoly, cat: &Catalog, bound: f64) -> Result<Verdict, CandidateError> {
    if p.is_constant() {
        return Err(CandidateError::Constant);
    }
    if !p.is_monic() {
        return Err(CandidateError::NotMonic);
    }
    let fz = factor(p);
    if fz.count() != 1 {
        return Err(CandidateError::Reducible(fz.to_string()));
    }
    if !p.is_totally_positive().unwrap_or(false) {
        return Err(CandidateError::NotTotallyPositive);
    }
    let tr = p.abs_trace().expect("monic");
    let tr_f = tr.to_f64().unwrap();
    let divides_entry = cat.entries.iter().any(|e| p.divides(&e.poly));
    if cat.exceptions.contains(p) || (divides_entry && tr_f < bound) {
        return Ok(Verdict::Exception {
            abs_trace: rational_text(&tr),
        });
    }
    Ok(Verdict::BoundApplies {
        abs_trace: rational_text(&tr),
        bound,
        holds: tr_f >= bound,
        divides_entry,
    })
}
