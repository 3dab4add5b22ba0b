//! Catalogs of auxiliary polynomials with weights, the embedded reference
//! catalog, and the verification routines built on top of them.

mod decimal;
mod verify;

use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::auxfun::{AuxError, AuxFunction};
use crate::intpoly::IntPoly;

pub use decimal::{Decimal, DecimalError};
pub use verify::{
    check_candidate, verify_corollary, verify_theorem, CandidateError, Check, CorollaryOptions,
    CorollaryReport, ReciprocalImage, TraceRecord, Verdict, VerificationReport, VerifyOptions,
};

/// The embedded reference catalog, verbatim.
pub const PAPER_CATALOG_TEXT: &str = include_str!("../../data/trace_catalog.txt");

/// Weighted sum of degrees the reference weights are documented to give.
pub const PAPER_T: &str = "2.6417021";

/// Constant expected from the reciprocal corollary of the reference bound.
pub const PAPER_COROLLARY: &str = "1.896406";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("count mismatch: {polys} polynomials but {weights} weights")]
    CountMismatch { polys: usize, weights: usize },
    #[error("catalog has no entries")]
    Empty,
    #[error("exception {0} is listed twice")]
    DuplicateException(String),
    #[error("catalog does not state a bound")]
    MissingBound,
    #[error(transparent)]
    Aux(#[from] AuxError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub poly: IntPoly,
    pub weight: Decimal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Catalog {
    pub name: String,
    pub claimed_bound: Option<Decimal>,
    pub entries: Vec<CatalogEntry>,
    pub exceptions: Vec<IntPoly>,
}

impl Catalog {
    /// The reference catalog shipped with the crate.
    pub fn paper() -> Catalog {
        parse_catalog(PAPER_CATALOG_TEXT).expect("embedded catalog parses")
    }

    pub fn from_entries(
        name: &str,
        bound: Option<&str>,
        entries: Vec<(IntPoly, &str)>,
    ) -> Result<Catalog, CatalogError> {
        let claimed_bound = bound
            .map(|b| b.parse::<Decimal>())
            .transpose()
            .map_err(|e| CatalogError::Syntax {
                line: 0,
                reason: e.to_string(),
            })?;
        let entries = entries
            .into_iter()
            .map(|(poly, w)| {
                Ok(CatalogEntry {
                    poly,
                    weight: w.parse().map_err(|e: DecimalError| CatalogError::Syntax {
                        line: 0,
                        reason: e.to_string(),
                    })?,
                })
            })
            .collect::<Result<Vec<_>, CatalogError>>()?;
        if entries.is_empty() {
            return Err(CatalogError::Empty);
        }
        Ok(Catalog {
            name: name.to_string(),
            claimed_bound,
            entries,
            exceptions: Vec::new(),
        })
    }

    pub fn bound(&self) -> Result<&Decimal, CatalogError> {
        self.claimed_bound
            .as_ref()
            .ok_or(CatalogError::MissingBound)
    }

    pub fn aux_function(&self) -> Result<AuxFunction, CatalogError> {
        Ok(AuxFunction::new(
            self.entries
                .iter()
                .map(|e| (e.poly.clone(), e.weight.to_f64()))
                .collect(),
        )?)
    }

    /// `t = sum c_j deg Q_j` computed exactly from the decimal weights.
    pub fn t_exact(&self) -> num_rational::BigRational {
        self.entries
            .iter()
            .map(|e| {
                e.weight.value() * num_rational::BigRational::from_integer(e.poly.deg().into())
            })
            .sum()
    }
}

fn parse_poly_fields(fields: &[&str], line: usize) -> Result<(IntPoly, usize), CatalogError> {
    let syntax = |reason: String| CatalogError::Syntax { line, reason };
    let d: usize = fields
        .first()
        .ok_or_else(|| syntax("missing degree".into()))?
        .parse()
        .map_err(|_| syntax(format!("bad degree '{}'", fields[0])))?;
    if fields.len() < d + 2 {
        return Err(syntax(format!(
            "degree {d} needs {} coefficients, found {}",
            d + 1,
            fields.len() - 1
        )));
    }
    let coeffs = fields[1..d + 2]
        .iter()
        .map(|s| {
            s.parse::<BigInt>()
                .map_err(|_| syntax(format!("bad coefficient '{s}'")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if coeffs[d] == BigInt::from(0) {
        return Err(syntax("leading coefficient is zero".into()));
    }
    Ok((IntPoly::new(coeffs), d + 2))
}

/// Parse the line-oriented catalog format.
pub fn parse_catalog(text: &str) -> Result<Catalog, CatalogError> {
    let mut name = String::from("unnamed");
    let mut bound = None;
    let mut polys: Vec<(IntPoly, Option<Decimal>)> = Vec::new();
    let mut loose_weights: Vec<Decimal> = Vec::new();
    let mut exceptions: Vec<IntPoly> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |reason: String| CatalogError::Syntax { line, reason };
        let decimal = |s: &str| s.parse::<Decimal>().map_err(|e| syntax(e.to_string()));
        let fields: Vec<&str> = content.split_whitespace().collect();
        match fields[0] {
            "catalog" => {
                if fields.len() != 2 {
                    return Err(syntax("expected 'catalog <name>'".into()));
                }
                name = fields[1].to_string();
            }
            "bound" => {
                if fields.len() != 2 {
                    return Err(syntax("expected 'bound <decimal>'".into()));
                }
                bound = Some(decimal(fields[1])?);
            }
            "poly" => {
                let (p, used) = parse_poly_fields(&fields[1..], line)?;
                let rest = &fields[1 + used..];
                let weight = match rest {
                    [] => None,
                    ["weight", w] => {
                        let w = decimal(w)?;
                        if w.is_negative() {
                            return Err(syntax(format!("negative weight {w}")));
                        }
                        Some(w)
                    }
                    _ => {
                        return Err(syntax(format!(
                            "unexpected trailing fields '{}'",
                            rest.join(" ")
                        )))
                    }
                };
                polys.push((p, weight));
            }
            "weight" => {
                if fields.len() != 2 {
                    return Err(syntax("expected 'weight <decimal>'".into()));
                }
                let w = decimal(fields[1])?;
                if w.is_negative() {
                    return Err(syntax(format!("negative weight {w}")));
                }
                loose_weights.push(w);
            }
            "exception" => {
                let (p, used) = parse_poly_fields(&fields[1..], line)?;
                if used != fields.len() - 1 {
                    return Err(syntax("unexpected trailing fields".into()));
                }
                if exceptions.contains(&p) {
                    return Err(CatalogError::DuplicateException(p.to_string()));
                }
                exceptions.push(p);
            }
            other => return Err(syntax(format!("unknown record '{other}'"))),
        }
    }
    let missing = polys.iter().filter(|(_, w)| w.is_none()).count();
    let total_weights = polys.len() - missing + loose_weights.len();
    if total_weights != polys.len() || missing != loose_weights.len() {
        return Err(CatalogError::CountMismatch {
            polys: polys.len(),
            weights: total_weights,
        });
    }
    let mut loose = loose_weights.into_iter();
    let entries: Vec<CatalogEntry> = polys
        .into_iter()
        .map(|(poly, w)| CatalogEntry {
            poly,
            weight: w.unwrap_or_else(|| loose.next().unwrap()),
        })
        .collect();
    if entries.is_empty() {
        return Err(CatalogError::Empty);
    }
    Ok(Catalog {
        name,
        claimed_bound: bound,
        entries,
        exceptions,
    })
}

fn write_coeffs(out: &mut String, p: &IntPoly) {
    write!(out, "{}", p.deg()).unwrap();
    for c in p.coeffs() {
        write!(out, " {c}").unwrap();
    }
}

/// Render a catalog in the line format; `parse_catalog` inverts it.
pub fn serialize_catalog(cat: &Catalog) -> String {
    let mut out = String::new();
    writeln!(out, "catalog {}", cat.name).unwrap();
    if let Some(b) = &cat.claimed_bound {
        writeln!(out, "bound {b}").unwrap();
    }
    for e in &cat.entries {
        out.push_str("poly ");
        write_coeffs(&mut out, &e.poly);
        writeln!(out, " weight {}", e.weight).unwrap();
    }
    for x in &cat.exceptions {
        out.push_str("exception ");
        write_coeffs(&mut out, x);
        out.push('\n');
    }
    out
}
