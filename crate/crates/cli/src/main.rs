use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use traceforge::auxfun::DEFAULT_TOL;
use traceforge::catalog::{
    check_candidate, verify_corollary, verify_theorem, Catalog, CorollaryOptions, Verdict,
    VerifyOptions,
};
use traceforge::optimizer::{silp_optimize_with, OptError, SilpOptions};
use traceforge::search::{load_state, run_sweep_with, save_state, seed, SearchConfig, StepOutcome};
use traceforge::{factor, global_min, parse_catalog, serialize_catalog, IntPoly};

#[derive(Parser)]
#[command(
    name = "traceforge",
    version,
    about = "Auxiliary-function bounds for the absolute trace of totally positive algebraic integers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Report {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Verify a catalog's bound, t-value, exceptions and factors.
    Verify {
        /// Catalog file; the embedded catalog when omitted.
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Report::Text)]
        report: Report,
        /// Also check the reciprocal corollary.
        #[arg(long)]
        corollary: bool,
    },
    /// Optimize weights for a fixed list of polynomials.
    Optimize {
        /// One polynomial per line, or a catalog file whose weights are ignored.
        #[arg(long)]
        polys: PathBuf,
        /// Stopping gap between the two SILP bounds.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Write the optimized function as a catalog here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Report::Text)]
        report: Report,
    },
    /// Run the recursive LLL search over a range of degrees.
    Search {
        #[arg(long)]
        kmin: Option<usize>,
        #[arg(long)]
        kmax: Option<usize>,
        /// Right end of the control interval (0, A].
        #[arg(long)]
        interval_max: Option<f64>,
        /// Short vectors kept per step.
        #[arg(long)]
        candidates: Option<usize>,
        /// Stop after this many consecutive unproductive steps.
        #[arg(long)]
        max_stale: Option<usize>,
        /// Continue from a state file written by an earlier run.
        #[arg(long)]
        resume: Option<PathBuf>,
        /// Checkpoint file; defaults to the resume file, else search-state.txt.
        #[arg(long)]
        state: Option<PathBuf>,
    },
    /// Map Q to X^deg Q(X + 1/X - 2), or back with --inverse.
    Reciprocal {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        inverse: bool,
    },
    /// Trace, absolute trace and total positivity of a polynomial.
    Trace {
        #[arg(long)]
        poly: String,
    },
    /// Factor a polynomial over the integers.
    Factor {
        #[arg(long)]
        poly: String,
    },
    /// Evaluate a catalog's auxiliary function at x.
    Eval {
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long)]
        x: f64,
    },
    /// Classify a totally positive irreducible polynomial against a catalog.
    Check {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
}

/// Input problems exit with 2; failed checks exit with 1.
enum Failure {
    Input(anyhow::Error),
    Check(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("TRACEFORGE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .with_context(|| format!("TRACEFORGE_THREADS={v:?} is not a count"))?;
    if n == 0 {
        bail!("TRACEFORGE_THREADS must be positive");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()?;
    Ok(())
}

fn poly(s: &str) -> Result<IntPoly> {
    s.parse()
        .map_err(|e| anyhow!("{e}"))
        .with_context(|| format!("cannot parse polynomial {s:?}"))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_catalog(path: Option<&Path>) -> Result<Catalog> {
    match path {
        None => Ok(Catalog::paper()),
        Some(p) => parse_catalog(&read(p)?).with_context(|| format!("in {}", p.display())),
    }
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Verify {
            catalog,
            tol,
            report,
            corollary,
        } => verify(catalog.as_deref(), tol, report, corollary),
        Command::Optimize {
            polys,
            tol,
            out,
            report,
        } => optimize(&polys, tol, out.as_deref(), report),
        Command::Search {
            kmin,
            kmax,
            interval_max,
            candidates,
            max_stale,
            resume,
            state,
        } => search(
            SearchFlags {
                kmin,
                kmax,
                interval_max,
                candidates,
                max_stale,
            },
            resume,
            state,
        ),
        Command::Reciprocal { poly: s, inverse } => {
            let q = poly(&s)?;
            let image = if inverse {
                q.from_reciprocal()
            } else {
                q.to_reciprocal()
            };
            let image = image.map_err(|e| anyhow!("{e}"))?;
            println!("{image}");
            let (small, big) = if inverse { (&image, &q) } else { (&q, &image) };
            if let (Ok(ts), Ok(tb)) = (small.trace(), big.trace()) {
                println!("trace {tb} = {ts} + {}", big.deg());
            }
            Ok(())
        }
        Command::Trace { poly: s } => {
            let q = poly(&s)?;
            let trace = q.trace().map_err(|e| anyhow!("{e}"))?;
            let abs = q.abs_trace().map_err(|e| anyhow!("{e}"))?;
            println!("degree {}", q.deg());
            println!("trace {trace}");
            println!(
                "absolute trace {abs} ({:.9})",
                num_traits::ToPrimitive::to_f64(&abs).unwrap_or(f64::NAN)
            );
            let tp = q.is_totally_positive().map_err(|e| anyhow!("{e}"))?;
            println!("totally positive {tp}");
            Ok(())
        }
        Command::Factor { poly: s } => {
            let q = poly(&s)?;
            let fz = factor(&q);
            println!("{fz}");
            for (f, m) in &fz.factors {
                println!("  {f}  multiplicity {m}");
            }
            Ok(())
        }
        Command::Eval { catalog, x } => {
            let af = load_catalog(catalog.as_deref())?
                .aux_function()
                .map_err(anyhow::Error::from)?;
            let v = af.eval(x).map_err(|e| anyhow!("{e}"))?;
            println!("{v:.12}");
            Ok(())
        }
        Command::Check { poly: s, catalog } => {
            let q = poly(&s)?;
            let cat = load_catalog(catalog.as_deref())?;
            let af = cat.aux_function().map_err(anyhow::Error::from)?;
            let m = global_min(&af, DEFAULT_TOL).map_err(|e| anyhow!("{e}"))?.m;
            let verdict = check_candidate(&q, &cat, m).map_err(|e| anyhow!("{e}"))?;
            match &verdict {
                Verdict::Exception { abs_trace } => {
                    println!("exception: absolute trace {abs_trace}")
                }
                Verdict::BoundApplies {
                    abs_trace,
                    bound,
                    holds,
                    divides_entry,
                } => {
                    println!(
                        "bound applies: absolute trace {abs_trace} >= {bound:.9} {}",
                        if *holds { "holds" } else { "FAILS" }
                    );
                    if *divides_entry {
                        println!("(divides a catalog entry but clears the bound)");
                    }
                    if !holds {
                        return Err(Failure::Check("candidate violates the bound".into()));
                    }
                }
            }
            Ok(())
        }
    }
}

fn verify(catalog: Option<&Path>, tol: f64, report: Report, corollary: bool) -> Outcome {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(anyhow!("--tol must be positive").into());
    }
    let cat = load_catalog(catalog)?;
    let mut opts = if catalog.is_none() {
        VerifyOptions::paper()
    } else {
        VerifyOptions::default()
    };
    opts.tol = tol;
    let theorem = verify_theorem(&cat, &opts).map_err(anyhow::Error::from)?;
    let cor = if corollary {
        let copts = if catalog.is_none() {
            CorollaryOptions::paper()
        } else {
            CorollaryOptions::default()
        };
        Some(verify_corollary(&cat, &copts).map_err(anyhow::Error::from)?)
    } else {
        None
    };
    match report {
        Report::Json => print_json(&json!({ "theorem": theorem, "corollary": cor }))?,
        Report::Text => {
            print!("{}", theorem.to_text());
            if let Some(c) = &cor {
                print!("{}", c.to_text());
            }
        }
    }
    let passed = theorem.passed && cor.as_ref().is_none_or(|c| c.passed);
    if passed {
        Ok(())
    } else {
        Err(Failure::Check("verification failed".into()))
    }
}

/// Polynomials from a catalog file or from one expression per line.
fn read_polys(path: &Path) -> Result<Vec<IntPoly>> {
    let text = read(path)?;
    if text.lines().any(|l| l.trim_start().starts_with("poly ")) {
        let cat = parse_catalog(&text).with_context(|| format!("in {}", path.display()))?;
        return Ok(cat.entries.into_iter().map(|e| e.poly).collect());
    }
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if !line.is_empty() {
            out.push(poly(line).with_context(|| format!("{}:{}", path.display(), i + 1))?);
        }
    }
    if out.is_empty() {
        bail!("{} lists no polynomials", path.display());
    }
    Ok(out)
}

fn optimize(path: &Path, tol: f64, out: Option<&Path>, report: Report) -> Outcome {
    let polys = read_polys(path)?;
    let opts = SilpOptions {
        stop_tol: tol,
        ..SilpOptions::default()
    };
    let (af, trace) = match silp_optimize_with(&polys, &[], &opts) {
        Ok(r) => r,
        Err(OptError::NotConverged(trace)) => {
            return Err(Failure::Check(format!(
                "no convergence after {} iterations; bounds {:.9} <= m <= {:.9}",
                trace.iterations,
                trace.lower.last().copied().unwrap_or(f64::NAN),
                trace.upper.last().copied().unwrap_or(f64::NAN)
            )))
        }
        Err(e) => return Err(anyhow!("{e}").into()),
    };
    let weights: Vec<String> = af.weights().iter().map(|c| format!("{c}")).collect();
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("optimized");
    let bound = format!("{}", trace.m());
    let cat = Catalog::from_entries(
        name,
        Some(&bound),
        polys
            .iter()
            .cloned()
            .zip(weights.iter().map(String::as_str))
            .collect(),
    )
    .map_err(anyhow::Error::from)?;
    let text = serialize_catalog(&cat);
    if let Some(out) = out {
        fs::write(out, &text).with_context(|| format!("cannot write {}", out.display()))?;
    }
    match report {
        Report::Json => print_json(
            &json!({ "m": trace.m(), "t": af.t(), "weights": af.weights(), "trace": trace }),
        )?,
        Report::Text => {
            println!(
                "m = {:.9}  t = {:.7}  gap = {:.2e}  iterations = {}",
                trace.m(),
                af.t(),
                trace.gap(),
                trace.iterations
            );
            if out.is_none() {
                print!("{text}");
            }
        }
    }
    Ok(())
}

fn sidecar_path(state: &Path) -> PathBuf {
    let mut s = state.as_os_str().to_owned();
    s.push(".history.json");
    PathBuf::from(s)
}

/// Command-line overrides of a stored or default search config.
struct SearchFlags {
    kmin: Option<usize>,
    kmax: Option<usize>,
    interval_max: Option<f64>,
    candidates: Option<usize>,
    max_stale: Option<usize>,
}

fn search(flags: SearchFlags, resume: Option<PathBuf>, state_path: Option<PathBuf>) -> Outcome {
    let (start, stored) = match &resume {
        Some(p) => {
            let side = sidecar_path(p);
            let side = side.exists().then(|| read(&side)).transpose()?;
            load_state(&read(p)?, side.as_deref())
                .with_context(|| format!("cannot resume from {}", p.display()))?
        }
        None => (seed(), None),
    };
    let mut cfg = stored.unwrap_or_default();
    if let Some(v) = flags.kmin {
        cfg.k_min = v;
    }
    if let Some(v) = flags.kmax {
        cfg.k_max = v;
    }
    if let Some(v) = flags.interval_max {
        cfg.interval_cap = v;
    }
    if let Some(v) = flags.candidates {
        cfg.candidates_per_step = v;
    }
    if flags.max_stale.is_some() {
        cfg.max_stale_steps = flags.max_stale;
    }
    cfg.validate().map_err(anyhow::Error::from)?;
    let out = state_path
        .or(resume)
        .unwrap_or_else(|| PathBuf::from("search-state.txt"));
    let checkpoint = |s: &traceforge::SearchState, cfg: &SearchConfig| -> Result<()> {
        let (text, side) = save_state(s, Some(cfg));
        fs::write(&out, text).with_context(|| format!("cannot write {}", out.display()))?;
        fs::write(sidecar_path(&out), side)?;
        Ok(())
    };
    println!(
        "start m = {:.9} with {} polynomials",
        start.m,
        start.af.len()
    );
    let mut write_err = None;
    let end = run_sweep_with(start, &cfg, |s| {
        let rec = s.history.last().expect("a step was recorded");
        let tag = match rec.outcome {
            StepOutcome::Admitted => "admitted",
            StepOutcome::Stale => "stale",
            StepOutcome::Failed => "failed",
        };
        print!("k = {:>3}  {tag:<8} m = {:.9}", rec.k, rec.m_after);
        if !rec.admitted.is_empty() {
            let names: Vec<String> = rec.admitted.iter().map(|q| q.to_string()).collect();
            print!("  + {}", names.join(", "));
        }
        if let Some(e) = &rec.error {
            print!("  ({e})");
        }
        println!();
        if write_err.is_none() {
            write_err = checkpoint(s, &cfg).err();
        }
    })
    .map_err(anyhow::Error::from)?;
    if let Some(e) = write_err {
        return Err(e.into());
    }
    checkpoint(&end, &cfg)?;
    println!(
        "final m = {:.9}, t = {:.7}, {} polynomials; state in {}",
        end.m,
        end.af.t(),
        end.af.len(),
        out.display()
    );
    Ok(())
}
