//! The `radiant` command line: argument model, option validation and the
//! dispatch from subcommands to `radiant-core`.
//!
//! Every command writes one canonical JSON document (or OBJ text for
//! `export --format obj`) to stdout or `--output`. Exit codes: 0 success,
//! 1 I/O or parse error, 2 violated precondition, 3 non-convergence,
//! 4 internal invariant violation.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use radiant_core::delaunay::{edge_statuses, flipping_algorithm, is_admissible_with};
use radiant_core::hinge::{Legality, DEFAULT_EPS};
use radiant_core::json::{to_canonical, value_to_canonical};
use radiant_core::stalk::{audit_report, audit_sample};
use radiant_core::suspension::export_suspension;
use radiant_core::{solve, ConeSurface, Error, FlipOptions, HessianMode, SolveOptions, SurfaceDoc, SuspensionData};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

/// Default tolerance of the Volkov audit.
pub const AUDIT_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "radiant", version, about = "Prescribed-mass radiant spacetimes over Euclidean cone surfaces")]
pub struct Cli {
    /// Write the result here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a surface and report cone angles and topology.
    Validate { surface: PathBuf },
    /// Run the flipping algorithm for the given weights and print its trace.
    Delaunay {
        surface: PathBuf,
        #[command(flatten)]
        weights: Weights,
        #[command(flatten)]
        flips: FlipArgs,
    },
    /// Decide whether the weights lie in the admissible domain.
    Admissible {
        surface: PathBuf,
        #[command(flatten)]
        weights: Weights,
        #[command(flatten)]
        flips: FlipArgs,
    },
    /// Find the weights realising the target masses.
    Solve {
        surface: PathBuf,
        #[command(flatten)]
        targets: Targets,
        #[command(flatten)]
        solver: SolverArgs,
        /// Include the per-iteration diagnostics in the report.
        #[arg(long)]
        trace: bool,
    },
    /// Build the suspension of admissible weights.
    Suspend {
        surface: PathBuf,
        #[command(flatten)]
        weights: Weights,
    },
    /// Re-emit a suspension (or surface) document as canonical JSON or OBJ.
    Export {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Check random stalks of total angle THETA against the Volkov bounds.
    VolkovAudit {
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads; the report does not depend on this.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = AUDIT_TOL)]
        tol: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Obj,
}

#[derive(Debug, Args)]
pub struct Weights {
    /// Weights in vertex order: `const:c` or a comma list.
    #[arg(long)]
    pub tau: String,
}

#[derive(Debug, Args)]
pub struct FlipArgs {
    /// Relative width of the criticality band.
    #[arg(long, default_value_t = DEFAULT_EPS)]
    pub eps: f64,
    /// Flip bound (default `50·E²`).
    #[arg(long)]
    pub max_flips: Option<usize>,
}

#[derive(Debug, Args)]
pub struct Targets {
    /// Target masses in vertex order, comma separated.
    #[arg(long)]
    pub kappa: Option<String>,
    /// JSON file `{"kappa_bar": {label: value}}`.
    #[arg(long)]
    pub targets: Option<PathBuf>,
}

/// Mirrors [`SolveOptions`] field by field.
#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = SolveOptions::default().tol_mass)]
    pub tol_mass: f64,
    #[arg(long, default_value_t = SolveOptions::default().max_iter)]
    pub max_iter: usize,
    #[arg(long, default_value_t = SolveOptions::default().initial_height)]
    pub initial_height: f64,
    /// Starting weights (`const:c` or comma list); overrides `--initial-height`.
    #[arg(long)]
    pub initial_tau: Option<String>,
    #[arg(long, default_value_t = SolveOptions::default().backtrack)]
    pub backtrack: f64,
    #[arg(long, default_value_t = SolveOptions::default().sufficient_decrease)]
    pub sufficient_decrease: f64,
    #[arg(long, default_value_t = SolveOptions::default().max_halvings)]
    pub max_halvings: usize,
    /// `analytic`, `fd` or `auto`.
    #[arg(long, default_value = "auto")]
    pub hessian: String,
    #[arg(long, default_value_t = SolveOptions::default().fd_step)]
    pub fd_step: f64,
    #[arg(long, default_value_t = SolveOptions::default().near_critical)]
    pub near_critical: f64,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
    /// Extra context written to stderr for internal errors.
    pub dump: Option<Value>,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into(), dump: None }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) => EXIT_IO,
            Error::InvalidSurface(_) | Error::Precondition(_) | Error::Inadmissible(_) | Error::Degenerate(_) => {
                EXIT_PRECONDITION
            }
            Error::NoConvergence(_) => EXIT_NO_CONVERGENCE,
            Error::Internal(_) => EXIT_INTERNAL,
        };
        Self::new(code, e.to_string())
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn precondition(m: impl Into<String>) -> Failure {
    Failure::new(EXIT_PRECONDITION, m)
}

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_IO, format!("cannot read {}: {e}", path.display())))
}

fn load_surface(path: &Path) -> Outcome<ConeSurface> {
    Ok(ConeSurface::from_json(&read(path)?)?)
}

fn parse_list(s: &str, what: &str) -> Outcome<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| Failure::new(EXIT_IO, format!("bad {what} entry {x:?}: {e}"))))
        .collect()
}

/// Parse weights: `const:c` or a comma list of `n` values.
pub fn parse_tau(text: &str, n: usize) -> Outcome<Vec<f64>> {
    let tau = match text.strip_prefix("const:") {
        Some(c) => {
            let c = c
                .trim()
                .parse::<f64>()
                .map_err(|e| Failure::new(EXIT_IO, format!("bad constant weight {c:?}: {e}")))?;
            vec![c; n]
        }
        None => parse_list(text, "tau")?,
    };
    if tau.len() != n {
        return Err(precondition(format!("expected {n} weights, got {}", tau.len())));
    }
    if let Some(t) = tau.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(precondition(format!("weights must be finite and non-negative, got {t}")));
    }
    Ok(tau)
}

fn parse_targets(t: &Targets, surf: &ConeSurface) -> Outcome<Vec<f64>> {
    match (&t.kappa, &t.targets) {
        (Some(k), None) => {
            let v = parse_list(k, "kappa")?;
            if v.len() != surf.n_vertices() {
                return Err(precondition(format!("expected {} targets, got {}", surf.n_vertices(), v.len())));
            }
            Ok(v)
        }
        (None, Some(path)) => {
            let doc: Value = serde_json::from_str(&read(path)?)
                .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))?;
            let map = doc
                .get("kappa_bar")
                .and_then(Value::as_object)
                .ok_or_else(|| Failure::new(EXIT_IO, "targets file needs a \"kappa_bar\" object"))?;
            if let Some(l) = map.keys().find(|l| surf.vertex_index(l).is_err()) {
                return Err(precondition(format!("target for unknown vertex {l:?}")));
            }
            surf.labels()
                .iter()
                .map(|l| {
                    map.get(l)
                        .ok_or_else(|| precondition(format!("no target for vertex {l:?}")))?
                        .as_f64()
                        .ok_or_else(|| Failure::new(EXIT_IO, format!("target for {l:?} is not a number")))
                })
                .collect()
        }
        (Some(_), Some(_)) => Err(precondition("--kappa and --targets cannot be combined")),
        (None, None) => Err(precondition("give targets with --kappa or --targets")),
    }
}

fn flip_options(f: &FlipArgs) -> Outcome<FlipOptions> {
    if !(f.eps.is_finite() && f.eps >= 0.0) {
        return Err(precondition("--eps must be finite and non-negative"));
    }
    Ok(FlipOptions { eps: f.eps, max_iter: f.max_flips })
}

/// Build and check [`SolveOptions`]; `n` is the vertex count.
pub fn solve_options(a: &SolverArgs, n: usize) -> Outcome<SolveOptions> {
    let positive = |v: f64, name: &str| {
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(precondition(format!("--{name} must be positive")))
        }
    };
    let unit = |v: f64, name: &str| {
        if v > 0.0 && v < 1.0 {
            Ok(v)
        } else {
            Err(precondition(format!("--{name} must lie in (0, 1)")))
        }
    };
    Ok(SolveOptions {
        tol_mass: positive(a.tol_mass, "tol-mass")?,
        max_iter: a.max_iter,
        initial_height: positive(a.initial_height, "initial-height")?,
        initial_tau: a.initial_tau.as_deref().map(|s| parse_tau(s, n)).transpose()?,
        backtrack: unit(a.backtrack, "backtrack")?,
        sufficient_decrease: unit(a.sufficient_decrease, "sufficient-decrease")?,
        max_halvings: a.max_halvings,
        hessian_mode: a.hessian.parse::<HessianMode>()?,
        fd_step: positive(a.fd_step, "fd-step")?,
        near_critical: positive(a.near_critical, "near-critical")?,
    })
}

fn canonical<T: Serialize + ?Sized>(v: &T) -> Outcome<String> {
    Ok(to_canonical(v)?)
}

fn validate(surf: &ConeSurface) -> Outcome<String> {
    let e = surf.euler_data();
    let doc = json!({
        "format_version": 1,
        "kind": "validation",
        "labels": surf.labels(),
        "cone_angles": surf.cone_angles(),
        "area": surf.area(),
        "vertices": e.vertices,
        "edges": e.edges,
        "faces": e.faces,
        "chi": e.chi,
        "genus": e.genus,
        "gauss_bonnet_residual": e.gauss_bonnet_residual,
    });
    Ok(value_to_canonical(&doc))
}

fn delaunay(surf: &ConeSurface, tau: &[f64], opts: FlipOptions) -> Outcome<String> {
    let (tri, trace) = flipping_algorithm(surf, tau, opts)?;
    let statuses = edge_statuses(&tri, tau, opts.eps);
    let illegal: Vec<[usize; 2]> =
        statuses.iter().filter(|s| s.legality == Legality::Illegal).map(|s| s.edge).collect();
    let doc = json!({
        "format_version": 1,
        "kind": "delaunay",
        "labels": surf.labels(),
        "tau": tau,
        "trace": trace,
        "edges": statuses,
        "illegal_edges": illegal,
        "triangulation": tri.to_doc(),
    });
    Ok(value_to_canonical(&doc))
}

fn admissible(surf: &ConeSurface, tau: &[f64], opts: FlipOptions) -> Outcome<String> {
    let a = is_admissible_with(surf, tau, opts)?;
    let doc = json!({
        "format_version": 1,
        "kind": "admissibility",
        "labels": surf.labels(),
        "tau": tau,
        "admissible": a.admissible,
        "illegal_edges": a.illegal_edges,
        "flips": a.trace.iterations,
        "triangulation_id": a.trace.final_id,
    });
    Ok(value_to_canonical(&doc))
}

fn export(text: &str, format: Format) -> Outcome<String> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
    if doc.get("kind").and_then(Value::as_str) == Some("suspension") {
        let s = SuspensionData::from_json(text)?;
        return match format {
            Format::Json => canonical(&s),
            Format::Obj => Ok(s.to_obj()),
        };
    }
    if format == Format::Obj {
        return Err(precondition("OBJ export needs a suspension document"));
    }
    let surf = ConeSurface::from_doc(
        &serde_json::from_value::<SurfaceDoc>(doc).map_err(|e| Failure::new(EXIT_IO, e.to_string()))?,
    )?;
    canonical(&surf.to_doc())
}

fn volkov_audit(theta: f64, samples: u64, seed: u64, jobs: usize, tol: f64) -> Outcome<(String, bool)> {
    if !(theta.is_finite() && theta > 0.0) {
        return Err(precondition("--theta must be positive"));
    }
    if jobs == 0 {
        return Err(precondition("--jobs must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::new(EXIT_INTERNAL, format!("cannot start workers: {e}")))?;
    // Each sample owns its random stream, so the result is independent of `jobs`.
    let all = pool.install(|| {
        (0..samples).into_par_iter().map(|i| audit_sample(theta, seed, i, tol)).collect::<Result<Vec<_>, _>>()
    })?;
    let report = audit_report(theta, all);
    let clean = report.violations.is_empty();
    Ok((canonical(&report)?, clean))
}

/// Execute a parsed command line and return the text to emit.
pub fn run(cli: &Cli) -> Outcome<String> {
    match &cli.command {
        Command::Validate { surface } => validate(&load_surface(surface)?),
        Command::Delaunay { surface, weights, flips } => {
            let s = load_surface(surface)?;
            let opts = flip_options(flips)?;
            delaunay(&s, &parse_tau(&weights.tau, s.n_vertices())?, opts)
        }
        Command::Admissible { surface, weights, flips } => {
            let s = load_surface(surface)?;
            let opts = flip_options(flips)?;
            admissible(&s, &parse_tau(&weights.tau, s.n_vertices())?, opts)
        }
        Command::Solve { surface, targets, solver, trace } => {
            let s = load_surface(surface)?;
            let opts = solve_options(solver, s.n_vertices())?;
            let kbar = parse_targets(targets, &s)?;
            let mut report = solve(&s, &kbar, &opts)?;
            if !trace {
                report.trace.clear();
            }
            canonical(&report)
        }
        Command::Suspend { surface, weights } => {
            let s = load_surface(surface)?;
            canonical(&export_suspension(&s, &parse_tau(&weights.tau, s.n_vertices())?)?)
        }
        Command::Export { input, format } => export(&read(input)?, *format),
        Command::VolkovAudit { theta, samples, seed, jobs, tol } => {
            let (text, clean) = volkov_audit(*theta, *samples, *seed, *jobs, *tol)?;
            if clean {
                Ok(text)
            } else {
                let dump = serde_json::from_str(&text).ok();
                Err(Failure { code: EXIT_INTERNAL, message: "Volkov bounds violated".into(), dump })
            }
        }
    }
}

/// Run and write the output; returns the process exit code.
pub fn main_with(cli: &Cli) -> i32 {
    match run(cli) {
        Ok(text) => match &cli.output {
            Some(p) => match fs::write(p, text) {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    eprintln!("radiant: cannot write {}: {e}", p.display());
                    EXIT_IO
                }
            },
            None => {
                print!("{text}");
                EXIT_OK
            }
        },
        Err(f) => {
            eprintln!("radiant: {}", f.message);
            if let Some(d) = f.dump {
                eprint!("{}", value_to_canonical(&d));
            }
            f.code
        }
    }
}
