//! The `hyperell` command line.
//!
//! Exit codes: 0 success, 2 bad input, 3 internal consistency failure,
//! 4 soundness violation in a scan, 5 certification failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::argument::{constants_csv, constants_table};
use crate::bounds::{BoundTarget, DegreePolicy};
use crate::config::RunConfig;
use crate::error::Error;
use crate::extremal::{
    interval_one_sided, verify_coefficient_bounds, ExtremalCache, Side, Target, GRID_FACTOR,
};
use crate::fq::{FieldSpec, MonicPoly};
use crate::lpoly::{compute_lpolynomial, find_zero_angles};
use crate::par::{self, Exec};
use crate::scan::{ensemble_scan, manifest, to_csv, Sample};
use crate::symbol::Character;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;
pub const EXIT_SOUNDNESS: i32 = 4;
pub const EXIT_CERTIFICATION: i32 = 5;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "HYPERELL_THREADS";

#[derive(Debug, Parser)]
#[command(name = "hyperell", version, about = "Zeros, argument functions and extremal bounds for quadratic L-functions over F_q[x]")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// L-polynomial and zero angles of one D, as JSON.
    Lpoly {
        #[arg(long)]
        q: u32,
        /// Monic squarefree D of odd degree, e.g. "x^5+2x+1".
        #[arg(value_name = "D")]
        d: String,
    },
    /// Bounds against empirical extrema over H_d; CSV plus manifest.
    Scan(ScanArgs),
    /// One-sided approximation of log2sin, sawtooth, bernoulli:n or
    /// interval:a:b.
    Extremal {
        #[arg(long)]
        target: String,
        #[arg(long, default_value = "majorant")]
        side: String,
        #[arg(long = "degree", short = 'N')]
        n: usize,
        /// Coefficient table destination.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Table of M, m, A and C constants.
    Constants {
        #[arg(long, default_value_t = 12)]
        nmax: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long)]
    pub d: Option<usize>,
    /// logmod or s:n; repeatable.
    #[arg(long = "target")]
    pub targets: Vec<String>,
    /// all or random:m.
    #[arg(long)]
    pub sample: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// formula, exhaustive[:cap] or fixed:N; repeatable.
    #[arg(long = "degree-policy")]
    pub policies: Vec<String>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub budget: Option<u64>,
    /// CSV path; the manifest goes next to it as `<stem>.manifest.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::Parse(_)
        | Error::UnsupportedDegree { .. }
        | Error::Unsupported(_)
        | Error::TableRange { .. }
        | Error::Resource { .. } => EXIT_INPUT,
        Error::Certification { .. } => EXIT_CERTIFICATION,
        Error::DivisionByZero
        | Error::InternalConsistency(_)
        | Error::RootIsolation { .. }
        | Error::Solver(_) => EXIT_INTERNAL,
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: format!("{}: {e}", path.display()),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    }
    fs::write(path, text).map_err(|e| io_failure(path, e))
}

fn threads_from_env() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Failure {
                code: EXIT_INPUT,
                message: format!("{THREADS_ENV} must be a positive integer, got '{v}'"),
            }),
        },
    }
}

fn cmd_lpoly(q: u32, d: &str, out: &mut dyn Write) -> Result<i32, Failure> {
    let field = FieldSpec::new(q)?;
    let poly = MonicPoly::parse(field, d)?;
    if poly.degree() % 2 == 0 {
        return Err(Error::Config(format!("D = {poly} has even degree {}", poly.degree())).into());
    }
    let ch = Character::new(poly)?;
    let l = compute_lpolynomial(&ch)?;
    if !l.functional_equation_holds() {
        return Err(Error::InternalConsistency(format!("functional equation fails for D = {}", l.modulus)).into());
    }
    let zeros = find_zero_angles(&l, 32)?;
    let v = json!({
        "q": l.q,
        "d": l.d,
        "D": l.modulus,
        "c": l.c,
        "theta": zeros.theta,
        "residual": zeros.residual,
        "fe_symmetry": "exact",
        "rh_radius_err": l.rh_radius_error(),
    });
    writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json")).ok();
    Ok(EXIT_OK)
}

fn build_run_config(a: &ScanArgs) -> Result<RunConfig, Failure> {
    let mut cfg = match &a.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| io_failure(p, e))?;
            RunConfig::from_text(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(q) = a.q {
        cfg.q = q;
    }
    if let Some(d) = a.d {
        cfg.d = d;
    }
    if !a.targets.is_empty() {
        cfg.targets = a
            .targets
            .iter()
            .map(|t| t.parse::<BoundTarget>())
            .collect::<Result<_, _>>()?;
    }
    if let Some(s) = &a.sample {
        cfg.sample = s.parse::<Sample>()?;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if !a.policies.is_empty() {
        cfg.policies = a
            .policies
            .iter()
            .map(|p| p.parse::<DegreePolicy>())
            .collect::<Result<_, _>>()?;
    }
    if let Some(g) = a.grid {
        cfg.grid = g;
    }
    if let Some(b) = a.budget {
        cfg.budget = b;
    }
    if a.out.is_some() {
        cfg.out = a.out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn manifest_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "scan".into());
    csv.with_file_name(format!("{stem}.manifest.json"))
}

fn cmd_scan(a: &ScanArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let cfg = build_run_config(a)?;
    let exec = if Exec::parallel_available() {
        Exec::Parallel
    } else {
        Exec::Sequential
    };
    let scan_cfg = cfg.scan_config(exec)?;
    let result = ensemble_scan(&scan_cfg)?;
    let csv = to_csv(&result);
    let man = serde_json::to_string_pretty(&manifest(&scan_cfg, &result)).expect("json") + "\n";
    match &cfg.out {
        Some(path) => {
            write_file(path, &csv)?;
            write_file(&manifest_path(path), &man)?;
        }
        None => {
            out.write_all(csv.as_bytes()).ok();
        }
    }
    if result.truncated {
        writeln!(err, "warning: budget reached, scanned {} polynomials", result.polys).ok();
    }
    if result.violations.is_empty() {
        Ok(EXIT_OK)
    } else {
        for v in &result.violations {
            writeln!(err, "violation [{}] D = {}: {}", v.kind, v.modulus, v.detail).ok();
        }
        Ok(EXIT_SOUNDNESS)
    }
}

fn parse_interval(spec: &str) -> Result<Option<(f64, f64)>, Failure> {
    let Some(rest) = spec.strip_prefix("interval:") else {
        return Ok(None);
    };
    let bad = || Failure {
        code: EXIT_INPUT,
        message: format!("bad interval '{spec}' (expected interval:a:b with 0 <= b - a <= 1)"),
    };
    let (a, b) = rest.split_once(':').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(a.is_finite() && b.is_finite() && (0.0..=1.0).contains(&(b - a))) {
        return Err(bad());
    }
    Ok(Some((a, b)))
}

fn cmd_extremal(
    target: &str,
    side: &str,
    n: usize,
    csv: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let side: Side = side.parse()?;
    let cache = ExtremalCache::new(GRID_FACTOR);
    let (poly, report) = if let Some((a, b)) = parse_interval(target)? {
        let r = interval_one_sided(&cache, a, b, side, n)?;
        let report = json!({
            "target": target,
            "side": side.to_string(),
            "N": n,
            "achieved_mean": r.poly.mean(),
            "oracle_mean": (b - a) + side.sign() / (n + 1) as f64,
            "gap": r.gap,
            "relative_gap": r.relative_gap,
            "repair_epsilon": 0.0,
            "certified_margin": r.certified_margin,
            "poly": r.poly,
        });
        (r.poly, report)
    } else {
        let t: Target = target.parse()?;
        let r = cache.get(t, side, n)?;
        let coeff = verify_coefficient_bounds(&r)?;
        let report = json!({
            "target": t.to_string(),
            "side": side.to_string(),
            "N": n,
            "achieved_mean": r.achieved_mean,
            "lp_mean": r.lp_mean,
            "oracle_mean": r.oracle_mean,
            "relative_gap": r.relative_gap(),
            "repair_epsilon": r.repair_epsilon,
            "certified_margin": r.certified_margin,
            "lp_iterations": r.lp_iterations,
            "cut_rounds": r.cut_rounds,
            "coefficients": coeff,
            "poly": r.poly,
        });
        (r.poly.clone(), report)
    };
    if let Some(path) = csv {
        write_file(path, &poly.to_csv())?;
    }
    writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("json")).ok();
    Ok(EXIT_OK)
}

fn cmd_constants(nmax: usize, path: Option<&Path>, out: &mut dyn Write) -> Result<i32, Failure> {
    let rows = constants_table(nmax)?;
    let text = constants_csv(&rows);
    match path {
        Some(p) => write_file(p, &text)?,
        None => {
            out.write_all(text.as_bytes()).ok();
        }
    }
    Ok(EXIT_OK)
}

fn report(f: Failure, err: &mut dyn Write) -> i32 {
    writeln!(err, "error: {}", f.message).ok();
    f.code
}

/// Runs a parsed command line and returns the exit code. Output is
/// buffered so the command can run inside a sized worker pool.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let threads = match threads_from_env() {
        Ok(t) => t,
        Err(f) => return report(f, err),
    };
    let (result, o, e) = par::with_threads(threads, || {
        let mut o = Vec::new();
        let mut e = Vec::new();
        let r = match &cli.command {
            Command::Lpoly { q, d } => cmd_lpoly(*q, d, &mut o),
            Command::Scan(a) => cmd_scan(a, &mut o, &mut e),
            Command::Extremal { target, side, n, csv } => cmd_extremal(target, side, *n, csv.as_deref(), &mut o),
            Command::Constants { nmax, out } => cmd_constants(*nmax, out.as_deref(), &mut o),
        };
        (r, o, e)
    });
    out.write_all(&o).ok();
    err.write_all(&e).ok();
    match result {
        Ok(code) => code,
        Err(f) => report(f, err),
    }
}

/// Entry point for the binary.
pub fn main_exit_code() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            e.print().ok();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(&cli, &mut stdout.lock(), &mut stderr.lock())
}
