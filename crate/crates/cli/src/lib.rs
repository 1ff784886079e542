//! Command-line driver: verification of the published functions, evaluation of
//! user files, seeded optimization runs, discrete `M(n)` tables and the bounds
//! report.
//!
//! Every command writes its report to a caller-supplied writer and returns an
//! [`ExitStatus`], so the binary is a thin wrapper around [`run`].

pub mod claims;

use std::fmt::Display;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use minoverlap::discrete::{self, MinOverlap};
use minoverlap::objective::{self, Mode, Report};
use minoverlap::optimizer::{self, AnnealConfig, OptimizerConfig};
use minoverlap::rational::{to_decimal, to_fraction_string};
use minoverlap::stepfn::{self, StepFunction};
use minoverlap::Error;

/// Process exit codes. Stable across releases.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    VerificationFailed = 1,
    BadInput = 2,
    CapacityExceeded = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

impl From<&Error> for ExitStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Capacity { .. } => ExitStatus::CapacityExceeded,
            _ => ExitStatus::BadInput,
        }
    }
}

/// Digits used when printing exact values.
pub const REPORT_DIGITS: u32 = 40;

#[derive(Debug, Parser)]
#[command(
    name = "minoverlap",
    version,
    about = "Erdős minimum overlap: evaluate, verify and search step functions"
)]
pub struct Cli {
    /// Omit elapsed-time lines so output is byte-reproducible.
    #[arg(long, global = true)]
    pub no_timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exactly evaluate built-in published functions and check their claimed values.
    Verify {
        #[arg(value_enum)]
        target: Target,
    },
    /// Evaluate a step-function file.
    Eval(EvalArgs),
    /// Search for a step function with small maximum overlap.
    Optimize(OptimizeArgs),
    /// Brute-force M(n) over all balanced partitions.
    Discrete(DiscreteArgs),
    /// Print the lower bound √(4-√15), the best published upper bound, and the gap.
    Bounds,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    P15,
    P19,
    P51,
    All,
}

impl Target {
    fn names(self) -> Vec<&'static str> {
        match self {
            Target::P15 => vec!["p15"],
            Target::P19 => vec!["p19"],
            Target::P51 => vec!["p51"],
            Target::All => stepfn::BUILTIN_NAMES.to_vec(),
        }
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub input: PathBuf,
    /// Rational arithmetic throughout (default: floating point).
    #[arg(long)]
    pub exact: bool,
    /// Write per-shift values as CSV.
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub steps: u32,
    #[arg(long)]
    pub symmetric: bool,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..))]
    pub restarts: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2000)]
    pub max_iters: usize,
    /// Initial step size s0 of the schedule s0/√(t+1).
    #[arg(long, default_value_t = 0.1)]
    pub step0: f64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..))]
    pub sweep_len: u32,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Perturb stalled iterates with a simulated-annealing kick.
    #[arg(long)]
    pub anneal: bool,
    #[arg(long, default_value_t = 1e-2, requires = "anneal")]
    pub anneal_t0: f64,
    #[arg(long, default_value_t = 0.8, requires = "anneal")]
    pub anneal_cooling: f64,
    /// Write the best function here, plus a `<path>.report.txt` sidecar.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "which")]
pub struct DiscreteSelect {
    #[arg(long = "n", value_name = "N")]
    pub n: Option<u32>,
    /// Inclusive range `A..B`.
    #[arg(long, value_name = "A..B", value_parser = parse_range)]
    pub range: Option<RangeInclusive<u32>>,
}

#[derive(Debug, Args)]
pub struct DiscreteArgs {
    #[command(flatten)]
    pub select: DiscreteSelect,
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Largest n to enumerate (default: $OVERLAP_CAP, else 12).
    #[arg(long)]
    pub cap: Option<u32>,
}

fn parse_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected A..B, got {s:?}"))?;
    let a: u32 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: u32 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if a == 0 || a > b {
        return Err(format!("range {a}..{b} must satisfy 1 <= A <= B"));
    }
    Ok(a..=b)
}

/// `--cap`, else `$OVERLAP_CAP`, else the library default.
pub fn resolve_cap(flag: Option<u32>, env: Option<&str>) -> Result<u32, String> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    match env {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|e| format!("OVERLAP_CAP={v:?}: {e}")),
        None => Ok(discrete::DEFAULT_CAP),
    }
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    timing: bool,
}

impl Ctx<'_> {
    fn fail(&mut self, e: impl Display, status: ExitStatus) -> ExitStatus {
        let _ = writeln!(self.err, "error: {e}");
        status
    }

    fn elapsed(&mut self, start: Instant) {
        if self.timing {
            let _ = writeln!(self.out, "elapsed {:.3}s", start.elapsed().as_secs_f64());
        }
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus {
    let mut ctx = Ctx {
        out,
        err,
        timing: !cli.no_timing,
    };
    let start = Instant::now();
    let status = match &cli.command {
        Command::Verify { target } => cmd_verify(&mut ctx, *target),
        Command::Eval(args) => cmd_eval(&mut ctx, args),
        Command::Optimize(args) => cmd_optimize(&mut ctx, args),
        Command::Discrete(args) => {
            let env = std::env::var("OVERLAP_CAP").ok();
            cmd_discrete(&mut ctx, args, env.as_deref())
        }
        Command::Bounds => cmd_bounds(&mut ctx),
    };
    if status != ExitStatus::BadInput && status != ExitStatus::CapacityExceeded {
        ctx.elapsed(start);
    }
    status
}

fn join_shifts(argmax: &[i64]) -> String {
    argmax
        .iter()
        .map(i64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn cmd_verify(ctx: &mut Ctx<'_>, target: Target) -> ExitStatus {
    let mut all_pass = true;
    for name in target.names() {
        let f = stepfn::builtin(name).expect("built-in name");
        let claim = claims::claim_for(name).expect("every built-in has a claim");
        let report = match objective::certify(&f) {
            Ok(r) => r,
            Err(e) => return ctx.fail(e, ExitStatus::VerificationFailed),
        };
        let m = report.max_value();
        let pass = claim.bracket.contains(m);
        all_pass &= pass;
        let _ = writeln!(
            ctx.out,
            "{name} n={} max={} argmax={} published={} check: {} {}",
            f.n(),
            to_decimal(m, REPORT_DIGITS),
            join_shifts(report.argmax()),
            claim.published,
            claim.bracket.describe(),
            if pass { "PASS" } else { "FAIL" }
        );
        let _ = writeln!(ctx.out, "{name} exact={}", to_fraction_string(m));
    }
    if all_pass {
        ExitStatus::Success
    } else {
        ExitStatus::VerificationFailed
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    std::fs::write(path, contents).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_eval(ctx: &mut Ctx<'_>, args: &EvalArgs) -> ExitStatus {
    let f = match stepfn::load(&args.input) {
        Ok(f) => f,
        Err(e) => return ctx.fail(e, ExitStatus::BadInput),
    };
    let mode = if args.exact { Mode::Exact } else { Mode::Float };
    let report = match objective::shift_values(&f, mode) {
        Ok(r) => r,
        Err(e) => return ctx.fail(e, ExitStatus::BadInput),
    };

    let integral = f.integral();
    let _ = writeln!(
        ctx.out,
        "n={} symmetric={} integral={}{}",
        f.n(),
        f.is_symmetric(),
        to_decimal(&integral, REPORT_DIGITS),
        if f.is_normalized() {
            ""
        } else {
            " (not normalized: value is not a certificate)"
        }
    );
    let _ = writeln!(ctx.out, "max={}", report.max_value());
    let _ = writeln!(ctx.out, "argmax={}", join_shifts(report.argmax()));
    if let Report::Exact(r) = &report {
        let _ = writeln!(ctx.out, "exact={}", to_fraction_string(r.max_value()));
    }
    if let Some(path) = &args.csv {
        if let Err(e) = write_file(path, &report.to_csv()) {
            return ctx.fail(e, ExitStatus::BadInput);
        }
    }
    ExitStatus::Success
}

fn optimizer_config(args: &OptimizeArgs) -> OptimizerConfig {
    let mut cfg = OptimizerConfig::new(args.steps as usize);
    cfg.symmetric = args.symmetric;
    cfg.restarts = args.restarts as usize;
    cfg.seed = args.seed;
    cfg.max_iters = args.max_iters;
    cfg.initial_step = args.step0;
    cfg.sweep_len = args.sweep_len as usize;
    cfg.tolerance = args.tol;
    if args.anneal {
        cfg.anneal = Some(AnnealConfig {
            initial_temperature: args.anneal_t0,
            cooling: args.anneal_cooling,
            ..AnnealConfig::default()
        });
    }
    cfg
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".report.txt");
    PathBuf::from(name)
}

fn cmd_optimize(ctx: &mut Ctx<'_>, args: &OptimizeArgs) -> ExitStatus {
    let cfg = optimizer_config(args);
    let result = match optimizer::multi_start(&cfg) {
        Ok(r) => r,
        Err(e) => {
            let status = ExitStatus::from(&e);
            return ctx.fail(e, status);
        }
    };
    let _ = writeln!(
        ctx.out,
        "certified={}",
        to_decimal(&result.best_value_exact, REPORT_DIGITS)
    );
    let _ = writeln!(
        ctx.out,
        "exact={}",
        to_fraction_string(&result.best_value_exact)
    );
    let _ = writeln!(ctx.out, "argmax={}", join_shifts(&result.argmax));
    let _ = writeln!(
        ctx.out,
        "n={} symmetric={} restarts={} seed={} best_restart={}",
        cfg.n, cfg.symmetric, cfg.restarts, cfg.seed, result.best_restart
    );
    if let Some(path) = &args.out {
        let label = format!(
            "optimize n={} symmetric={} seed={} restarts={}",
            cfg.n, cfg.symmetric, cfg.seed, cfg.restarts
        );
        let best: StepFunction = result.best.clone().with_label(label);
        let written = stepfn::store(&best, path)
            .map_err(|e| e.to_string())
            .and_then(|_| write_file(&sidecar_path(path), &result.report(&cfg)));
        if let Err(e) = written {
            return ctx.fail(e, ExitStatus::BadInput);
        }
        let _ = writeln!(ctx.out, "wrote {}", path.display());
    }
    ExitStatus::Success
}

fn cmd_discrete(ctx: &mut Ctx<'_>, args: &DiscreteArgs, env_cap: Option<&str>) -> ExitStatus {
    let cap = match resolve_cap(args.cap, env_cap) {
        Ok(c) => c,
        Err(e) => return ctx.fail(e, ExitStatus::BadInput),
    };
    let range = match (&args.select.n, &args.select.range) {
        (Some(n), _) => *n..=*n,
        (None, Some(r)) => r.clone(),
        (None, None) => return ctx.fail("give --n or --range", ExitStatus::BadInput),
    };
    let mut rows: Vec<MinOverlap> = Vec::new();
    for n in range {
        match discrete::min_over_partitions(n, cap) {
            Ok(row) => {
                let elements: Vec<String> = row
                    .witness
                    .a_elements()
                    .iter()
                    .map(u32::to_string)
                    .collect();
                let _ = writeln!(
                    ctx.out,
                    "n={} M={} M/n={} witness={:#x} a={{{}}}",
                    row.n,
                    row.value,
                    to_decimal(
                        &minoverlap::rational::ratio(row.value as i64, row.n as i64),
                        12
                    ),
                    row.witness.mask(),
                    elements.join(",")
                );
                rows.push(row);
            }
            Err(e) => {
                let status = ExitStatus::from(&e);
                return ctx.fail(e, status);
            }
        }
    }
    if let Some(path) = &args.csv {
        if let Err(e) = write_file(path, &discrete::to_csv(&rows)) {
            return ctx.fail(e, ExitStatus::BadInput);
        }
    }
    ExitStatus::Success
}

fn cmd_bounds(ctx: &mut Ctx<'_>) -> ExitStatus {
    for line in claims::bounds_lines() {
        let _ = writeln!(ctx.out, "{line}");
    }
    ExitStatus::Success
}
