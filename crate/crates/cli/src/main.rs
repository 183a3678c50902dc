mod commands;
mod report;

use std::io::{self, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use psflab_core::PsfError;
use rayon::prelude::*;

use crate::commands::Job;
use crate::report::RunReport;

const EXIT_PASS: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_FAIL: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

/// Certified checks of Poisson-type lattice summation identities.
///
/// List-valued flags take comma-separated values; every combination is run
/// and reported in input order.
#[derive(Parser, Debug)]
#[command(name = "psflab", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON-lines output (the default).
    #[arg(long, global = true, conflicts_with = "format")]
    pub json: bool,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Target absolute tolerance for each truncated side.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol: f64,

    /// Largest sup-norm shell either side may reach.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub max_shell: u64,

    /// Seed for sample-grid offsets (lp-report); 0 keeps the grid unshifted.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Suppress the summary on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,

    /// Record per-configuration wall time (makes output run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,

    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, env = "PSFLAB_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// sum e^{-t|k|^2} = (pi/t)^{n/2} sum e^{-pi^2 |k|^2 / t}
    Theta(commands::ThetaArgs),
    /// Gauss-Weierstrass identity at a point x.
    Heat(commands::PointArgs),
    /// Cauchy-Poisson identity at a point x.
    Poisson(commands::PointArgs),
    /// 2 sum_{k>=0} 1/(1+k^2) = pi coth(pi) + 1.
    Corollary35,
    /// Bessel-potential lift identity, pointwise or weakly paired.
    Bessel(commands::BesselArgs),
    /// Classical summation formula for Gaussian test functions.
    Psf(commands::TestFnPointArgs),
    /// Fourier-operator identity for a Gaussian symbol.
    Symbol(commands::TestFnPointArgs),
    /// sum e^{i 2 pi k x} = sum delta_k paired with test functions.
    Weak(commands::TestFnArgs),
    /// Littlewood-Paley pieces of the exponential comb.
    LpReport(commands::LpArgs),
    /// Warped comb for psi(x) = slope x + amp sin x with multiplier g.
    Diffeo(commands::DiffeoArgs),
    /// Warped comb for an affine map x -> A x + b.
    Affine(commands::AffineArgs),
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl From<PsfError> for Failure {
    fn from(e: PsfError) -> Self {
        match e {
            PsfError::InvalidParameter(_) | PsfError::DimensionMismatch { .. } | PsfError::Mode(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Internal(e.to_string()),
        }
    }
}

fn run_jobs(jobs: Vec<Job>, common: &Common) -> Result<Vec<RunReport>, Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = common.threads {
        if t == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| Failure::Internal(format!("thread pool: {e}")))?;
    let timing = common.timing;
    let results: Vec<Result<Vec<RunReport>, PsfError>> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let start = Instant::now();
                let mut reports = job()?;
                if timing {
                    let ms = start.elapsed().as_secs_f64() * 1e3;
                    for r in &mut reports {
                        r.wall_time_ms = Some(ms);
                    }
                }
                Ok(reports)
            })
            .collect()
    });
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

fn execute(cli: Cli) -> Result<Vec<RunReport>, Failure> {
    let common = &cli.common;
    if !(common.tol > 0.0 && common.tol.is_finite()) {
        return Err(Failure::Usage(format!("--tol must be positive, got {}", common.tol)));
    }
    let jobs = commands::build_jobs(&cli.command, common)?;
    run_jobs(jobs, common)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_PASS,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let format = if cli.common.json { Format::Json } else { cli.common.format };
    let quiet = cli.common.quiet;
    let reports = match execute(cli) {
        Ok(r) => r,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            return ExitCode::from(EXIT_INTERNAL);
        }
    };
    let stdout = io::stdout().lock();
    let written = match format {
        Format::Json => report::write_json(stdout, &reports),
        Format::Csv => report::write_csv(stdout, &reports),
    };
    if let Err(e) = written {
        if e.kind() != io::ErrorKind::BrokenPipe {
            eprintln!("internal error: writing output: {e}");
            return ExitCode::from(EXIT_INTERNAL);
        }
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    if !quiet {
        let _ = writeln!(io::stderr(), "{} configurations, {} passed, {} failed", reports.len(), reports.len() - failed, failed);
    }
    ExitCode::from(if failed == 0 { EXIT_PASS } else { EXIT_FAIL })
}
