//! Command-line grammar and dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use chaindist::bench::run_simulation;
use chaindist::mixing::MIXING_CAP;
use chaindist::{
    bhattacharyya_rate, ergodic_distance, mixing_bounds, mixing_time_exact, sequence_distance,
    MatrixMetricKind, SquareMatrix,
};
use clap::{Parser, Subcommand};

use crate::config::read_config;
use crate::document::read_chain;
use crate::error::{CliError, Result};
use crate::report::{diagnostics_csv, number, results_csv, write_samples};

/// Environment variable overriding the worker count of `simulate`.
pub const THREADS_ENV: &str = "CHAINDIST_THREADS";

#[derive(Debug, Parser)]
#[command(name = "chaindist", version, about = "Distances, rates and mixing times for Markov chains")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that a chain document is well formed and valid
    Validate { file: PathBuf },
    /// Distances between two chains or matrices
    #[command(subcommand)]
    Dist(Dist),
    /// Mixing times of a reversible ergodic chain
    #[command(subcommand)]
    Mix(Mix),
    /// Run the clustering benchmark and write per-step mean ARI
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Master seed; overrides the config's seed
        #[arg(long)]
        seed: Option<u64>,
        /// Also write every sampled Dirichlet row to this CSV file
        #[arg(long)]
        emit_samples: Option<PathBuf>,
        /// Also write the trace-form diagnostic next to the mean ARI
        #[arg(long)]
        diagnostics: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum Dist {
    /// Bhattacharyya angle between the length-n word distributions
    Seq {
        #[arg(long)]
        n: usize,
        a: PathBuf,
        b: PathBuf,
    },
    /// Limit of the sequence distance as n grows
    Rate { a: PathBuf, b: PathBuf },
    /// Distance between transition matrices
    Matrix {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value = "smd")]
        metric: MatrixMetricKind,
    },
    /// Angle between stationary distributions
    Ergodic { a: PathBuf, b: PathBuf },
}

#[derive(Debug, Subcommand)]
enum Mix {
    /// First time the distribution from a start state is within epsilon of stationarity
    Exact {
        #[arg(long)]
        epsilon: f64,
        /// Start state, by index or by state name
        #[arg(long)]
        start: String,
        a: PathBuf,
    },
    /// Spectral lower and upper bounds on the mixing time
    Bounds {
        #[arg(long)]
        epsilon: f64,
        a: PathBuf,
    },
}

fn name(path: &Path) -> String {
    path.display().to_string()
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", name(path))))
}

fn with_source(path: &Path, e: chaindist::Error) -> CliError {
    match CliError::from(e) {
        CliError::Validation { message, .. } => CliError::Validation {
            source_name: name(path),
            message,
        },
        other => other,
    }
}

fn start_index(start: &str, labels: Option<&[String]>, n: usize) -> Result<usize> {
    let index = start
        .parse::<usize>()
        .ok()
        .or_else(|| labels.and_then(|l| l.iter().position(|s| s == start)));
    match index {
        Some(i) if i < n => Ok(i),
        _ => Err(CliError::Usage(format!("unknown start state '{start}'"))),
    }
}

fn positive_epsilon(epsilon: f64) -> Result<f64> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(epsilon)
    } else {
        Err(CliError::Usage(format!("epsilon must be positive, got {epsilon}")))
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    let mut emit = |line: String| -> Result<()> {
        writeln!(out, "{line}").map_err(|e| CliError::Io(e.to_string()))
    };
    match command {
        Command::Validate { file } => {
            let parsed = read_chain(&file)?;
            let kind = if parsed.initial.is_some() { "chain" } else { "matrix" };
            emit(format!("ok: {kind} with {} states", parsed.matrix.dim()))
        }
        Command::Dist(Dist::Seq { n, a, b }) => {
            let ca = read_chain(&a)?.chain(&name(&a))?;
            let cb = read_chain(&b)?.chain(&name(&b))?;
            if n == 0 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            let d = sequence_distance(&ca, &cb, n).map_err(|e| with_source(&a, e))?;
            emit(number(d))
        }
        Command::Dist(Dist::Rate { a, b }) => {
            let ca = read_chain(&a)?.chain(&name(&a))?;
            let cb = read_chain(&b)?.chain(&name(&b))?;
            let rate = bhattacharyya_rate(&ca, &cb).map_err(|e| with_source(&a, e))?;
            emit(number(rate.value))
        }
        Command::Dist(Dist::Matrix { a, b, metric }) => {
            let pa = read_chain(&a)?;
            let pb = read_chain(&b)?;
            let d = metric.distance(&pa.matrix, &pb.matrix).map_err(|e| with_source(&a, e))?;
            emit(number(d))
        }
        Command::Dist(Dist::Ergodic { a, b }) => {
            let pa = read_chain(&a)?;
            let pb = read_chain(&b)?;
            let d = ergodic_distance(&pa.matrix, &pb.matrix).map_err(|e| with_source(&a, e))?;
            emit(number(d))
        }
        Command::Mix(Mix::Exact { epsilon, start, a }) => {
            let epsilon = positive_epsilon(epsilon)?;
            let p = read_chain(&a)?;
            let j = start_index(&start, p.matrix.labels(), p.matrix.dim())?;
            let tau = mixing_time_exact(&p.matrix, j, epsilon, MIXING_CAP).map_err(|e| with_source(&a, e))?;
            emit(tau.to_string())
        }
        Command::Mix(Mix::Bounds { epsilon, a }) => {
            let epsilon = positive_epsilon(epsilon)?;
            let p = read_chain(&a)?;
            let b = mixing_bounds(&p.matrix, epsilon).map_err(|e| with_source(&a, e))?;
            emit(format!("lambda_max={}", number(b.lambda_max)))?;
            emit(format!("pi_min={}", number(b.pi_min)))?;
            emit(format!("tau_minus={}", b.tau_minus))?;
            emit(format!("tau_plus={}", b.tau_plus))
        }
        Command::Simulate {
            config,
            out: out_path,
            seed,
            emit_samples,
            diagnostics,
        } => {
            let cfg = read_config(&config)?.resolve(seed, &name(&config))?;
            let result = in_pool(|| run_simulation(&cfg))?.map_err(CliError::from)?;
            write_file(&out_path, &results_csv(&result))?;
            if let Some(path) = diagnostics {
                write_file(&path, &diagnostics_csv(&result))?;
            }
            if let Some(path) = emit_samples {
                let file = std::fs::File::create(&path)
                    .map_err(|e| CliError::Io(format!("{}: {e}", name(&path))))?;
                write_samples(&cfg, file)?;
            }
            Ok(())
        }
    }
}

/// Runs `f` on a pool sized by [`THREADS_ENV`] when set, else on the global pool.
fn in_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let threads: usize = v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(pool.install(f))
        }
        Err(_) => Ok(f()),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    // clap's own rendering already starts with "error:"
                    let _ = write!(err, "{e}");
                    4
                }
            };
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
