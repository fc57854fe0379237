//! Command-line driver.
//!
//! Exit status: 0 on success (verdict PASS), 1 when a mathematical check
//! fails, 2 on usage or input errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::charge::{build_ledger_with, verify_properties_with, ChargeModel, LedgerJson, LedgerOptions, DEFAULT_WORK_LIMIT};
use crate::error::Error;
use crate::hypercube::{count_downsets, default_jobs};
use crate::lattice::{Partition, PartitionJson};
use crate::lemma::verify_lemma;
use crate::oracle::rational_oracle_ledger;
use crate::projection::{generic_weights, WeightsJson};
use crate::sampler::{run_mc_experiment, McParams, SampleMethod};

pub const WORK_LIMIT_ENV: &str = "CHARGE_LATTICE_WORK_LIMIT";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "charge-lattice", version, about = "Charge functions of n-dimensional partitions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelChoice {
    /// Per-dimension formula.
    Auto,
    /// General even-dimensional formula (n even, n >= 4).
    EvenGeneral,
    /// General odd-dimensional formula (n odd, n >= 3).
    OddGeneral,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the melting rule for a partition file.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
    /// Write the pole ledger of psi(u).
    Charge {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "auto")]
        model: ModelChoice,
    },
    /// Check simple poles and the pole/addable-removable correspondence.
    VerifyProperties {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the lattice ledger with the rational-root expansion.
    OracleCheck {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Number of consecutive weight seeds to try.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        /// Dump the weights of the first seed.
        #[arg(long)]
        weights_out: Option<PathBuf>,
    },
    /// Count the down-sets of HC^(d).
    CountDownsets {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Exhaustively check the pole order at the top of HC^(d).
    VerifyLemma {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Write offending masks (one hex mask per line).
        #[arg(long)]
        dump_violations: Option<PathBuf>,
    },
    /// Monte Carlo check of the pole-order bound.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long = "per-n", default_value_t = 512)]
        per_n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "sequential")]
        method: SampleMethod,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

/// Failure while running a command: either bad input or I/O.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Usage(String),
}

/// Whether the mathematical check passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }
}

/// Parses arguments, runs the command and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let stdout = io::stdout();
    let stderr = io::stderr();
    match run(&cli.command, &mut stdout.lock(), &mut stderr.lock()) {
        Ok(Verdict::Pass) => EXIT_OK,
        Ok(Verdict::Fail) => EXIT_VIOLATION,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn read_partition(path: &Path) -> Result<Partition, CliError> {
    let file = File::open(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    let json: PartitionJson =
        serde_json::from_reader(io::BufReader::new(file)).map_err(|source| CliError::Json {
            path: path.to_owned(),
            source,
        })?;
    Ok(json.into_partition()?)
}

fn work_limit() -> Result<u64, CliError> {
    match std::env::var(WORK_LIMIT_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{WORK_LIMIT_ENV}={v:?} is not an integer"))),
        Err(_) => Ok(DEFAULT_WORK_LIMIT),
    }
}

/// Runs `f` against the output file, or `stdout` when no path is given.
fn with_output<F>(path: Option<&Path>, stdout: &mut dyn Write, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    let io_err = |source| CliError::Io {
        path: path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_owned),
        source,
    };
    match path {
        Some(p) => {
            let file = File::create(p).map_err(io_err)?;
            let mut w = BufWriter::new(file);
            f(&mut w).and_then(|_| w.flush()).map_err(io_err)
        }
        None => f(stdout).map_err(io_err),
    }
}

fn write_json<T: serde::Serialize>(value: &T) -> impl FnOnce(&mut dyn Write) -> io::Result<()> + '_ {
    move |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)
    }
}

fn ledger_options(model: ModelChoice, n: usize) -> Result<LedgerOptions, CliError> {
    let model = match model {
        ModelChoice::Auto => None,
        ModelChoice::EvenGeneral => Some(ChargeModel::even_general(n)?),
        ModelChoice::OddGeneral => Some(ChargeModel::odd_general(n)?),
    };
    Ok(LedgerOptions {
        model,
        work_limit: work_limit()?,
    })
}

/// Executes one command, writing primary output to `out` unless a path is
/// given, and diagnostics to `err`.
pub fn run(command: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<Verdict, CliError> {
    let diag = |err: &mut dyn Write, msg: String| {
        let _ = writeln!(err, "{msg}");
    };
    match command {
        Command::Validate { input } => {
            let file = File::open(input).map_err(|source| CliError::Io {
                path: input.clone(),
                source,
            })?;
            let json: PartitionJson = serde_json::from_reader(io::BufReader::new(file))
                .map_err(|source| CliError::Json {
                    path: input.clone(),
                    source,
                })?;
            match json.into_partition() {
                Ok(p) => {
                    with_output(None, out, |w| {
                        writeln!(w, "valid: n = {}, {} boxes", p.dimension(), p.len())
                    })?;
                    Ok(Verdict::Pass)
                }
                Err(Error::MeltingRule(violations)) => {
                    with_output(None, out, |w| {
                        writeln!(w, "invalid: {} melting-rule violation(s)", violations.len())?;
                        for v in &violations {
                            writeln!(w, "  box {:?} lacks its predecessor along axis {}", v.site, v.axis + 1)?;
                        }
                        Ok(())
                    })?;
                    Ok(Verdict::Fail)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Charge { input, out: path, model } => {
            let p = read_partition(input)?;
            let ledger = build_ledger_with(&p, &ledger_options(*model, p.dimension())?)?;
            with_output(path.as_deref(), out, write_json(&LedgerJson::from(&ledger)))?;
            Ok(Verdict::Pass)
        }
        Command::VerifyProperties { input, out: path } => {
            let p = read_partition(input)?;
            let report = verify_properties_with(&p, &ledger_options(ModelChoice::Auto, p.dimension())?)?;
            with_output(path.as_deref(), out, write_json(&report))?;
            if !report.holds() {
                diag(err, format!("property check failed at {} point(s)", report.mismatches.len()));
            }
            Ok(Verdict::from_bool(report.holds()))
        }
        Command::OracleCheck {
            input,
            seed,
            seeds,
            weights_out,
        } => {
            let p = read_partition(input)?;
            let ledger = build_ledger_with(&p, &ledger_options(ModelChoice::Auto, p.dimension())?)?;
            let mut ok = true;
            for s in *seed..seed.saturating_add((*seeds).max(1)) {
                let w = generic_weights(p.dimension(), s)?;
                if s == *seed {
                    if let Some(path) = weights_out {
                        with_output(Some(path), out, write_json(&WeightsJson::from(&w)))?;
                    }
                }
                let oracle = rational_oracle_ledger(&p, &w)?;
                let same = oracle == ledger;
                ok &= same;
                with_output(None, out, |w| {
                    writeln!(w, "seed {s}: {}", if same { "match" } else { "MISMATCH" })
                })?;
            }
            Ok(Verdict::from_bool(ok))
        }
        Command::CountDownsets { d, jobs } => {
            let count = count_downsets(*d, jobs.unwrap_or_else(default_jobs))?;
            with_output(None, out, |w| writeln!(w, "{count}"))?;
            Ok(Verdict::Pass)
        }
        Command::VerifyLemma {
            n,
            d,
            jobs,
            out: path,
            format,
            dump_violations,
        } => {
            let report = verify_lemma(*n, *d, jobs.unwrap_or_else(default_jobs))?;
            match format {
                Format::Csv => with_output(path.as_deref(), out, |w| report.write_csv(w))?,
                Format::Json => with_output(path.as_deref(), out, write_json(&LemmaSummary::from(&report)))?,
            }
            if let Some(dump) = dump_violations {
                with_output(Some(dump), out, |w| {
                    report
                        .violations
                        .iter()
                        .try_for_each(|v| writeln!(w, "{:#018x},{},{}", v.mask, v.boxes, v.omega))
                })?;
            }
            diag(
                err,
                format!(
                    "n = {n}, d = {d}: {} configurations, {} G-members, {} violations",
                    report.total_configs,
                    report.members,
                    report.violations.len()
                ),
            );
            Ok(Verdict::from_bool(report.holds()))
        }
        Command::Sample {
            n,
            d,
            per_n,
            seed,
            method,
            jobs,
            out: path,
            format,
        } => {
            let params = McParams {
                n: *n,
                d: *d,
                samples_per_n: *per_n,
                seed: *seed,
                method: *method,
                jobs: jobs.unwrap_or_else(default_jobs),
            };
            let report = run_mc_experiment(&params)?;
            match format {
                Format::Csv => with_output(path.as_deref(), out, |w| report.write_csv(w))?,
                Format::Json => with_output(path.as_deref(), out, write_json(&McSummary::from(&report)))?,
            }
            diag(
                err,
                format!(
                    "{} samples ({}), max omega = {}, {} above bound, {} boundary failures: {}",
                    report.samples,
                    report.method,
                    report.max_omega,
                    report.above_bound,
                    report.boundary_failures,
                    if report.passed() { "PASS" } else { "FAIL" }
                ),
            );
            Ok(Verdict::from_bool(report.passed()))
        }
    }
}

#[derive(serde::Serialize)]
struct HistogramRow {
    #[serde(rename = "N")]
    boxes: usize,
    omega: i32,
    count: u64,
}

fn rows(h: &std::collections::BTreeMap<(usize, i32), u64>) -> Vec<HistogramRow> {
    h.iter()
        .map(|(&(boxes, omega), &count)| HistogramRow { boxes, omega, count })
        .collect()
}

#[derive(serde::Serialize)]
struct LemmaSummary {
    n: usize,
    d: usize,
    total_configs: u64,
    members: u64,
    violations: Vec<crate::lemma::LemmaViolation>,
    characterization_mismatches: u64,
    rows: Vec<HistogramRow>,
}

impl From<&crate::lemma::LemmaReport> for LemmaSummary {
    fn from(r: &crate::lemma::LemmaReport) -> Self {
        Self {
            n: r.n,
            d: r.d,
            total_configs: r.total_configs,
            members: r.members,
            violations: r.violations.clone(),
            characterization_mismatches: r.characterization_mismatches,
            rows: rows(&r.histogram),
        }
    }
}

#[derive(serde::Serialize)]
struct McSummary {
    n: usize,
    d: usize,
    method: SampleMethod,
    samples: u64,
    max_omega: i32,
    above_bound: u64,
    boundary_failures: u64,
    verdict: &'static str,
    rows: Vec<HistogramRow>,
}

impl From<&crate::sampler::McReport> for McSummary {
    fn from(r: &crate::sampler::McReport) -> Self {
        Self {
            n: r.n,
            d: r.d,
            method: r.method,
            samples: r.samples,
            max_omega: r.max_omega,
            above_bound: r.above_bound,
            boundary_failures: r.boundary_failures,
            verdict: if r.passed() { "PASS" } else { "FAIL" },
            rows: rows(&r.histogram),
        }
    }
}
