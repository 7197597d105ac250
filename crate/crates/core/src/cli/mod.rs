//! Command-line front end: flat `key = value` configs, verification suites
//! and JSON/CSV reports.
//!
//! Exit codes: `0` when every check passes, `1` when any check fails or is
//! stuck (or a run aborts), `2` for configuration errors.

pub mod algebra_suite;
pub mod config;
pub mod kernel_suite;
pub mod reconstruct_suite;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::error::{Error, Result};
use config::{RawConfig, Reader};
use report::{write_table, CheckRecord, VerificationReport};

/// A unit of verification work producing one or more records.
pub type Job = Box<dyn Fn() -> Vec<CheckRecord> + Send + Sync>;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "drstokes", version, about = "Verify Stokes-type operator identities, kernels and the homotopy formula")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Symbolic checks of the block identities.
    VerifyAlgebra(RunArgs),
    /// Grid refinement suites for the potentials and the Stokes inverses.
    VerifyKernels(RunArgs),
    /// Boundary reconstruction of closed-form solutions.
    Reconstruct(RunArgs),
    /// Merge several JSON reports into one.
    ReportMerge {
        /// Reports to merge.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Flat key = value config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override one config entry (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run independent checks in parallel.
    #[arg(long)]
    pub parallel: bool,
}

fn load_config(args: &RunArgs) -> Result<RawConfig> {
    let mut raw = match &args.config {
        Some(path) => RawConfig::load(path)?,
        None => RawConfig::default(),
    };
    for pair in &args.set {
        raw.set_pair(pair)?;
    }
    Ok(raw)
}

fn run_jobs(jobs: Vec<Job>, parallel: bool) -> Vec<CheckRecord> {
    if parallel {
        jobs.par_iter().flat_map_iter(|j| j()).collect()
    } else {
        jobs.iter().flat_map(|j| j()).collect()
    }
}

fn emit(report: &VerificationReport, out: Option<&Path>) -> Result<()> {
    let text = report.to_json()?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

/// Resolves configuration, then runs; configuration problems surface as
/// [`Error::Config`] before any computation starts.
pub fn execute(cmd: &Command) -> Result<VerificationReport> {
    match cmd {
        Command::VerifyAlgebra(args) => {
            let raw = load_config(args)?;
            let reader = Reader::new(&raw);
            let cfg = algebra_suite::AlgebraConfig::from_reader(&reader)?;
            let echo = reader.finish()?;
            let checks = run_jobs(algebra_suite::jobs(&cfg), args.parallel);
            let report = VerificationReport::new("verify-algebra", echo, checks);
            emit(&report, args.out.as_deref())?;
            Ok(report)
        }
        Command::VerifyKernels(args) => {
            let raw = load_config(args)?;
            let reader = Reader::new(&raw);
            let cfg = kernel_suite::KernelConfig::from_reader(&reader)?;
            let echo = reader.finish()?;
            let checks = run_jobs(kernel_suite::jobs(&cfg), args.parallel);
            let report = VerificationReport::new("verify-kernels", echo, checks);
            emit(&report, args.out.as_deref())?;
            Ok(report)
        }
        Command::Reconstruct(args) => {
            let raw = load_config(args)?;
            let reader = Reader::new(&raw);
            let cfg = reconstruct_suite::ReconstructConfig::from_reader(&reader)?;
            let table: Option<PathBuf> = reader
                .optional::<String>("output.table")?
                .map(PathBuf::from)
                .or_else(|| args.out.as_ref().map(|p| p.with_extension("csv")));
            let echo = reader.finish()?;
            let (checks, rows) = reconstruct_suite::run(&cfg, args.parallel);
            if let Some(path) = &table {
                write_table(path, &rows)?;
            }
            let report = VerificationReport::new("reconstruct", echo, checks);
            emit(&report, args.out.as_deref())?;
            Ok(report)
        }
        Command::ReportMerge { inputs, out } => {
            let reports = inputs.iter().map(|p| VerificationReport::load(p)).collect::<Result<Vec<_>>>()?;
            let report = VerificationReport::merge(&reports);
            emit(&report, out.as_deref())?;
            Ok(report)
        }
    }
}

/// Caps the worker pool at `DRSTOKES_THREADS` when set.
fn configure_threads() -> Result<()> {
    if let Ok(text) = std::env::var("DRSTOKES_THREADS") {
        let threads: usize = text
            .trim()
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| Error::Config(format!("DRSTOKES_THREADS must be a positive integer, got '{text}'")))?;
        // A pool that already exists (repeated calls in one process) keeps its size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }
    match execute(&cli.command) {
        Ok(report) if report.passed() => EXIT_PASS,
        Ok(report) => {
            eprintln!("{} failed: first failing check '{}'", report.command, report.first_failure.unwrap_or_default());
            EXIT_FAIL
        }
        Err(e @ (Error::Config(_) | Error::Unsupported(_))) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAIL
        }
    }
}
