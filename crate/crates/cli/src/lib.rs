//! Command-line front end for the `lseq-core` analyzers.

pub mod factor_cache;
pub mod pool;
pub mod report;
pub mod run;
pub mod spec;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use lseq_core::report::Witness;
use lseq_core::verify::{verify_witness, Reproduction};

use crate::factor_cache::FileFactorCache;
use crate::pool::PoolExecutor;
use crate::run::{parse_effort, resolve_checks, run, CliError, Command, RunConfig};
use crate::spec::parse_spec;

pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "lseq",
    version,
    about = "Check valuation-lifting properties of integer sequences"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Run the theorem checks.
    Analyze(RunArgs),
    /// Print the b-sequence table and its structure checks.
    Bseq(RunArgs),
    /// Print ranks of apparition for primes up to --max-p.
    Rank(RunArgs),
    /// Scan the open conjectures for counterexamples.
    Conjectures(RunArgs),
    /// Re-check one serialized witness against a sequence.
    VerifyWitness(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Sequence spec, e.g. power-diff:x=4,y=1 or lucas-u:P=1,Q=-1 or explicit:file=terms.txt
    #[arg(long)]
    pub seq: String,
    #[arg(long, default_value_t = 100)]
    pub max_n: u64,
    #[arg(long, default_value_t = 100)]
    pub max_p: u64,
    /// quick, default, thorough, or trial=..,rho=..,rounds=..,seed=..
    #[arg(long, default_value = "default")]
    pub effort: String,
    /// Comma-separated check names, or "all".
    #[arg(long, default_value = "all")]
    pub checks: String,
    /// Write the JSON report here; the summary then goes to stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Factorization cache file (JSON lines), read at start and rewritten at the end.
    #[arg(long)]
    pub cache: Option<PathBuf>,
    #[arg(long, default_value_t = false, action = clap::ArgAction::Set)]
    pub odd_primes_only: bool,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub seq: String,
    /// Witness JSON, or @path to read it from a file.
    #[arg(long)]
    pub witness: String,
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let (command, args) = match cli.command {
        Cmd::Analyze(a) => (Command::Analyze, a),
        Cmd::Bseq(a) => (Command::Bseq, a),
        Cmd::Rank(a) => (Command::Rank, a),
        Cmd::Conjectures(a) => (Command::Conjectures, a),
        Cmd::VerifyWitness(v) => return verify(&v, out),
    };
    let checks = if command == Command::Rank {
        Vec::new()
    } else {
        resolve_checks(command, &args.checks)?
    };
    let config = RunConfig {
        command,
        spec: parse_spec(&args.seq)?,
        max_n: args.max_n,
        max_p: args.max_p,
        effort: parse_effort(&args.effort)?,
        checks,
        odd_primes_only: args.odd_primes_only,
        report: args.report,
        cache: args.cache,
    };
    config.validate()?;

    let workers = args
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    let pool = PoolExecutor::new(workers).map_err(|e| CliError::Usage(e.to_string()))?;

    let fcache = FileFactorCache::new(config.effort.mr_rounds);
    if let Some(path) = &config.cache {
        if path.exists() {
            let (accepted, rejected) = fcache.load(path).map_err(|e| CliError::io(path, e))?;
            log::info!(
                "cache {}: {accepted} entries loaded, {rejected} rejected",
                path.display()
            );
        }
    }

    let report = run(&config, &pool, &fcache)?;

    if let Some(path) = &config.cache {
        fcache.save(path).map_err(|e| CliError::io(path, e))?;
    }
    let json = report.to_json();
    let summary = report.summary();
    match &config.report {
        Some(path) => {
            fs::write(path, json).map_err(|e| CliError::io(path, e))?;
            write_all(out, &summary)?;
        }
        None => {
            write_all(out, &json)?;
            write_all(err, &summary)?;
        }
    }
    Ok(report.outcome.exit_code)
}

fn write_all(w: &mut dyn Write, text: &str) -> Result<(), CliError> {
    w.write_all(text.as_bytes())
        .map_err(|e| CliError::io(Path::new("<output>"), e))
}

fn verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let spec = parse_spec(&args.seq)?;
    let text = match args.witness.strip_prefix('@') {
        Some(path) => {
            let path = Path::new(path);
            fs::read_to_string(path).map_err(|e| CliError::io(path, e))?
        }
        None => args.witness.clone(),
    };
    let witness: Witness = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("witness is not valid JSON: {e}")))?;
    let code = match verify_witness(&spec, &witness)? {
        Reproduction::Reproduced => {
            write_all(out, "reproduced\n")?;
            0
        }
        Reproduction::Mismatch(why) => {
            write_all(out, &format!("not reproduced: {why}\n"))?;
            1
        }
    };
    Ok(code)
}
