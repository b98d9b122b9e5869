//! `ymh`: run one workbench experiment and write its CSVs and manifest.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 I/O.

mod commands;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use ymh_core::io::{emit_config, read_config, RunConfig};
use ymh_core::Error;

#[derive(Parser)]
#[command(name = "ymh", version, about = "Epsilon-scaled SU(2) Yang-Mills-Higgs workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// `key = value` run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default `ymh-out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (falls back to YMH_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    /// Gradient descent from a snapshot or a generated start.
    Relax,
    /// Energies of the sweepout family over ball samples.
    Sweepout,
    /// Closed-form charge-one BPS monopole (λ = 0).
    Bps,
    /// Relax the reduced radial functional.
    Radial,
    /// Mass and charge in balls.
    Charge,
    /// Concentration points, hot spots and a rescaled bubble window.
    Bubbling,
    /// Relax random perturbations of the trivial pair.
    GapProbe,
    /// Run the invariant suite.
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Relax => "relax",
            Command::Sweepout => "sweepout",
            Command::Bps => "bps",
            Command::Radial => "radial",
            Command::Charge => "charge",
            Command::Bubbling => "bubbling",
            Command::GapProbe => "gap-probe",
            Command::Verify => "verify",
        }
    }
}

/// What a subcommand hands back for the manifest.
pub struct Outcome {
    /// The configuration with every default it used filled in.
    pub effective: RunConfig,
    pub files: Vec<String>,
    pub summary: String,
    /// Set when the run finished but the numerics failed.
    pub numerical_failure: Option<String>,
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Invalid(String),
    Numerical(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Core(e) => match e {
                Error::Io { .. } | Error::BadMagic | Error::TruncatedFile => 3,
                Error::HiggsVanishesOnSphere { .. } => 2,
                _ => 1,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Core(e) => e.to_string(),
            CliError::Invalid(m) | CliError::Numerical(m) => m.clone(),
        }
    }
}

fn thread_count(cli: Option<usize>, cfg: Option<usize>) -> Result<Option<usize>, CliError> {
    if let Some(t) = cli.or(cfg) {
        if t == 0 {
            return Err(CliError::Invalid("threads must be >= 1".into()));
        }
        return Ok(Some(t));
    }
    match std::env::var("YMH_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(Some(t)),
            _ => Err(CliError::Invalid(format!("YMH_THREADS: `{v}` is not a positive integer"))),
        },
        Err(_) => Ok(None),
    }
}

fn write_manifest(dir: &Path, command: Command, outcome: &Outcome, threads: usize, wall: f64) -> Result<(), CliError> {
    let mut text = format!(
        "# ymh {} {}\n# ymh-core {}\n# threads {}\n# wall_time_s {:.3}\n# outputs {}\n",
        env!("CARGO_PKG_VERSION"),
        command.name(),
        ymh_core::VERSION,
        threads,
        wall,
        outcome.files.join(" ")
    );
    text.push_str(&emit_config(&outcome.effective));
    let path = dir.join("manifest.txt");
    std::fs::write(&path, text).map_err(|e| CliError::Core(Error::Io { path: path.clone(), source: e }))
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let mut rc = match &cli.config {
        Some(p) => read_config(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        rc.seed = Some(s);
    }
    if let Some(o) = &cli.out {
        rc.out = Some(o.display().to_string());
    }
    let threads = thread_count(cli.threads, rc.threads)?;
    if let Some(t) = threads {
        rc.threads = Some(t);
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let out = PathBuf::from(rc.out.clone().unwrap_or_else(|| "ymh-out".into()));
    std::fs::create_dir_all(&out)
        .map_err(|e| CliError::Core(Error::Io { path: out.clone(), source: e }))?;
    let outcome = commands::dispatch(cli.command, rc, &out)?;
    write_manifest(&out, cli.command, &outcome, rayon::current_num_threads(), start.elapsed().as_secs_f64())?;
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let command = cli.command;
    match run(cli) {
        Ok(o) => {
            println!("{}", o.summary);
            match o.numerical_failure {
                Some(m) => {
                    eprintln!("ymh {}: numerical failure: {m}", command.name());
                    ExitCode::from(2)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("ymh {}: error: {}", command.name(), e.message());
            ExitCode::from(e.code())
        }
    }
}
