use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fdelab_cli::scenario::{ExperimentKind, Scenario};
use fdelab_cli::{exit_code_for, run_scenario};
use fdelab_core::error::Error;

/// Numerical experiments for fast diffusion on rotationally symmetric
/// manifolds. Each subcommand runs one scenario kind from a JSON config
/// and writes artifacts plus a checksum manifest.
#[derive(Parser)]
#[command(name = "fdelab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario configuration file (JSON; schema in docs/scenario.schema.json).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the config's output_dir.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print progress to stderr.
    #[arg(long)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Classify stochastic completeness from the tail of H'.
    Classify(RunArgs),
    /// Materialize a blow-up barrier and verify the supersolution property.
    Barrier(RunArgs),
    /// Nonexistence decay sweep for the semilinear equation.
    Elliptic(RunArgs),
    /// One implicit fast-diffusion solve.
    Fde(RunArgs),
    /// Minimal-solution ladder run.
    Minimal(RunArgs),
    /// Smoothing-estimate checks on an ordered solution pair.
    HpCheck(RunArgs),
    /// Uniqueness probe on two ladder limits of the same datum.
    Probe(RunArgs),
    /// Complete-vs-incomplete nonuniqueness contrast.
    Demo(RunArgs),
}

impl Command {
    fn expected_experiment(&self) -> ExperimentKind {
        match self {
            Command::Classify(_) => ExperimentKind::Classify,
            Command::Barrier(_) => ExperimentKind::Barrier,
            Command::Elliptic(_) => ExperimentKind::EllipticNonexistence,
            Command::Fde(_) => ExperimentKind::Fde,
            Command::Minimal(_) => ExperimentKind::Minimal,
            Command::HpCheck(_) => ExperimentKind::HpCheck,
            Command::Probe(_) => ExperimentKind::UniquenessProbe,
            Command::Demo(_) => ExperimentKind::DemoNonuniqueness,
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Classify(a)
            | Command::Barrier(a)
            | Command::Elliptic(a)
            | Command::Fde(a)
            | Command::Minimal(a)
            | Command::HpCheck(a)
            | Command::Probe(a)
            | Command::Demo(a) => a,
        }
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    let args = cli.command.args();
    let text = std::fs::read_to_string(&args.config)?;
    let scenario = Scenario::from_json(&text)?;

    let expected = cli.command.expected_experiment();
    if scenario.experiment != expected {
        return Err(Error::invalid(
            "experiment",
            format!(
                "config declares '{}' but the subcommand runs '{expected}'",
                scenario.experiment
            ),
        ));
    }

    let out_dir = args
        .out
        .clone()
        .or_else(|| scenario.output_dir.clone())
        .ok_or_else(|| {
            Error::invalid("output_dir", "set output_dir in the config or pass --out")
        })?;

    if args.verbose {
        eprintln!(
            "running scenario '{}' ({expected}) -> {}",
            scenario.name,
            out_dir.display()
        );
    }
    let manifest = run_scenario(&scenario, &out_dir)?;
    if args.verbose {
        for entry in &manifest.files {
            eprintln!("  wrote {} ({} bytes)", entry.path, entry.bytes);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
