use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mdshadow::experiment::{run_experiment, validate_config_with, ExperimentId, Overrides, Preset};
use mdshadow::Error;

#[derive(Parser)]
#[command(name = "mdshadow", version, about = "Run molecular-dynamics sampling experiments")]
struct Cli {
    #[command(subcommand)]
    experiment: Command,

    /// Key-value config file; keys not given keep the preset defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    preset: Option<PresetArg>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Sample trajectories of one particle.
    Exp1,
    /// One initial condition integrated with each step size.
    Exp2,
    /// Functional histograms from equilibrium initial conditions.
    Exp3,
    /// Functional histograms after a velocity kick.
    Exp4,
    /// Shadow coupling of a two-particle system.
    Exp5,
}

#[derive(ValueEnum, Clone, Copy)]
enum PresetArg {
    Desk,
    Paper,
}

fn run(cli: Cli) -> Result<(), Error> {
    let raw = match &cli.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Error::ConfigConstraint(format!("cannot read {}: {e}", path.display())))?,
        None => String::new(),
    };
    let overrides = Overrides {
        experiment: Some(match cli.experiment {
            Command::Exp1 => ExperimentId::Exp1,
            Command::Exp2 => ExperimentId::Exp2,
            Command::Exp3 => ExperimentId::Exp3,
            Command::Exp4 => ExperimentId::Exp4,
            Command::Exp5 => ExperimentId::Exp5,
        }),
        preset: cli.preset.map(|p| match p {
            PresetArg::Desk => Preset::Desk,
            PresetArg::Paper => Preset::Paper,
        }),
        seed: cli.seed,
        out_dir: cli.out,
    };
    let cfg = validate_config_with(&raw, &overrides)?;
    let out = run_experiment(&cfg)?;
    for entry in &out.manifest {
        println!("{}  {}", entry.sha256, cfg.out_dir.join(&entry.file).display());
    }
    if let Some(record) = &out.shadow {
        eprintln!(
            "alpha = {}, epsilon = {}, exceedance({}) = {}, pass = {}",
            record.alpha, record.epsilon, record.beta, record.exceedance, record.pass
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
