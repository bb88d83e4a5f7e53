//! `relqm`: run a scenario from a config file, or run the property checks.
//!
//! Exit status: 0 on success, 1 on a scenario or check failure, 2 on a
//! configuration error.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use relqm::config::{load_config, RunConfig, ScenarioId};
use relqm::scenarios;

#[derive(Parser)]
#[command(name = "relqm", version, about = "Relativistic wave-function scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hemispherical screen around a point source.
    EinsteinScreen(RunArgs),
    /// Decay watched by two detectors at right angles.
    #[command(name = "decay-90")]
    Decay90(RunArgs),
    /// Singlet correlations with frame-dependent measurement order.
    EprBoosted(RunArgs),
    /// Boosted wave packet and its reduction seen from a moving frame.
    PacketBoostDemo(RunArgs),
    /// Run a config file with the scenario it names.
    Run(RunArgs),
    /// Run the built-in property checks.
    Verify,
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the number of trials.
    #[arg(long)]
    trials: Option<usize>,
}

fn build_config(args: &RunArgs, scenario: Option<ScenarioId>) -> Result<RunConfig, relqm::config::ConfigError> {
    let mut config = match (&args.config, scenario) {
        (Some(path), _) => load_config(path)?,
        (None, Some(s)) => RunConfig { scenario: s, ..RunConfig::default() },
        (None, None) => return Err(relqm::config::ConfigError::Parse("`run` needs --config".into())),
    };
    if let Some(s) = scenario {
        config.scenario = s;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = &args.out {
        config.output_dir = out.to_string_lossy().into_owned();
    }
    if let Some(n) = args.trials {
        config.n_trials = n;
    }
    config.validate()?;
    Ok(config)
}

fn run_scenario(args: &RunArgs, scenario: Option<ScenarioId>) -> ExitCode {
    let config = match build_config(args, scenario) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match scenarios::run(&config) {
        Ok(outcome) => {
            println!(
                "{} finished in {:.2} s, {} files in {}",
                config.scenario.as_str(),
                outcome.manifest.wall_time_seconds,
                outcome.manifest.files.len() + 1,
                outcome.output_dir.display()
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::EinsteinScreen(a) => run_scenario(a, Some(ScenarioId::EinsteinScreen)),
        Command::Decay90(a) => run_scenario(a, Some(ScenarioId::Decay90)),
        Command::EprBoosted(a) => run_scenario(a, Some(ScenarioId::EprBoosted)),
        Command::PacketBoostDemo(a) => run_scenario(a, Some(ScenarioId::PacketBoostDemo)),
        Command::Run(a) => run_scenario(a, None),
        Command::Verify => {
            let checks = relqm::verify::run_all();
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if checks.iter().all(|c| c.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
