use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sit_core::experiments::{run, ExperimentConfig, ExperimentKind};
use sit_core::Error;

#[derive(Parser)]
#[command(name = "sit", version, about = "Sterile-insect reaction-diffusion experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML configuration; omitted keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output` in the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for batches and searches.
    #[arg(long, global = true, env = "SIT_WORKERS")]
    workers: Option<usize>,
    /// Print the effective configuration as TOML and exit.
    #[arg(long, global = true)]
    print_config: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Single run from step initial data under the configured release.
    Simulate,
    /// The four sweep scenarios with outcome classification.
    Figure1,
    /// Minimal wave speed against the measured front speed.
    Speed,
    /// Build and check every super- and sub-solution.
    Verify,
    /// Critical amplitude or sweep speed by bisection.
    Search {
        #[arg(long, value_enum)]
        target: Option<Target>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Amplitude,
    Speed,
}

fn load(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.kind = match cli.command {
        Command::Simulate => ExperimentKind::Simulate,
        Command::Figure1 => ExperimentKind::Figure1,
        Command::Speed => ExperimentKind::Speed,
        Command::Verify => ExperimentKind::VerifyConstructions,
        Command::Search { target: Some(Target::Amplitude) } => ExperimentKind::SearchAmplitude,
        Command::Search { target: Some(Target::Speed) } => ExperimentKind::SearchSpeed,
        Command::Search { target: None } => match cfg.kind {
            ExperimentKind::SearchSpeed => ExperimentKind::SearchSpeed,
            _ => ExperimentKind::SearchAmplitude,
        },
    };
    if let Some(out) = &cli.out {
        cfg.output = out.clone();
    }
    if cli.workers.is_some() {
        cfg.workers = cli.workers;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load(&cli).and_then(|cfg| {
        if cli.print_config {
            print!("{}", cfg.to_toml_string()?);
            return Ok(0);
        }
        let report = run(&cfg, &cfg.output)?;
        print!("{report}");
        Ok(report.exit_code())
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
