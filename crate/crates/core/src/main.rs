use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use timeavg::cli::{self, Command, ExperimentConfig, Overrides};
use timeavg::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Subcommand {
    Forward,
    Average,
    Recover,
    Roundtrip,
    Conditioning,
    OracleCheck,
    Sweep,
}

impl From<Subcommand> for Command {
    fn from(s: Subcommand) -> Self {
        match s {
            Subcommand::Forward => Command::Forward,
            Subcommand::Average => Command::Average,
            Subcommand::Recover => Command::Recover,
            Subcommand::Roundtrip => Command::Roundtrip,
            Subcommand::Conditioning => Command::Conditioning,
            Subcommand::OracleCheck => Command::OracleCheck,
            Subcommand::Sweep => Command::Sweep,
        }
    }
}

/// Recover Schrödinger trajectories from weighted time-averages.
#[derive(Debug, Parser)]
#[command(name = "timeavg", version)]
struct Args {
    #[arg(value_enum)]
    command: Subcommand,
    /// Experiment config (JSON); defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for CSV/JSON artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Real part of the rate r.
    #[arg(long = "r-re", allow_negative_numbers = true)]
    r_re: Option<f64>,
    /// Imaginary part of the rate r.
    #[arg(long = "r-im", allow_negative_numbers = true)]
    r_im: Option<f64>,
    /// Averaging horizon T.
    #[arg(long = "T")]
    horizon: Option<f64>,
    /// Number of modes.
    #[arg(long = "N")]
    mode_count: Option<usize>,
    /// Seed for random data and noise.
    #[arg(long)]
    seed: Option<u64>,
    /// Relative per-mode noise on μ.
    #[arg(long)]
    noise: Option<f64>,
}

fn load(args: &Args) -> Result<ExperimentConfig, Error> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::from_json(&std::fs::read_to_string(path)?)?,
        None => ExperimentConfig::default(),
    };
    config.apply(&Overrides {
        r_re: args.r_re,
        r_im: args.r_im,
        horizon: args.horizon,
        mode_count: args.mode_count,
        seed: args.seed,
        noise: args.noise,
    });
    Ok(config)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(err) => {
            // usage errors are config errors (1), not clap's default 2
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { cli::EXIT_CONFIG as u8 } else { 0 });
        }
    };
    let result = load(&args).and_then(|config| cli::run(&config, args.command.into(), &args.out));
    match result {
        Ok(report) => {
            println!("{}", serde_json::to_string(&report).expect("report serializes"));
            ExitCode::from(report.exit_code as u8)
        }
        Err(err) => {
            eprintln!("{}", cli::error_json(&err));
            ExitCode::from(cli::exit_code(&err) as u8)
        }
    }
}
