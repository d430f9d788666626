use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use csqar::config::{Format, Mode, RunConfig};
use csqar::run::{run, RunError};

/// Central-spin refrigerator simulations driven by a TOML configuration.
#[derive(Parser)]
#[command(name = "csqar", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the mode named in the configuration file.
    Run {
        #[arg(value_name = "CONFIG")]
        file: PathBuf,
        #[command(flatten)]
        io: OutputArgs,
    },
    /// Single central spin: populations, temperature and heat currents.
    Single(Overrides),
    /// Refrigerator time series.
    Evolve(Overrides),
    /// Search couplings and time for the lowest cold-qubit temperature.
    Optimize(Overrides),
    /// Optimize over bath sizes, then fit and extrapolate.
    Scaling(Overrides),
    /// Markovian reference refrigerator (evolve or optimize).
    Markov(Overrides),
    /// Compare the sector solver with dense evolution.
    Validate(Overrides),
    /// Print the default configuration.
    DefaultConfig,
}

#[derive(Args)]
struct Overrides {
    /// TOML configuration; defaults apply to anything missing.
    #[arg(short, long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    io: OutputArgs,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file (standard output when absent).
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(short, long, value_enum)]
    format: Option<Format>,
}

fn load(path: Option<&PathBuf>, mode: Option<Mode>, io: &OutputArgs) -> Result<RunConfig, RunError> {
    let mut config = match path {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(m) = mode {
        config.mode = m;
    }
    if io.output.is_some() {
        config.output.path = io.output.clone();
    }
    if io.format.is_some() {
        config.output.format = io.format;
    }
    config.validate()?;
    Ok(config)
}

fn threads() -> Result<(), String> {
    let Ok(v) = std::env::var("CSQAR_THREADS") else {
        return Ok(());
    };
    let n: usize = v.parse().map_err(|_| format!("CSQAR_THREADS: not a number: {v}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let loaded = match &cli.command {
        Command::DefaultConfig => {
            print!("{}", RunConfig::default().to_toml());
            return ExitCode::SUCCESS;
        }
        Command::Run { file, io } => load(Some(file), None, io),
        Command::Single(a) => load(a.config.as_ref(), Some(Mode::Single), &a.io),
        Command::Evolve(a) => load(a.config.as_ref(), Some(Mode::Evolve), &a.io),
        Command::Optimize(a) => load(a.config.as_ref(), Some(Mode::Optimize), &a.io),
        Command::Scaling(a) => load(a.config.as_ref(), Some(Mode::Scaling), &a.io),
        Command::Markov(a) => load(a.config.as_ref(), Some(Mode::Markov), &a.io),
        Command::Validate(a) => load(a.config.as_ref(), Some(Mode::Validate), &a.io),
    };
    let result = loaded.and_then(|c| run(&c));
    match result {
        Ok(out) => {
            for w in out.warnings {
                eprintln!("warning: {w}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
