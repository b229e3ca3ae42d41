use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qme_cli::{run, validate_csv, CliError, Command, ExperimentConfig};

/// Weak-coupling master equations for boundary-driven XXZ chains.
#[derive(Parser, Debug)]
#[command(name = "qme", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Steady state and currents, one row per master equation.
    Ness(Common),
    /// Parameter sweep over epsilon or g.
    Sweep(Common),
    /// Condition matrix; exits 1 when a cell departs from the expected pattern.
    Check(Common),
    /// Time evolution from an initial state.
    Evolve(Common),
    /// Checks that a written table still carries its provenance header.
    Validate {
        file: PathBuf,
        /// Config the table must have been produced from.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated subset of re,lle,ele,ule.
    #[arg(long, value_delimiter = ',')]
    qme: Option<Vec<String>>,
    #[arg(long)]
    seed: Option<u64>,
}

fn execute(cmd: Command, args: &Common) -> Result<Option<String>, CliError> {
    let (mut cfg, text) = ExperimentConfig::from_path(&args.config)?;
    if let Some(q) = &args.qme {
        cfg.qme = q.clone();
        cfg.kinds().map_err(|e| match e {
            CliError::Config { message, .. } => CliError::Config { path: "--qme".to_string(), message },
            other => other,
        })?;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let outcome = run(cmd, &cfg, &text)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    match &args.out {
        Some(p) => {
            let f = std::fs::File::create(p)?;
            outcome.table.write(std::io::BufWriter::new(f))?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            outcome.table.write(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(outcome.mismatch)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Sub::Ness(a) => execute(Command::Ness, a),
        Sub::Sweep(a) => execute(Command::Sweep, a),
        Sub::Check(a) => execute(Command::Check, a),
        Sub::Evolve(a) => execute(Command::Evolve, a),
        Sub::Validate { file, config } => (|| {
            let text = std::fs::read_to_string(file)?;
            let cfg = match config {
                Some(p) => Some(std::fs::read_to_string(p)?),
                None => None,
            };
            validate_csv(&text, cfg.as_deref())?;
            Ok(None)
        })(),
    };
    match result {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(m)) => {
            eprintln!("check mismatch: {m}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
