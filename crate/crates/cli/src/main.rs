use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use muscu_cli::{
    parse_range, run_check, run_potential, run_simulate, run_sweep, ScenarioConfig,
    EXIT_INVALID_CONFIG,
};

/// Feed-forward cable-drive position control: certify target angles,
/// simulate the penalized dynamics, scan potentials, sweep parameters.
#[derive(Parser)]
#[command(name = "muscu", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify the configured target angle (exit 0 certified, 1 not
    /// certified, 2 undetermined, 3 invalid config).
    Check {
        #[arg(long)]
        config: PathBuf,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run the independent numeric cross-checks (exit 4 on failure).
        #[arg(long)]
        verify: bool,
    },
    /// Integrate the dynamics and emit the trajectory CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the control potential and emit a (theta, P) CSV.
    Potential {
        #[arg(long)]
        config: PathBuf,
        /// Number of uniform samples.
        #[arg(long, default_value_t = 512)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-certify across one swept parameter and emit a verdict CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Parameter name (geometry in mm or a dynamics scalar).
        #[arg(long)]
        param: String,
        /// LO:HI:N inclusive range.
        #[arg(long)]
        range: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_INVALID_CONFIG
        }
    };
    ExitCode::from(u8::try_from(code).unwrap_or(1))
}

fn dispatch(cli: Cli) -> Result<i32, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Check {
            config,
            out,
            verify,
        } => {
            let scenario = ScenarioConfig::load(&config)?.resolve()?;
            let outcome = run_check(&scenario, verify)?;
            print!("{}", outcome.text);
            if let Some(path) = out {
                std::fs::write(path, outcome.text.as_bytes())?;
            }
            Ok(outcome.exit)
        }
        Command::Simulate { config, out } => {
            let scenario = ScenarioConfig::load(&config)?.resolve()?;
            let outcome = run_simulate(&scenario)?;
            emit_csv(&outcome.csv, &outcome.summary, out)?;
            Ok(outcome.exit)
        }
        Command::Potential { config, grid, out } => {
            let scenario = ScenarioConfig::load(&config)?.resolve()?;
            let outcome = run_potential(&scenario, grid)?;
            emit_csv(&outcome.csv, &outcome.summary, out)?;
            Ok(outcome.exit)
        }
        Command::Sweep {
            config,
            param,
            range,
            out,
        } => {
            let base = ScenarioConfig::load(&config)?;
            let values = parse_range(&range).map_err(invalid_arg)?;
            let outcome = run_sweep(&base, &param, &values)?;
            emit_csv(&outcome.csv, &outcome.summary, out)?;
            Ok(outcome.exit)
        }
    }
}

fn invalid_arg(message: String) -> Box<dyn std::error::Error> {
    Box::new(std::io::Error::new(std::io::ErrorKind::InvalidInput, message))
}

/// CSV goes to `--out` when given (summary to stdout), otherwise CSV to
/// stdout and summary to stderr so output stays machine-readable.
fn emit_csv(
    csv: &[u8],
    summary: &str,
    out: Option<PathBuf>,
) -> Result<(), Box<dyn std::error::Error>> {
    match out {
        Some(path) => {
            std::fs::write(path, csv)?;
            print!("{summary}");
        }
        None => {
            std::io::stdout().write_all(csv)?;
            eprint!("{summary}");
        }
    }
    Ok(())
}
