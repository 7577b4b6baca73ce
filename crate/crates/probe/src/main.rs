use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fockshift_core::coeffs::ReferenceState;
use fockshift_core::ModelConfig;
use fockshift_probe::sweep::{Range, SweepSpec};
use fockshift_probe::{coefficients, demo, load_config, output, sweep, verify, Outcome, ProbeError, EXIT_USAGE};

#[derive(Parser)]
#[command(
    name = "fockshift",
    version,
    about = "Displacement identities and energy sweeps for the charged/neutral scalar model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every displacement identity and the central identity grid.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Print and write the energy-polynomial coefficients of a state.
    Coeffs {
        #[arg(long)]
        config: PathBuf,
        /// vacuum, one_a, one_b or seeded:<int>
        #[arg(long, default_value = "vacuum", value_parser = parse_state)]
        state: ReferenceState,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Sweep f1 at fixed f2 and fit the energy to a quadratic in f1.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "vacuum", value_parser = parse_state)]
        state: ReferenceState,
        /// START:STOP:STEP
        #[arg(long, value_parser = parse_range)]
        f1: Range,
        /// VALUE or START:STOP:STEP
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        f2: Range,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Verify, report vacuum coefficients and certify the unbounded descent.
    Demo {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn parse_state(s: &str) -> Result<ReferenceState, String> {
    s.parse().map_err(|e: fockshift_core::Error| e.to_string())
}

fn parse_range(s: &str) -> Result<Range, String> {
    s.parse().map_err(|e: ProbeError| e.to_string())
}

fn prepare(config: Option<&Path>, out: &Path) -> fockshift_probe::Result<ModelConfig> {
    let config = match config {
        Some(path) => load_config(path)?,
        None => ModelConfig::default(),
    };
    output::ensure_dir(out)?;
    Ok(config)
}

fn run(cli: Cli) -> fockshift_probe::Result<Outcome> {
    match cli.command {
        Command::Verify { config, out } => {
            let c = prepare(Some(&config), &out)?;
            let (report, outcome) = verify::cmd_verify(c, &out)?;
            print!("{}", report.summary());
            Ok(outcome)
        }
        Command::Coeffs { config, state, out } => {
            let c = prepare(Some(&config), &out)?;
            let (report, outcome) = coefficients::cmd_coeffs(c, state, &out)?;
            print!("{}", report.summary());
            Ok(outcome)
        }
        Command::Sweep {
            config,
            state,
            f1,
            f2,
            out,
        } => {
            let c = prepare(Some(&config), &out)?;
            let spec = SweepSpec {
                f1,
                f2,
                reference: state,
                direct_check_limit: None,
            };
            let (result, outcome) = sweep::cmd_sweep(c, &spec, &out)?;
            print!("{}", result.summary());
            Ok(outcome)
        }
        Command::Demo { config, out } => {
            let c = prepare(config.as_deref(), &out)?;
            let (result, outcome) = demo::cmd_demo(c, &out)?;
            print!("{}", result.summary());
            Ok(outcome)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(outcome) => ExitCode::from(outcome.exit_code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
