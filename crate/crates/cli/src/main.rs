use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use oscillint_cli::run::EXIT_ERROR;
use oscillint_cli::{load_config, run, Command, Overrides, RunOptions};

/// Oscillation and non-oscillation criteria for forced 2x2 linear systems.
#[derive(Debug, Parser)]
#[command(name = "oscillint", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Problem configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Replaces the configured horizon.
    #[arg(long)]
    horizon: Option<f64>,
    /// Declares the coefficients periodic with this period.
    #[arg(long)]
    periodic: Option<f64>,
    /// Writes one CSV trace per ensemble member into this directory.
    #[arg(long)]
    dump_traces: Option<PathBuf>,
    /// Writes the text report here and the JSON report next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Uses the squared difference term in the comparison certificate.
    #[arg(long)]
    squared_variant: bool,
}

fn execute(cli: &Cli) -> oscillint_cli::Result<i32> {
    let overrides = Overrides {
        horizon: cli.horizon,
        periodic: cli.periodic,
        squared_variant: cli.squared_variant,
    };
    let config = overrides.apply(load_config(&cli.config)?)?;
    let opts = RunOptions {
        dump_traces: cli.dump_traces.clone(),
    };
    let report = run(cli.command, &config, &opts)?;
    print!("{}", report.to_text()?);
    if let Some(out) = &cli.out {
        report.write(out)?;
    }
    Ok(report.exit_code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_ERROR as u8);
        }
    };
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
