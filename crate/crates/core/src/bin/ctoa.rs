use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ctoa::commands::{cmd_distribution, cmd_dynamics, cmd_spectrum, cmd_verify, error_status, exit_status, Outcome};
use ctoa::config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "ctoa", version, about = "Confined time-of-arrival experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Io {
    /// TOML config file, or `preset:<name>` (default, fig1 .. fig5)
    #[arg(long)]
    config: String,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic spectrum and the Nystrom comparison
    Spectrum(Io),
    /// Confined vs Kijowski arrival distributions and the flux
    Distribution(Io),
    /// Collapse of evolved eigenfunctions at their eigenvalues
    Dynamics(Io),
    /// Invariant suite
    Verify(Io),
}

fn load(spec: &str) -> ctoa::Result<ExperimentConfig> {
    match spec.strip_prefix("preset:") {
        Some(name) => ExperimentConfig::preset(name),
        None => ExperimentConfig::load(spec.as_ref()),
    }
}

fn run(cli: Cli) -> ctoa::Result<Outcome> {
    let (io, f): (Io, fn(&ExperimentConfig, &std::path::Path) -> ctoa::Result<Outcome>) = match cli.command {
        Command::Spectrum(io) => (io, cmd_spectrum),
        Command::Distribution(io) => (io, cmd_distribution),
        Command::Dynamics(io) => (io, cmd_dynamics),
        Command::Verify(io) => (io, cmd_verify),
    };
    let cfg = load(&io.config)?;
    f(&cfg, &io.out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(outcome) => {
            for c in &outcome.checks {
                println!("{c}");
            }
            for n in &outcome.notes {
                println!("note: {n}");
            }
            println!("wrote {} files", outcome.files.len());
            ExitCode::from(exit_status(&outcome))
        }
        Err(e) => {
            eprintln!("ctoa: {e}");
            ExitCode::from(error_status(&e))
        }
    }
}
