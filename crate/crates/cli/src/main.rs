use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use holonomy_cli::{Command, Format, Options};

#[derive(Parser)]
#[command(name = "holonomy", version, about = "Geometric phases of non-Hermitian Hamiltonians around exceptional points")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Monodromy permutations, label periods and the generated group.
    Analyze(Args),
    /// Geometric and dynamical phases per label, lifting cyclic branches automatically.
    Phase(Args),
    /// Curvature on a 2D parameter grid.
    Curvature(Args),
    /// Direct evolution over a list of total durations.
    Sweep(Args),
}

#[derive(clap::Args)]
struct Args {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: the config's `output.dir`, else `.`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Also write SVG plots.
    #[arg(long)]
    plot: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("HOLONOMY_LOG", "warn")).init();
    let cli = Cli::parse();
    let (command, a) = match cli.command {
        Cmd::Analyze(a) => (Command::Analyze, a),
        Cmd::Phase(a) => (Command::Phase, a),
        Cmd::Curvature(a) => (Command::Curvature, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
    };
    let opts = Options { command, config: a.config, out: a.out, samples: a.samples, format: a.format, plot: a.plot };
    match holonomy_cli::run(&opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
