mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::CommandKind;

#[derive(Parser)]
#[command(
    name = "mdpc",
    version,
    about = "Dispersion, stability, and benchmark toolkit for prefactored compact schemes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// plain-text `key = value` configuration file
    #[arg(long)]
    config: PathBuf,
    /// output directory (overrides the MDPC_OUT variable and the config's out_dir)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Directional dispersion survey: phase/group velocity over angle and resolution
    Analyze(CommonArgs),
    /// Isotropy corrector weight as a function of points per wavelength
    Icf(CommonArgs),
    /// Analytic stability limits, optionally evaluated at an operating Courant point
    Stability(CommonArgs),
    /// March a model problem; write the final field and the norm history
    Run(CommonArgs),
    /// Time the unblended and blended schemes, each at 0.9x its measured stable step
    Bench(CommonArgs),
}

fn dispatch(kind: CommandKind, args: &CommonArgs) -> error::Result<String> {
    use std::fmt::Write as _;
    let text = std::fs::read_to_string(&args.config)?;
    let out_override = args
        .out
        .clone()
        .or_else(|| std::env::var_os("MDPC_OUT").map(PathBuf::from));
    let exec = commands::execute(kind, &text, out_override.as_deref())?;
    let mut report = exec.report;
    for file in &exec.files {
        let _ = writeln!(report, "wrote {}", file.display());
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Analyze(a) => (CommandKind::Analyze, a),
        Command::Icf(a) => (CommandKind::Icf, a),
        Command::Stability(a) => (CommandKind::Stability, a),
        Command::Run(a) => (CommandKind::Run, a),
        Command::Bench(a) => (CommandKind::Bench, a),
    };
    match dispatch(kind, args) {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
