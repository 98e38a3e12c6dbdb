use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use diffchan_cli::commands;
use diffchan_cli::output::OutputDir;
use diffchan_cli::{Result, RouteChoice, RunOptions, Scenario};

#[derive(Parser, Debug)]
#[command(
    name = "diffchan",
    version,
    about = "Distortion analysis of diffusion-based molecular communication channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Distortion indices and gain/phase-delay curves for G, H and GH.
    Analyze(Common),
    /// Largest communication distance that meets the distortion budgets.
    Design(Common),
    /// Normalized index matrices over a (ω'₁, ω'₂) grid.
    Sweep(Common),
    /// Square-wave responses with and without the diffusion channel, plus activation timings.
    Simulate(Common),
    /// Highest clean band for each configured species.
    Table(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = RouteChoice::Fourier)]
    route: RouteChoice,
    /// Curve points for `analyze`, grid points per axis for `sweep`.
    #[arg(long)]
    points: Option<usize>,
}

fn execute(cli: Cli) -> Result<Vec<PathBuf>> {
    let (Command::Analyze(common)
    | Command::Design(common)
    | Command::Sweep(common)
    | Command::Simulate(common)
    | Command::Table(common)) = &cli.command;
    let scenario = Scenario::load(&common.config)?;
    let opts = RunOptions {
        route: common.route,
        points: common.points,
    };
    let mut out = OutputDir::create(&common.out)?;
    match cli.command {
        Command::Analyze(_) => commands::analyze(&scenario, &opts, &mut out)?,
        Command::Design(_) => commands::design(&scenario, &mut out)?,
        Command::Sweep(_) => commands::sweep(&scenario, &opts, &mut out)?,
        Command::Simulate(_) => commands::simulate(&scenario, &opts, &mut out)?,
        Command::Table(_) => commands::table(&scenario, &mut out)?,
    }
    Ok(out.written().to_vec())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
