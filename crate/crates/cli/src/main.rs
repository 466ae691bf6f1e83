use std::io::{IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use folpi::report::{run, Command, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "folpi", version, about = "Resolution graphs, leaf fundamental groups and saddle numerics")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Relative ODE tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol_rel: f64,
    /// Absolute ODE tolerance.
    #[arg(long, global = true, default_value_t = 1e-13)]
    tol_abs: f64,
    #[arg(long, global = true, default_value_t = folpi::resolution::DEFAULT_MAX_BLOWUPS)]
    max_blowups: usize,
    /// Radial samples for star domains.
    #[arg(long, global = true, default_value_t = folpi::star::DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory for report.txt and companion CSV files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Resolve a plane curve germ and write its dual graph and event log.
    Resolve { poly: String },
    /// Presentation and abelianization from a polynomial or a graph file.
    Pi1 { input: String },
    /// List chains, dead branches and aggregated blocks of a graph file.
    Decompose { graph_file: PathBuf },
    /// Numerical checks on a saddle model.
    Saddle {
        #[command(subcommand)]
        action: SaddleCmd,
    },
    /// Collar reduction sweeps on a saddle model.
    Rabotage {
        #[command(subcommand)]
        action: RabotageCmd,
    },
}

#[derive(Subcommand, Debug)]
enum SaddleCmd {
    /// Holonomy, col passage and Dulac checks for a model spec such as `normal:1:k=1:alpha=0.5`.
    Verify { model: String },
}

#[derive(Subcommand, Debug)]
enum RabotageCmd {
    /// Collar reduction over shrinking domains.
    Sweep { model: String },
}

fn paint(line: &str, color: bool) -> String {
    if !color {
        return line.to_string();
    }
    if line.starts_with("PASS ") {
        format!("\x1b[32m{line}\x1b[0m")
    } else if line.starts_with("FAIL ") || line.starts_with("error ") {
        format!("\x1b[31m{line}\x1b[0m")
    } else {
        line.to_string()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::Resolve { poly } => Command::Resolve { poly },
        Cmd::Pi1 { input } => Command::Pi1 { input },
        Cmd::Decompose { graph_file } => Command::Decompose { graph_file },
        Cmd::Saddle { action: SaddleCmd::Verify { model } } => Command::SaddleVerify { model },
        Cmd::Rabotage { action: RabotageCmd::Sweep { model } } => Command::RabotageSweep { model },
    };
    let config = RunConfig {
        command,
        tol_rel: cli.tol_rel,
        tol_abs: cli.tol_abs,
        max_blowups: cli.max_blowups,
        samples: cli.samples,
        seed: cli.seed,
        out: cli.out,
    };
    let outcome = run(&config);
    let color = std::env::var_os("FOLPI_NO_COLOR").is_none() && std::io::stdout().is_terminal();
    let mut stdout = std::io::stdout().lock();
    for line in outcome.report.lines() {
        if writeln!(stdout, "{}", paint(line, color)).is_err() {
            break;
        }
    }
    if let Some(dir) = &config.out {
        if let Err(e) = outcome.write_to(dir) {
            eprintln!("folpi: cannot write {}: {e}", dir.display());
            return ExitCode::from(4);
        }
    }
    if let Some(f) = &outcome.failure {
        eprintln!("folpi: {}", f.message());
    }
    ExitCode::from(outcome.code as u8)
}
