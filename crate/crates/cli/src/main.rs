//! `morselat`: lattices of attractors and repellers from the command line.
//!
//! Exit codes: 0 success, 1 failure (I/O, failed verification), 2 parse or
//! invalid input, 3 enumeration bound exceeded, 4 lifting obstruction,
//! 5 not a sublattice.

#![allow(clippy::result_large_err)]

mod commands;
mod config;
mod error;

use clap::{Parser, Subcommand};
use commands::{Output, Which};
use config::{Bounds, Format, GridParams, RunConfig, DEFAULT_MAX_ENUM, TOOL, VERSION};
use error::CliError;
use morselat_core::io::{self, Input};
use morselat_core::verify::VerifyConfig;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "morselat", version, about = "Attractor and repeller lattices, lifting, and property sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Write the result here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    /// Enumeration bound for states, cells and poset elements.
    #[arg(long, env = "MORSELAT_MAX_ENUM", value_parser = positive, global = true)]
    max_enum: Option<usize>,

    /// Seed for randomized corpora.
    #[arg(long, default_value_t = 1, global = true)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Attractor/repeller lattices, neighbourhood counts, dual pairs.
    Analyze {
        /// system.json or gridmap.json
        input: PathBuf,
        /// Lattice drawn with --format dot.
        #[arg(long, value_enum, default_value_t = Which::Attractors)]
        lattice: Which,
    },
    /// Lift a sublattice of attractors or repellers to neighbourhoods.
    Lift {
        input: PathBuf,
        /// {"elements": [[...], ...], "side": "attractor" | "repeller"}
        sublattice: PathBuf,
        /// Lift attractors on the attractor side, without duality.
        #[arg(long)]
        direct: bool,
    },
    /// Check every tagged property on a corpus of finite systems.
    Verify {
        /// All n^n maps on n states (0 to skip).
        #[arg(long, default_value_t = 4)]
        exhaustive: usize,
        /// Number of random systems.
        #[arg(long, default_value_t = 500)]
        random: usize,
        /// Random systems have 1..=N states.
        #[arg(long, default_value_t = 10)]
        max_states: usize,
        /// Only surjective maps.
        #[arg(long)]
        surjective_only: bool,
    },
    /// Down-set lattice, join-irreducibles and Booleanization of a poset or lattice.
    Birkhoff { input: PathBuf },
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(&path.display().to_string(), e))
}

fn read_input(path: &PathBuf) -> Result<Input, CliError> {
    io::read_input(&read(path)?).map_err(|e| CliError::input(&path.display().to_string(), e))
}

fn run(cli: Cli) -> Result<Output, CliError> {
    let mut cfg = RunConfig {
        command: "",
        inputs: Vec::new(),
        output: cli.output.as_ref().map(|p| p.display().to_string()),
        format: cli.format,
        bounds: Bounds { max_enum: cli.max_enum.unwrap_or(DEFAULT_MAX_ENUM) },
        seed: cli.seed,
        grid: None,
        direct: None,
        corpus: None,
    };
    let grid_params = |input: &Input| match input {
        Input::Grid(m) => Some(GridParams::of(m)),
        Input::System(_) => None,
    };
    match cli.command {
        Command::Analyze { input, lattice } => {
            cfg.command = "analyze";
            cfg.inputs = vec![input.display().to_string()];
            let inp = read_input(&input)?;
            cfg.grid = grid_params(&inp);
            commands::analyze(&cfg, &inp, lattice)
        }
        Command::Lift { input, sublattice, direct } => {
            cfg.command = "lift";
            cfg.inputs = vec![input.display().to_string(), sublattice.display().to_string()];
            cfg.direct = Some(direct);
            let inp = read_input(&input)?;
            cfg.grid = grid_params(&inp);
            let sel = io::read_selection(&read(&sublattice)?, &inp)
                .map_err(|e| CliError::input(&sublattice.display().to_string(), e))?;
            commands::lift_cmd(&cfg, &inp, &sel, direct)
        }
        Command::Verify { exhaustive, random, max_states, surjective_only } => {
            cfg.command = "verify";
            let vc = VerifyConfig {
                exhaustive: (exhaustive > 0).then_some(exhaustive),
                random,
                max_states,
                seed: cli.seed,
                surjective_only,
                ..VerifyConfig::default()
            };
            cfg.corpus = Some(vc);
            commands::verify_cmd(&cfg, &vc)
        }
        Command::Birkhoff { input } => {
            cfg.command = "birkhoff";
            cfg.inputs = vec![input.display().to_string()];
            let inp = io::read_order(&read(&input)?).map_err(|e| CliError::input(&input.display().to_string(), e))?;
            commands::birkhoff(&cfg, &inp)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = cli.output.clone();
    let result = run(cli).and_then(|out| {
        match &output {
            Some(path) => std::fs::write(path, &out.text).map_err(|e| CliError::io(&path.display().to_string(), e))?,
            None => {
                let mut stdout = std::io::stdout().lock();
                // a closed pipe is not worth a panic
                let _ = stdout.write_all(out.text.as_bytes());
                let _ = stdout.flush();
            }
        }
        Ok(out.code)
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            let body = serde_json::json!({ "tool": TOOL, "version": VERSION, "error": e });
            eprintln!("{body}");
            ExitCode::from(e.exit_code as u8)
        }
    }
}
