mod commands;
mod error;
mod target;
mod verify;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use curtainlab_core::budget::BUDGET_ENV;
use curtainlab_core::projection::DEFAULT_SEED;

use error::CliError;

#[derive(Parser)]
#[command(
    name = "curtainlab",
    version,
    about = "Curtains, contact graphs and projection systems on finite windows"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Ball radius for RAAG windows.
    #[arg(long, global = true, default_value_t = 6)]
    horizon: u32,
    /// Guard radius for graph windows (RAAG windows use horizon / 3).
    #[arg(long, global = true)]
    guard: Option<u32>,
    /// Hyperbolicity scale for curtains; estimated from the graph when absent.
    #[arg(long = "E", global = true)]
    e: Option<u32>,
    /// Vertex cap; overrides CURTAINLAB_BUDGET.
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output file (a directory for `build`).
    #[arg(long, global = true)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a median window, or a RAAG window with its projection system.
    Build {
        /// Presentation file ({generators, commuting_pairs}) or name.
        #[arg(long, conflicts_with = "graph", required_unless_present = "graph")]
        raag: Option<String>,
        /// Graph file ({vertices, edges, ...}) or name.
        #[arg(long)]
        graph: Option<String>,
    },
    /// Run one query against a target.
    Query {
        /// Named fixture (q3, path8, grid3x4, tof, f2, f2xz, z2) or a file.
        target: String,
        #[command(subcommand)]
        query: commands::Query,
    },
    /// Run the rank-one recipe on a RAAG window.
    Recipe {
        target: String,
        /// Comma-separated generating set.
        #[arg(long, value_delimiter = ',', required = true)]
        set: Vec<String>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Target, system document or certificate, depending on the suite.
        target: Option<String>,
        /// Number of random graphs (median-oracle) or curtains (curtain-axioms).
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 200)]
        max_vertices: u32,
        /// A stored curtain to check instead of sampling (curtain-axioms).
        #[arg(long)]
        curtain: Option<String>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    MedianOracle,
    CurtainAxioms,
    Behrstock,
    Bgi,
    RecipeRoundtrip,
}

/// Whether a command's checks passed.
pub enum Status {
    Pass,
    Fail,
}

fn run(cli: Cli) -> Result<Status, CliError> {
    if let Some(b) = cli.common.budget {
        // core reads the cap from the environment
        std::env::set_var(BUDGET_ENV, b.to_string());
    }
    let c = &cli.common;
    match cli.command {
        Command::Build { raag, graph } => commands::build(c, raag.as_deref(), graph.as_deref()),
        Command::Query { target, query } => commands::query(c, &target, &query),
        Command::Recipe { target, set } => commands::recipe(c, &target, &set),
        Command::Verify {
            suite,
            target,
            random,
            max_vertices,
            curtain,
        } => verify::run(
            c,
            &verify::Request {
                suite,
                target,
                random,
                max_vertices,
                curtain,
            },
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
