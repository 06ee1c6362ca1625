//! Command-line driver for the `exodromy` library: builds presentations from
//! stratified complexes, localizes them, and checks and counts
//! representations.

pub mod commands;
pub mod error;
pub mod input;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use exodromy::exit::DEFAULT_DEPTH;
use exodromy::rep::count::DEFAULT_BUDGET;

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "exodromy", version, about = "Exit-path categories of stratified simplicial complexes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Turn a stratified complex into a presentation.
    Build {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the shape as Graphviz, marked edges dashed.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Localize a presentation and report its homotopy category.
    Hocat {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEPTH as u64, value_parser = clap::value_parser!(u64).range(2..))]
        depth: u64,
        /// Exit with code 3 unless the result is certified.
        #[arg(long)]
        require_certified: bool,
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Homology of the classifying space and of each stratum, finiteness
    /// counts and conservativity.
    Invariants {
        input: PathBuf,
        /// Z, Q or a prime.
        #[arg(long, default_value = "Z")]
        field: String,
        #[arg(long, default_value_t = DEFAULT_DEPTH as u64, value_parser = clap::value_parser!(u64).range(2..))]
        depth: u64,
    },
    /// Check a representation: `check-rep [PRESENTATION] REPRESENTATION`.
    CheckRep {
        #[arg(required = true, num_args = 1..=2)]
        files: Vec<PathBuf>,
        /// Comma-separated open set of strata to split along.
        #[arg(long)]
        recollement: Option<String>,
    },
    /// Count representations over F_q, one row per `--dims`.
    Count {
        input: PathBuf,
        #[arg(long)]
        q: u64,
        /// `1,1,1` in object order, or `k=1,b=1`; repeatable.
        #[arg(long, required = true)]
        dims: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
        budget: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: commands::Format,
    },
    /// Restrict to a locally closed set of strata.
    Restrict {
        input: PathBuf,
        /// Comma-separated strata.
        #[arg(long)]
        to: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coarsen the stratification along `p=c,…` pairs or a map file.
    Coarsen {
        input: PathBuf,
        #[arg(long)]
        map: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Product of two presentations.
    Product {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Runs one command and returns what it prints.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Build { input, out, dot } => commands::build(input, out.as_deref(), dot.as_deref()),
        Command::Hocat { input, depth, require_certified, dot, json } => commands::hocat(
            input,
            commands::HocatArgs {
                depth: *depth as usize,
                require_certified: *require_certified,
                dot: dot.as_deref(),
                json: *json,
            },
        ),
        Command::Invariants { input, field, depth } => {
            commands::invariants(input, commands::parse_field(field)?, *depth as usize)
        }
        Command::CheckRep { files, recollement } => {
            let paths: Vec<&std::path::Path> = files.iter().map(PathBuf::as_path).collect();
            commands::check_rep(&paths, recollement.as_deref())
        }
        Command::Count { input, q, dims, budget, format } => commands::count(input, *q, dims, *budget, *format),
        Command::Restrict { input, to, out } => commands::restrict(input, to, out.as_deref()),
        Command::Coarsen { input, map, out } => commands::coarsen(input, map, out.as_deref()),
        Command::Product { a, b, out } => commands::product(a, b, out.as_deref()),
    }
}
