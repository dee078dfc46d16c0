//! `modcert`: parity partitions, modular witnesses, trace obstructions and
//! certified absorption from the command line.
//!
//! Exit codes: 0 success (or "yes" for decision commands), 1 the negative
//! outcome of a decision command, 2 invalid input, 3 internal inconsistency.

mod budget;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "modcert",
    version,
    about = "Modular obstructions and certified absorption for regular induced subgraphs"
)]
struct Cli {
    /// Graph file format.
    #[arg(long, global = true, default_value = "edge-list")]
    format: String,

    /// Print JSON instead of a human-readable table.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GraphArg {
    /// Graph file, or `-` for stdin.
    graph: PathBuf,
}

#[derive(Args, Debug)]
struct CoreArgs {
    /// Core vertices, comma separated names.
    #[arg(long, value_delimiter = ',', required = true)]
    core: Vec<String>,
    /// Witness vertices; defaults to every vertex.
    #[arg(long, value_delimiter = ',')]
    witness: Option<Vec<String>>,
}

#[derive(Args, Debug)]
struct ProblemArgs {
    #[command(flatten)]
    sets: CoreArgs,
    /// Modulus of the witness, a power of two.
    #[arg(long)]
    q: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Split the graph into two parts that each induce even degrees.
    Parity(GraphArg),
    /// Test whether a vertex set is q-modular (exit 1 if not).
    CheckModular {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        q: u64,
        /// Defaults to every vertex.
        #[arg(long, value_delimiter = ',')]
        witness: Option<Vec<String>>,
    },
    /// Trace table of the tail over the core, ρ and complement differences.
    Traces {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        sets: CoreArgs,
    },
    /// Next-bit obstruction Θ_m and the oriented orbit form for m = 0..=max-m.
    NextBit {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        sets: CoreArgs,
        #[arg(long, default_value_t = 4)]
        max_m: u32,
    },
    /// The q-heavy pair-trace graph H_2 on the core.
    PairTrace {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        sets: CoreArgs,
        #[arg(long)]
        q: u64,
    },
    /// Neighborhood diversity and twin classes.
    Nd(GraphArg),
    /// Largest regular induced subgraph by exhaustive search, with α and ω.
    OracleF(GraphArg),
    /// Decide absorption by enumerating trace subsets (exit 1 if impossible).
    OracleAbsorb {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        problem: ProblemArgs,
    },
    /// Certified absorption: exit 0 with a deletion certificate, 1 with a parity cut.
    Absorb {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        problem: ProblemArgs,
    },
    /// Re-check a certificate produced by `absorb` (exit 1 if it fails).
    Verify {
        #[command(flatten)]
        graph: GraphArg,
        /// Certificate JSON file, or `-` for stdin.
        certificate: PathBuf,
    },
    /// Evaluate absorption criteria by name (all when --only is absent).
    Criteria {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
    /// Simulate random reservoirs and measure basis-trace availability.
    Reservoir {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        q: u64,
        /// Reservoir size N. Defaults to the uniform sample size for --delta.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        /// JSON trace distribution; uniform over all subsets when absent.
        #[arg(long)]
        distribution: Option<PathBuf>,
    },
    /// Starting size needed to climb the dyadic ladder to 2^r.
    LadderBudget {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        c0: f64,
        #[arg(long)]
        r: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(if err.internal { 3 } else { 2 })
        }
    }
}
