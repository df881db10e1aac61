//! `q1`: decide, analyze, simulate and census partial Boolean functions in
//! the quantum 1-query model.
//!
//! Functions are given as trit strings `f(0)f(1)…f(2ⁿ−1)` over `0`, `1`, `*`
//! (input `x₁…xₙ` read as a binary number, `x₁` most significant) or as
//! `zeros=[000];ones=[001,010,100]`.
//!
//! Exit codes:
//!
//! - 0: feasible or zero-query decision, successful analysis, passing verification
//! - 1: infeasible decision, failed verification
//! - 2: usage, parse or size errors
//! - 3: internal errors
//!
//! Text output is for people; pass `--json` for a stable machine format.
//! Exact quantities are always printed as `p/q`.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "q1", version, about = "Exact quantum 1-query analysis of partial Boolean functions")]
struct Cli {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether one query suffices.
    Decide {
        function: String,
        /// Skip the rank filter and always solve the linear system.
        #[arg(long)]
        no_filter: bool,
        /// Show the witness β.
        #[arg(long)]
        witness: bool,
        /// Show the Farkas certificate.
        #[arg(long)]
        certificate: bool,
    },
    /// Degree, dependence and the rank filter.
    Analyze { function: String },
    /// Build the 1-query algorithm and simulate it on every input.
    Simulate { function: String },
    /// Count N₁(n, k) over every partial function on n bits.
    Census {
        n: usize,
        /// Number of index ranges processed in parallel.
        #[arg(long)]
        shards: Option<usize>,
        /// Directory for the CSV/JSON results and the checkpoint file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Continue from the checkpoint in --out.
        #[arg(long, requires = "out")]
        resume: bool,
        /// Tables per shard between checkpoint writes.
        #[arg(long, default_value_t = q1_core::census::DEFAULT_CHECKPOINT_EVERY)]
        checkpoint_every: u64,
    },
    /// Exhaustively check one of the classification or counting statements.
    Verify { target: Target, n: usize },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Target {
    Theorem2,
    Lemma1,
    Lemma4,
    Fact2,
    Theorem5,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = match cli.command {
        Command::Decide { function, no_filter, witness, certificate } => {
            commands::decide(&function, !no_filter, witness, certificate)
        }
        Command::Analyze { function } => commands::analyze(&function),
        Command::Simulate { function } => commands::simulate(&function),
        Command::Census { n, shards, out, resume, checkpoint_every } => {
            commands::census(n, shards, out, resume, checkpoint_every)
        }
        Command::Verify { target, n } => commands::verify(target, n),
    };
    output.emit(cli.json)
}
