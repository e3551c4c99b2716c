//! `hwfmine`: discover, flatten, play out and check hierarchical workflow nets.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hwf_core::abstraction::DEFAULT_CLONE_CAP;
use hwf_core::conformance::DEFAULT_BUDGET;

#[derive(Parser)]
#[command(name = "hwfmine", version, about = "Hierarchical workflow-net discovery from event logs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discover an HWF-net from a log and a sub-process partition.
    Discover {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Accepted for symmetry with `playout`; discovery is deterministic.
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for intermediate logs and the loop registry.
        #[arg(long)]
        debug_dump: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BUDGET, value_parser = positive)]
        state_budget: usize,
        #[arg(long, default_value_t = DEFAULT_CLONE_CAP, value_parser = positive)]
        clone_cap: usize,
        /// Split sub-processes cut by a loop instead of failing.
        #[arg(long)]
        auto_refine: bool,
    },
    /// Sample complete runs of a net into an XES log.
    Playout {
        /// PNML, WF-net JSON, or HWF JSON (flattened first).
        #[arg(long)]
        net: PathBuf,
        #[arg(long, default_value_t = 100, value_parser = positive)]
        n: usize,
        #[arg(long, default_value_t = 1000, value_parser = positive)]
        max_len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Alignment fitness, token-replay fitness and precision as JSON.
    Conformance {
        #[arg(long)]
        net: PathBuf,
        #[arg(long)]
        log: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET, value_parser = positive)]
        state_budget: usize,
    },
    /// Write the flat net of an HWF-net as PNML, JSON and DOT.
    Flatten {
        #[arg(long)]
        hwf: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert a net or HWF-net to another format.
    Export {
        #[arg(long)]
        net: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a partition against a log, and optionally a net for soundness.
    Validate {
        #[arg(long, requires = "partition")]
        log: Option<PathBuf>,
        #[arg(long, requires = "log")]
        partition: Option<PathBuf>,
        #[arg(long)]
        net: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BUDGET, value_parser = positive)]
        state_budget: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Dot,
    Pnml,
    Json,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Discover { log, partition, out, seed: _, debug_dump, state_budget, clone_cap, auto_refine } => {
            commands::discover(&commands::DiscoverArgs {
                log,
                partition,
                out,
                debug_dump,
                state_budget,
                clone_cap,
                auto_refine,
            })
        }
        Command::Playout { net, n, max_len, seed, out } => commands::playout(&net, n, max_len, seed, &out),
        Command::Conformance { net, log, state_budget } => commands::conformance(&net, &log, state_budget),
        Command::Flatten { hwf, out } => commands::flatten(&hwf, &out),
        Command::Export { net, format, out } => commands::export(&net, format, out.as_deref()),
        Command::Validate { log, partition, net, state_budget } => {
            commands::validate(log.as_deref(), partition.as_deref(), net.as_deref(), state_budget)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
