//! `spanroute` command-line tool.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 bad usage or input,
//! 3 a construction produced an internally inconsistent result.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::io::{Artifacts, CliError, RunManifest};

/// Environment variable holding the worker thread count (default 1).
pub const THREADS_VAR: &str = "SPANROUTE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "spanroute", version, about = "Spanning factorizations and conflict-free exchange schedules")]
pub struct Cli {
    /// Write the run manifest to this file instead of stderr.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,

    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a graph, plus its factorization when the construction defines one.
    #[command(subcommand)]
    Build(BuildCmd),
    /// Split a regular graph into 1-factors.
    Factorize {
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Produce a word list.
    #[command(subcommand)]
    Words(WordsCmd),
    /// Schedule a word list.
    Schedule {
        #[arg(long)]
        words: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Greedy)]
        method: Method,
        /// Shuffle greedy priorities with this seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a graph, factorization, word list and optional schedule.
    Verify {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        schedule: Option<PathBuf>,
    },
    /// Replay the universal exchange packet by packet.
    Simulate {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        schedule: PathBuf,
        /// Also write the report as JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the cycle-prefix counting formulas.
    #[command(subcommand)]
    Counts(CountsCmd),
    /// Factor usage and the distance lower bound.
    Metrics {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Check automorphism relations.
    #[command(subcommand)]
    Relations(RelationsCmd),
    /// Write a graph in DOT format.
    ExportDot {
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct Inputs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub factors: PathBuf,
    #[arg(long)]
    pub words: PathBuf,
}

#[derive(Debug, Args)]
pub struct CpParams {
    #[arg(long)]
    pub d: usize,
    /// Diameter.
    #[arg(long = "D")]
    pub diameter: usize,
}

#[derive(Debug, Args)]
pub struct FieldParams {
    #[arg(long)]
    pub q: usize,
    /// Monic irreducible polynomial for prime-power orders, constant term
    /// first, e.g. `1,0,1`.
    #[arg(long, value_delimiter = ',')]
    pub poly: Vec<usize>,
}

#[derive(Debug, Subcommand)]
pub enum BuildCmd {
    /// Cycle-prefix digraph G(d, D).
    Cp {
        #[command(flatten)]
        params: CpParams,
        #[arg(long)]
        out: PathBuf,
    },
    /// Diameter-two graph H_q.
    Mms {
        #[command(flatten)]
        field: FieldParams,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cayley graph from a group file.
    Cayley {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cayley coset graph from a group file with a subgroup.
    Coset {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum WordsCmd {
    /// Shortest-path tree words for G(d, D).
    Cp {
        #[command(flatten)]
        params: CpParams,
        #[arg(long)]
        out: PathBuf,
    },
    /// The 2q² words for H_q.
    Mms {
        #[command(flatten)]
        field: FieldParams,
        #[arg(long)]
        out: PathBuf,
    },
    /// Breadth-first tree words from the identity.
    Cayley {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Search breadth-first trees for a spanning word list.
    Search {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        factors: PathBuf,
        #[arg(long, default_value_t = 100)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Greedy,
    Diam2,
    CpMin,
}

#[derive(Debug, Subcommand)]
pub enum CountsCmd {
    Cp {
        #[command(flatten)]
        params: CpParams,
        /// Target distance; all distances when omitted.
        #[arg(long)]
        k: Option<usize>,
        /// Exit with status 1 unless every formula matches the enumeration.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum RelationsCmd {
    Mms {
        #[command(flatten)]
        field: FieldParams,
    },
}

/// Result of a command that ran to completion.
pub struct Outcome {
    pub ok: bool,
    pub summary: String,
}

fn thread_count() -> Result<usize, CliError> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(1),
        Ok(v) => v
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got {v:?}"))),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let start = Instant::now();
    let cli = Cli::parse();
    let mut artifacts = Artifacts::default();

    let result = thread_count().and_then(|threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        commands::run(&cli, &mut artifacts)
    });

    let (exit_code, status, summary) = match &result {
        Ok(o) if o.ok => (0, "pass", o.summary.clone()),
        Ok(o) => (1, "fail", o.summary.clone()),
        Err(e) => {
            let body = serde_json::json!({"error": {"kind": e.kind(), "message": e.message()}});
            eprintln!("{body}");
            (e.exit_code(), "error", e.message())
        }
    };
    let manifest = RunManifest {
        command: std::env::args().collect(),
        inputs: artifacts.inputs,
        outputs: artifacts.outputs,
        status,
        exit_code,
        summary,
        wall_time_ms: start.elapsed().as_millis(),
    };
    let line = serde_json::to_string(&manifest).expect("manifest serializes");
    match &cli.manifest {
        Some(path) => {
            if let Err(e) = std::fs::write(path, format!("{line}\n")) {
                eprintln!("{}", serde_json::json!({"error": {"kind": "Io", "message": e.to_string()}}));
                return ExitCode::from(2);
            }
        }
        None => eprintln!("{line}"),
    }
    ExitCode::from(exit_code as u8)
}
