mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use erglab::json::{canonical, object};
use erglab::Error;
use serde_json::json;

use crate::commands::{Outcome, Status};
use crate::report::{digest, RunReport};

/// Exact finite models of multiple recurrence, removal and density Hales-Jewett.
#[derive(Debug, Parser)]
#[command(name = "erglab", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Seed for every sampling step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Cap on search nodes, sets or candidates.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Print the full run report instead of the results only.
    #[arg(long, global = true)]
    pub json: bool,
    /// Truncation depth for stationary laws, overriding the file.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Largest subspace dimension in the stationarity check.
    #[arg(long = "dim-cap", global = true)]
    pub dim_cap: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Nonconventional ergodic average of functions along the generators.
    Avg {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        functions: PathBuf,
        #[arg(short = 'N')]
        n: usize,
    },
    /// Furstenberg self-joining and its lemma checks.
    Fjoin {
        #[arg(long)]
        system: PathBuf,
        /// Generator indices as a JSON list, default all.
        #[arg(long)]
        e: Option<String>,
    },
    /// Recurrence limit and first return time of a set.
    Recur {
        #[arg(long)]
        system: PathBuf,
        /// Point indices as a JSON list.
        #[arg(long)]
        set: String,
    },
    /// van der Corput inequality for a vector sequence.
    Vdc {
        #[arg(long)]
        seq: PathBuf,
        #[arg(short = 'N')]
        n: usize,
        #[arg(short = 'H')]
        h: usize,
    },
    /// Relative independence of the coordinate factors of a joining.
    Joint {
        #[arg(long)]
        input: PathBuf,
    },
    /// Removal hypotheses, conclusion and counterexample search.
    Removal {
        #[command(subcommand)]
        op: RemovalOp,
    },
    /// Combinatorial lines, extremal sets and the correspondence.
    Dhj {
        #[command(subcommand)]
        op: DhjOp,
    },
    /// Correspondence measure of a subset of a cube.
    Correspond(CorrespondArgs),
    /// Stationarity and line-structure predicates of a law.
    Stationarity(StationarityArgs),
    /// Structural and invariant validation of an input or report file.
    Validate {
        #[arg(long)]
        schema: String,
        file: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum RemovalOp {
    Check {
        #[arg(long)]
        instance: PathBuf,
    },
    Search(SearchArgs),
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// "exhaustive" or "random".
    #[arg(long, default_value = "random")]
    pub mode: String,
    /// Space size (exhaustive) or its maximum (random).
    #[arg(long, default_value_t = 3)]
    pub points: usize,
    #[arg(short = 'd', default_value_t = 3)]
    pub d: usize,
    #[arg(long, default_value = "diagonal,product,fiber,furstenberg")]
    pub kinds: String,
    /// Valid instances to test in random mode.
    #[arg(long, default_value_t = 100)]
    pub count: u64,
}

#[derive(Debug, Subcommand)]
pub enum DhjOp {
    Lines {
        #[arg(short = 'k')]
        k: usize,
        #[arg(short = 'N')]
        n: usize,
    },
    Maxfree {
        #[arg(short = 'k')]
        k: usize,
        #[arg(short = 'N')]
        n: usize,
    },
    Force {
        #[arg(short = 'k')]
        k: usize,
        #[arg(short = 'L')]
        l: usize,
        #[arg(short = 'N')]
        n: usize,
    },
    Correspond(CorrespondArgs),
    Stationarity(StationarityArgs),
}

#[derive(Debug, Args)]
pub struct CorrespondArgs {
    #[arg(short = 'k')]
    pub k: usize,
    #[arg(short = 'N')]
    pub n: usize,
    #[arg(short = 'L', default_value_t = 1)]
    pub l: usize,
    /// Comma-separated words.
    #[arg(long, conflicts_with = "set")]
    pub words: Option<String>,
    /// JSON file with a list of words.
    #[arg(long)]
    pub set: Option<PathBuf>,
    /// Density for the premise check.
    #[arg(long)]
    pub delta: Option<String>,
}

#[derive(Debug, Args)]
pub struct StationarityArgs {
    #[arg(long)]
    pub law: PathBuf,
}

fn run(cli: &Cli) -> erglab::Result<(String, Outcome)> {
    let g = &cli.global;
    Ok(match &cli.command {
        Command::Avg { system, functions, n } => ("avg".into(), commands::avg(system, functions, *n)?),
        Command::Fjoin { system, e } => ("fjoin".into(), commands::fjoin(system, e.as_deref())?),
        Command::Recur { system, set } => ("recur".into(), commands::recur(system, set)?),
        Command::Vdc { seq, n, h } => ("vdc".into(), commands::vdc(seq, *n, *h)?),
        Command::Joint { input } => ("joint".into(), commands::joint(input)?),
        Command::Removal { op } => match op {
            RemovalOp::Check { instance } => ("removal check".into(), commands::removal_check(instance)?),
            RemovalOp::Search(a) => ("removal search".into(), commands::removal_search(a, g)?),
        },
        Command::Dhj { op } => match op {
            DhjOp::Lines { k, n } => ("dhj lines".into(), commands::lines(*k, *n)?),
            DhjOp::Maxfree { k, n } => ("dhj maxfree".into(), commands::maxfree(*k, *n, g)?),
            DhjOp::Force { k, l, n } => ("dhj force".into(), commands::force(*k, *l, *n, g)?),
            DhjOp::Correspond(a) => ("dhj correspond".into(), commands::correspond(a)?),
            DhjOp::Stationarity(a) => ("dhj stationarity".into(), commands::stationarity(a, g)?),
        },
        Command::Correspond(a) => ("correspond".into(), commands::correspond(a)?),
        Command::Stationarity(a) => ("stationarity".into(), commands::stationarity(a, g)?),
        Command::Validate { schema, file } => ("validate".into(), commands::validate(schema, file)?),
    })
}

fn error_json(e: &Error) -> String {
    let body = match e {
        Error::Json { path, message } => json!({"path": path, "message": message}),
        other => json!({"message": other.to_string()}),
    };
    canonical(&object([("error", body)]))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let result = run(&cli);
    eprintln!("wall time: {} ms", start.elapsed().as_millis());
    match result {
        Ok((command, outcome)) => {
            let code = match (outcome.status, outcome.exhaustive) {
                (Status::Violated, _) => 1,
                (Status::Holds, false) => 2,
                (Status::Holds, true) => 0,
            };
            let out = if cli.global.json {
                let report = RunReport {
                    command,
                    digest: digest(&outcome.inputs),
                    results: outcome.results,
                    exhaustive: outcome.exhaustive,
                    seed: cli.global.seed,
                };
                canonical(&report.to_json())
            } else {
                canonical(&outcome.results)
            };
            println!("{out}");
            ExitCode::from(code)
        }
        Err(e) => {
            println!("{}", error_json(&e));
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
