//! Command-line front end: every analysis writes one JSON report.

mod commands;
mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "qexpander", version, about = "Classical and quantum expander analyses")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Seed for every randomised step.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Tolerance for reported pass/fail comparisons.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Random restarts per rank in the edge-expansion search.
    #[arg(long, global = true, default_value_t = 200)]
    pub budget: usize,
    /// Report destination; `-` writes to standard output.
    #[arg(long, global = true, default_value = "-")]
    pub out: String,
    /// Also write the spectra table of the report as CSV.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simple undirected graphs (edge-list files).
    Graph {
        #[command(subcommand)]
        action: GraphAction,
    },
    /// Finite groups (cycle generators or multiplication tables).
    Group {
        #[command(subcommand)]
        action: GroupAction,
    },
    /// Quantum channels (Kraus JSON files).
    Channel {
        #[command(subcommand)]
        action: ChannelAction,
    },
    /// Per-irrep channels against the normalised Cayley gap.
    Harrow {
        group: PathBuf,
        /// `transpositions`, `all`, or `;`-separated cycles / element indices.
        #[arg(long)]
        set: String,
        /// Add the inverse of every listed element.
        #[arg(long)]
        symmetrize: bool,
    },
    /// Channels of the matched pair given by an exact factorization `H = ΓG`.
    Bicrossed {
        ambient: PathBuf,
        /// Generators of Γ.
        gamma: String,
        /// Generators of G.
        g: String,
        /// An element of Γ whose β-orbit is used; defaults to a largest orbit.
        #[arg(long)]
        orbit: Option<String>,
        /// `tr` or `diag:w1,w2,…`.
        #[arg(long, default_value = "tr")]
        state: String,
    },
    /// Quantum Cayley graph over the dual of a finite group.
    DualCayley {
        group: PathBuf,
        /// Comma-separated irrep indices, as listed by `group irreps`.
        #[arg(long)]
        irreps: String,
    },
    /// Schreier graph of a subgroup, classical or over the dual.
    Schreier {
        group: PathBuf,
        /// Generators of the subgroup (`trivial` for {e}).
        #[arg(long)]
        subgroup: String,
        /// Generating set for the classical graph.
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        symmetrize: bool,
        /// Restrict the dual quantum Cayley graph instead.
        #[arg(long)]
        dual: bool,
        /// Irrep indices for `--dual`.
        #[arg(long)]
        irreps: Option<String>,
        /// Also analyse the simple graph underlying the coset graph.
        #[arg(long)]
        simple: bool,
    },
    /// Spectral-gap and expansion bounds from a Kazhdan constant.
    Certify {
        #[arg(long)]
        eps: f64,
        #[arg(long = "dimHE")]
        dim_he: usize,
        #[arg(long)]
        lambda_min: Option<f64>,
        /// Channel to check against the bounds.
        #[arg(long)]
        channel: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum GraphAction {
    Analyze { file: PathBuf },
    Lift { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum GroupAction {
    Irreps { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum ChannelAction {
    Analyze { file: PathBuf },
}

/// Outcome of a command: the result object, whether every asserted check
/// passed, and an optional CSV table.
pub struct Outcome {
    pub result: Value,
    pub passed: bool,
    pub csv: Option<String>,
}

fn dispatch(cli: &Cli) -> Result<Outcome, String> {
    let g = &cli.global;
    match &cli.command {
        Command::Graph { action: GraphAction::Analyze { file } } => commands::graph_analyze(g, file),
        Command::Graph { action: GraphAction::Lift { file } } => commands::graph_lift(g, file),
        Command::Group { action: GroupAction::Irreps { file } } => commands::group_irreps(g, file),
        Command::Channel { action: ChannelAction::Analyze { file } } => commands::channel_analyze(g, file),
        Command::Harrow { group, set, symmetrize } => commands::harrow(g, group, set, *symmetrize),
        Command::Bicrossed { ambient, gamma, g: gpart, orbit, state } => {
            commands::bicrossed(g, ambient, gamma, gpart, orbit.as_deref(), state)
        }
        Command::DualCayley { group, irreps } => commands::dual_cayley(g, group, irreps),
        Command::Schreier { group, subgroup, set, symmetrize, dual, irreps, simple } => commands::schreier(
            g,
            commands::SchreierArgs {
                group,
                subgroup,
                set: set.as_deref(),
                symmetrize: *symmetrize,
                dual: *dual,
                irreps: irreps.as_deref(),
                simple: *simple,
            },
        ),
        Command::Certify { eps, dim_he, lambda_min, channel } => {
            commands::certify(g, *eps, *dim_he, *lambda_min, channel.as_deref())
        }
    }
}

fn write_text(dest: &str, text: &str) -> std::io::Result<()> {
    if dest == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(text.as_bytes())?;
        stdout.flush()
    } else {
        std::fs::write(dest, text)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = match dispatch(&cli) {
        Ok(o) => o,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let report = json!({
        "command": argv,
        "seed": cli.global.seed,
        "tol": cli.global.tol,
        "budget": cli.global.budget,
        "passed": outcome.passed,
        "result": outcome.result,
        "wall_time_seconds": start.elapsed().as_secs_f64(),
    });
    let text = serde_json::to_string_pretty(&report).expect("report serialises") + "\n";
    if let Err(e) = write_text(&cli.global.out, &text) {
        eprintln!("error: cannot write report to {}: {e}", cli.global.out);
        return ExitCode::from(2);
    }
    if let (Some(path), Some(csv)) = (&cli.global.csv, &outcome.csv) {
        if let Err(e) = std::fs::write(path, csv) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
