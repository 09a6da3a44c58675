//! `dualpair`: command-line front end for the Sutherland / rational
//! Ruijsenaars--Schneider duality toolkit.
//!
//! Subcommands: `transform` (apply the registered composition of maps
//! between phase-space models), `evolve` (integrate a commuting flow and
//! write a CSV trajectory), `verify` (run randomized identity suites),
//! `scan` (tabulate an observable over an action-gap grid), and `inspect`
//! (print invariant diagnostics for a stored point).
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 numerical failure.  Set `DUALPAIR_LOG=info` (or `debug`) for progress
//! logging on stderr.

mod canon;
mod commands;
mod doc;
mod graph;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use doc::CliError;

#[derive(Parser)]
#[command(
    name = "dualpair",
    version,
    about = "Trigonometric Sutherland / rational Ruijsenaars-Schneider duality toolkit",
    propagate_version = true
)]
struct Cli {
    /// Worker threads for batch verification (1 keeps log order stable).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Map a stored point to another phase-space model.
    Transform {
        /// Input point document (JSON).
        #[arg(long = "in")]
        input: PathBuf,
        /// Target model tag (P, Phat, PhatC, CM-I, CM-II, P1-I, P1-II,
        /// P2-I, P2-II, Level).
        #[arg(long)]
        to: String,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate a commuting flow and write the trajectory as CSV.
    Evolve {
        /// Input point document (model P for family h; Phat or PhatC for
        /// family hhat).
        #[arg(long = "in")]
        input: PathBuf,
        /// Flow family: 'h' (momentum-leg invariants) or 'hhat'
        /// (group-leg invariants).
        #[arg(long)]
        family: String,
        /// Flow label: 1..=n for 'h', nonzero with |k| <= n for 'hhat'.
        #[arg(short, long, allow_hyphen_values = true)]
        k: i64,
        /// Total flow time.
        #[arg(short, long, allow_hyphen_values = true)]
        t: f64,
        /// Number of equally spaced samples (including both endpoints).
        #[arg(long, default_value_t = 11)]
        samples: usize,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a verification suite and report per-check residuals.
    Verify {
        /// Suite name, or 'all' for the full default suite.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Base seed for the deterministic sample streams.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override every check's tolerance with a uniform bound.
        #[arg(long)]
        tol: Option<f64>,
        /// Optional JSON report path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate an observable over a grid of action gaps (CSV output).
    Scan {
        /// Coupling as 'n,x'.
        #[arg(long)]
        coupling: String,
        /// Gap grid as 'start,stop,count'; rows violating the chamber
        /// condition are skipped.
        #[arg(long)]
        grid: String,
        /// Observable: hrs, h<k>, hhat<±k>, mingap, or absz<j>.
        #[arg(long)]
        observable: String,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Print invariant diagnostics for a stored point.
    Inspect {
        /// Input point document (JSON).
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    if cli.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    if cli.jobs > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot size worker pool: {e}")))?;
    }
    match &cli.command {
        Command::Transform { input, to, out } => {
            commands::cmd_transform(input, to, out.as_ref())
        }
        Command::Evolve {
            input,
            family,
            k,
            t,
            samples,
            out,
        } => commands::cmd_evolve(input, family, *k, *t, *samples, out),
        Command::Verify {
            suite,
            seed,
            tol,
            out,
        } => commands::cmd_verify(suite, *seed, *tol, out.as_ref()),
        Command::Scan {
            coupling,
            grid,
            observable,
            out,
        } => commands::cmd_scan(coupling, grid, observable, out),
        Command::Inspect { input } => commands::cmd_inspect(input),
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("DUALPAIR_LOG")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
