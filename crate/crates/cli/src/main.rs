//! `mfd`: minimum flow decomposition from the command line.
//!
//! Exit codes: 0 success, 1 error, 2 infeasible (with `--fail-on-infeasible`)
//! or verification failures, 3 MILP backend unavailable.

mod bench;
mod decompose;
mod gen;
mod input;
mod record;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mfd::search::Strategy;
use mfd::Formulation;

#[derive(Parser, Debug)]
#[command(name = "mfd", version, about = "Exact minimum flow decomposition on graphs with cycles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Find a minimum decomposition of every instance in a graph file.
    Decompose(DecomposeArgs),
    /// Check decompositions in a result JSON against a graph file.
    Verify(VerifyArgs),
    /// Generate random instances with known decompositions.
    Gen(GenArgs),
    /// Decompose a directory of instances and summarize per k bucket.
    Bench(BenchArgs),
}

/// Options shared by the solving commands.
#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    #[arg(long, default_value = "doubling", value_parser = parse_strategy)]
    pub strategy: Strategy,
    /// Wall-clock limit per probed k, in seconds.
    #[arg(long, default_value_t = 60.0)]
    pub timeout: f64,
    /// Wall-clock limit per instance and variant, in seconds.
    #[arg(long, default_value_t = 600.0)]
    pub total_timeout: f64,
    /// Solver seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for independent instances.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    /// Graph file with one or more instances.
    pub input: PathBuf,
    #[arg(long, value_parser = parse_formulation)]
    pub variant: Formulation,
    /// Solve with exactly this many elements instead of minimizing.
    #[arg(long)]
    pub exactly_k: Option<usize>,
    /// Write the result JSON here instead of standard output.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Exit with 2 when some instance has no decomposition.
    #[arg(long)]
    pub fail_on_infeasible: bool,
    #[command(flatten)]
    pub solve: SolveArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub graph: PathBuf,
    /// Result JSON from `decompose` or `gen`.
    pub json: PathBuf,
    /// Variant to check against; defaults to each record's own.
    #[arg(long, value_parser = parse_formulation)]
    pub variant: Option<Formulation>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long)]
    pub nodes: usize,
    #[arg(long)]
    pub elements: usize,
    #[arg(long, value_parser = parse_formulation)]
    pub variant: Formulation,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Graph file to write; the generating decompositions go to `<out>.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Directory of `*.graph` files.
    pub dir: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "pc,trail-cg,trail-reach,walk", value_parser = parse_formulation)]
    pub variants: Vec<Formulation>,
    /// k ranges for the summary rows, like `4-10` or `21+`.
    #[arg(long, value_delimiter = ',', default_value = "1-3,4-10,11-15,16-20,21+")]
    pub buckets: Vec<String>,
    /// Summary CSV path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-instance CSV path.
    #[arg(long)]
    pub records: Option<PathBuf>,
    #[command(flatten)]
    pub solve: SolveArgs,
}

fn parse_formulation(s: &str) -> Result<Formulation, String> {
    s.parse()
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse()
}

pub const EXIT_ERROR: u8 = 1;
pub const EXIT_INFEASIBLE: u8 = 2;
pub const EXIT_BACKEND: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Decompose(args) => decompose::run(&args),
        Command::Verify(args) => verify::run(&args),
        Command::Gen(args) => gen::run(&args),
        Command::Bench(args) => bench::run(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
