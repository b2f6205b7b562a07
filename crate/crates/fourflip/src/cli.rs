//! Command-line front end.
//!
//! Exit codes: `0` when a feasible solution was found (or the batch and
//! generator completed), `2` when `solve` found no feasible solution, `1`
//! on any input or I/O error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use fourflip_core::neighbor::DEFAULT_ALPHA;

use crate::batch::{parse_manifest, run_batch};
use crate::formats::{write_native_bip, write_solution, Format};
use crate::gen::{generate, CostRange, GenConfig, GenKind};
use crate::report::{summarize, summary_table, SolveReport};
use crate::solve::{solve, SolveOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "fourflip", version, about = "4-flip weighting local search for 0-1 covering, partitioning and mixed programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance.
    Solve(SolveArgs),
    /// Solve every instance listed in a manifest.
    Batch(BatchArgs),
    /// Write a random instance in the native format.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub format: Format,
    /// Search time in seconds, counted from the end of parsing.
    #[arg(long, default_value_t = 60.0)]
    pub time_limit: f64,
    /// Neighbor-list size factor.
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Best known objective, used for the relative gap.
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long)]
    pub solution: Option<PathBuf>,
    /// Key=value report.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Same report as JSON.
    #[arg(long)]
    pub report_json: Option<PathBuf>,
    /// Compare against exhaustive enumeration (tiny instances only).
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    /// Lines of `path, format, kind, time-limit, target`.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Concurrent solves.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Directory for per-instance reports and solutions.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Summary table destination; stdout when absent.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub rows: usize,
    #[arg(long)]
    pub cols: usize,
    #[arg(long)]
    pub density: f64,
    /// Inclusive integer cost range `lo,hi`.
    #[arg(long, default_value = "1,100")]
    pub costs: CostRange,
    #[arg(long, value_enum, default_value_t = GenKind::Cover)]
    pub kind: GenKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Runs a parsed command and returns the process exit code. Diagnostics go
/// to stderr, reports to stdout unless redirected to files.
pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Solve(a) => run_solve(&a),
        Command::Batch(a) => run_batch_cmd(&a),
        Command::Gen(a) => run_gen(&a),
    }
}

fn write_file(path: &Path, body: &str) -> Result<(), String> {
    fs::write(path, body).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn name_of(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn solve_inner(a: &SolveArgs) -> Result<SolveReport, String> {
    let text = fs::read(&a.input).map_err(|e| format!("cannot read {}: {e}", a.input.display()))?;
    let inst = a.format.parse(&text).map_err(|e| format!("{}: {e}", a.input.display()))?;
    drop(text);
    let opts = SolveOptions {
        time_limit_secs: a.time_limit,
        alpha: a.alpha,
        target: a.target,
        verify: a.verify,
    };
    let result = solve(&inst, &name_of(&a.input), a.format.name(), &opts, &mut ()).map_err(|e| e.to_string())?;
    if let (Some(path), Some(best)) = (&a.solution, &result.best) {
        write_file(path, &write_solution(best.objective, &best.members))?;
    }
    let kv = result.report.to_key_value();
    match &a.report {
        Some(path) => write_file(path, &kv)?,
        None => print!("{kv}"),
    }
    if let Some(path) = &a.report_json {
        write_file(path, &result.report.to_json())?;
    }
    Ok(result.report)
}

fn run_solve(a: &SolveArgs) -> i32 {
    match solve_inner(a) {
        Ok(r) if r.feasible => EXIT_OK,
        Ok(_) => {
            eprintln!("no feasible solution found");
            EXIT_INFEASIBLE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn run_batch_cmd(a: &BatchArgs) -> i32 {
    let text = match fs::read_to_string(&a.manifest) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", a.manifest.display());
            return EXIT_ERROR;
        }
    };
    if let Some(dir) = &a.out_dir {
        if let Err(e) = fs::create_dir_all(dir) {
            eprintln!("error: cannot create {}: {e}", dir.display());
            return EXIT_ERROR;
        }
    }
    let base = a.manifest.parent().unwrap_or(Path::new("."));
    let (entries, mut errors) = parse_manifest(&text, base);
    let mut reports = Vec::new();
    for r in run_batch(&entries, a.jobs, a.alpha, a.out_dir.as_deref()) {
        match r {
            Ok(rep) => reports.push(rep),
            Err(e) => errors.push(e),
        }
    }
    errors.sort_by_key(|e| e.line);
    let messages: Vec<String> = errors.iter().map(ToString::to_string).collect();
    for m in &messages {
        eprintln!("error: {m}");
    }
    let table = summary_table(&summarize(&reports), &messages);
    match &a.summary {
        Some(path) => {
            if let Err(e) = write_file(path, &table) {
                eprintln!("error: {e}");
                return EXIT_ERROR;
            }
        }
        None => print!("{table}"),
    }
    EXIT_OK
}

fn run_gen(a: &GenArgs) -> i32 {
    let cfg = GenConfig {
        rows: a.rows,
        cols: a.cols,
        density: a.density,
        costs: a.costs,
        kind: a.kind,
        seed: a.seed,
    };
    let inst = match generate(&cfg) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    let text = write_native_bip(&inst);
    match &a.output {
        Some(path) => match write_file(path, &text) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_ERROR
            }
        },
        None => {
            print!("{text}");
            EXIT_OK
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_solve_flags() {
        let cli = Cli::try_parse_from([
            "fourflip", "solve", "--input", "a.txt", "--format", "scp-col", "--time-limit", "5", "--target", "174",
        ])
        .unwrap();
        match cli.command {
            Command::Solve(a) => {
                assert_eq!(a.format, Format::ScpCol);
                assert_eq!(a.time_limit, 5.0);
                assert_eq!(a.alpha, 5.0);
                assert_eq!(a.target, Some(174.0));
                assert!(!a.verify);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_format() {
        assert!(Cli::try_parse_from(["fourflip", "solve", "--input", "a", "--format", "mps"]).is_err());
    }

    #[test]
    fn parses_gen_flags() {
        let cli = Cli::try_parse_from([
            "fourflip", "gen", "--rows", "5", "--cols", "9", "--density", "0.3", "--costs", "1,20", "--kind", "mixed",
        ])
        .unwrap();
        match cli.command {
            Command::Gen(a) => {
                assert_eq!(a.costs, CostRange { lo: 1, hi: 20 });
                assert_eq!(a.kind, GenKind::Mixed);
            }
            other => panic!("{other:?}"),
        }
    }
}
