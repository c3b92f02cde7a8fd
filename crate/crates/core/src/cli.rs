//! The `zeroctl` command line.
//!
//! Exit codes: 0 on success, 1 when `analyze` or `verify` reaches a negative
//! verdict, 2 on usage, input or numerical errors. Output is assembled in
//! full before anything is written, so a failing command prints nothing on
//! stdout.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;

use crate::dot::{export_dot, Overlay};
use crate::drivers::{
    build_b_pattern, enumerate_minimal_driver_sets_with_cap, greedy_driver_set,
    minimal_driver_set_with_cap, validate_driver_set, BMode, DEFAULT_EXACT_CAP,
};
use crate::error::{Error, Result};
use crate::graph::{SystemGraph, Vertex};
use crate::io::{parse_pattern_file, PatternFile};
use crate::numeric::{
    deadbeat_steer, monte_carlo_verify, random_unit_vector, sample_realization,
    solution_formula_residual, DEFAULT_EIG_TOL,
};
use crate::pattern::PatternMatrix;
use crate::report::{
    one_based_entries, AnalysisReportDocument, DriverEntry, DriverSection, SteeringSection,
    VerifySection, ZcSection,
};
use crate::scc::SccDecomposition;
use crate::structural::is_generically_zero_controllable;

pub const DEFAULT_SEED: u64 = 20240001;

/// Smallest agreement fraction for `verify` to succeed.
pub const VERIFY_PASS_FRACTION: f64 = 0.95;

#[derive(Debug, Parser)]
#[command(
    name = "zeroctl",
    version,
    about = "Generic zero controllability of structured systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide generic zero controllability from the pattern pair.
    Analyze(AnalyzeArgs),
    /// Pick driver nodes that make the autonomous system zero controllable.
    Select(SelectArgs),
    /// Compare the structural verdict with random numerical realizations.
    Verify(VerifyArgs),
    /// Steer one random realization to the origin.
    Simulate(SimulateArgs),
    /// Render the system digraph in Graphviz DOT.
    ExportDot(ExportDotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BModeArg {
    Shared,
    PerDriver,
}

impl From<BModeArg> for BMode {
    fn from(b: BModeArg) -> Self {
        match b {
            BModeArg::Shared => BMode::Shared,
            BModeArg::PerDriver => BMode::PerDriver,
        }
    }
}

#[derive(Debug, Args)]
struct Input {
    /// Pattern file.
    file: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

/// Driver nodes replacing the input pattern of the file.
#[derive(Debug, Args)]
struct DriverArgs {
    /// Comma-separated state names, e.g. `x4,x8`.
    #[arg(long, value_delimiter = ',')]
    drivers: Option<Vec<String>>,
    #[arg(long, value_enum, default_value = "per-driver")]
    b_mode: BModeArg,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    drivers: DriverArgs,
}

#[derive(Debug, Args)]
struct SelectArgs {
    #[command(flatten)]
    input: Input,
    /// List every minimum driver set.
    #[arg(long)]
    enumerate: bool,
    #[arg(long, default_value_t = 100)]
    limit: usize,
    #[arg(long, value_enum, default_value = "per-driver")]
    b_mode: BModeArg,
    /// Largest number of candidate components solved exactly.
    #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
    exact_cap: usize,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    drivers: DriverArgs,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_EIG_TOL)]
    tol: f64,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    drivers: DriverArgs,
    /// Initial state: comma-separated values or `random` (unit norm).
    #[arg(long, default_value = "random")]
    x0: String,
    /// Steering horizon; defaults to n.
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Debug, Args)]
struct ExportDotArgs {
    /// Pattern file.
    file: PathBuf,
    #[command(flatten)]
    drivers: DriverArgs,
}

struct Output {
    text: String,
    code: i32,
}

fn load(path: &PathBuf, warnings: &mut Vec<String>) -> Result<PatternFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    let file = parse_pattern_file(&text)?;
    warnings.extend(
        file.warnings
            .iter()
            .map(|w| format!("{}: {w}", path.display())),
    );
    Ok(file)
}

fn parse_drivers(names: &[String], n: usize) -> Result<BTreeSet<usize>> {
    names
        .iter()
        .map(|name| match name.trim().parse::<Vertex>() {
            Ok(Vertex::State(i)) if i < n => Ok(i),
            _ => Err(Error::UnknownVertex(name.trim().to_string())),
        })
        .collect()
}

/// Input pattern in effect: the file's `B`, or the one induced by `--drivers`.
fn effective_b(file: &PatternFile, args: &DriverArgs) -> Result<Option<PatternMatrix>> {
    match &args.drivers {
        None => Ok(file.b.clone()),
        Some(names) => {
            let drivers = parse_drivers(names, file.n())?;
            let b = build_b_pattern(file.n(), &drivers, args.b_mode.into())?.pattern;
            Ok(Some(b).filter(|b| b.n_cols() > 0))
        }
    }
}

fn render(doc: &AnalysisReportDocument, format: Format) -> String {
    match format {
        Format::Text => doc.to_text(),
        Format::Json => doc.to_json() + "\n",
    }
}

fn analyze(args: &AnalyzeArgs, warnings: &mut Vec<String>) -> Result<Output> {
    let file = load(&args.input.file, warnings)?;
    let b = effective_b(&file, &args.drivers)?;
    let graph = SystemGraph::build(&file.a, b.as_ref())?;
    let report = is_generically_zero_controllable(&file.a, b.as_ref())?;
    let mut doc = AnalysisReportDocument::new(graph.n_states(), graph.n_inputs());
    doc.analysis = Some(ZcSection::new(&graph, &report));
    Ok(Output {
        text: render(&doc, args.input.format),
        code: if report.verdict { 0 } else { 1 },
    })
}

fn select(args: &SelectArgs, warnings: &mut Vec<String>) -> Result<Output> {
    let file = load(&args.input.file, warnings)?;
    if file.b.is_some() {
        warnings.push("select works on A alone; the input pattern of the file is ignored".into());
    }
    let selected = minimal_driver_set_with_cap(&file.a, args.exact_cap)?;
    let greedy = greedy_driver_set(&file.a)?;
    if args.enumerate && args.limit == 0 {
        return Err(Error::InvalidArgument("--limit must be at least 1".into()));
    }
    let (enumerated, truncated) = if args.enumerate {
        // one extra set tells whether the list was cut short
        let mut sets = enumerate_minimal_driver_sets_with_cap(
            &file.a,
            args.limit.saturating_add(1),
            args.exact_cap,
        )?;
        let truncated = sets.len() > args.limit;
        sets.truncate(args.limit);
        (
            Some(sets.iter().map(DriverEntry::from).collect()),
            truncated,
        )
    } else {
        (None, false)
    };
    let mode: BMode = args.b_mode.into();
    let b = build_b_pattern(file.n(), &selected.drivers, mode)?;

    let mut doc = AnalysisReportDocument::new(file.n(), 0);
    doc.drivers = Some(DriverSection {
        minimum_size: selected.size(),
        minimal: selected.minimal,
        selected: DriverEntry::from(&selected),
        greedy: DriverEntry::from(&greedy),
        enumerated,
        truncated,
        b_mode: mode,
        b_entries: one_based_entries(&b.pattern),
    });
    Ok(Output {
        text: render(&doc, args.input.format),
        code: 0,
    })
}

fn verify(args: &VerifyArgs, warnings: &mut Vec<String>) -> Result<Output> {
    let file = load(&args.input.file, warnings)?;
    let b = effective_b(&file, &args.drivers)?;
    let stats = monte_carlo_verify(&file.a, b.as_ref(), args.trials, args.seed, args.tol, true)?;
    let agreed = stats.zero_controllable_fraction() >= VERIFY_PASS_FRACTION;
    let code = if stats.structural_zero_controllable && agreed {
        0
    } else {
        1
    };
    if !agreed {
        warnings.push(format!(
            "only {}/{} realizations agree with the structural verdict",
            stats.zero_controllable_agree, stats.trials
        ));
    }
    let mut doc = AnalysisReportDocument::new(file.n(), b.as_ref().map_or(0, |b| b.n_cols()));
    doc.verify = Some(VerifySection {
        tol: args.tol,
        stats,
    });
    Ok(Output {
        text: render(&doc, args.input.format),
        code,
    })
}

fn parse_x0(spec: &str, n: usize, seed: u64) -> Result<DVector<f64>> {
    if spec.trim() == "random" {
        return Ok(random_unit_vector(n, seed));
    }
    let values = spec
        .split(',')
        .map(|s| {
            s.trim().parse::<f64>().map_err(|_| {
                Error::InvalidArgument(format!("--x0: '{}' is not a number", s.trim()))
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    if values.len() != n {
        return Err(Error::InvalidArgument(format!(
            "--x0 has {} values, expected {n}",
            values.len()
        )));
    }
    Ok(DVector::from_vec(values))
}

fn simulate(args: &SimulateArgs, warnings: &mut Vec<String>) -> Result<Output> {
    let file = load(&args.input.file, warnings)?;
    let b = effective_b(&file, &args.drivers)?;
    let r = sample_realization(&file.a, b.as_ref(), args.seed)?;
    let x0 = parse_x0(&args.x0, file.n(), args.seed)?;
    let horizon = args.horizon.unwrap_or(file.n());
    let result = deadbeat_steer(&r, &x0, horizon)?;
    let residual = solution_formula_residual(&r, &result.trajectory, &result.controls);
    let mut doc = AnalysisReportDocument::new(r.n(), r.m());
    doc.steering = Some(SteeringSection::new(args.seed, &result, residual));
    Ok(Output {
        text: render(&doc, args.input.format),
        code: 0,
    })
}

fn dot(args: &ExportDotArgs, warnings: &mut Vec<String>) -> Result<Output> {
    let file = load(&args.file, warnings)?;
    let text = match &args.drivers.drivers {
        Some(names) => {
            let drivers = parse_drivers(names, file.n())?;
            let graph = SystemGraph::build(&file.a, None)?;
            let set = validate_driver_set(&file.a, &drivers)?;
            export_dot(
                &graph,
                &SccDecomposition::of(&graph),
                Overlay::Drivers(&set),
            )?
        }
        None => {
            let graph = SystemGraph::build(&file.a, file.b.as_ref())?;
            let report = is_generically_zero_controllable(&file.a, file.b.as_ref())?;
            export_dot(
                &graph,
                &SccDecomposition::of(&graph),
                Overlay::Analysis(&report),
            )?
        }
    };
    Ok(Output { text, code: 0 })
}

/// Runs the command line on `argv` (program name first).
pub fn run_cli<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
                2
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
                0
            };
        }
    };

    let mut warnings = Vec::new();
    let outcome = match &cli.command {
        Command::Analyze(a) => analyze(a, &mut warnings),
        Command::Select(a) => select(a, &mut warnings),
        Command::Verify(a) => verify(a, &mut warnings),
        Command::Simulate(a) => simulate(a, &mut warnings),
        Command::ExportDot(a) => dot(a, &mut warnings),
    };
    for w in &warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    match outcome {
        Ok(out) => {
            if stdout.write_all(out.text.as_bytes()).is_err() {
                return 2;
            }
            out.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}
