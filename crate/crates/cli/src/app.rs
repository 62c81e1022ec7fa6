//! Subcommands and exit codes.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use lcplan_core::encode::{build, EncodeError, EncodeOptions, Persistence};
use lcplan_core::fstrips::{boolean_transform, FstripsTask};
use lcplan_core::pddl::{parse_domain, parse_problem, typecheck, TypedTask};
use lcplan_core::reach::functional_transform;
use lcplan_core::search::{solve, Mode, Outcome, SearchError, SearchOptions, Verdict};
use lcplan_core::validate::{bfs_oracle, validate, FailureCause, OracleResult};

use crate::plan_file::{format_plan, parse_plan};
use crate::stats::Stats;
use crate::watchdog::{peak_bytes, WallClock};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

/// Budget of the right-uniqueness checks, in expanded h^m nodes.
const HM_FUEL: usize = 1_000_000;

#[derive(Debug, Parser)]
#[command(name = "lcplan", version, about = "Lifted causal constraint planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Search for a plan.
    Plan(PlanArgs),
    /// Check a plan file against a task.
    Validate { domain: PathBuf, problem: PathBuf, plan: PathBuf },
    /// Optimal plan by breadth-first search over ground states.
    Oracle {
        domain: PathBuf,
        problem: PathBuf,
        #[arg(long)]
        max_horizon: Option<usize>,
        #[arg(long, default_value_t = 5_000_000)]
        max_states: usize,
    },
    /// Print the constraint model for one horizon.
    DumpModel {
        domain: PathBuf,
        problem: PathBuf,
        #[arg(long)]
        horizon: usize,
        #[command(flatten)]
        encoding: EncodingArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Optimal,
    Satisficing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TransformArg {
    Simple,
    Fn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PersistenceArg {
    Eager,
    Propagator,
}

#[derive(Debug, Args)]
struct EncodingArgs {
    #[arg(long, value_enum, default_value = "fn")]
    transform: TransformArg,
    #[arg(long, value_enum, default_value = "propagator")]
    persistence: PersistenceArg,
    /// Order of the reachability heuristic used to prove mappings.
    #[arg(long, default_value_t = 2)]
    hm_m: usize,
}

#[derive(Debug, Args)]
struct PlanArgs {
    domain: PathBuf,
    problem: PathBuf,
    #[arg(long, value_enum, default_value = "optimal")]
    mode: ModeArg,
    #[command(flatten)]
    encoding: EncodingArgs,
    /// Seconds.
    #[arg(long, default_value_t = 1800.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..))]
    window: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write search statistics as JSON.
    #[arg(long)]
    stats: Option<PathBuf>,
    #[arg(long)]
    max_horizon: Option<usize>,
    /// Megabytes of live heap before the search gives up.
    #[arg(long, default_value_t = 8192)]
    memory_limit: usize,
    /// Write the plan here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write the model of the last horizon tried.
    #[arg(long)]
    dump_model: Option<PathBuf>,
    #[arg(short, long)]
    verbose: bool,
}

/// A failure that ends the command with a message and exit code.
#[derive(Debug, thiserror::Error)]
#[error("{message}")]
struct Fail {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl Into<String>) -> Fail {
    Fail { code, message: message.into() }
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| fail(EXIT_ERROR, format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Fail> {
    fs::write(path, text).map_err(|e| fail(EXIT_ERROR, format!("{}: {e}", path.display())))
}

fn load(domain: &Path, problem: &Path) -> Result<TypedTask, Fail> {
    let d = parse_domain(&read(domain)?).map_err(|e| fail(EXIT_ERROR, format!("{}:{e}", domain.display())))?;
    let p = parse_problem(&read(problem)?, &d).map_err(|e| fail(EXIT_ERROR, format!("{}:{e}", problem.display())))?;
    typecheck(&d, &p).map_err(|e| fail(EXIT_ERROR, format!("{}: {e}", problem.display())))
}

fn translate(typed: &TypedTask, enc: &EncodingArgs, verbose: bool, err: &mut dyn Write) -> FstripsTask {
    match enc.transform {
        TransformArg::Simple => boolean_transform(typed),
        TransformArg::Fn => {
            let (t, report) = functional_transform(typed, enc.hm_m, HM_FUEL);
            if verbose {
                let _ = write!(err, "{report}");
            }
            t
        }
    }
}

fn encode_options(enc: &EncodingArgs) -> EncodeOptions {
    let persistence = match enc.persistence {
        PersistenceArg::Eager => Persistence::Eager,
        PersistenceArg::Propagator => Persistence::Propagator,
    };
    EncodeOptions { persistence, ..EncodeOptions::default() }
}

fn name_of<T: ValueEnum>(v: T) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return code;
        }
    };
    let r = match cli.command {
        Command::Plan(a) => plan(&a, out, err),
        Command::Validate { domain, problem, plan } => validate_cmd(&domain, &problem, &plan, out),
        Command::Oracle { domain, problem, max_horizon, max_states } => {
            oracle(&domain, &problem, max_horizon, max_states, out)
        }
        Command::DumpModel { domain, problem, horizon, encoding, output } => {
            dump_model(&domain, &problem, horizon, &encoding, output.as_deref(), out, err)
        }
    };
    match r {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "{}", f.message);
            f.code
        }
    }
}

fn plan(a: &PlanArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Fail> {
    let clock = WallClock::new(Some(a.memory_limit.saturating_mul(1 << 20)));
    let typed = load(&a.domain, &a.problem)?;
    let task = translate(&typed, &a.encoding, a.verbose, err);
    let mode = match a.mode {
        ModeArg::Optimal => Mode::Optimal,
        ModeArg::Satisficing => Mode::Satisficing,
    };
    let mut opts = SearchOptions {
        encode: encode_options(&a.encoding),
        time_limit: a.time_limit,
        window: a.window as usize,
        max_horizon: a.max_horizon,
        ..SearchOptions::default()
    };
    opts.solver.seed = a.seed;

    let report = match solve(&task, &opts, &clock, mode) {
        Ok(r) => r,
        Err(SearchError::Encode(e @ EncodeError::Capacity(_))) => return Err(fail(EXIT_LIMIT, format!("limit: {e}"))),
        Err(e) => return Err(fail(EXIT_ERROR, format!("{e}"))),
    };
    if a.verbose {
        for it in &report.iterations {
            let v = match it.verdict {
                Verdict::Sat(z) => format!("optimal {z}"),
                Verdict::Feasible(z) => format!("feasible {z}"),
                Verdict::Unsat => "unsat".into(),
                Verdict::Unknown => "unknown".into(),
                Verdict::Skipped => "skipped".into(),
            };
            let _ = writeln!(
                err,
                "k={} {v} lb={} conflicts={} vars={} {:.3}s",
                it.horizon,
                it.lower,
                it.conflicts,
                it.model.int_vars + it.model.bool_vars,
                it.seconds
            );
        }
        let _ = writeln!(err, "peak heap {} MB", peak_bytes() >> 20);
    }
    if let Some(path) = &a.stats {
        let s = Stats::new(
            &report,
            &name_of(a.mode),
            &name_of(a.encoding.transform),
            &name_of(a.encoding.persistence),
            clock_seconds(&clock),
        );
        write_file(path, &s.to_json())?;
    }
    if let (Some(path), Some(last)) = (&a.dump_model, report.iterations.last()) {
        let cm = build(&task, last.horizon, opts.encode).map_err(|e| fail(EXIT_LIMIT, format!("limit: {e}")))?;
        write_file(path, &cm.dump())?;
    }

    let emit = |text: String, out: &mut dyn Write| -> Result<(), Fail> {
        match &a.output {
            Some(p) => write_file(p, &text),
            None => out.write_all(text.as_bytes()).map_err(|e| fail(EXIT_ERROR, e.to_string())),
        }
    };
    match &report.outcome {
        Outcome::OptimalPlan { plan, .. } => {
            emit(format_plan(&task, plan), out)?;
            Ok(EXIT_OK)
        }
        Outcome::FeasiblePlan { plan, lower, .. } => {
            emit(format_plan(&task, plan) + &format!("; lower bound = {lower}\n"), out)?;
            Ok(EXIT_OK)
        }
        Outcome::ProvedInfeasibleUpTo { horizon } => {
            let _ = writeln!(err, "no plan with at most {horizon} steps");
            Ok(EXIT_INFEASIBLE)
        }
        Outcome::Unknown { lower } => {
            let why = if clock.memory_exceeded() { "memory limit" } else { "time limit" };
            let _ = writeln!(err, "{why} reached without a plan; every plan has at least {lower} steps");
            Ok(EXIT_LIMIT)
        }
    }
}

fn clock_seconds(c: &WallClock) -> f64 {
    use lcplan_core::search::Clock;
    c.elapsed()
}

fn validate_cmd(domain: &Path, problem: &Path, plan_path: &Path, out: &mut dyn Write) -> Result<i32, Fail> {
    let typed = load(domain, problem)?;
    let task = boolean_transform(&typed);
    let text = read(plan_path)?;
    let pf = parse_plan(&task, &text).map_err(|e| fail(EXIT_ERROR, format!("{}:{e}", plan_path.display())))?;
    match validate(&task, &pf.plan) {
        Ok(()) => {
            let _ = writeln!(out, "plan valid, cost {}", pf.plan.cost());
            Ok(EXIT_OK)
        }
        Err(f) if f.cause == FailureCause::Goal => Err(fail(
            EXIT_ERROR,
            format!("{}: goal not satisfied after {} steps", plan_path.display(), f.step),
        )),
        Err(f) => Err(fail(
            EXIT_ERROR,
            format!(
                "{}:{}: step {} {}: {}",
                plan_path.display(),
                pf.lines[f.step],
                f.step + 1,
                task.format_action(&pf.plan.steps[f.step]),
                f.cause
            ),
        )),
    }
}

fn oracle(
    domain: &Path,
    problem: &Path,
    max_horizon: Option<usize>,
    max_states: usize,
    out: &mut dyn Write,
) -> Result<i32, Fail> {
    let task = boolean_transform(&load(domain, problem)?);
    match bfs_oracle(&task, max_horizon.unwrap_or(usize::MAX), max_states) {
        OracleResult::Plan(p) => {
            let _ = write!(out, "{}", format_plan(&task, &p));
            Ok(EXIT_OK)
        }
        OracleResult::Unreachable { states } => {
            Err(fail(EXIT_INFEASIBLE, format!("goal unreachable ({states} reachable states)")))
        }
        OracleResult::NoPlanWithin { horizon } => {
            Err(fail(EXIT_INFEASIBLE, format!("no plan with at most {horizon} steps")))
        }
        OracleResult::StateBudget { states } => Err(fail(EXIT_LIMIT, format!("limit: more than {states} states"))),
    }
}

fn dump_model(
    domain: &Path,
    problem: &Path,
    horizon: usize,
    enc: &EncodingArgs,
    output: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Fail> {
    let typed = load(domain, problem)?;
    let task = translate(&typed, enc, false, err);
    let cm = build(&task, horizon, encode_options(enc)).map_err(|e| fail(EXIT_LIMIT, format!("limit: {e}")))?;
    let text = cm.dump();
    match output {
        Some(p) => write_file(p, &text)?,
        None => out.write_all(text.as_bytes()).map_err(|e| fail(EXIT_ERROR, e.to_string()))?,
    }
    Ok(EXIT_OK)
}
