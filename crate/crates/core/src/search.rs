//! Planning as satisfiability over growing horizons.

use alloc::vec::Vec;

use crate::cp::{minimize, luby, Budget, MinimizeStatus, SolveResult, SolverConfig, Terminator};
use crate::encode::{build, EncodeError, EncodeOptions, ModelStats, PersistenceStats};
use crate::fstrips::{FstripsTask, Plan};
use crate::validate::{validate, ValidationFailure};

/// Time source supplied by the caller; the core has no clock of its own.
pub trait Clock {
    /// Seconds since the search started.
    fn elapsed(&self) -> f64;
    /// External stop request, e.g. a memory watchdog.
    fn interrupted(&self) -> bool {
        false
    }
}

/// A clock that never advances; searches run to completion.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn elapsed(&self) -> f64 {
        0.0
    }
}

struct Deadline<'a> {
    clock: &'a dyn Clock,
    at: f64,
}

impl Terminator for Deadline<'_> {
    fn should_stop(&mut self) -> bool {
        self.clock.interrupted() || self.clock.elapsed() >= self.at
    }
}

/// How the horizon grows between iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Increments {
    /// `k_i - k_{i-1} = scale * luby(i - 1)`
    Luby { scale: usize },
    /// `k_i - k_{i-1} = 1`
    Unit,
}

/// Horizons `k_1 < k_2 < ...`.
#[derive(Debug, Clone)]
pub struct Schedule {
    next: usize,
    step: u64,
    increments: Increments,
}

impl Schedule {
    pub fn new(first: usize, increments: Increments) -> Self {
        Schedule { next: first, step: 0, increments }
    }

    /// `max(goal count, 1)` when the goal does not hold initially, else 0.
    pub fn first_horizon(task: &FstripsTask) -> usize {
        match task.goal_count(&task.init) {
            0 => 0,
            g => g,
        }
    }
}

impl Iterator for Schedule {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        let k = self.next;
        self.step += 1;
        let inc = match self.increments {
            Increments::Luby { scale } => scale * luby(self.step) as usize,
            Increments::Unit => 1,
        };
        self.next = k.checked_add(inc)?;
        Some(k)
    }
}

/// Time granted to the CSP at horizon `k` given `remaining` seconds, the
/// largest horizon `lb` proven infeasible and window `w`:
/// `min(r, r * (k - lb) / w)`. Zero means skip `k`.
pub fn satisficing_budget(remaining: f64, k: usize, lb: usize, w: usize) -> f64 {
    assert!(w >= 1, "window must be positive");
    if k <= lb || remaining <= 0.0 {
        return 0.0;
    }
    let share = remaining * (k - lb) as f64 / w as f64;
    share.min(remaining)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Optimal,
    Satisficing,
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub encode: EncodeOptions,
    pub solver: SolverConfig,
    /// Seconds.
    pub time_limit: f64,
    /// Sliding window of the satisficing budget.
    pub window: usize,
    /// Largest horizon tried; reaching it unsolved proves infeasibility.
    pub max_horizon: Option<usize>,
    /// Overrides the default first horizon.
    pub first_horizon: Option<usize>,
    /// Overrides Luby (optimal) or 5 x Luby (satisficing).
    pub increments: Option<Increments>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            encode: EncodeOptions::default(),
            solver: SolverConfig::default(),
            time_limit: 1800.0,
            window: 50,
            max_horizon: None,
            first_horizon: None,
            increments: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Solution with this many enabled slots; optimal in optimal mode.
    Sat(usize),
    /// Feasible, optimality not proven within the budget.
    Feasible(usize),
    Unsat,
    Unknown,
    /// Budget was zero.
    Skipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Iteration {
    pub horizon: usize,
    /// Seconds granted; `None` for all remaining time.
    pub budget: Option<f64>,
    pub verdict: Verdict,
    /// Proven `c* >= lower` after this iteration.
    pub lower: usize,
    pub upper: Option<usize>,
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub model: ModelStats,
    pub persistence: PersistenceStats,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// `c* = cost`.
    OptimalPlan { plan: Plan, cost: usize },
    FeasiblePlan { plan: Plan, upper: usize, lower: usize },
    /// No plan with at most `horizon` steps.
    ProvedInfeasibleUpTo { horizon: usize },
    /// Limits hit; `c* >= lower`.
    Unknown { lower: usize },
}

#[derive(Debug, Clone)]
pub struct SearchReport {
    pub outcome: Outcome,
    pub iterations: Vec<Iteration>,
}

impl SearchReport {
    pub fn horizons(&self) -> Vec<usize> {
        self.iterations.iter().map(|i| i.horizon).collect()
    }

    /// Lower bounds after each iteration.
    pub fn lower_bounds(&self) -> Vec<usize> {
        self.iterations.iter().map(|i| i.lower).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    /// A decoded plan failed validation: an encoder or solver bug.
    #[error("internal error: extracted plan is invalid at {0}")]
    InvalidPlan(ValidationFailure),
}

pub fn solve_optimal(task: &FstripsTask, opts: &SearchOptions, clock: &dyn Clock) -> Result<SearchReport, SearchError> {
    run(task, opts, clock, Mode::Optimal)
}

pub fn solve_satisficing(
    task: &FstripsTask,
    opts: &SearchOptions,
    clock: &dyn Clock,
) -> Result<SearchReport, SearchError> {
    run(task, opts, clock, Mode::Satisficing)
}

pub fn solve(task: &FstripsTask, opts: &SearchOptions, clock: &dyn Clock, mode: Mode) -> Result<SearchReport, SearchError> {
    run(task, opts, clock, mode)
}

fn run(task: &FstripsTask, opts: &SearchOptions, clock: &dyn Clock, mode: Mode) -> Result<SearchReport, SearchError> {
    let increments = opts.increments.unwrap_or(match mode {
        Mode::Optimal => Increments::Luby { scale: 1 },
        Mode::Satisficing => Increments::Luby { scale: 5 },
    });
    let first = opts.first_horizon.unwrap_or_else(|| Schedule::first_horizon(task));
    let mut iterations = Vec::new();
    // largest horizon proven infeasible, if any
    let mut infeasible: Option<usize> = None;
    let lower_of = |inf: Option<usize>| inf.map_or(0, |k| k + 1);
    let mut best: Option<(Plan, usize)> = None;
    let start = clock.elapsed();

    let schedule = Schedule::new(first, increments);
    let mut at_cap = false;
    for mut k in schedule {
        if let Some(cap) = opts.max_horizon {
            if k >= cap {
                k = cap;
                at_cap = true;
            }
        }
        if infeasible.is_some_and(|lb| k <= lb) {
            if at_cap {
                break;
            }
            continue;
        }
        let now = clock.elapsed();
        let remaining = opts.time_limit - (now - start);
        if remaining <= 0.0 || clock.interrupted() {
            break;
        }
        let budget = match mode {
            Mode::Optimal => None,
            Mode::Satisficing => Some(satisficing_budget(remaining, k, infeasible.unwrap_or(0), opts.window)),
        };
        let mut it = Iteration {
            horizon: k,
            budget,
            verdict: Verdict::Skipped,
            lower: lower_of(infeasible),
            upper: best.as_ref().map(|b| b.1),
            conflicts: 0,
            decisions: 0,
            propagations: 0,
            restarts: 0,
            model: ModelStats::default(),
            persistence: PersistenceStats::default(),
            seconds: 0.0,
        };
        if budget == Some(0.0) {
            iterations.push(it);
            if at_cap {
                break;
            }
            continue;
        }

        let cm = build(task, k, opts.encode)?;
        it.model = cm.stats;
        let (mut solver, pstats) = cm.solver(opts.solver.clone());
        let mut deadline = Deadline { clock, at: now + budget.unwrap_or(remaining) };
        let found = match mode {
            Mode::Optimal => {
                let r = minimize(&mut solver, &cm.objective, Budget { conflicts: None, terminator: Some(&mut deadline) });
                match (r.status, r.best) {
                    (MinimizeStatus::Optimal, Some((z, a))) => {
                        it.verdict = Verdict::Sat(z);
                        Some(a)
                    }
                    (MinimizeStatus::Feasible, Some((z, a))) => {
                        it.verdict = Verdict::Feasible(z);
                        Some(a)
                    }
                    (MinimizeStatus::Infeasible, _) => {
                        it.verdict = Verdict::Unsat;
                        None
                    }
                    _ => {
                        it.verdict = Verdict::Unknown;
                        None
                    }
                }
            }
            Mode::Satisficing => match solver.solve(Budget { conflicts: None, terminator: Some(&mut deadline) }) {
                SolveResult::Sat => {
                    let a = solver.assignment();
                    it.verdict = Verdict::Feasible(cm.objective.iter().filter(|l| l.holds(&a)).count());
                    Some(a)
                }
                SolveResult::Unsat => {
                    it.verdict = Verdict::Unsat;
                    None
                }
                SolveResult::Unknown => {
                    it.verdict = Verdict::Unknown;
                    None
                }
            },
        };
        let st = solver.stats();
        it.conflicts = st.conflicts;
        it.decisions = st.decisions;
        it.propagations = st.propagations;
        it.restarts = st.restarts;
        if let Some(p) = pstats {
            it.persistence = p.get();
        }
        it.seconds = clock.elapsed() - now;

        if it.verdict == Verdict::Unsat {
            infeasible = Some(k);
        }
        if let Some(a) = found {
            let plan = cm.extract_plan(&a);
            validate(task, &plan).map_err(SearchError::InvalidPlan)?;
            let z = plan.cost();
            if best.as_ref().is_none_or(|b| z < b.1) {
                best = Some((plan, z));
            }
        }
        it.lower = lower_of(infeasible);
        it.upper = best.as_ref().map(|b| b.1);
        let verdict = it.verdict;
        iterations.push(it);

        match (mode, verdict) {
            (Mode::Optimal, Verdict::Sat(z)) => {
                let (plan, _) = best.take().unwrap();
                debug_assert_eq!(plan.cost(), z);
                return Ok(SearchReport { outcome: Outcome::OptimalPlan { plan, cost: z }, iterations });
            }
            (Mode::Optimal, Verdict::Feasible(_)) | (Mode::Satisficing, Verdict::Feasible(_)) => {
                let (plan, upper) = best.take().unwrap();
                let lower = lower_of(infeasible);
                return Ok(SearchReport { outcome: Outcome::FeasiblePlan { plan, upper, lower }, iterations });
            }
            _ => {}
        }
        if at_cap {
            break;
        }
    }

    let outcome = match (opts.max_horizon, infeasible) {
        (Some(cap), Some(lb)) if lb >= cap => Outcome::ProvedInfeasibleUpTo { horizon: lb },
        (_, inf) => Outcome::Unknown { lower: lower_of(inf) },
    };
    Ok(SearchReport { outcome, iterations })
}
