//! Search statistics as JSON.

use serde::Serialize;

use lcplan_core::search::{Iteration, Outcome, SearchReport, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stats {
    pub mode: String,
    pub transform: String,
    pub persistence: String,
    pub outcome: OutcomeStats,
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub k_sequence: Vec<usize>,
    pub bounds: Vec<Bounds>,
    /// Seconds per iteration.
    pub wall_time: Vec<f64>,
    pub total_time: f64,
    pub iterations: Vec<IterationStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeStats {
    pub status: &'static str,
    pub cost: Option<usize>,
    pub lower: Option<usize>,
    pub upper: Option<usize>,
    pub horizon: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub lower: usize,
    pub upper: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationStats {
    pub horizon: usize,
    pub budget: Option<f64>,
    pub verdict: String,
    pub objective: Option<usize>,
    pub lower: usize,
    pub upper: Option<usize>,
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub wall_time: f64,
    pub model: ModelStatsJson,
    pub persistence: PersistenceJson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModelStatsJson {
    pub slots: usize,
    pub int_vars: usize,
    pub bool_vars: usize,
    pub constraints: usize,
    pub support_vars: usize,
    pub support_values: usize,
    pub persistence_aux: usize,
    pub conflict_aux: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PersistenceJson {
    pub wakeups: u64,
    pub conflicts: u64,
    pub clauses: u64,
}

fn outcome(o: &Outcome) -> OutcomeStats {
    let none = OutcomeStats { status: "", cost: None, lower: None, upper: None, horizon: None };
    match o {
        Outcome::OptimalPlan { cost, .. } => OutcomeStats {
            status: "optimal",
            cost: Some(*cost),
            lower: Some(*cost),
            upper: Some(*cost),
            ..none
        },
        Outcome::FeasiblePlan { upper, lower, .. } => OutcomeStats {
            status: "feasible",
            cost: Some(*upper),
            lower: Some(*lower),
            upper: Some(*upper),
            ..none
        },
        Outcome::ProvedInfeasibleUpTo { horizon } => OutcomeStats {
            status: "infeasible",
            lower: Some(horizon + 1),
            horizon: Some(*horizon),
            ..none
        },
        Outcome::Unknown { lower } => OutcomeStats { status: "unknown", lower: Some(*lower), ..none },
    }
}

fn iteration(it: &Iteration) -> IterationStats {
    let (verdict, objective) = match it.verdict {
        Verdict::Sat(z) => ("sat", Some(z)),
        Verdict::Feasible(z) => ("feasible", Some(z)),
        Verdict::Unsat => ("unsat", None),
        Verdict::Unknown => ("unknown", None),
        Verdict::Skipped => ("skipped", None),
    };
    let m = &it.model;
    IterationStats {
        horizon: it.horizon,
        budget: it.budget,
        verdict: verdict.into(),
        objective,
        lower: it.lower,
        upper: it.upper,
        conflicts: it.conflicts,
        decisions: it.decisions,
        propagations: it.propagations,
        restarts: it.restarts,
        wall_time: it.seconds,
        model: ModelStatsJson {
            slots: m.slots,
            int_vars: m.int_vars,
            bool_vars: m.bool_vars,
            constraints: m.constraints,
            support_vars: m.support_vars,
            support_values: m.support_values,
            persistence_aux: m.persistence_aux,
            conflict_aux: m.conflict_aux,
        },
        persistence: PersistenceJson {
            wakeups: it.persistence.wakeups,
            conflicts: it.persistence.conflicts,
            clauses: it.persistence.clauses,
        },
    }
}

impl Stats {
    pub fn new(report: &SearchReport, mode: &str, transform: &str, persistence: &str, total_time: f64) -> Self {
        let its = &report.iterations;
        Stats {
            mode: mode.into(),
            transform: transform.into(),
            persistence: persistence.into(),
            outcome: outcome(&report.outcome),
            conflicts: its.iter().map(|i| i.conflicts).sum(),
            decisions: its.iter().map(|i| i.decisions).sum(),
            propagations: its.iter().map(|i| i.propagations).sum(),
            restarts: its.iter().map(|i| i.restarts).sum(),
            k_sequence: report.horizons(),
            bounds: its.iter().map(|i| Bounds { lower: i.lower, upper: i.upper }).collect(),
            wall_time: its.iter().map(|i| i.seconds).collect(),
            total_time,
            iterations: its.iter().map(iteration).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }
}
