//! Plan checking by direct simulation, and a breadth-first ground-truth
//! oracle.

use alloc::collections::VecDeque;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;

use crate::fstrips::{FstripsTask, GroundAction, Plan, State, StepError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureCause {
    Binding,
    Static,
    Precondition,
    EffectConflict,
    Goal,
}

impl fmt::Display for FailureCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureCause::Binding => "ill-typed binding",
            FailureCause::Static => "static precondition violated",
            FailureCause::Precondition => "precondition violated",
            FailureCause::EffectConflict => "conflicting effects",
            FailureCause::Goal => "goal not satisfied",
        })
    }
}

impl From<StepError> for FailureCause {
    fn from(e: StepError) -> Self {
        match e {
            StepError::Binding => FailureCause::Binding,
            StepError::Static => FailureCause::Static,
            StepError::Precondition => FailureCause::Precondition,
            StepError::EffectConflict => FailureCause::EffectConflict,
        }
    }
}

/// `step` is the 0-based index of the offending action, or the plan length
/// for a goal failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("step {step}: {cause}")]
pub struct ValidationFailure {
    pub step: usize,
    pub cause: FailureCause,
}

pub fn validate(task: &FstripsTask, plan: &Plan) -> Result<(), ValidationFailure> {
    let mut s = task.init.clone();
    for (i, a) in plan.steps.iter().enumerate() {
        task.check_applicable(&s, a).map_err(|e| ValidationFailure { step: i, cause: e.into() })?;
        s = task.apply(&s, a);
    }
    if task.is_goal(&s) {
        Ok(())
    } else {
        Err(ValidationFailure { step: plan.steps.len(), cause: FailureCause::Goal })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleResult {
    /// Shortest plan.
    Plan(Plan),
    /// The whole reachable space was explored without meeting the goal.
    Unreachable { states: usize },
    /// No plan of length at most `horizon`.
    NoPlanWithin { horizon: usize },
    /// Refused: more than the allowed number of states.
    StateBudget { states: usize },
}

impl OracleResult {
    pub fn cost(&self) -> Option<usize> {
        match self {
            OracleResult::Plan(p) => Some(p.cost()),
            _ => None,
        }
    }
}

/// Breadth-first search over ground states. Duplicate detection hashes
/// whole function graphs.
pub fn bfs_oracle(task: &FstripsTask, horizon: usize, max_states: usize) -> OracleResult {
    let mut parent: Vec<Option<(usize, GroundAction)>> = alloc::vec![None];
    let mut states: Vec<State> = alloc::vec![task.init.clone()];
    let mut depth: Vec<usize> = alloc::vec![0];
    let mut seen: HashMap<State, usize> = HashMap::new();
    seen.insert(task.init.clone(), 0);
    let mut queue = VecDeque::from([0usize]);
    let mut cut = false;
    while let Some(i) = queue.pop_front() {
        if task.is_goal(&states[i]) {
            let mut steps = Vec::new();
            let mut cur = i;
            while let Some((p, a)) = parent[cur].clone() {
                steps.push(a);
                cur = p;
            }
            steps.reverse();
            return OracleResult::Plan(Plan { steps });
        }
        if depth[i] == horizon {
            cut = true;
            continue;
        }
        let s = states[i].clone();
        for a in task.applicable_actions(&s) {
            let t = task.apply(&s, &a);
            if seen.contains_key(&t) {
                continue;
            }
            if states.len() >= max_states {
                return OracleResult::StateBudget { states: states.len() };
            }
            let id = states.len();
            seen.insert(t.clone(), id);
            states.push(t);
            parent.push(Some((i, a)));
            depth.push(depth[i] + 1);
            queue.push_back(id);
        }
    }
    if cut {
        OracleResult::NoPlanWithin { horizon }
    } else {
        OracleResult::Unreachable { states: states.len() }
    }
}

/// Every state reachable from the initial state, in BFS order.
pub fn reachable_states(task: &FstripsTask, max_states: usize) -> Option<Vec<State>> {
    let mut seen: HashMap<State, ()> = HashMap::new();
    let mut out = alloc::vec![task.init.clone()];
    seen.insert(task.init.clone(), ());
    let mut i = 0;
    while i < out.len() {
        let s = out[i].clone();
        for a in task.applicable_actions(&s) {
            let t = task.apply(&s, &a);
            if seen.insert(t.clone(), ()).is_none() {
                if out.len() >= max_states {
                    return None;
                }
                out.push(t);
            }
        }
        i += 1;
    }
    Some(out)
}
