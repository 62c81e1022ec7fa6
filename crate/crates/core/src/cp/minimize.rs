//! Linear-scan minimization of a count of true literals.

use alloc::boxed::Box;
use alloc::vec::Vec;

use super::model::{Assignment, MLit};
use super::props::AtMostProp;
use super::solver::{Budget, SolveResult, Solver};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinimizeStatus {
    Optimal,
    Feasible,
    Infeasible,
    Unknown,
}

#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub status: MinimizeStatus,
    pub best: Option<(usize, Assignment)>,
    /// Objective values of the successive solutions.
    pub improvements: Vec<usize>,
}

/// Solves, then repeatedly demands a strictly better objective until the
/// solver proves no better solution exists or the budget runs out.
pub fn minimize(solver: &mut Solver, objective: &[MLit], budget: Budget<'_>) -> MinimizeResult {
    let Budget { conflicts, mut terminator } = budget;
    let mut res = MinimizeResult { status: MinimizeStatus::Unknown, best: None, improvements: Vec::new() };
    if conflicts == Some(0) {
        return res;
    }
    let start = solver.stats().conflicts;
    loop {
        let left = conflicts.map(|c| c.saturating_sub(solver.stats().conflicts - start));
        if left == Some(0) {
            res.status = if res.best.is_some() { MinimizeStatus::Feasible } else { MinimizeStatus::Unknown };
            return res;
        }
        let r = solver.solve(Budget { conflicts: left, terminator: match terminator {
            Some(ref mut t) => Some(&mut **t),
            None => None,
        } });
        match r {
            SolveResult::Sat => {
                let a = solver.assignment();
                let z = objective.iter().filter(|l| l.holds(&a)).count();
                res.improvements.push(z);
                res.best = Some((z, a));
                if z == 0 {
                    res.status = MinimizeStatus::Optimal;
                    return res;
                }
                let lits = objective.iter().map(|&l| solver.lit(l)).collect();
                solver.add_propagator(Box::new(AtMostProp::new(lits, z - 1)));
            }
            SolveResult::Unsat => {
                res.status =
                    if res.best.is_some() { MinimizeStatus::Optimal } else { MinimizeStatus::Infeasible };
                return res;
            }
            SolveResult::Unknown => {
                res.status = if res.best.is_some() { MinimizeStatus::Feasible } else { MinimizeStatus::Unknown };
                return res;
            }
        }
    }
}
