//! Brute-force evaluation of existential formulas on FSTRIPS states.

use lcplan_core::fstrips::{FstripsTask, State};
use lcplan_core::pddl::TypedTask;
use lcplan_core::reach::{FTerm, Formula};

/// Truth of the PDDL atom `pred(args)` in `s`, whichever way `pred` was
/// translated. Static predicates are read from the typed initial state.
pub fn atom_true(typed: &TypedTask, t: &FstripsTask, s: &State, pred: usize, args: &[u32]) -> bool {
    let Some(f) = t.functions.iter().position(|f| f.predicate == pred) else {
        return typed.init.contains(&(pred, args.to_vec()));
    };
    match t.functions[f].value_position {
        None => t.point_index(f, args).is_some_and(|i| s.value(f, i) == t.true_obj),
        Some(y) => {
            let x: Vec<u32> = args.iter().enumerate().filter(|(i, _)| *i != y).map(|(_, &o)| o).collect();
            t.point_index(f, &x).is_some_and(|i| s.value(f, i) == args[y])
        }
    }
}

pub fn holds(typed: &TypedTask, t: &FstripsTask, s: &State, psi: &Formula) -> bool {
    let mut assign = vec![0u32; psi.vars.len()];
    go(typed, t, s, psi, 0, &mut assign)
}

fn go(typed: &TypedTask, t: &FstripsTask, s: &State, psi: &Formula, v: usize, assign: &mut Vec<u32>) -> bool {
    if v == psi.vars.len() {
        let val = |x: FTerm| match x {
            FTerm::Obj(o) => o,
            FTerm::Var(i) => assign[i as usize],
        };
        let lits = psi.lits.iter().all(|l| {
            let args: Vec<u32> = l.args.iter().map(|&a| val(a)).collect();
            atom_true(typed, t, s, l.pred, &args) == l.positive
        });
        return lits && psi.neqs.iter().all(|c| c.iter().any(|&(a, b)| val(a) != val(b)));
    }
    for &o in &typed.sorts[psi.vars[v]].members {
        assign[v] = o;
        if go(typed, t, s, psi, v + 1, assign) {
            return true;
        }
    }
    false
}

/// Set of PDDL atoms true in `s`; used to compare state spaces of two
/// translations of one task.
pub fn atoms(typed: &TypedTask, t: &FstripsTask, s: &State) -> std::collections::BTreeSet<(usize, Vec<u32>)> {
    let mut out = std::collections::BTreeSet::new();
    for (p, pr) in typed.predicates.iter().enumerate() {
        let mut args = vec![0u32; pr.params.len()];
        enumerate(typed, &pr.params, 0, &mut args, &mut |a| {
            if atom_true(typed, t, s, p, a) {
                out.insert((p, a.to_vec()));
            }
        });
    }
    out
}

fn enumerate(typed: &TypedTask, sorts: &[usize], i: usize, args: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
    if i == sorts.len() {
        f(args);
        return;
    }
    for &o in &typed.sorts[sorts[i]].members {
        args[i] = o;
        enumerate(typed, sorts, i + 1, args, f);
    }
}
