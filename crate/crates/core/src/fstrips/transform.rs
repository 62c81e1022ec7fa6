//! Predicate to function translations.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::pddl::typecheck::{PredId, TLit, TTerm, TypedTask};

/// How one predicate is represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mapping {
    /// Never changed by an action: a table of tuples.
    Static,
    /// `f_P : dom -> {true, false}`
    Boolean,
    /// `f_P : dom(x) -> dom(y) + {box}`, where `y` is argument `value_position`.
    Function { value_position: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("predicate `{0}` cannot be mapped to a function on argument {1}")]
    Ineligible(String, usize),
    #[error("predicate `{0}` occurs in an effect and cannot be static")]
    NotStatic(String),
}

fn x_terms(args: &[TTerm], y: usize) -> Vec<TTerm> {
    args.iter().enumerate().filter(|(i, _)| *i != y).map(|(_, t)| *t).collect()
}

/// Syntactic conditions for representing `pred` as a function of all
/// arguments except `y`: no negative precondition or goal, and every delete
/// is either overwritten by an add on the same point or clears a point the
/// precondition pins down.
pub fn fn_eligible(task: &TypedTask, pred: PredId, y: usize) -> bool {
    if y >= task.predicates[pred].params.len() {
        return false;
    }
    if task.goal.iter().any(|g| g.pred == pred && !g.positive) {
        return false;
    }
    for sc in &task.schemas {
        if sc.pre.iter().any(|l| l.pred == pred && !l.positive) {
            return false;
        }
        let adds: Vec<&TLit> = sc.eff.iter().filter(|l| l.pred == pred && l.positive).collect();
        for d in sc.eff.iter().filter(|l| l.pred == pred && !l.positive) {
            let dx = x_terms(&d.args, y);
            if adds.iter().any(|a| x_terms(&a.args, y) == dx) {
                continue;
            }
            let pinned = sc.pre.iter().any(|p| p.pred == pred && p.positive && p.args == d.args);
            if !pinned || !adds.is_empty() {
                return false;
            }
        }
    }
    true
}

/// Every fluent predicate becomes a Boolean function.
pub fn boolean_transform(task: &TypedTask) -> FstripsTask {
    let fluent = task.fluent_predicates();
    let maps: Vec<Mapping> = (0..task.predicates.len())
        .map(|p| if fluent.contains(&p) { Mapping::Boolean } else { Mapping::Static })
        .collect();
    transform_with(task, &maps).expect("Boolean translation is total")
}

fn term(t: TTerm) -> Term {
    match t {
        TTerm::Var(i) => Term::Var(i),
        TTerm::Obj(o) => Term::Obj(o),
    }
}

pub fn transform_with(task: &TypedTask, maps: &[Mapping]) -> Result<FstripsTask, TransformError> {
    let fluent = task.fluent_predicates();
    for (p, m) in maps.iter().enumerate() {
        match *m {
            Mapping::Static if fluent.contains(&p) => {
                return Err(TransformError::NotStatic(task.predicates[p].name.clone()))
            }
            Mapping::Function { value_position } if !fn_eligible(task, p, value_position) => {
                return Err(TransformError::Ineligible(task.predicates[p].name.clone(), value_position))
            }
            _ => {}
        }
    }

    let n = task.objects.len();
    let mut universe = task.objects.clone();
    let true_obj = n as Obj;
    let false_obj = n as Obj + 1;
    let box_obj = n as Obj + 2;
    universe.push("⊤".to_string());
    universe.push("⊥".to_string());
    universe.push("□".to_string());
    let size = universe.len();

    let mut sorts: Vec<Sort> =
        task.sorts.iter().map(|s| Sort::new(s.name.clone(), s.members.clone(), size)).collect();
    sorts.push(Sort::new("bool".to_string(), vec![true_obj, false_obj], size));
    let bool_sort = sorts.len() - 1;

    let mut functions = Vec::new();
    let mut statics = Vec::new();
    // predicate -> (function or relation index)
    let mut slot: Vec<usize> = vec![usize::MAX; maps.len()];
    for (p, m) in maps.iter().enumerate() {
        let pr = &task.predicates[p];
        match *m {
            Mapping::Static => {
                let tuples: BTreeSet<Vec<Obj>> =
                    task.init.iter().filter(|(q, _)| *q == p).map(|(_, a)| a.clone()).collect();
                slot[p] = statics.len();
                statics.push(StaticRelation { name: pr.name.clone(), sorts: pr.params.clone(), tuples });
            }
            Mapping::Boolean => {
                slot[p] = functions.len();
                functions.push(FunctionSymbol {
                    name: pr.name.clone(),
                    domain: pr.params.clone(),
                    codomain: bool_sort,
                    predicate: p,
                    value_position: None,
                });
            }
            Mapping::Function { value_position: y } => {
                let ys = pr.params[y];
                let cname = format!("{}∪{{□}}", task.sorts[ys].name);
                let cod = match sorts.iter().position(|s| s.name == cname) {
                    Some(i) => i,
                    None => {
                        let mut m = task.sorts[ys].members.clone();
                        m.push(box_obj);
                        sorts.push(Sort::new(cname, m, size));
                        sorts.len() - 1
                    }
                };
                slot[p] = functions.len();
                functions.push(FunctionSymbol {
                    name: pr.name.clone(),
                    domain: pr.params.iter().enumerate().filter(|(i, _)| *i != y).map(|(_, s)| *s).collect(),
                    codomain: cod,
                    predicate: p,
                    value_position: Some(y),
                });
            }
        }
    }

    let mut out = FstripsTask {
        name: task.problem_name.clone(),
        universe,
        sorts,
        functions,
        statics,
        schemas: Vec::new(),
        init: State { graphs: Vec::new() },
        goal: Vec::new(),
        static_goal: Vec::new(),
        true_obj,
        false_obj,
        box_obj,
    };

    // initial state, closed world
    let mut graphs = Vec::new();
    for (fi, f) in out.functions.iter().enumerate() {
        let default = if f.value_position.is_some() { box_obj } else { false_obj };
        let mut g = vec![default; out.num_points(fi)];
        for (q, args) in &task.init {
            if *q != f.predicate {
                continue;
            }
            match f.value_position {
                None => g[out.point_index(fi, args).unwrap()] = true_obj,
                Some(y) => {
                    let x: Vec<Obj> = x_objs(args, y);
                    g[out.point_index(fi, &x).unwrap()] = args[y];
                }
            }
        }
        graphs.push(Arc::new(g));
    }
    out.init = State { graphs };

    for gl in &task.goal {
        let p = gl.pred;
        match maps[p] {
            Mapping::Static => {
                out.static_goal.push(GroundStatic { rel: slot[p], args: gl.args.clone(), positive: gl.positive })
            }
            Mapping::Boolean => out.goal.push(GroundEq {
                func: slot[p],
                args: gl.args.clone(),
                value: if gl.positive { true_obj } else { false_obj },
            }),
            Mapping::Function { value_position: y } => {
                out.goal.push(GroundEq { func: slot[p], args: x_objs(&gl.args, y), value: gl.args[y] })
            }
        }
    }

    for sc in &task.schemas {
        let mut pre: Vec<EqAtom> = Vec::new();
        let mut stat = Vec::new();
        for l in &sc.pre {
            let args: Vec<Term> = l.args.iter().map(|&t| term(t)).collect();
            match maps[l.pred] {
                Mapping::Static => stat.push(StaticAtom { rel: slot[l.pred], args, positive: l.positive }),
                Mapping::Boolean => push_unique(
                    &mut pre,
                    EqAtom {
                        func: slot[l.pred],
                        args,
                        value: Term::Obj(if l.positive { true_obj } else { false_obj }),
                    },
                ),
                Mapping::Function { value_position: y } => push_unique(
                    &mut pre,
                    EqAtom { func: slot[l.pred], args: x_of(&args, y), value: args[y] },
                ),
            }
        }
        let mut eff: Vec<EqAtom> = Vec::new();
        for l in &sc.eff {
            let args: Vec<Term> = l.args.iter().map(|&t| term(t)).collect();
            match maps[l.pred] {
                Mapping::Static => unreachable!("static predicate in an effect"),
                Mapping::Boolean => push_unique(
                    &mut eff,
                    EqAtom {
                        func: slot[l.pred],
                        args,
                        value: Term::Obj(if l.positive { true_obj } else { false_obj }),
                    },
                ),
                Mapping::Function { value_position: y } => {
                    let x = x_of(&args, y);
                    if l.positive {
                        push_unique(&mut eff, EqAtom { func: slot[l.pred], args: x, value: args[y] });
                    } else {
                        let overwritten = sc.eff.iter().any(|a| {
                            a.pred == l.pred && a.positive && x_of(&a.args.iter().map(|&t| term(t)).collect::<Vec<_>>(), y) == x
                        });
                        if !overwritten {
                            push_unique(&mut eff, EqAtom { func: slot[l.pred], args: x, value: Term::Obj(box_obj) });
                        }
                    }
                }
            }
        }
        let constraints = sc
            .eqs
            .iter()
            .map(|e| ParamConstraint { lhs: term(e.lhs), rhs: term(e.rhs), equal: e.equal })
            .collect();
        out.schemas.push(ActionSchema {
            name: sc.name.clone(),
            params: sc.params.clone(),
            pre,
            eff,
            statics: stat,
            constraints,
        });
    }
    Ok(out)
}

fn push_unique(v: &mut Vec<EqAtom>, a: EqAtom) {
    if !v.contains(&a) {
        v.push(a);
    }
}

fn x_of(args: &[Term], y: usize) -> Vec<Term> {
    args.iter().enumerate().filter(|(i, _)| *i != y).map(|(_, t)| *t).collect()
}

fn x_objs(args: &[Obj], y: usize) -> Vec<Obj> {
    args.iter().enumerate().filter(|(i, _)| *i != y).map(|(_, t)| *t).collect()
}
