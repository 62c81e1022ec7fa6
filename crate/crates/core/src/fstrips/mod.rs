//! Functional STRIPS tasks: function graphs as states, equality atoms as
//! preconditions and effects.

mod dump;
mod state;
mod transform;

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

pub use state::{GroundAction, Plan, State, StepError};
pub use transform::{boolean_transform, fn_eligible, transform_with, Mapping, TransformError};

pub type Obj = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sort {
    pub name: String,
    pub members: Vec<Obj>,
    /// Position of each universe object in `members`, `u32::MAX` if absent.
    pub position: Vec<u32>,
}

impl Sort {
    pub fn new(name: String, mut members: Vec<Obj>, universe: usize) -> Sort {
        members.sort_unstable();
        members.dedup();
        let mut position = alloc::vec![u32::MAX; universe];
        for (i, &o) in members.iter().enumerate() {
            position[o as usize] = i as u32;
        }
        Sort { name, members, position }
    }

    pub fn contains(&self, o: Obj) -> bool {
        self.position.get(o as usize).is_some_and(|&p| p != u32::MAX)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionSymbol {
    pub name: String,
    pub domain: Vec<usize>,
    pub codomain: usize,
    /// Predicate this symbol was derived from.
    pub predicate: usize,
    /// Argument position that became the value, or `None` for a Boolean
    /// function.
    pub value_position: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(usize),
    Obj(Obj),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EqAtom {
    pub func: usize,
    pub args: Vec<Term>,
    pub value: Term,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticRelation {
    pub name: String,
    pub sorts: Vec<usize>,
    /// Sorted, so table rows come out in a fixed order.
    pub tuples: BTreeSet<Vec<Obj>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticAtom {
    pub rel: usize,
    pub args: Vec<Term>,
    pub positive: bool,
}

/// `lhs = rhs` (or `!=`) between schema terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamConstraint {
    pub lhs: Term,
    pub rhs: Term,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<(String, usize)>,
    pub pre: Vec<EqAtom>,
    pub eff: Vec<EqAtom>,
    pub statics: Vec<StaticAtom>,
    pub constraints: Vec<ParamConstraint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroundEq {
    pub func: usize,
    pub args: Vec<Obj>,
    pub value: Obj,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundStatic {
    pub rel: usize,
    pub args: Vec<Obj>,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FstripsTask {
    pub name: String,
    pub universe: Vec<String>,
    pub sorts: Vec<Sort>,
    pub functions: Vec<FunctionSymbol>,
    pub statics: Vec<StaticRelation>,
    pub schemas: Vec<ActionSchema>,
    pub init: State,
    pub goal: Vec<GroundEq>,
    pub static_goal: Vec<GroundStatic>,
    pub true_obj: Obj,
    pub false_obj: Obj,
    /// Dummy value for points outside a mapping's domain.
    pub box_obj: Obj,
}

impl FstripsTask {
    pub fn k_f(&self) -> usize {
        self.functions.iter().map(|f| f.domain.len()).max().unwrap_or(0)
    }

    pub fn k_alpha(&self) -> usize {
        self.schemas.iter().map(|s| s.params.len()).max().unwrap_or(0)
    }

    pub fn k_pre(&self) -> usize {
        self.schemas.iter().map(|s| s.pre.len()).max().unwrap_or(0)
    }

    pub fn k_eff(&self) -> usize {
        self.schemas.iter().map(|s| s.eff.len()).max().unwrap_or(0)
    }

    /// `|dom(f)|`
    pub fn num_points(&self, f: usize) -> usize {
        self.functions[f].domain.iter().map(|&s| self.sorts[s].members.len()).product()
    }

    /// Mixed-radix index of `args` in `dom(f)`.
    pub fn point_index(&self, f: usize, args: &[Obj]) -> Option<usize> {
        let dom = &self.functions[f].domain;
        if dom.len() != args.len() {
            return None;
        }
        let mut idx = 0usize;
        for (&s, &a) in dom.iter().zip(args) {
            let sort = &self.sorts[s];
            let p = *sort.position.get(a as usize)?;
            if p == u32::MAX {
                return None;
            }
            idx = idx * sort.members.len() + p as usize;
        }
        Some(idx)
    }

    pub fn point_args(&self, f: usize, mut idx: usize) -> Vec<Obj> {
        let dom = &self.functions[f].domain;
        let mut out = alloc::vec![0; dom.len()];
        for (k, &s) in dom.iter().enumerate().rev() {
            let n = self.sorts[s].members.len();
            out[k] = self.sorts[s].members[idx % n];
            idx /= n;
        }
        out
    }

    pub fn object_name(&self, o: Obj) -> &str {
        &self.universe[o as usize]
    }

    pub fn schema_by_name(&self, name: &str) -> Option<usize> {
        self.schemas.iter().position(|s| s.name == name)
    }

    pub fn object_by_name(&self, name: &str) -> Option<Obj> {
        self.universe.iter().position(|o| o == name).map(|i| i as Obj)
    }
}

pub(crate) fn ground_term(t: Term, args: &[Obj]) -> Obj {
    match t {
        Term::Var(i) => args[i],
        Term::Obj(o) => o,
    }
}
