use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt::Write;

use super::{ground_term, FstripsTask, Obj};

/// One total function graph per function symbol; graphs are shared between
/// successor states until written.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    pub graphs: Vec<Arc<Vec<Obj>>>,
}

impl State {
    pub fn value(&self, f: usize, point: usize) -> Obj {
        self.graphs[f][point]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAction {
    pub schema: usize,
    pub args: Vec<Obj>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Plan {
    pub steps: Vec<GroundAction>,
}

impl Plan {
    pub fn cost(&self) -> usize {
        self.steps.len()
    }
}

/// Why a ground action cannot be applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepError {
    /// Wrong arity, an argument outside its sort, or a violated `=`/`!=`.
    Binding,
    /// A static atom does not hold.
    Static,
    /// A precondition atom does not hold.
    Precondition,
    /// Two effects write different values to one point.
    EffectConflict,
}

impl FstripsTask {
    pub fn format_action(&self, a: &GroundAction) -> String {
        let mut s = String::new();
        let _ = write!(s, "({}", self.schemas[a.schema].name);
        for &o in &a.args {
            let _ = write!(s, " {}", self.object_name(o));
        }
        s.push(')');
        s
    }

    /// Checks everything about `a` that does not depend on the state.
    pub fn check_binding(&self, a: &GroundAction) -> Result<(), StepError> {
        let sc = self.schemas.get(a.schema).ok_or(StepError::Binding)?;
        if sc.params.len() != a.args.len() {
            return Err(StepError::Binding);
        }
        for (&(_, s), &o) in sc.params.iter().zip(&a.args) {
            if !self.sorts[s].contains(o) {
                return Err(StepError::Binding);
            }
        }
        for c in &sc.constraints {
            if (ground_term(c.lhs, &a.args) == ground_term(c.rhs, &a.args)) != c.equal {
                return Err(StepError::Binding);
            }
        }
        for st in &sc.statics {
            let t: Vec<Obj> = st.args.iter().map(|&t| ground_term(t, &a.args)).collect();
            if self.statics[st.rel].tuples.contains(&t) != st.positive {
                return Err(StepError::Static);
            }
        }
        let eff = self.ground_effects(a);
        for i in 0..eff.len() {
            for j in i + 1..eff.len() {
                if eff[i].0 == eff[j].0 && eff[i].1 == eff[j].1 && eff[i].2 != eff[j].2 {
                    return Err(StepError::EffectConflict);
                }
            }
        }
        Ok(())
    }

    /// `(function, point, value)` per effect atom.
    pub fn ground_effects(&self, a: &GroundAction) -> Vec<(usize, Option<usize>, Obj)> {
        self.schemas[a.schema]
            .eff
            .iter()
            .map(|e| {
                let args: Vec<Obj> = e.args.iter().map(|&t| ground_term(t, &a.args)).collect();
                (e.func, self.point_index(e.func, &args), ground_term(e.value, &a.args))
            })
            .collect()
    }

    /// Full applicability check with the failure cause.
    pub fn check_applicable(&self, s: &State, a: &GroundAction) -> Result<(), StepError> {
        self.check_binding(a)?;
        for p in &self.schemas[a.schema].pre {
            let args: Vec<Obj> = p.args.iter().map(|&t| ground_term(t, &a.args)).collect();
            let Some(idx) = self.point_index(p.func, &args) else {
                return Err(StepError::Precondition);
            };
            if s.value(p.func, idx) != ground_term(p.value, &a.args) {
                return Err(StepError::Precondition);
            }
        }
        for (f, idx, v) in self.ground_effects(a) {
            let ok = idx.is_some() && self.sorts[self.functions[f].codomain].contains(v);
            if !ok {
                return Err(StepError::Binding);
            }
        }
        Ok(())
    }

    pub fn applicable(&self, s: &State, a: &GroundAction) -> bool {
        self.check_applicable(s, a).is_ok()
    }

    /// Successor state; unaffected points are copied. Panics if `a` is not
    /// applicable.
    pub fn apply(&self, s: &State, a: &GroundAction) -> State {
        assert!(self.applicable(s, a), "apply: {} not applicable", self.format_action(a));
        let mut next = s.clone();
        for (f, idx, v) in self.ground_effects(a) {
            let idx = idx.unwrap();
            if next.graphs[f][idx] != v {
                Arc::make_mut(&mut next.graphs[f])[idx] = v;
            }
        }
        next
    }

    pub fn goal_count(&self, s: &State) -> usize {
        let fluent = self
            .goal
            .iter()
            .filter(|g| match self.point_index(g.func, &g.args) {
                Some(i) => s.value(g.func, i) != g.value,
                None => true,
            })
            .count();
        let stat = self
            .static_goal
            .iter()
            .filter(|g| self.statics[g.rel].tuples.contains(&g.args) != g.positive)
            .count();
        fluent + stat
    }

    pub fn is_goal(&self, s: &State) -> bool {
        self.goal_count(s) == 0
    }

    /// Every ground action applicable in `s`, enumerated by extending
    /// partial bindings in parameter order.
    pub fn applicable_actions(&self, s: &State) -> Vec<GroundAction> {
        let mut out = Vec::new();
        for (si, sc) in self.schemas.iter().enumerate() {
            let mut args = Vec::with_capacity(sc.params.len());
            self.extend(s, si, &mut args, &mut out);
        }
        out
    }

    fn extend(&self, s: &State, si: usize, args: &mut Vec<Obj>, out: &mut Vec<GroundAction>) {
        let sc = &self.schemas[si];
        if args.len() == sc.params.len() {
            let a = GroundAction { schema: si, args: args.clone() };
            if self.applicable(s, &a) {
                out.push(a);
            }
            return;
        }
        let k = args.len();
        for &o in &self.sorts[sc.params[k].1].members {
            args.push(o);
            if self.partial_ok(s, si, args) {
                self.extend(s, si, args, out);
            }
            args.pop();
        }
    }

    /// Prunes bindings whose fully bound preconditions already fail.
    fn partial_ok(&self, s: &State, si: usize, args: &[Obj]) -> bool {
        let bound = |t: &super::Term| match t {
            super::Term::Var(i) => *i < args.len(),
            super::Term::Obj(_) => true,
        };
        let sc = &self.schemas[si];
        for p in &sc.pre {
            if p.args.iter().all(bound) && bound(&p.value) {
                let g: Vec<Obj> = p.args.iter().map(|&t| ground_term(t, args)).collect();
                match self.point_index(p.func, &g) {
                    Some(i) if s.value(p.func, i) == ground_term(p.value, args) => {}
                    _ => return false,
                }
            }
        }
        for st in &sc.statics {
            if st.args.iter().all(bound) {
                let g: Vec<Obj> = st.args.iter().map(|&t| ground_term(t, args)).collect();
                if self.statics[st.rel].tuples.contains(&g) != st.positive {
                    return false;
                }
            }
        }
        true
    }
}
