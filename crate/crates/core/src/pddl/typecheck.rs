//! Name resolution and sort checking; flattens the sort hierarchy into
//! explicit object sets.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::ast::*;

pub type ObjId = u32;
pub type SortId = usize;
pub type PredId = usize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct TypeError(pub String);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedSort {
    pub name: String,
    pub parent: Option<SortId>,
    /// Objects of this sort or any subsort, ascending.
    pub members: Vec<ObjId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedPredicate {
    pub name: String,
    pub params: Vec<SortId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TTerm {
    Var(usize),
    Obj(ObjId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TLit {
    pub pred: PredId,
    pub args: Vec<TTerm>,
    pub positive: bool,
}

/// `lhs = rhs` (or `!=` when `equal` is false) between schema terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TEq {
    pub lhs: TTerm,
    pub rhs: TTerm,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedSchema {
    pub name: String,
    pub params: Vec<(String, SortId)>,
    pub pre: Vec<TLit>,
    pub eqs: Vec<TEq>,
    pub eff: Vec<TLit>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundLit {
    pub pred: PredId,
    pub args: Vec<ObjId>,
    pub positive: bool,
}

/// A sort-checked task with every name resolved to an index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedTask {
    pub domain_name: String,
    pub problem_name: String,
    pub objects: Vec<String>,
    /// Declared (most specific) sort of each object.
    pub object_sort: Vec<SortId>,
    pub sorts: Vec<TypedSort>,
    pub predicates: Vec<TypedPredicate>,
    pub schemas: Vec<TypedSchema>,
    pub init: BTreeSet<(PredId, Vec<ObjId>)>,
    pub goal: Vec<GroundLit>,
}

impl TypedTask {
    pub fn sort_by_name(&self, name: &str) -> Option<SortId> {
        self.sorts.iter().position(|s| s.name == name)
    }

    pub fn pred_by_name(&self, name: &str) -> Option<PredId> {
        self.predicates.iter().position(|p| p.name == name)
    }

    pub fn object_by_name(&self, name: &str) -> Option<ObjId> {
        self.objects.iter().position(|o| o == name).map(|i| i as ObjId)
    }

    /// `sub` equals `sup` or descends from it.
    pub fn is_subsort(&self, sub: SortId, sup: SortId) -> bool {
        let mut cur = Some(sub);
        while let Some(c) = cur {
            if c == sup {
                return true;
            }
            cur = self.sorts[c].parent;
        }
        false
    }

    pub fn in_sort(&self, obj: ObjId, sort: SortId) -> bool {
        self.is_subsort(self.object_sort[obj as usize], sort)
    }

    /// Predicates touched by some effect.
    pub fn fluent_predicates(&self) -> BTreeSet<PredId> {
        self.schemas.iter().flat_map(|s| s.eff.iter().map(|l| l.pred)).collect()
    }
}

/// Resolves `problem` against `domain` and checks every occurrence against
/// the declared sorts.
pub fn typecheck(domain: &DomainAst, problem: &ProblemAst) -> Result<TypedTask, TypeError> {
    let err = |m: String| Err(TypeError(m));

    // sorts: `object` is always index 0
    let mut sort_names: Vec<String> = alloc::vec![String::from("object")];
    for (s, _) in &domain.sorts {
        sort_names.push(s.clone());
    }
    let sort_id = |n: &str| sort_names.iter().position(|s| s == n);
    let mut parents: Vec<Option<SortId>> = alloc::vec![None];
    for (s, p) in &domain.sorts {
        let parent = match p {
            None => Some(0),
            Some(p) => match sort_id(p) {
                Some(i) => Some(i),
                None => return err(format!("sort `{s}` has undeclared parent `{p}`")),
            },
        };
        parents.push(parent);
    }

    let mut objects = Vec::new();
    let mut object_sort = Vec::new();
    for (o, t) in domain.constants.iter().chain(problem.objects.iter()) {
        let Some(s) = sort_id(t) else {
            return err(format!("object `{o}` has undeclared sort `{t}`"));
        };
        if objects.contains(o) {
            return err(format!("duplicate object `{o}`"));
        }
        objects.push(o.clone());
        object_sort.push(s);
    }
    let obj_id = |n: &str| objects.iter().position(|o| o == n).map(|i| i as ObjId);

    let mut sorts: Vec<TypedSort> = sort_names
        .iter()
        .zip(&parents)
        .map(|(n, p)| TypedSort { name: n.clone(), parent: *p, members: Vec::new() })
        .collect();
    for (i, &s) in object_sort.iter().enumerate() {
        let mut cur = Some(s);
        while let Some(c) = cur {
            sorts[c].members.push(i as ObjId);
            cur = parents[c];
        }
    }

    let mut predicates = Vec::new();
    for p in &domain.predicates {
        let mut params = Vec::new();
        for t in &p.param_sorts {
            match sort_id(t) {
                Some(s) => params.push(s),
                None => return err(format!("predicate `{}` uses undeclared sort `{t}`", p.name)),
            }
        }
        predicates.push(TypedPredicate { name: p.name.clone(), params });
    }
    let pred_id = |n: &str| predicates.iter().position(|p: &TypedPredicate| p.name == n);

    let mut task = TypedTask {
        domain_name: domain.name.clone(),
        problem_name: problem.name.clone(),
        objects: objects.clone(),
        object_sort: object_sort.clone(),
        sorts,
        predicates: predicates.clone(),
        schemas: Vec::new(),
        init: BTreeSet::new(),
        goal: Vec::new(),
    };

    for a in &domain.schemas {
        let mut params = Vec::new();
        for (v, t) in &a.params {
            let Some(s) = sort_id(t) else {
                return err(format!("action `{}`: parameter `?{v}` has undeclared sort `{t}`", a.name));
            };
            params.push((v.clone(), s));
        }
        let resolve = |t: &TermAst| -> Result<(TTerm, SortId), TypeError> {
            match t {
                TermAst::Var(v) => match params.iter().position(|(p, _)| p == v) {
                    Some(i) => Ok((TTerm::Var(i), params[i].1)),
                    None => Err(TypeError(format!("action `{}`: undeclared variable `?{v}`", a.name))),
                },
                TermAst::Const(c) => match obj_id(c) {
                    Some(o) if domain.constants.iter().any(|(n, _)| n == c) => {
                        Ok((TTerm::Obj(o), object_sort[o as usize]))
                    }
                    _ => Err(TypeError(format!("action `{}`: undeclared constant `{c}`", a.name))),
                },
            }
        };
        let lit = |atom: &AtomAst, positive: bool| -> Result<TLit, TypeError> {
            let Some(p) = pred_id(&atom.predicate) else {
                return Err(TypeError(format!("action `{}`: undeclared predicate `{}`", a.name, atom.predicate)));
            };
            if predicates[p].params.len() != atom.args.len() {
                return Err(TypeError(format!(
                    "action `{}`: predicate `{}` expects {} arguments",
                    a.name,
                    atom.predicate,
                    predicates[p].params.len()
                )));
            }
            let mut args = Vec::new();
            for (i, t) in atom.args.iter().enumerate() {
                let (term, s) = resolve(t)?;
                let slot = predicates[p].params[i];
                if !task.is_subsort(s, slot) {
                    return Err(TypeError(format!(
                        "action `{}`: argument {} of `{}` has sort `{}`, expected `{}`",
                        a.name,
                        i + 1,
                        atom.predicate,
                        task.sorts[s].name,
                        task.sorts[slot].name
                    )));
                }
                args.push(term);
            }
            Ok(TLit { pred: p, args, positive })
        };
        let mut pre = Vec::new();
        let mut eqs = Vec::new();
        for c in &a.precondition {
            match c {
                ConditionAst::Atom { atom, positive } => pre.push(lit(atom, *positive)?),
                ConditionAst::Equal { lhs, rhs, positive } => {
                    eqs.push(TEq { lhs: resolve(lhs)?.0, rhs: resolve(rhs)?.0, equal: *positive })
                }
            }
        }
        let mut eff = Vec::new();
        for e in &a.effect {
            eff.push(lit(&e.atom, e.positive)?);
        }
        task.schemas.push(TypedSchema { name: a.name.clone(), params, pre, eqs, eff });
    }

    let ground = |atom: &GroundAtomAst| -> Result<(PredId, Vec<ObjId>), TypeError> {
        let Some(p) = pred_id(&atom.predicate) else {
            return Err(TypeError(format!("undeclared predicate `{}`", atom.predicate)));
        };
        if predicates[p].params.len() != atom.args.len() {
            return Err(TypeError(format!("predicate `{}` arity mismatch", atom.predicate)));
        }
        let mut args = Vec::new();
        for (i, o) in atom.args.iter().enumerate() {
            let Some(id) = obj_id(o) else {
                return Err(TypeError(format!("undeclared object `{o}`")));
            };
            if !task.in_sort(id, predicates[p].params[i]) {
                return Err(TypeError(format!(
                    "object `{o}` is not of sort `{}` in `{}`",
                    task.sorts[predicates[p].params[i]].name,
                    atom.predicate
                )));
            }
            args.push(id);
        }
        Ok((p, args))
    };
    let mut init = BTreeSet::new();
    for a in &problem.init {
        init.insert(ground(a)?);
    }
    let mut goal = Vec::new();
    for g in &problem.goal {
        let (pred, args) = ground(&g.atom)?;
        goal.push(GroundLit { pred, args, positive: g.positive });
    }
    task.init = init;
    task.goal = goal;
    Ok(task)
}
