//! Lifted h^m over existential formulas, and the predicate-to-function
//! translation it licenses.

mod formula;

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;

pub use formula::{canonicalize, FLit, FTerm, Formula};

use crate::fstrips::{transform_with, fn_eligible, FstripsTask, Mapping};
use crate::pddl::typecheck::{ObjId, PredId, TTerm, TypedSchema, TypedTask};

/// Effect/literal index pairs: `(effect index, literal index)`.
pub type Pairs = Vec<(usize, usize)>;

/// Supporter-supportee pairs (same predicate and polarity) and
/// inconsistent pairs (same predicate, opposite polarity).
pub fn match_pairs(schema: &TypedSchema, lits: &[FLit]) -> (Pairs, Pairs) {
    let mut sp = Vec::new();
    let mut ip = Vec::new();
    for (e, el) in schema.eff.iter().enumerate() {
        for (l, fl) in lits.iter().enumerate() {
            if el.pred == fl.pred {
                if el.positive == fl.positive {
                    sp.push((e, l));
                } else {
                    ip.push((e, l));
                }
            }
        }
    }
    (sp, ip)
}

/// One element of a regression set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Regressed {
    /// Supporter-supportee pairs used.
    pub support: Pairs,
    pub formula: Formula,
}

/// Regression of `psi` through `schema`: one formula per subset of the
/// supporter-supportee pairs, unsatisfiable ones left out.
pub fn regress(task: &TypedTask, psi: &Formula, schema: &TypedSchema) -> Vec<Regressed> {
    regress_all(task, psi, schema)
        .into_iter()
        .filter_map(|(support, f)| f.map(|formula| Regressed { support, formula }))
        .collect()
}

/// Like [`regress`] but keeps every subset, with `None` for the
/// unsatisfiable ones. Subsets that give one literal two supporters are not
/// listed; the subsets choosing either supporter cover them.
pub fn regress_all(task: &TypedTask, psi: &Formula, schema: &TypedSchema) -> Vec<(Pairs, Option<Formula>)> {
    let (sp, ip) = match_pairs(schema, &psi.lits);
    let base = psi.vars.len() as u32;
    let mut vars = psi.vars.clone();
    vars.extend(schema.params.iter().map(|(_, s)| *s));
    let st = |t: TTerm| match t {
        TTerm::Var(i) => FTerm::Var(base + i as u32),
        TTerm::Obj(o) => FTerm::Obj(o),
    };
    let pre: Vec<FLit> = schema
        .pre
        .iter()
        .map(|l| FLit { pred: l.pred, args: l.args.iter().map(|&t| st(t)).collect(), positive: l.positive })
        .collect();
    let mut eqs0 = Vec::new();
    let mut neqs0 = psi.neqs.clone();
    for e in &schema.eqs {
        if e.equal {
            eqs0.push((st(e.lhs), st(e.rhs)));
        } else {
            neqs0.push(alloc::vec![(st(e.lhs), st(e.rhs))]);
        }
    }
    for &(e, l) in &ip {
        let clause: Vec<(FTerm, FTerm)> =
            schema.eff[e].args.iter().zip(&psi.lits[l].args).map(|(&a, &b)| (st(a), b)).collect();
        neqs0.push(clause);
    }

    let mut out = Vec::new();
    let n = sp.len();
    assert!(n < 31, "too many supporter pairs");
    for mask in 0u32..(1 << n) {
        let chosen: Pairs = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| sp[i]).collect();
        let mut supported = alloc::vec![false; psi.lits.len()];
        let mut dup = false;
        for &(_, l) in &chosen {
            dup |= supported[l];
            supported[l] = true;
        }
        if dup {
            continue;
        }
        let mut lits = pre.clone();
        lits.extend(psi.lits.iter().enumerate().filter(|(i, _)| !supported[*i]).map(|(_, l)| l.clone()));
        let mut eqs = eqs0.clone();
        for &(e, l) in &chosen {
            for (&a, &b) in schema.eff[e].args.iter().zip(&psi.lits[l].args) {
                eqs.push((st(a), b));
            }
        }
        out.push((chosen, canonicalize(task, &vars, &lits, &eqs, &neqs0)));
    }
    out
}

/// Index of the initial atoms by predicate.
pub struct InitIndex {
    by_pred: Vec<Vec<Vec<ObjId>>>,
    set: BTreeSet<(PredId, Vec<ObjId>)>,
}

impl InitIndex {
    pub fn new(task: &TypedTask) -> Self {
        let mut by_pred = alloc::vec![Vec::new(); task.predicates.len()];
        for (p, a) in &task.init {
            by_pred[*p].push(a.clone());
        }
        InitIndex { by_pred, set: task.init.clone() }
    }
}

/// Whether some assignment of the variables satisfies `psi` in the initial
/// state under the closed-world assumption.
pub fn entailed_by_init(task: &TypedTask, init: &InitIndex, psi: &Formula) -> bool {
    let mut order: Vec<&FLit> = psi.lits.iter().collect();
    order.sort_by_key(|l| !l.positive);
    let mut assign: Vec<Option<ObjId>> = alloc::vec![None; psi.vars.len()];
    search(task, init, psi, &order, 0, &mut assign)
}

fn value(t: FTerm, assign: &[Option<ObjId>]) -> Option<ObjId> {
    match t {
        FTerm::Obj(o) => Some(o),
        FTerm::Var(v) => assign[v as usize],
    }
}

fn neqs_ok(psi: &Formula, assign: &[Option<ObjId>]) -> bool {
    psi.neqs.iter().all(|c| {
        c.iter().any(|&(a, b)| match (value(a, assign), value(b, assign)) {
            (Some(x), Some(y)) => x != y,
            _ => true,
        })
    })
}

fn search(
    task: &TypedTask,
    init: &InitIndex,
    psi: &Formula,
    order: &[&FLit],
    i: usize,
    assign: &mut Vec<Option<ObjId>>,
) -> bool {
    if !neqs_ok(psi, assign) {
        return false;
    }
    let Some(l) = order.get(i) else {
        return true;
    };
    if l.positive {
        for tuple in &init.by_pred[l.pred] {
            let saved = assign.clone();
            let mut ok = true;
            for (&t, &o) in l.args.iter().zip(tuple) {
                match t {
                    FTerm::Obj(c) => ok &= c == o,
                    FTerm::Var(v) => match assign[v as usize] {
                        Some(c) => ok &= c == o,
                        None if task.in_sort(o, psi.vars[v as usize]) => assign[v as usize] = Some(o),
                        None => ok = false,
                    },
                }
                if !ok {
                    break;
                }
            }
            if ok && search(task, init, psi, order, i + 1, assign) {
                return true;
            }
            *assign = saved;
        }
        false
    } else {
        let free = l.args.iter().find_map(|&t| match t {
            FTerm::Var(v) if assign[v as usize].is_none() => Some(v as usize),
            _ => None,
        });
        match free {
            Some(v) => {
                for &o in &task.sorts[psi.vars[v]].members {
                    assign[v] = Some(o);
                    if search(task, init, psi, order, i, assign) {
                        return true;
                    }
                }
                assign[v] = None;
                false
            }
            None => {
                let g: Vec<ObjId> = l.args.iter().map(|&t| value(t, assign).unwrap()).collect();
                !init.set.contains(&(l.pred, g)) && search(task, init, psi, order, i + 1, assign)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HmValue {
    Finite(u32),
    Infinite,
    /// The node budget ran out before the fixpoint was complete.
    Unknown,
}

impl fmt::Display for HmValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HmValue::Finite(v) => write!(f, "{v}"),
            HmValue::Infinite => f.write_str("inf"),
            HmValue::Unknown => f.write_str("unknown"),
        }
    }
}

enum Kind {
    Zero,
    Min(Vec<usize>),
    Max(Vec<usize>),
}

const INF: u32 = u32::MAX;

/// Memoized evaluator; nodes are canonical formulas and the memo is kept
/// across queries.
pub struct Hm<'a> {
    task: &'a TypedTask,
    init: InitIndex,
    m: usize,
    fuel: usize,
    memo: HashMap<Formula, usize>,
    forms: Vec<Formula>,
    kinds: Vec<Option<Kind>>,
    values: Vec<u32>,
    parents: Vec<Vec<usize>>,
    exhausted: bool,
}

impl<'a> Hm<'a> {
    pub fn new(task: &'a TypedTask, m: usize, fuel: usize) -> Self {
        assert!(m >= 1);
        Hm {
            task,
            init: InitIndex::new(task),
            m,
            fuel,
            memo: HashMap::new(),
            forms: Vec::new(),
            kinds: Vec::new(),
            values: Vec::new(),
            parents: Vec::new(),
            exhausted: false,
        }
    }

    pub fn nodes(&self) -> usize {
        self.kinds.len()
    }

    fn intern(&mut self, f: Formula, queue: &mut Vec<usize>) -> usize {
        if let Some(&i) = self.memo.get(&f) {
            return i;
        }
        let i = self.kinds.len();
        self.memo.insert(f.clone(), i);
        self.forms.push(f);
        self.kinds.push(None);
        self.values.push(INF);
        self.parents.push(Vec::new());
        queue.push(i);
        i
    }

    pub fn eval(&mut self, psi: &Formula) -> HmValue {
        if self.exhausted {
            return HmValue::Unknown;
        }
        let Some(root) = psi.canonical(self.task) else {
            return HmValue::Infinite;
        };
        let mut queue = Vec::new();
        let first_new = self.kinds.len();
        let r = self.intern(root, &mut queue);
        while let Some(i) = queue.pop() {
            if self.kinds.len() > self.fuel {
                self.exhausted = true;
                return HmValue::Unknown;
            }
            let f = self.forms[i].clone();
            let kind = if entailed_by_init(self.task, &self.init, &f) {
                Kind::Zero
            } else if f.lits.len() <= self.m {
                let mut ch = Vec::new();
                for sc in &self.task.schemas {
                    for rg in regress(self.task, &f, sc) {
                        if rg.support.is_empty() {
                            continue;
                        }
                        ch.push(self.intern(rg.formula, &mut queue));
                    }
                }
                ch.sort_unstable();
                ch.dedup();
                Kind::Min(ch)
            } else {
                let mut ch = Vec::new();
                for keep in subsets(f.lits.len(), self.m) {
                    let Some(sub) = f.restrict(self.task, &keep) else {
                        continue;
                    };
                    ch.push(self.intern(sub, &mut queue));
                }
                ch.sort_unstable();
                ch.dedup();
                Kind::Max(ch)
            };
            if let Kind::Min(ch) | Kind::Max(ch) = &kind {
                for &c in ch {
                    self.parents[c].push(i);
                }
            }
            self.kinds[i] = Some(kind);
        }
        self.fixpoint(first_new);
        match self.values[r] {
            INF => HmValue::Infinite,
            v => HmValue::Finite(v),
        }
    }

    /// Values only decrease from infinity; nodes older than `first_new`
    /// are final since their subgraphs were complete.
    fn fixpoint(&mut self, first_new: usize) {
        let mut work: Vec<usize> = (first_new..self.kinds.len()).collect();
        let mut queued = alloc::vec![false; self.kinds.len()];
        for &i in &work {
            queued[i] = true;
        }
        while let Some(i) = work.pop() {
            queued[i] = false;
            let v = match self.kinds[i].as_ref().unwrap() {
                Kind::Zero => 0,
                Kind::Min(ch) => ch.iter().map(|&c| self.values[c]).min().unwrap_or(INF).saturating_add(1),
                Kind::Max(ch) => ch.iter().map(|&c| self.values[c]).max().unwrap_or(0),
            };
            if v < self.values[i] {
                self.values[i] = v;
                for &p in &self.parents[i] {
                    if !queued[p] {
                        queued[p] = true;
                        work.push(p);
                    }
                }
            }
        }
    }
}

/// All `k`-element index subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k.min(n), &mut cur, &mut out);
    out
}

/// `h^m(psi)` with a fresh memo.
pub fn hm(task: &TypedTask, psi: &Formula, m: usize, fuel: usize) -> HmValue {
    Hm::new(task, m, fuel).eval(psi)
}

/// `exists x, y1, y2. P(x, y1) and P(x, y2) and y1 != y2` where `y` is
/// argument `y` of `pred`.
pub fn uniqueness_formula(task: &TypedTask, pred: PredId, y: usize) -> Formula {
    let params = &task.predicates[pred].params;
    let d = params.len();
    let mut vars: Vec<usize> = params.clone();
    vars.push(params[y]);
    let second = d as u32;
    let a1: Vec<FTerm> = (0..d as u32).map(FTerm::Var).collect();
    let mut a2 = a1.clone();
    a2[y] = FTerm::Var(second);
    Formula {
        vars,
        lits: alloc::vec![
            FLit { pred, args: a1, positive: true },
            FLit { pred, args: a2, positive: true },
        ],
        neqs: alloc::vec![alloc::vec![(FTerm::Var(y as u32), FTerm::Var(second))]],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Uniqueness {
    Proven,
    NotProven,
    Unknown,
}

/// Whether no reachable state holds `P(x, y1)` and `P(x, y2)` with distinct
/// `y1`, `y2`, proven by `h^m = inf`.
pub fn right_unique(task: &TypedTask, pred: PredId, y: usize, m: usize, fuel: usize) -> Uniqueness {
    right_unique_with(&mut Hm::new(task, m, fuel), pred, y)
}

pub fn right_unique_with(hm: &mut Hm<'_>, pred: PredId, y: usize) -> Uniqueness {
    match hm.eval(&uniqueness_formula(hm.task, pred, y)) {
        HmValue::Infinite => Uniqueness::Proven,
        HmValue::Finite(_) => Uniqueness::NotProven,
        HmValue::Unknown => Uniqueness::Unknown,
    }
}

/// Outcome of the translation for one predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingChoice {
    pub predicate: String,
    pub mapping: Mapping,
    /// `(value position, verdict)` for every split that was tried.
    pub tried: Vec<(usize, Uniqueness)>,
    pub signature: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TransformReport {
    pub choices: Vec<MappingChoice>,
}

impl fmt::Display for TransformReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.choices {
            writeln!(f, "{}", c.signature)?;
        }
        Ok(())
    }
}

/// Largest predicate arity for which splits are enumerated.
pub const MAX_SPLIT_ARITY: usize = 4;

/// Maps each fluent predicate to a function on the cheapest split that is
/// proven right-unique, falling back to a Boolean function.
pub fn functional_transform(task: &TypedTask, m: usize, fuel: usize) -> (FstripsTask, TransformReport) {
    let fluent = task.fluent_predicates();
    let mut maps = Vec::new();
    let mut report = TransformReport::default();
    for (p, pr) in task.predicates.iter().enumerate() {
        if !fluent.contains(&p) {
            maps.push(Mapping::Static);
            report.choices.push(MappingChoice {
                predicate: pr.name.clone(),
                mapping: Mapping::Static,
                tried: Vec::new(),
                signature: format!("{}: static", pr.name),
            });
            continue;
        }
        let d = pr.params.len();
        let size = |s: usize| task.sorts[s].members.len();
        let mut cands: Vec<(usize, usize)> = Vec::new();
        if (1..=MAX_SPLIT_ARITY).contains(&d) {
            for y in 0..d {
                if fn_eligible(task, p, y) {
                    let dom: usize = (0..d).filter(|&i| i != y).map(|i| size(pr.params[i])).product();
                    cands.push((dom * (size(pr.params[y]) + 1), y));
                }
            }
        }
        cands.sort();
        let mut tried = Vec::new();
        let mut chosen = Mapping::Boolean;
        for &(_, y) in &cands {
            // a fresh memo per predicate keeps the budget per check
            let v = right_unique(task, p, y, m, fuel);
            tried.push((y, v));
            if v == Uniqueness::Proven {
                chosen = Mapping::Function { value_position: y };
                break;
            }
        }
        let sig = match chosen {
            Mapping::Function { value_position: y } => {
                let dom: Vec<&str> =
                    (0..d).filter(|&i| i != y).map(|i| task.sorts[pr.params[i]].name.as_str()).collect();
                let dom = if dom.is_empty() { String::from("{A}") } else { dom.join(" × ") };
                format!("{}: {} → {}∪{{□}}", pr.name, dom, task.sorts[pr.params[y]].name)
            }
            _ => {
                let dom: Vec<&str> = pr.params.iter().map(|&s| task.sorts[s].name.as_str()).collect();
                let dom = if dom.is_empty() { String::from("{A}") } else { dom.join(" × ") };
                format!("{}: {} → bool", pr.name, dom)
            }
        };
        maps.push(chosen);
        report.choices.push(MappingChoice { predicate: pr.name.clone(), mapping: chosen, tried, signature: sig });
    }
    let t = transform_with(task, &maps).expect("only eligible splits are chosen");
    (t, report)
}
