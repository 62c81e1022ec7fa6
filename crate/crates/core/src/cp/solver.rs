//! CDCL search over the literal encoding of a [`Model`], with propagators
//! that explain every inference by a clause.

use alloc::boxed::Box;
use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

use super::heap::VarHeap;
use super::lit::{LBool, Lit, Var};
use super::luby::LubySchedule;
use super::model::{Assignment, Atom, BoolVar, Constraint, IntVar, MLit, Model};
use super::props::{AtMostProp, ElementProp, TableProp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Reason {
    None,
    Clause(u32),
    /// Slice of the reason pool; the implied literal comes first.
    Pool(u32, u32),
}

#[derive(Debug, Clone)]
struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f32,
}

#[derive(Debug, Clone, Copy)]
struct Watcher {
    cref: u32,
    blocker: Lit,
}

/// Literal view of one integer variable: `eq[i] = [x = values[i]]`,
/// `ge[i] = [x >= values[i]]`, with `ge[0]` true and `ge[n]` false.
#[derive(Debug, Clone)]
pub struct IntLits {
    pub values: Vec<i32>,
    pub eq: Vec<Lit>,
    pub ge: Vec<Lit>,
}

impl IntLits {
    pub fn index_of(&self, v: i32) -> Option<usize> {
        self.values.binary_search(&v).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branching {
    /// Model Booleans by activity, then integer variables by index.
    BoolsThenInts,
    /// Every literal variable by activity.
    Activity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueChoice {
    Min,
    Max,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub restarts: bool,
    pub restart_unit: u64,
    pub var_decay: f64,
    pub clause_decay: f32,
    pub seed: u64,
    pub branching: Branching,
    pub value: ValueChoice,
    pub trace: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            restarts: true,
            restart_unit: 64,
            var_decay: 0.95,
            clause_decay: 0.999,
            seed: 0,
            branching: Branching::BoolsThenInts,
            value: ValueChoice::Min,
            trace: false,
        }
    }
}

/// Polled during search; returning true aborts with `Unknown`.
pub trait Terminator {
    fn should_stop(&mut self) -> bool;
}

#[derive(Default)]
pub struct Budget<'a> {
    pub conflicts: Option<u64>,
    pub terminator: Option<&'a mut dyn Terminator>,
}

impl<'a> Budget<'a> {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn conflicts(n: u64) -> Self {
        Budget { conflicts: Some(n), terminator: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveResult {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub learned: u64,
    pub deleted: u64,
    pub propagator_calls: u64,
    pub propagator_conflicts: u64,
    pub propagator_implications: u64,
}

/// Marker returned by a propagator that reported a conflict through
/// [`Ctx::conflict`].
#[derive(Debug)]
pub struct Conflict(());

/// Domain reasoning hook. Every implication and conflict must be explained by
/// a clause that is conflicting (or asserting) under the current assignment.
pub trait Propagator {
    fn name(&self) -> &'static str;
    /// Literals whose becoming true wakes the propagator, with a caller tag.
    fn watches(&self, ctx: &Ctx<'_>) -> Vec<(Lit, u32)>;
    fn notify(&mut self, _lit: Lit, _tag: u32) {}
    fn propagate(&mut self, ctx: &mut Ctx<'_>) -> Result<(), Conflict>;
    /// Called once every variable is assigned.
    fn final_check(&mut self, _ctx: &mut Ctx<'_>) -> Result<(), Conflict> {
        Ok(())
    }
    fn wants_backtrack(&self) -> bool {
        false
    }
    fn backtrack(&mut self, _level: u32) {}
}

struct Core {
    value: Vec<LBool>,
    level: Vec<u32>,
    reason: Vec<Reason>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    pool: Vec<Lit>,
    pool_lim: Vec<usize>,
    ints: Vec<IntLits>,
    conflict: Vec<Lit>,
    stats: SolverStats,
    current: &'static str,
}

impl Core {
    #[inline]
    fn val(&self, l: Lit) -> LBool {
        self.value[l.index()]
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn assign(&mut self, l: Lit, r: Reason) {
        debug_assert_eq!(self.val(l), LBool::Undef);
        self.value[l.index()] = LBool::True;
        self.value[(!l).index()] = LBool::False;
        let v = l.var().0 as usize;
        self.level[v] = self.decision_level();
        self.reason[v] = r;
        self.trail.push(l);
    }

    fn reason_lits<'a>(&'a self, v: Var, clauses: &'a [Clause]) -> Option<&'a [Lit]> {
        match self.reason[v.0 as usize] {
            Reason::None => None,
            Reason::Clause(c) => Some(&clauses[c as usize].lits),
            Reason::Pool(s, n) => Some(&self.pool[s as usize..(s + n) as usize]),
        }
    }
}

/// Propagator view of the solver state.
pub struct Ctx<'a> {
    core: &'a mut Core,
}

impl Ctx<'_> {
    #[inline]
    pub fn value(&self, l: Lit) -> LBool {
        self.core.val(l)
    }
    #[inline]
    pub fn is_true(&self, l: Lit) -> bool {
        self.core.val(l) == LBool::True
    }
    #[inline]
    pub fn is_false(&self, l: Lit) -> bool {
        self.core.val(l) == LBool::False
    }
    pub fn level(&self) -> u32 {
        self.core.decision_level()
    }

    pub fn int(&self, x: IntVar) -> &IntLits {
        &self.core.ints[x.0 as usize]
    }

    /// `[x = v]`, constant false when `v` is outside the initial domain.
    pub fn eq_lit(&self, x: IntVar, v: i32) -> Lit {
        let il = &self.core.ints[x.0 as usize];
        match il.index_of(v) {
            Some(i) => il.eq[i],
            None => Lit::FALSE,
        }
    }

    /// `[x >= v]`
    pub fn ge_lit(&self, x: IntVar, v: i32) -> Lit {
        let il = &self.core.ints[x.0 as usize];
        let i = il.values.partition_point(|&w| w < v);
        il.ge[i]
    }

    pub fn in_dom(&self, x: IntVar, v: i32) -> bool {
        !self.is_false(self.eq_lit(x, v))
    }

    /// Current lower bound, by binary search over the order literals.
    pub fn lb(&self, x: IntVar) -> i32 {
        let il = &self.core.ints[x.0 as usize];
        let i = il.ge.partition_point(|&g| self.core.val(g) == LBool::True);
        il.values[i - 1]
    }

    pub fn ub(&self, x: IntVar) -> i32 {
        let il = &self.core.ints[x.0 as usize];
        let i = il.ge.partition_point(|&g| self.core.val(g) != LBool::False);
        il.values[i - 1]
    }

    pub fn fixed(&self, x: IntVar) -> Option<i32> {
        let l = self.lb(x);
        (l == self.ub(x)).then_some(l)
    }

    /// Asserts `l` with `reason`, a clause containing `l` whose other
    /// literals are all false.
    pub fn imply(&mut self, l: Lit, reason: &[Lit]) -> Result<(), Conflict> {
        self.check_reason(l, reason);
        match self.core.val(l) {
            LBool::True => Ok(()),
            LBool::False => Err(self.conflict(reason)),
            LBool::Undef => {
                let start = self.core.pool.len() as u32;
                self.core.pool.push(l);
                self.core.pool.extend(reason.iter().copied().filter(|&q| q != l));
                let n = self.core.pool.len() as u32 - start;
                self.core.assign(l, Reason::Pool(start, n));
                self.core.stats.propagator_implications += 1;
                Ok(())
            }
        }
    }

    /// Reports `clause`, all of whose literals must be false.
    pub fn conflict(&mut self, clause: &[Lit]) -> Conflict {
        for &q in clause {
            if self.core.val(q) != LBool::False {
                panic!(
                    "propagator `{}` reported conflict clause {:?} with non-false literal {:?} ({:?})",
                    self.core.current,
                    clause,
                    q,
                    self.core.val(q)
                );
            }
        }
        self.core.conflict.clear();
        self.core.conflict.extend_from_slice(clause);
        self.core.stats.propagator_conflicts += 1;
        Conflict(())
    }

    fn check_reason(&self, l: Lit, reason: &[Lit]) {
        let mut has = false;
        for &q in reason {
            if q == l {
                has = true;
            } else if self.core.val(q) != LBool::False {
                panic!(
                    "propagator `{}` explained {:?} by {:?} whose literal {:?} is {:?}",
                    self.core.current,
                    l,
                    reason,
                    q,
                    self.core.val(q)
                );
            }
        }
        if !has {
            panic!("propagator `{}` gave reason {:?} not containing {:?}", self.core.current, reason, l);
        }
    }
}

pub struct Solver {
    core: Core,
    config: SolverConfig,
    clauses: Vec<Clause>,
    watches: Vec<Vec<Watcher>>,
    learnts: Vec<u32>,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f32,
    heap: VarHeap,
    decision_var: Vec<bool>,
    phase: Vec<bool>,
    seen: Vec<bool>,
    props: Vec<Option<Box<dyn Propagator>>>,
    prop_watch: Vec<Vec<(u32, u32)>>,
    prop_queue: VecDeque<u32>,
    queued: Vec<bool>,
    backtrack_props: Vec<u32>,
    bool_lits: Vec<Lit>,
    meaning: Vec<Atom>,
    int_hint: usize,
    hint_lim: Vec<usize>,
    unsat: bool,
    max_learnts: f64,
    trace: Vec<Vec<Lit>>,
    qhead: usize,
    restart_limits: LubySchedule,
}

impl Solver {
    pub fn new(model: &Model, config: SolverConfig) -> Solver {
        let mut s = Solver {
            core: Core {
                value: Vec::new(),
                level: Vec::new(),
                reason: Vec::new(),
                trail: Vec::new(),
                trail_lim: Vec::new(),
                pool: Vec::new(),
                pool_lim: Vec::new(),
                ints: Vec::new(),
                conflict: Vec::new(),
                stats: SolverStats::default(),
                current: "",
            },
            config,
            clauses: Vec::new(),
            watches: Vec::new(),
            learnts: Vec::new(),
            activity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap::default(),
            decision_var: Vec::new(),
            phase: Vec::new(),
            seen: Vec::new(),
            props: Vec::new(),
            prop_watch: Vec::new(),
            prop_queue: VecDeque::new(),
            queued: Vec::new(),
            backtrack_props: Vec::new(),
            bool_lits: Vec::new(),
            meaning: Vec::new(),
            int_hint: 0,
            hint_lim: Vec::new(),
            unsat: false,
            max_learnts: 0.0,
            trace: Vec::new(),
            qhead: 0,
            restart_limits: LubySchedule::new(1),
        };
        s.restart_limits = LubySchedule::new(s.config.restart_unit.max(1));
        let t = s.new_var(Atom::True, false);
        s.core.assign(Lit::new(t, true), Reason::None);

        let mut branch = vec![true; model.bools.len()];
        for b in &model.aux {
            branch[b.0 as usize] = false;
        }
        for i in 0..model.bools.len() {
            let v = s.new_var(Atom::Bool(BoolVar(i as u32)), branch[i]);
            s.bool_lits.push(Lit::new(v, true));
        }
        let activity_class = s.config.branching == Branching::Activity;
        for (xi, decl) in model.ints.iter().enumerate() {
            let x = IntVar(xi as u32);
            let n = decl.values.len();
            let mut eq = Vec::with_capacity(n);
            let mut ge = Vec::with_capacity(n + 1);
            ge.push(Lit::TRUE);
            if n == 1 {
                eq.push(Lit::TRUE);
            } else if n == 2 {
                let g = Lit::new(s.new_var(Atom::Ge(x, decl.values[1]), activity_class), true);
                ge.push(g);
                eq.push(!g);
                eq.push(g);
            } else {
                for i in 1..n {
                    let g = s.new_var(Atom::Ge(x, decl.values[i]), activity_class);
                    ge.push(Lit::new(g, true));
                }
                for i in 0..n {
                    let e = s.new_var(Atom::Eq(x, decl.values[i]), activity_class);
                    eq.push(Lit::new(e, true));
                }
            }
            ge.push(Lit::FALSE);
            if n > 2 {
                for i in 0..n {
                    let (e, gi, gn) = (eq[i], ge[i], ge[i + 1]);
                    if i + 1 < n && i > 0 {
                        s.add_clause_lits(&[!gn, gi]);
                    }
                    if i > 0 {
                        s.add_clause_lits(&[!e, gi]);
                    }
                    if i + 1 < n {
                        s.add_clause_lits(&[!e, !gn]);
                    }
                    let mut c = vec![e];
                    if i > 0 {
                        c.push(!gi);
                    }
                    if i + 1 < n {
                        c.push(gn);
                    }
                    s.add_clause_lits(&c);
                }
            }
            s.core.ints.push(IntLits { values: decl.values.clone(), eq, ge });
        }

        for c in &model.constraints {
            match c {
                Constraint::Clause(ls) => {
                    let lits: Vec<Lit> = ls.iter().map(|&l| s.lit(l)).collect();
                    s.add_clause_lits(&lits);
                }
                Constraint::Element { index, targets, rows } => {
                    let keys: Vec<i32> = rows.iter().map(|r| r.0).collect();
                    for &v in &model.ints[index.0 as usize].values {
                        if !keys.contains(&v) {
                            let l = s.lit(index.lit_ne(v));
                            s.add_clause_lits(&[l]);
                        }
                    }
                    s.add_propagator(Box::new(ElementProp::new(*index, targets.clone(), rows.clone())));
                }
                Constraint::Table { vars, rows } => {
                    s.add_propagator(Box::new(TableProp::new(vars.clone(), rows.clone())));
                }
                Constraint::AtMost { lits, bound } => {
                    let ls: Vec<Lit> = lits.iter().map(|&l| s.lit(l)).collect();
                    s.add_propagator(Box::new(AtMostProp::new(ls, *bound)));
                }
            }
        }

        let mut rng = SmallRng::seed_from_u64(s.config.seed);
        for v in 0..s.activity.len() {
            s.activity[v] = rng.gen::<f64>() * 1e-5;
        }
        for v in 0..s.activity.len() {
            if s.decision_var[v] {
                let act = core::mem::take(&mut s.activity);
                s.heap.insert(v as u32, &act);
                s.activity = act;
            }
        }
        s
    }

    fn new_var(&mut self, meaning: Atom, decision: bool) -> Var {
        let v = Var(self.core.value.len() as u32 / 2);
        self.core.value.push(LBool::Undef);
        self.core.value.push(LBool::Undef);
        self.core.level.push(0);
        self.core.reason.push(Reason::None);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.prop_watch.push(Vec::new());
        self.prop_watch.push(Vec::new());
        self.activity.push(0.0);
        self.decision_var.push(decision);
        self.phase.push(false);
        self.seen.push(false);
        self.meaning.push(meaning);
        v
    }

    pub fn num_vars(&self) -> usize {
        self.meaning.len()
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.iter().filter(|c| !c.deleted && !c.learnt).count()
    }

    pub fn stats(&self) -> &SolverStats {
        &self.core.stats
    }

    /// Solver literal for a model literal.
    pub fn lit(&self, l: MLit) -> Lit {
        let base = match l.atom {
            Atom::True => Lit::TRUE,
            Atom::Bool(b) => self.bool_lits[b.0 as usize],
            Atom::Eq(x, v) => {
                let il = &self.core.ints[x.0 as usize];
                match il.index_of(v) {
                    Some(i) => il.eq[i],
                    None => Lit::FALSE,
                }
            }
            Atom::Ge(x, v) => {
                let il = &self.core.ints[x.0 as usize];
                il.ge[il.values.partition_point(|&w| w < v)]
            }
        };
        if l.positive {
            base
        } else {
            !base
        }
    }

    /// Model-level meaning of a solver literal.
    pub fn lit_meaning(&self, l: Lit) -> MLit {
        MLit { atom: self.meaning[l.var().0 as usize], positive: l.is_positive() }
    }

    pub fn int_lits(&self, x: IntVar) -> &IntLits {
        &self.core.ints[x.0 as usize]
    }

    pub fn value(&self, l: Lit) -> LBool {
        self.core.val(l)
    }

    /// Current bounds of `x` (only meaningful at level 0 or after SAT).
    pub fn bounds(&mut self, x: IntVar) -> (i32, i32) {
        let ctx = Ctx { core: &mut self.core };
        (ctx.lb(x), ctx.ub(x))
    }

    /// Preferred polarity for a model Boolean when it is first decided.
    pub fn set_phase(&mut self, b: BoolVar, value: bool) {
        let v = self.bool_lits[b.0 as usize].var().0 as usize;
        self.phase[v] = value;
    }

    pub fn learned_trace(&self) -> &[Vec<Lit>] {
        &self.trace
    }

    pub fn is_unsat(&self) -> bool {
        self.unsat
    }

    /// Adds a permanent clause over model literals (resets to level 0).
    pub fn add_clause(&mut self, lits: &[MLit]) {
        self.cancel_until(0);
        let ls: Vec<Lit> = lits.iter().map(|&l| self.lit(l)).collect();
        self.add_clause_lits(&ls);
    }

    fn add_clause_lits(&mut self, lits: &[Lit]) {
        debug_assert_eq!(self.core.decision_level(), 0);
        if self.unsat {
            return;
        }
        let mut ls: Vec<Lit> = Vec::with_capacity(lits.len());
        for &l in lits {
            match self.core.val(l) {
                LBool::True => return,
                LBool::False => {}
                LBool::Undef => {
                    if ls.contains(&!l) {
                        return;
                    }
                    if !ls.contains(&l) {
                        ls.push(l);
                    }
                }
            }
        }
        match ls.len() {
            0 => self.unsat = true,
            1 => self.core.assign(ls[0], Reason::None),
            _ => {
                self.attach(ls, false);
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> u32 {
        let cref = self.clauses.len() as u32;
        self.watches[lits[0].index()].push(Watcher { cref, blocker: lits[1] });
        self.watches[lits[1].index()].push(Watcher { cref, blocker: lits[0] });
        self.clauses.push(Clause { lits, learnt, deleted: false, activity: 0.0 });
        if learnt {
            self.learnts.push(cref);
        }
        cref
    }

    pub fn add_propagator(&mut self, p: Box<dyn Propagator>) {
        self.cancel_until(0);
        let id = self.props.len() as u32;
        let ws = p.watches(&Ctx { core: &mut self.core });
        for (l, tag) in ws {
            if l != Lit::TRUE && l != Lit::FALSE {
                self.prop_watch[l.index()].push((id, tag));
            }
        }
        if p.wants_backtrack() {
            self.backtrack_props.push(id);
        }
        self.props.push(Some(p));
        self.queued.push(true);
        self.prop_queue.push_back(id);
    }

    fn cancel_until(&mut self, level: u32) {
        if self.core.decision_level() <= level {
            return;
        }
        let lim = self.core.trail_lim[level as usize];
        for i in (lim..self.core.trail.len()).rev() {
            let l = self.core.trail[i];
            let v = l.var().0 as usize;
            self.core.value[l.index()] = LBool::Undef;
            self.core.value[(!l).index()] = LBool::Undef;
            self.core.reason[v] = Reason::None;
            self.phase[v] = l.is_positive();
            if self.decision_var[v] {
                self.heap.insert(v as u32, &self.activity);
            }
        }
        self.core.trail.truncate(lim);
        self.core.trail_lim.truncate(level as usize);
        let pl = self.core.pool_lim[level as usize];
        self.core.pool.truncate(pl);
        self.core.pool_lim.truncate(level as usize);
        self.int_hint = self.hint_lim[level as usize];
        self.hint_lim.truncate(level as usize);
        self.qhead_reset();
        for q in self.prop_queue.drain(..) {
            self.queued[q as usize] = false;
        }
        for &pid in &self.backtrack_props {
            if let Some(p) = self.props[pid as usize].as_mut() {
                p.backtrack(level);
            }
        }
    }

    fn qhead_reset(&mut self) {
        self.qhead = self.core.trail.len();
    }

    fn new_decision_level(&mut self) {
        self.core.trail_lim.push(self.core.trail.len());
        self.core.pool_lim.push(self.core.pool.len());
        self.hint_lim.push(self.int_hint);
    }

    /// Unit propagation over clauses; wakes propagators watching newly true
    /// literals.
    fn bcp(&mut self) -> Option<u32> {
        while self.qhead < self.core.trail.len() {
            let p = self.core.trail[self.qhead];
            self.qhead += 1;
            self.core.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = core::mem::take(&mut self.watches[false_lit.index()]);
            let mut i = 0;
            let mut j = 0;
            let mut confl = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.core.val(w.blocker) == LBool::True {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let c = &mut self.clauses[w.cref as usize];
                if c.deleted {
                    continue;
                }
                if c.lits[0] == false_lit {
                    c.lits.swap(0, 1);
                }
                let first = c.lits[0];
                if first != w.blocker && self.core.value[first.index()] == LBool::True {
                    ws[j] = Watcher { cref: w.cref, blocker: first };
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..c.lits.len() {
                    if self.core.value[c.lits[k].index()] != LBool::False {
                        c.lits.swap(1, k);
                        let nl = c.lits[1];
                        self.watches[nl.index()].push(Watcher { cref: w.cref, blocker: first });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher { cref: w.cref, blocker: first };
                j += 1;
                if self.core.val(first) == LBool::False {
                    confl = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.core.assign(first, Reason::Clause(w.cref));
                }
            }
            ws.truncate(j);
            self.watches[false_lit.index()] = ws;
            if confl.is_some() {
                return confl;
            }
            for k in 0..self.prop_watch[p.index()].len() {
                let (pid, tag) = self.prop_watch[p.index()][k];
                if let Some(pr) = self.props[pid as usize].as_mut() {
                    pr.notify(p, tag);
                }
                if !self.queued[pid as usize] {
                    self.queued[pid as usize] = true;
                    self.prop_queue.push_back(pid);
                }
            }
        }
        None
    }

    /// Runs clauses and propagators to a fixpoint; returns a conflict clause.
    fn propagate(&mut self) -> Option<Vec<Lit>> {
        loop {
            if let Some(c) = self.bcp() {
                return Some(self.clauses[c as usize].lits.clone());
            }
            let pid = self.prop_queue.pop_front()?;
            self.queued[pid as usize] = false;
            let mut p = self.props[pid as usize].take().expect("propagator re-entered");
            self.core.current = p.name();
            self.core.stats.propagator_calls += 1;
            let r = p.propagate(&mut Ctx { core: &mut self.core });
            self.props[pid as usize] = Some(p);
            if r.is_err() {
                return Some(core::mem::take(&mut self.core.conflict));
            }
        }
    }

    fn final_checks(&mut self) -> Option<Vec<Lit>> {
        for pid in 0..self.props.len() {
            let mut p = self.props[pid].take().expect("propagator re-entered");
            self.core.current = p.name();
            let r = p.final_check(&mut Ctx { core: &mut self.core });
            self.props[pid] = Some(p);
            if r.is_err() {
                return Some(core::mem::take(&mut self.core.conflict));
            }
            if self.qhead < self.core.trail.len() {
                return None;
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.bumped(v as u32, &self.activity);
    }

    fn bump_clause(&mut self, c: u32) {
        let cl = &mut self.clauses[c as usize];
        if !cl.learnt {
            return;
        }
        cl.activity += self.cla_inc;
        if cl.activity > 1e20 {
            for &l in &self.learnts {
                self.clauses[l as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP analysis. All literals of `confl` are false and at least
    /// two of them sit at the current level.
    fn analyze(&mut self, confl: &[Lit]) -> (Vec<Lit>, u32) {
        let cur = self.core.decision_level();
        let mut learnt = vec![Lit::TRUE];
        let mut path = 0usize;
        let mut idx = self.core.trail.len();
        let mut clause: Vec<Lit> = confl.to_vec();
        let mut p: Option<Lit> = None;
        loop {
            for &q in &clause {
                if Some(q) == p {
                    continue;
                }
                let v = q.var().0 as usize;
                if !self.seen[v] && self.core.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.core.level[v] >= cur {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.core.trail[idx].var().0 as usize] {
                    break;
                }
            }
            let pl = self.core.trail[idx];
            self.seen[pl.var().0 as usize] = false;
            path -= 1;
            p = Some(pl);
            if path == 0 {
                break;
            }
            if let Reason::Clause(c) = self.core.reason[pl.var().0 as usize] {
                self.bump_clause(c);
            }
            clause = self
                .core
                .reason_lits(pl.var(), &self.clauses)
                .expect("implied literal without reason")
                .to_vec();
        }
        learnt[0] = !p.unwrap();

        // local minimization
        for &q in &learnt[1..] {
            self.seen[q.var().0 as usize] = true;
        }
        let mut keep = vec![learnt[0]];
        for &q in &learnt[1..] {
            let redundant = match self.core.reason_lits(q.var(), &self.clauses) {
                None => false,
                Some(r) => r.iter().all(|&x| {
                    x.var() == q.var() || self.seen[x.var().0 as usize] || self.core.level[x.var().0 as usize] == 0
                }),
            };
            if !redundant {
                keep.push(q);
            }
        }
        for &q in &learnt[1..] {
            self.seen[q.var().0 as usize] = false;
        }
        let mut learnt = keep;
        let mut bt = 0;
        if learnt.len() > 1 {
            let mut mi = 1;
            for i in 2..learnt.len() {
                if self.core.level[learnt[i].var().0 as usize] > self.core.level[learnt[mi].var().0 as usize] {
                    mi = i;
                }
            }
            learnt.swap(1, mi);
            bt = self.core.level[learnt[1].var().0 as usize];
        }
        (learnt, bt)
    }

    /// Backjumps as needed and asserts the learned clause.
    fn handle_conflict(&mut self, mut confl: Vec<Lit>) -> bool {
        confl.retain(|&l| self.core.level[l.var().0 as usize] > 0 || self.core.val(l) != LBool::False);
        let max = confl.iter().map(|l| self.core.level[l.var().0 as usize]).max().unwrap_or(0);
        if max == 0 {
            self.unsat = true;
            return false;
        }
        self.cancel_until(max);
        let at_max = confl.iter().filter(|l| self.core.level[l.var().0 as usize] == max).count();
        let (learnt, bt) = if at_max == 1 {
            let mut c = confl;
            let i = c.iter().position(|l| self.core.level[l.var().0 as usize] == max).unwrap();
            c.swap(0, i);
            let mut bt = 0;
            if c.len() > 1 {
                let mut mi = 1;
                for k in 2..c.len() {
                    if self.core.level[c[k].var().0 as usize] > self.core.level[c[mi].var().0 as usize] {
                        mi = k;
                    }
                }
                c.swap(1, mi);
                bt = self.core.level[c[1].var().0 as usize];
            }
            (c, bt)
        } else {
            self.analyze(&confl)
        };
        self.cancel_until(bt);
        if self.config.trace {
            self.trace.push(learnt.clone());
        }
        self.core.stats.learned += 1;
        if learnt.len() == 1 {
            self.core.assign(learnt[0], Reason::None);
        } else {
            let first = learnt[0];
            let c = self.attach(learnt, true);
            self.bump_clause(c);
            self.core.assign(first, Reason::Clause(c));
        }
        self.var_inc /= self.config.var_decay;
        self.cla_inc /= self.config.clause_decay;
        true
    }

    fn reduce_db(&mut self) {
        let mut cands: Vec<u32> = self
            .learnts
            .iter()
            .copied()
            .filter(|&c| {
                let cl = &self.clauses[c as usize];
                if cl.deleted || cl.lits.len() <= 2 {
                    return false;
                }
                let v = cl.lits[0].var().0 as usize;
                !(self.core.reason[v] == Reason::Clause(c) && self.core.val(cl.lits[0]) == LBool::True)
            })
            .collect();
        cands.sort_by(|a, b| {
            self.clauses[*a as usize]
                .activity
                .partial_cmp(&self.clauses[*b as usize].activity)
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        for &c in &cands[..cands.len() / 2] {
            let cl = &mut self.clauses[c as usize];
            cl.deleted = true;
            cl.lits = Vec::new();
            self.core.stats.deleted += 1;
        }
        self.learnts.retain(|&c| !self.clauses[c as usize].deleted);
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            let l = Lit::new(Var(v), true);
            if self.core.val(l) == LBool::Undef {
                return Some(if self.phase[v as usize] { l } else { !l });
            }
        }
        while self.int_hint < self.core.ints.len() {
            let x = IntVar(self.int_hint as u32);
            let ctx = Ctx { core: &mut self.core };
            let (lb, ub) = (ctx.lb(x), ctx.ub(x));
            if lb != ub {
                let il = &self.core.ints[x.0 as usize];
                let v = match self.config.value {
                    ValueChoice::Min => lb,
                    ValueChoice::Max => ub,
                };
                let i = il.index_of(v).unwrap();
                return Some(il.eq[i]);
            }
            self.int_hint += 1;
        }
        // auxiliary Booleans left open by propagation
        for &l in &self.bool_lits {
            if self.core.val(l) == LBool::Undef {
                return Some(if self.phase[l.var().0 as usize] { l } else { !l });
            }
        }
        None
    }

    /// Searches for a solution. Learned clauses persist across calls.
    pub fn solve(&mut self, budget: Budget<'_>) -> SolveResult {
        let Budget { conflicts, mut terminator } = budget;
        if self.unsat {
            return SolveResult::Unsat;
        }
        self.cancel_until(0);
        self.qhead = self.qhead.min(self.core.trail.len());
        if self.max_learnts == 0.0 {
            self.max_learnts = (self.clauses.len() as f64 / 3.0).max(2000.0);
        }
        let start_conflicts = self.core.stats.conflicts;
        let mut restart_at = self.restart_limits.next().unwrap();
        let mut since_restart = 0u64;
        let mut steps = 0u64;
        loop {
            steps += 1;
            if steps.is_multiple_of(256) {
                if let Some(t) = terminator.as_mut() {
                    if t.should_stop() {
                        self.cancel_until(0);
                        return SolveResult::Unknown;
                    }
                }
            }
            if let Some(confl) = self.propagate() {
                self.core.stats.conflicts += 1;
                since_restart += 1;
                if !self.handle_conflict(confl) {
                    return SolveResult::Unsat;
                }
                if let Some(limit) = conflicts {
                    if self.core.stats.conflicts - start_conflicts >= limit {
                        self.cancel_until(0);
                        return SolveResult::Unknown;
                    }
                }
                continue;
            }
            if self.config.restarts && since_restart >= restart_at && self.core.decision_level() > 0 {
                self.cancel_until(0);
                self.core.stats.restarts += 1;
                since_restart = 0;
                restart_at = self.restart_limits.next().unwrap();
                continue;
            }
            if self.learnts.len() as f64 > self.max_learnts + self.core.trail.len() as f64 {
                self.reduce_db();
                self.max_learnts *= 1.1;
            }
            if conflicts == Some(0) {
                self.cancel_until(0);
                return SolveResult::Unknown;
            }
            match self.pick_branch() {
                Some(l) => {
                    self.core.stats.decisions += 1;
                    self.new_decision_level();
                    self.core.assign(l, Reason::None);
                }
                None => match self.final_checks() {
                    Some(confl) => {
                        self.core.stats.conflicts += 1;
                        if !self.handle_conflict(confl) {
                            return SolveResult::Unsat;
                        }
                    }
                    None => {
                        if self.qhead < self.core.trail.len() {
                            continue;
                        }
                        return SolveResult::Sat;
                    }
                },
            }
        }
    }

    /// Model assignment after `Sat`.
    pub fn assignment(&self) -> Assignment {
        let bools = self.bool_lits.iter().map(|&l| self.core.val(l) == LBool::True).collect();
        let ints = self
            .core
            .ints
            .iter()
            .map(|il| {
                let i = il.eq.iter().position(|&e| self.core.val(e) == LBool::True).expect("integer not fixed");
                il.values[i]
            })
            .collect();
        Assignment { ints, bools }
    }
}
