//! The lifted causal model: plan slots with schema and argument variables,
//! input and output pins, and causal supports between them.

mod persist;

use alloc::boxed::Box;
use alloc::format;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

pub use persist::{PersistenceProp, PersistenceStats};

use crate::cp::{Assignment, Solver, SolverConfig, BoolVar, Cell, Constraint, IntVar, MLit, Model, ModelError};
use crate::fstrips::{EqAtom, FstripsTask, GroundAction, Obj, Plan, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Persistence {
    /// Interference clauses with auxiliary Booleans, posted up front.
    Eager,
    /// Checked lazily by [`PersistenceProp`].
    #[default]
    Propagator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodeOptions {
    pub persistence: Persistence,
    /// Disabled slots form a suffix.
    pub symmetry: bool,
    /// Refuse to build models with more variables than this.
    pub max_vars: usize,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        EncodeOptions { persistence: Persistence::Propagator, symmetry: true, max_vars: 5_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodeError {
    #[error("model too large: about {0} variables")]
    Capacity(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("plan has {0} steps but the model only {1} slots")]
    PlanTooLong(usize, usize),
}

/// `(fsym, x_1..x_K, y)`; inactive pins carry the box symbol and box
/// arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PinVars {
    pub fsym: IntVar,
    pub args: Vec<IntVar>,
    pub value: IntVar,
}

impl PinVars {
    pub fn vars(&self) -> Vec<IntVar> {
        let mut v = vec![self.fsym];
        v.extend_from_slice(&self.args);
        v.push(self.value);
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotVars {
    pub act: IntVar,
    pub enabled: BoolVar,
    pub args: Vec<IntVar>,
    pub inputs: Vec<PinVars>,
    pub outputs: Vec<PinVars>,
}

/// Where a support row points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowRef {
    Inactive,
    /// Slot-0 pin of initial point number `l`.
    Init(usize),
    /// Output pin `pin` of slot `slot` (1-based).
    Out { slot: usize, pin: usize },
}

impl RowRef {
    pub fn slot(self, null: usize) -> usize {
        match self {
            RowRef::Inactive => null,
            RowRef::Init(_) => 0,
            RowRef::Out { slot, .. } => slot,
        }
    }
}

/// `spt_{jk}`: `index` selects a row of the support matrix; `slot` and
/// `pin` are its decoded components. A null support has slot code `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportVars {
    pub j: usize,
    pub k: usize,
    pub index: IntVar,
    pub slot: IntVar,
    pub pin: IntVar,
    pub rows: Vec<RowRef>,
}

/// A fixed slot-0 output pin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitPin {
    pub fsym: usize,
    pub args: Vec<Obj>,
    pub value: Obj,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ModelStats {
    pub slots: usize,
    pub int_vars: usize,
    pub bool_vars: usize,
    pub constraints: usize,
    pub init_pins: usize,
    pub goal_pins: usize,
    /// Support index variables.
    pub support_vars: usize,
    /// Sum of the support index domain sizes.
    pub support_values: usize,
    /// Auxiliary Booleans of the eager interference clauses.
    pub persistence_aux: usize,
    /// Auxiliary Booleans forbidding conflicting effects.
    pub conflict_aux: usize,
}

/// `T_{P,N}` ready for solving.
#[derive(Debug, Clone)]
pub struct CausalModel {
    pub model: Model,
    pub horizon: usize,
    pub options: EncodeOptions,
    /// Parameter count per schema; the disabled sentinel is `arity.len()`.
    pub arity: Vec<usize>,
    /// Code of the inactive function symbol.
    pub box_fsym: i32,
    pub box_obj: i32,
    /// Slot `i` is stored at index `i - 1`.
    pub slots: Vec<SlotVars>,
    pub init_pins: Vec<InitPin>,
    /// Input pins of slot `N + 1`.
    pub goal_pins: Vec<PinVars>,
    pub supports: Vec<SupportVars>,
    pub objective: Vec<MLit>,
    pub stats: ModelStats,
}

fn term_cell(t: Term, args: &[IntVar]) -> Cell {
    match t {
        Term::Var(i) => Cell::Var(args[i]),
        Term::Obj(o) => Cell::Const(o as i32),
    }
}

fn term_values(t: &FstripsTask, si: usize, term: Term, out: &mut Vec<i32>) {
    match term {
        Term::Var(p) => {
            let s = t.schemas[si].params[p].1;
            out.extend(t.sorts[s].members.iter().map(|&o| o as i32));
        }
        Term::Obj(o) => out.push(o as i32),
    }
}

fn dedup(mut v: Vec<i32>) -> Vec<i32> {
    v.sort_unstable();
    v.dedup();
    v
}

fn intersects(a: &[i32], b: &[i32]) -> bool {
    a.iter().any(|v| b.binary_search(v).is_ok())
}

/// Rough variable count, checked before any allocation.
fn estimate(t: &FstripsTask, n: usize, options: &EncodeOptions) -> usize {
    let (kf, ka, kp, ke) = (t.k_f(), t.k_alpha(), t.k_pre(), t.k_eff());
    let pin = kf + 2;
    let slot = 2 + ka + (kp + ke) * pin + kp * 3;
    let goal = t.goal.len() * (pin + 3);
    let eager = match options.persistence {
        Persistence::Eager => (n * n * n / 6) * (kp + 1) * ke * pin,
        Persistence::Propagator => 0,
    };
    n * slot + goal + eager
}

/// Builds `T_{P,N}`: `n` plan slots between the initial slot and the goal
/// slot.
pub fn build(t: &FstripsTask, n: usize, options: EncodeOptions) -> Result<CausalModel, EncodeError> {
    let est = estimate(t, n, &options);
    if est > options.max_vars {
        return Err(EncodeError::Capacity(est));
    }
    let mut m = Model::new();
    let na = t.schemas.len();
    let sent = na as i32;
    let kf = t.k_f();
    let ka = t.k_alpha();
    let kpre = t.k_pre();
    let keff = t.k_eff();
    let box_f = t.functions.len() as i32;
    let box_o = t.box_obj as i32;
    let mut stats = ModelStats { slots: n, ..ModelStats::default() };

    let mut slots = Vec::with_capacity(n);
    for i in 1..=n {
        let act = m.new_int_var(format!("act[{i}]"), 0, sent)?;
        let enabled = m.new_bool(format!("enabled[{i}]"));
        m.clause([!enabled.lit(), act.lit_ne(sent)]);
        m.clause([enabled.lit(), act.lit_eq(sent)]);

        // arguments: sort members for live positions, box otherwise
        let mut args = Vec::with_capacity(ka);
        for l in 0..ka {
            let allowed: Vec<Vec<i32>> = (0..=na)
                .map(|a| {
                    if a < na && l < t.schemas[a].params.len() {
                        let s = t.schemas[a].params[l].1;
                        t.sorts[s].members.iter().map(|&o| o as i32).collect()
                    } else {
                        vec![box_o]
                    }
                })
                .collect();
            let dom = dedup(allowed.iter().flatten().copied().collect());
            let x = m.new_int_var_values(format!("arg[{i}][{l}]"), dom.clone())?;
            for (a, al) in allowed.iter().enumerate() {
                let al = dedup(al.clone());
                for &v in &dom {
                    if al.binary_search(&v).is_err() {
                        m.clause([act.lit_ne(a as i32), x.lit_ne(v)]);
                    }
                }
            }
            args.push(x);
        }

        for (a, sc) in t.schemas.iter().enumerate() {
            let guard = act.lit_eq(a as i32);
            for c in &sc.constraints {
                match (c.lhs, c.rhs) {
                    (Term::Var(p), Term::Var(q)) => {
                        if c.equal {
                            m.post_eq_if(guard, args[p], args[q]);
                        } else {
                            m.post_ne_if(guard, args[p], args[q]);
                        }
                    }
                    (Term::Var(p), Term::Obj(o)) | (Term::Obj(o), Term::Var(p)) => {
                        m.post_eq_const_if(guard, args[p], o as i32, c.equal)
                    }
                    (Term::Obj(x), Term::Obj(y)) => {
                        if (x == y) != c.equal {
                            m.clause([!guard]);
                        }
                    }
                }
            }
            for st in &sc.statics {
                let rel = &t.statics[st.rel];
                let cols: Vec<usize> = (0..st.args.len()).filter(|&p| matches!(st.args[p], Term::Var(_))).collect();
                let matching: Vec<&Vec<Obj>> = rel
                    .tuples
                    .iter()
                    .filter(|tu| st.args.iter().zip(tu.iter()).all(|(a, &o)| !matches!(a, Term::Obj(c) if *c != o)))
                    .collect();
                let var_of = |p: usize| match st.args[p] {
                    Term::Var(v) => args[v],
                    Term::Obj(_) => unreachable!(),
                };
                if st.positive {
                    let mut vars = vec![act];
                    vars.extend(cols.iter().map(|&p| var_of(p)));
                    let mut rows: Vec<Vec<Option<i32>>> = Vec::new();
                    for tu in &matching {
                        let mut r = vec![Some(a as i32)];
                        r.extend(cols.iter().map(|&p| Some(tu[p] as i32)));
                        rows.push(r);
                    }
                    for b in 0..=na {
                        if b != a {
                            let mut r = vec![Some(b as i32)];
                            r.extend(cols.iter().map(|_| None));
                            rows.push(r);
                        }
                    }
                    m.post(Constraint::Table { vars, rows });
                } else {
                    for tu in &matching {
                        let mut c = vec![!guard];
                        c.extend(cols.iter().map(|&p| var_of(p).lit_ne(tu[p] as i32)));
                        m.clause(c);
                    }
                }
            }
        }

        let inputs = slot_pins(&mut m, t, i, act, &args, kpre, kf, box_f, box_o, "in", |s| &s.pre)?;
        let outputs = slot_pins(&mut m, t, i, act, &args, keff, kf, box_f, box_o, "out", |s| &s.eff)?;

        // no ground action may write two values to one point
        for (a, sc) in t.schemas.iter().enumerate() {
            for e1 in 0..sc.eff.len() {
                for e2 in e1 + 1..sc.eff.len() {
                    let (p, q) = (&sc.eff[e1], &sc.eff[e2]);
                    if p.func != q.func || p.value == q.value {
                        continue;
                    }
                    let mut clause = vec![act.lit_ne(a as i32)];
                    let mut never = false;
                    for (&x, &y) in p.args.iter().zip(&q.args) {
                        match (x, y) {
                            _ if x == y => {}
                            (Term::Obj(_), Term::Obj(_)) => never = true,
                            (Term::Var(v), Term::Obj(o)) | (Term::Obj(o), Term::Var(v)) => {
                                clause.push(args[v].lit_ne(o as i32))
                            }
                            (Term::Var(v), Term::Var(w)) => {
                                let d = m.new_aux_bool(format!("dpt[{i}][{a}][{e1}][{e2}]"));
                                stats.conflict_aux += 1;
                                m.post_ne_if(d.lit(), args[v], args[w]);
                                clause.push(d.lit());
                            }
                        }
                    }
                    if never {
                        continue;
                    }
                    match (p.value, q.value) {
                        (Term::Obj(_), Term::Obj(_)) => {}
                        (Term::Var(v), Term::Obj(o)) | (Term::Obj(o), Term::Var(v)) => {
                            clause.push(args[v].lit_eq(o as i32))
                        }
                        (Term::Var(v), Term::Var(w)) => {
                            let e = m.new_aux_bool(format!("sameval[{i}][{a}][{e1}][{e2}]"));
                            stats.conflict_aux += 1;
                            m.post_eq_if(e.lit(), args[v], args[w]);
                            clause.push(e.lit());
                        }
                    }
                    m.clause(clause);
                }
            }
        }

        slots.push(SlotVars { act, enabled, args, inputs, outputs });
    }

    if options.symmetry {
        for i in 1..n {
            m.clause([!slots[i].enabled.lit(), slots[i - 1].enabled.lit()]);
        }
    }

    // slot 0
    let mut init_pins = Vec::new();
    for f in 0..t.functions.len() {
        for p in 0..t.num_points(f) {
            init_pins.push(InitPin { fsym: f, args: t.point_args(f, p), value: t.init.value(f, p) });
        }
    }

    // slot N + 1
    let mut goal_pins = Vec::new();
    for (gi, g) in t.goal.iter().enumerate() {
        let fsym = m.new_int_var_values(format!("goal[{gi}].f"), vec![g.func as i32])?;
        let mut gargs = Vec::new();
        for o in 0..kf {
            let v = g.args.get(o).map_or(box_o, |&a| a as i32);
            gargs.push(m.new_int_var_values(format!("goal[{gi}].x{o}"), vec![v])?);
        }
        let value = m.new_int_var_values(format!("goal[{gi}].y"), vec![g.value as i32])?;
        goal_pins.push(PinVars { fsym, args: gargs, value });
    }
    if t.static_goal.iter().any(|g| t.statics[g.rel].tuples.contains(&g.args) != g.positive) {
        m.clause([]);
    }

    let mut supports = Vec::new();
    for j in 1..=n + 1 {
        let pins: Vec<PinVars> = if j <= n { slots[j - 1].inputs.clone() } else { goal_pins.clone() };
        for (k, pin) in pins.iter().enumerate() {
            let s = support(&mut m, t, j, k, pin, &slots, &init_pins, box_f, box_o, kf)?;
            stats.support_vars += 1;
            stats.support_values += s.rows.len();
            supports.push(s);
        }
    }

    if options.persistence == Persistence::Eager {
        for si in 0..supports.len() {
            let (j, k, slot) = (supports[si].j, supports[si].k, supports[si].slot);
            let inp = if j <= n { slots[j - 1].inputs[k].clone() } else { goal_pins[k].clone() };
            let from: Vec<i32> = m.domain(slot).iter().copied().filter(|&i| i < j as i32).collect();
            for i in from {
                for jp in i as usize + 1..j {
                    for l in 0..slots[jp - 1].outputs.len() {
                        let out = slots[jp - 1].outputs[l].clone();
                        persists_clause(&mut m, &mut stats, slot.lit_ne(i), &out, &inp, box_f, kf, [i as usize, jp, l, j, k]);
                    }
                }
            }
        }
    }

    let objective: Vec<MLit> = slots.iter().map(|s| s.enabled.lit()).collect();
    stats.int_vars = m.ints.len();
    stats.bool_vars = m.bools.len();
    stats.constraints = m.constraints.len();
    stats.init_pins = init_pins.len();
    stats.goal_pins = goal_pins.len();
    if stats.int_vars + stats.bool_vars > options.max_vars {
        return Err(EncodeError::Capacity(stats.int_vars + stats.bool_vars));
    }
    Ok(CausalModel {
        model: m,
        horizon: n,
        options,
        arity: t.schemas.iter().map(|s| s.params.len()).collect(),
        box_fsym: box_f,
        box_obj: box_o,
        slots,
        init_pins,
        goal_pins,
        supports,
        objective,
        stats,
    })
}

/// `guard -> out` does not overwrite the atom read by `inp`, through
/// fresh auxiliaries `u` (other symbol), `v_o` (other argument) and `w`
/// (same value).
#[allow(clippy::too_many_arguments)]
fn persists_clause(
    m: &mut Model,
    stats: &mut ModelStats,
    guard: MLit,
    out: &PinVars,
    inp: &PinVars,
    box_f: i32,
    kf: usize,
    at: [usize; 5],
) {
    let fo: Vec<i32> = m.domain(out.fsym).iter().copied().filter(|&f| f != box_f).collect();
    if !intersects(&fo, m.domain(inp.fsym)) {
        return;
    }
    let [i, jp, l, j, k] = at;
    let tag = format!("[{i}][{jp}][{l}][{j}][{k}]");
    let mut clause = vec![guard];
    let u = m.new_aux_bool(format!("u{tag}"));
    m.post_ne_if(u.lit(), out.fsym, inp.fsym);
    clause.push(u.lit());
    stats.persistence_aux += 1;
    for o in 0..kf {
        let (a, b) = (out.args[o], inp.args[o]);
        let (da, db) = (m.domain(a), m.domain(b));
        if da.len() == 1 && da == db {
            continue;
        }
        let v = m.new_aux_bool(format!("v{tag}[{o}]"));
        m.post_ne_if(v.lit(), a, b);
        clause.push(v.lit());
        stats.persistence_aux += 1;
    }
    if intersects(m.domain(out.value), m.domain(inp.value)) {
        let w = m.new_aux_bool(format!("w{tag}"));
        m.post_eq_if(w.lit(), out.value, inp.value);
        clause.push(w.lit());
        stats.persistence_aux += 1;
    }
    m.clause(clause);
}

/// Pins `0..count` of slot `i`, each tied to `act` by one element
/// constraint over `(fsym, args, value)`.
#[allow(clippy::too_many_arguments)]
fn slot_pins(
    m: &mut Model,
    t: &FstripsTask,
    i: usize,
    act: IntVar,
    args: &[IntVar],
    count: usize,
    kf: usize,
    box_f: i32,
    box_o: i32,
    kind: &str,
    atoms: impl Fn(&crate::fstrips::ActionSchema) -> &Vec<EqAtom>,
) -> Result<Vec<PinVars>, EncodeError> {
    let na = t.schemas.len();
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let atom = |a: usize| if a < na { atoms(&t.schemas[a]).get(k) } else { None };
        let mut fdom = Vec::new();
        let mut xdom = vec![Vec::new(); kf];
        let mut ydom = Vec::new();
        for a in 0..=na {
            match atom(a) {
                Some(e) => {
                    fdom.push(e.func as i32);
                    for (o, xd) in xdom.iter_mut().enumerate() {
                        match e.args.get(o) {
                            Some(&tm) => term_values(t, a, tm, xd),
                            None => xd.push(box_o),
                        }
                    }
                    term_values(t, a, e.value, &mut ydom);
                }
                None => {
                    fdom.push(box_f);
                    for xd in xdom.iter_mut() {
                        xd.push(box_o);
                    }
                    ydom.push(box_o);
                }
            }
        }
        let fsym = m.new_int_var_values(format!("{kind}[{i}][{k}].f"), dedup(fdom))?;
        let mut pargs = Vec::with_capacity(kf);
        for (o, xd) in xdom.into_iter().enumerate() {
            pargs.push(m.new_int_var_values(format!("{kind}[{i}][{k}].x{o}"), dedup(xd))?);
        }
        let value = m.new_int_var_values(format!("{kind}[{i}][{k}].y"), dedup(ydom))?;
        let mut targets = vec![fsym];
        targets.extend_from_slice(&pargs);
        targets.push(value);
        let rows: Vec<(i32, Vec<Cell>)> = (0..=na)
            .map(|a| {
                let cells = match atom(a) {
                    Some(e) => {
                        let mut c = vec![Cell::Const(e.func as i32)];
                        for o in 0..kf {
                            c.push(e.args.get(o).map_or(Cell::Const(box_o), |&tm| term_cell(tm, args)));
                        }
                        c.push(term_cell(e.value, args));
                        c
                    }
                    None => {
                        let mut c = vec![Cell::Const(box_f)];
                        c.extend((0..=kf).map(|_| Cell::Const(box_o)));
                        c
                    }
                };
                (a as i32, cells)
            })
            .collect();
        m.post(Constraint::Element { index: act, targets, rows });
        out.push(PinVars { fsym, args: pargs, value });
    }
    Ok(out)
}

/// Support of input pin `k` at slot `j`: an element over the rows of all
/// earlier output pins that could match it, row 0 being the inactive row.
#[allow(clippy::too_many_arguments)]
fn support(
    m: &mut Model,
    t: &FstripsTask,
    j: usize,
    k: usize,
    pin: &PinVars,
    slots: &[SlotVars],
    init_pins: &[InitPin],
    box_f: i32,
    box_o: i32,
    kf: usize,
) -> Result<SupportVars, EncodeError> {
    let _ = t;
    let targets = pin.vars();
    let fits = |m: &Model, cells: &[Cell]| {
        cells.iter().zip(&targets).all(|(c, &x)| match *c {
            Cell::Const(v) => m.in_domain(x, v),
            Cell::Var(y) => intersects(m.domain(y), m.domain(x)),
        })
    };
    let mut rows: Vec<RowRef> = Vec::new();
    let mut cells: Vec<Vec<Cell>> = Vec::new();
    let inactive: Vec<Cell> = core::iter::once(Cell::Const(box_f)).chain((0..=kf).map(|_| Cell::Const(box_o))).collect();
    if fits(m, &inactive) {
        rows.push(RowRef::Inactive);
        cells.push(inactive);
    }
    for (l, ip) in init_pins.iter().enumerate() {
        let mut c = vec![Cell::Const(ip.fsym as i32)];
        for o in 0..kf {
            c.push(Cell::Const(ip.args.get(o).map_or(box_o, |&a| a as i32)));
        }
        c.push(Cell::Const(ip.value as i32));
        if fits(m, &c) {
            rows.push(RowRef::Init(l));
            cells.push(c);
        }
    }
    for (si, s) in slots.iter().enumerate().take(j - 1) {
        for (l, op) in s.outputs.iter().enumerate() {
            let c: Vec<Cell> = op.vars().into_iter().map(Cell::Var).collect();
            // an inactive output pin can never support an active input
            let active: Vec<i32> = m.domain(op.fsym).iter().copied().filter(|&f| f != box_f).collect();
            if fits(m, &c) && intersects(&active, m.domain(pin.fsym)) {
                rows.push(RowRef::Out { slot: si + 1, pin: l });
                cells.push(c);
            }
        }
    }
    let name = format!("spt[{j}][{k}]");
    if rows.is_empty() {
        m.clause([]);
        let index = m.new_int_var(name.clone(), 0, 0)?;
        let slot = m.new_int_var_values(format!("{name}.slot"), vec![j as i32])?;
        let pinv = m.new_int_var_values(format!("{name}.pin"), vec![0])?;
        return Ok(SupportVars { j, k, index, slot, pin: pinv, rows });
    }
    let pin_code = |r: RowRef| match r {
        RowRef::Inactive => -1,
        RowRef::Init(l) => l as i32,
        RowRef::Out { pin, .. } => pin as i32,
    };
    let index = m.new_int_var(name.clone(), 0, rows.len() as i32 - 1)?;
    let slot = m.new_int_var_values(format!("{name}.slot"), rows.iter().map(|r| r.slot(j) as i32).collect())?;
    let pinv = m.new_int_var_values(format!("{name}.pin"), rows.iter().map(|&r| pin_code(r)).collect())?;
    m.post(Constraint::Element {
        index,
        targets: targets.clone(),
        rows: cells.into_iter().enumerate().map(|(r, c)| (r as i32, c)).collect(),
    });
    m.post(Constraint::Table {
        vars: vec![index, slot, pinv],
        rows: rows
            .iter()
            .enumerate()
            .map(|(r, &rr)| vec![Some(r as i32), Some(rr.slot(j) as i32), Some(pin_code(rr))])
            .collect(),
    });
    if rows[0] == RowRef::Inactive {
        // an inactive input pin takes the null support, and only then
        m.clause([pin.fsym.lit_ne(box_f), index.lit_eq(0)]);
    }
    Ok(SupportVars { j, k, index, slot, pin: pinv, rows })
}

impl CausalModel {
    pub fn sentinel(&self) -> i32 {
        self.arity.len() as i32
    }

    /// Input pin `k` of slot `j`, where `j = N + 1` is the goal slot.
    pub fn input_pin(&self, j: usize, k: usize) -> &PinVars {
        if j <= self.horizon {
            &self.slots[j - 1].inputs[k]
        } else {
            &self.goal_pins[k]
        }
    }

    /// Enabled slots in order.
    pub fn extract_plan(&self, a: &Assignment) -> Plan {
        let mut steps = Vec::new();
        for s in &self.slots {
            let act = a.int(s.act);
            if act == self.sentinel() {
                continue;
            }
            let d = self.arity[act as usize];
            steps.push(GroundAction {
                schema: act as usize,
                args: s.args[..d].iter().map(|&x| a.int(x) as Obj).collect(),
            });
        }
        Plan { steps }
    }

    /// Unit literals fixing the first slots to `plan` and disabling the rest.
    pub fn pin_plan(&self, plan: &Plan) -> Result<Vec<MLit>, EncodeError> {
        if plan.steps.len() > self.horizon {
            return Err(EncodeError::PlanTooLong(plan.steps.len(), self.horizon));
        }
        let mut out = Vec::new();
        for (i, s) in self.slots.iter().enumerate() {
            match plan.steps.get(i) {
                Some(a) => {
                    out.push(s.act.lit_eq(a.schema as i32));
                    for (l, &o) in a.args.iter().enumerate() {
                        out.push(s.args[l].lit_eq(o as i32));
                    }
                }
                None => out.push(s.act.lit_eq(self.sentinel())),
            }
        }
        Ok(out)
    }

    fn pin_values(&self, a: &Assignment, p: &PinVars) -> (i32, Vec<i32>, i32) {
        (a.int(p.fsym), p.args.iter().map(|&x| a.int(x)).collect(), a.int(p.value))
    }

    /// Supports whose atom is overwritten by an intermediate slot, as
    /// `(j, k, j')`.
    pub fn audit_persistence(&self, a: &Assignment) -> Vec<(usize, usize, usize)> {
        let mut bad = Vec::new();
        for s in &self.supports {
            let Some(&row) = s.rows.get(a.int(s.index) as usize) else {
                continue;
            };
            if row == RowRef::Inactive {
                continue;
            }
            let (f, x, y) = self.pin_values(a, self.input_pin(s.j, s.k));
            for jp in row.slot(s.j) + 1..s.j {
                for out in &self.slots[jp - 1].outputs {
                    let (g, xo, yo) = self.pin_values(a, out);
                    if g == f && xo == x && yo != y {
                        bad.push((s.j, s.k, jp));
                    }
                }
            }
        }
        bad
    }

    /// Compiles the model; in propagator mode the persistence propagator is
    /// attached and its counters returned.
    pub fn solver(&self, config: SolverConfig) -> (Solver, Option<Rc<core::cell::Cell<PersistenceStats>>>) {
        let mut s = Solver::new(&self.model, config);
        // try to use every slot first; disabled suffixes come from learning
        for sl in &self.slots {
            s.set_phase(sl.enabled, true);
        }
        match self.options.persistence {
            Persistence::Eager => (s, None),
            Persistence::Propagator => {
                let p = PersistenceProp::new(self);
                let h = p.stats_handle();
                s.add_propagator(Box::new(p));
                (s, Some(h))
            }
        }
    }

    /// Deterministic listing of variables and constraints.
    pub fn dump(&self) -> String {
        self.model.dump()
    }
}
