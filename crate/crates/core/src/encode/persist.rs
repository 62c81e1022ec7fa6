//! Lazy persistence: an atom read by an input pin may not be overwritten
//! between its supporter and its reader.

use alloc::rc::Rc;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::{Cell, RefCell};

use super::CausalModel;
use crate::cp::{Conflict, Ctx, IntVar, Lit, Propagator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PersistenceStats {
    /// Pins examined after becoming fixed.
    pub wakeups: u64,
    pub conflicts: u64,
    /// Explanations handed to the solver.
    pub clauses: u64,
}

/// Emitted reasons, keyed by input pin.
pub type ReasonLog = Rc<RefCell<Vec<(usize, Vec<Lit>)>>>;

#[derive(Debug, Clone)]
struct Pin {
    fsym: IntVar,
    args: Vec<IntVar>,
    value: IntVar,
    slot: usize,
    /// Support slot variable for input pins.
    support: Option<IntVar>,
}

/// Input pin `(j, k)` supported before slot `j'` where an output pin writes
/// the same point with another value forces `spt_{jk}.slot >= j'`.
pub struct PersistenceProp {
    pins: Vec<Pin>,
    /// Output pin ids per slot, slot 1 at index 0.
    outs: Vec<Vec<u32>>,
    inputs: Vec<u32>,
    dirty: Vec<bool>,
    queue: Vec<u32>,
    box_fsym: i32,
    stats: Rc<Cell<PersistenceStats>>,
    reason: Vec<Lit>,
    log: Option<ReasonLog>,
}

type Fixed = (i32, Vec<i32>, i32);

impl PersistenceProp {
    pub fn new(cm: &CausalModel) -> Self {
        let mut pins = Vec::new();
        let mut outs = vec![Vec::new(); cm.horizon];
        let mut inputs = Vec::new();
        for (i, s) in cm.slots.iter().enumerate() {
            for p in &s.outputs {
                outs[i].push(pins.len() as u32);
                pins.push(Pin { fsym: p.fsym, args: p.args.clone(), value: p.value, slot: i + 1, support: None });
            }
        }
        for s in &cm.supports {
            let p = cm.input_pin(s.j, s.k);
            inputs.push(pins.len() as u32);
            pins.push(Pin { fsym: p.fsym, args: p.args.clone(), value: p.value, slot: s.j, support: Some(s.slot) });
        }
        let n = pins.len();
        PersistenceProp {
            pins,
            outs,
            inputs,
            dirty: vec![true; n],
            queue: (0..n as u32).collect(),
            box_fsym: cm.box_fsym,
            stats: Rc::new(Cell::new(PersistenceStats::default())),
            reason: Vec::new(),
            log: None,
        }
    }

    /// Keeps every emitted reason, tagged with the reader's slot.
    pub fn record_reasons(&mut self) -> ReasonLog {
        let log = Rc::new(RefCell::new(Vec::new()));
        self.log = Some(log.clone());
        log
    }

    /// Shared handle to the counters, readable after the solver owns the
    /// propagator.
    pub fn stats_handle(&self) -> Rc<Cell<PersistenceStats>> {
        self.stats.clone()
    }

    fn bump(&self, f: impl FnOnce(&mut PersistenceStats)) {
        let mut s = self.stats.get();
        f(&mut s);
        self.stats.set(s);
    }

    fn fixed(ctx: &Ctx<'_>, p: &Pin) -> Option<Fixed> {
        let f = ctx.fixed(p.fsym)?;
        let mut x = Vec::with_capacity(p.args.len());
        for &a in &p.args {
            x.push(ctx.fixed(a)?);
        }
        Some((f, x, ctx.fixed(p.value)?))
    }

    /// Pushes `!(pin = values)` onto the reason.
    fn explain(reason: &mut Vec<Lit>, ctx: &Ctx<'_>, p: &Pin, v: &Fixed) {
        reason.push(!ctx.eq_lit(p.fsym, v.0));
        for (&a, &x) in p.args.iter().zip(&v.1) {
            reason.push(!ctx.eq_lit(a, x));
        }
        reason.push(!ctx.eq_lit(p.value, v.2));
    }

    /// Checks input pin `inp` against the output pins between its earliest
    /// possible supporter and itself (or against `only`), nearest first,
    /// and tightens its support on the first clash.
    fn check_input(&mut self, ctx: &mut Ctx<'_>, inp: u32, only: Option<u32>) -> Result<(), Conflict> {
        let ip = &self.pins[inp as usize];
        let Some(spt) = ip.support else { return Ok(()) };
        let Some(iv) = Self::fixed(ctx, ip) else { return Ok(()) };
        if iv.0 == self.box_fsym {
            return Ok(());
        }
        let lb = ctx.lb(spt).max(0) as usize;
        let j = ip.slot;
        let cands: Vec<u32> = match only {
            Some(o) => {
                let s = self.pins[o as usize].slot;
                if s > lb && s < j {
                    vec![o]
                } else {
                    Vec::new()
                }
            }
            None => (lb + 1..j).rev().flat_map(|jp| self.outs[jp - 1].iter().copied()).collect(),
        };
        for o in cands {
            let op = &self.pins[o as usize];
            let Some(ov) = Self::fixed(ctx, op) else { continue };
            if ov.0 != iv.0 || ov.1 != iv.1 || ov.2 == iv.2 {
                continue;
            }
            let target = ctx.ge_lit(spt, op.slot as i32);
            if ctx.is_true(target) {
                continue;
            }
            let mut reason = core::mem::take(&mut self.reason);
            reason.clear();
            reason.push(target);
            Self::explain(&mut reason, ctx, &self.pins[inp as usize], &iv);
            Self::explain(&mut reason, ctx, &self.pins[o as usize], &ov);
            reason.retain(|&l| l != Lit::FALSE);
            reason.sort_unstable_by_key(|l| l.index());
            reason.dedup();
            self.bump(|s| s.clauses += 1);
            if let Some(log) = &self.log {
                log.borrow_mut().push((j, reason.clone()));
            }
            let r = ctx.imply(target, &reason);
            self.reason = reason;
            if r.is_err() {
                self.bump(|s| s.conflicts += 1);
            }
            return r;
        }
        Ok(())
    }

    fn check_output(&mut self, ctx: &mut Ctx<'_>, out: u32) -> Result<(), Conflict> {
        let s = self.pins[out as usize].slot;
        for i in 0..self.inputs.len() {
            let inp = self.inputs[i];
            if self.pins[inp as usize].slot > s {
                self.check_input(ctx, inp, Some(out))?;
            }
        }
        Ok(())
    }

    fn check(&mut self, ctx: &mut Ctx<'_>, pin: u32) -> Result<(), Conflict> {
        if self.pins[pin as usize].support.is_some() {
            self.check_input(ctx, pin, None)
        } else {
            self.check_output(ctx, pin)
        }
    }
}

impl Propagator for PersistenceProp {
    fn name(&self) -> &'static str {
        "persistence"
    }

    fn watches(&self, ctx: &Ctx<'_>) -> Vec<(Lit, u32)> {
        let mut w = Vec::new();
        for (id, p) in self.pins.iter().enumerate() {
            for &x in core::iter::once(&p.fsym).chain(&p.args).chain(core::iter::once(&p.value)) {
                for &l in &ctx.int(x).eq {
                    w.push((l, id as u32));
                }
            }
        }
        w
    }

    fn notify(&mut self, _lit: Lit, tag: u32) {
        if !self.dirty[tag as usize] {
            self.dirty[tag as usize] = true;
            self.queue.push(tag);
        }
    }

    fn propagate(&mut self, ctx: &mut Ctx<'_>) -> Result<(), Conflict> {
        while let Some(p) = self.queue.pop() {
            if Self::fixed(ctx, &self.pins[p as usize]).is_none() {
                // stays dirty until fixed
                self.dirty[p as usize] = false;
                continue;
            }
            self.dirty[p as usize] = false;
            self.bump(|s| s.wakeups += 1);
            if let Err(c) = self.check(ctx, p) {
                // a pin whose check was cut short is rechecked later
                self.dirty[p as usize] = true;
                self.queue.push(p);
                return Err(c);
            }
        }
        Ok(())
    }

    fn final_check(&mut self, ctx: &mut Ctx<'_>) -> Result<(), Conflict> {
        for i in 0..self.inputs.len() {
            let inp = self.inputs[i];
            self.check_input(ctx, inp, None)?;
        }
        Ok(())
    }
}
