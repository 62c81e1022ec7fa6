//! Element, table and cardinality propagators.

use alloc::vec;
use alloc::vec::Vec;

use super::lit::Lit;
use super::model::{Cell, IntVar};
use super::solver::{Conflict, Ctx, Propagator};

fn push_false(r: &mut Vec<Lit>, l: Lit) {
    if l != Lit::FALSE {
        r.push(l);
    }
}

/// `targets[c] = rows[index].cells[c]` for every column `c`.
pub struct ElementProp {
    index: IntVar,
    targets: Vec<IntVar>,
    rows: Vec<(i32, Vec<Cell>)>,
    live: Vec<usize>,
}

impl ElementProp {
    pub fn new(index: IntVar, targets: Vec<IntVar>, rows: Vec<(i32, Vec<Cell>)>) -> Self {
        ElementProp { index, targets, rows, live: Vec::new() }
    }

    fn intersects(ctx: &Ctx<'_>, cell: Cell, t: IntVar) -> bool {
        match cell {
            Cell::Const(k) => ctx.in_dom(t, k),
            Cell::Var(y) => {
                let (a, b) = if ctx.int(y).values.len() <= ctx.int(t).values.len() { (y, t) } else { (t, y) };
                ctx.int(a).values.iter().any(|&w| ctx.in_dom(a, w) && ctx.in_dom(b, w))
            }
        }
    }

    /// False literals showing `cell` and `t` share no value.
    fn witness(ctx: &Ctx<'_>, cell: Cell, t: IntVar, r: &mut Vec<Lit>) {
        match cell {
            Cell::Const(k) => push_false(r, ctx.eq_lit(t, k)),
            Cell::Var(y) => {
                for &w in &ctx.int(t).values {
                    let tl = ctx.eq_lit(t, w);
                    if ctx.is_false(tl) {
                        r.push(tl);
                    } else {
                        let yl = ctx.eq_lit(y, w);
                        debug_assert!(ctx.is_false(yl) || yl == Lit::FALSE);
                        push_false(r, yl);
                    }
                }
            }
        }
    }

    fn has(ctx: &Ctx<'_>, cell: Cell, w: i32) -> bool {
        match cell {
            Cell::Const(k) => k == w,
            Cell::Var(y) => ctx.in_dom(y, w),
        }
    }
}

impl Propagator for ElementProp {
    fn name(&self) -> &'static str {
        "element"
    }

    fn watches(&self, ctx: &Ctx<'_>) -> Vec<(Lit, u32)> {
        let mut w = Vec::new();
        for &(v, _) in &self.rows {
            let l = ctx.eq_lit(self.index, v);
            w.push((l, 0));
            w.push((!l, 0));
        }
        let mut vars: Vec<IntVar> = self.targets.clone();
        for (_, cells) in &self.rows {
            for c in cells {
                if let Cell::Var(y) = c {
                    vars.push(*y);
                }
            }
        }
        vars.sort_unstable();
        vars.dedup();
        for x in vars {
            for &l in &ctx.int(x).eq {
                w.push((!l, 0));
            }
        }
        w
    }

    fn propagate(&mut self, ctx: &mut Ctx<'_>) -> Result<(), Conflict> {
        let mut live = core::mem::take(&mut self.live);
        live.clear();
        for (ri, (v, cells)) in self.rows.iter().enumerate() {
            let il = ctx.eq_lit(self.index, *v);
            if ctx.is_false(il) {
                continue;
            }
            let bad = (0..self.targets.len()).find(|&c| !Self::intersects(ctx, cells[c], self.targets[c]));
            match bad {
                None => live.push(ri),
                Some(c) => {
                    let mut r = vec![!il];
                    Self::witness(ctx, cells[c], self.targets[c], &mut r);
                    ctx.imply(!il, &r)?;
                }
            }
        }
        if live.is_empty() {
            let r: Vec<Lit> = self
                .rows
                .iter()
                .map(|(v, _)| ctx.eq_lit(self.index, *v))
                .filter(|&l| l != Lit::FALSE)
                .collect();
            self.live = live;
            return Err(ctx.conflict(&r));
        }
        for (c, &t) in self.targets.iter().enumerate() {
            for wi in 0..ctx.int(t).values.len() {
                let w = ctx.int(t).values[wi];
                let tl = ctx.int(t).eq[wi];
                if ctx.is_false(tl) {
                    continue;
                }
                if live.iter().any(|&ri| Self::has(ctx, self.rows[ri].1[c], w)) {
                    continue;
                }
                let mut r = vec![!tl];
                for (v, cells) in &self.rows {
                    let il = ctx.eq_lit(self.index, *v);
                    if ctx.is_false(il) {
                        push_false(&mut r, il);
                    } else if let Cell::Var(y) = cells[c] {
                        push_false(&mut r, ctx.eq_lit(y, w));
                    }
                }
                ctx.imply(!tl, &r)?;
            }
        }
        if live.len() == 1 {
            let (v, cells) = &self.rows[live[0]];
            let il = ctx.eq_lit(self.index, *v);
            if ctx.is_true(il) {
                for (c, &t) in self.targets.iter().enumerate() {
                    let Cell::Var(y) = cells[c] else { continue };
                    for wi in 0..ctx.int(y).values.len() {
                        let w = ctx.int(y).values[wi];
                        let yl = ctx.int(y).eq[wi];
                        if ctx.is_false(yl) || ctx.in_dom(t, w) {
                            continue;
                        }
                        let mut r = vec![!yl, !il];
                        push_false(&mut r, ctx.eq_lit(t, w));
                        ctx.imply(!yl, &r)?;
                    }
                }
            }
        }
        self.live = live;
        Ok(())
    }
}

/// Extensional constraint with wildcard cells.
pub struct TableProp {
    vars: Vec<IntVar>,
    rows: Vec<Vec<Option<i32>>>,
    dead: Vec<Option<usize>>,
}

impl TableProp {
    pub fn new(vars: Vec<IntVar>, rows: Vec<Vec<Option<i32>>>) -> Self {
        let n = rows.len();
        TableProp { vars, rows, dead: vec![None; n] }
    }

    fn dead_lit(&self, ctx: &Ctx<'_>, r: usize) -> Lit {
        let c = self.dead[r].unwrap();
        ctx.eq_lit(self.vars[c], self.rows[r][c].unwrap())
    }
}

impl Propagator for TableProp {
    fn name(&self) -> &'static str {
        "table"
    }

    fn watches(&self, ctx: &Ctx<'_>) -> Vec<(Lit, u32)> {
        let mut vars = self.vars.clone();
        vars.sort_unstable();
        vars.dedup();
        vars.iter().flat_map(|&x| ctx.int(x).eq.iter().map(|&l| (!l, 0))).collect()
    }

    fn propagate(&mut self, ctx: &mut Ctx<'_>) -> Result<(), Conflict> {
        let mut any_live = false;
        for (ri, row) in self.rows.iter().enumerate() {
            self.dead[ri] = row
                .iter()
                .enumerate()
                .find(|(c, cell)| cell.is_some_and(|v| !ctx.in_dom(self.vars[*c], v)))
                .map(|(c, _)| c);
            any_live |= self.dead[ri].is_none();
        }
        if !any_live {
            let r: Vec<Lit> = (0..self.rows.len())
                .map(|ri| self.dead_lit(ctx, ri))
                .filter(|&l| l != Lit::FALSE)
                .collect();
            return Err(ctx.conflict(&r));
        }
        for (c, &x) in self.vars.iter().enumerate() {
            for wi in 0..ctx.int(x).values.len() {
                let w = ctx.int(x).values[wi];
                let xl = ctx.int(x).eq[wi];
                if ctx.is_false(xl) {
                    continue;
                }
                let supported = self
                    .rows
                    .iter()
                    .enumerate()
                    .any(|(ri, row)| self.dead[ri].is_none() && row[c].is_none_or(|v| v == w));
                if supported {
                    continue;
                }
                let mut r = vec![!xl];
                for (ri, row) in self.rows.iter().enumerate() {
                    if row[c].is_none_or(|v| v == w) {
                        push_false(&mut r, self.dead_lit(ctx, ri));
                    }
                }
                ctx.imply(!xl, &r)?;
            }
        }
        Ok(())
    }
}

/// At most `bound` of `lits` are true.
pub struct AtMostProp {
    lits: Vec<Lit>,
    bound: usize,
}

impl AtMostProp {
    pub fn new(lits: Vec<Lit>, bound: usize) -> Self {
        AtMostProp { lits, bound }
    }
}

impl Propagator for AtMostProp {
    fn name(&self) -> &'static str {
        "at-most"
    }

    fn watches(&self, _ctx: &Ctx<'_>) -> Vec<(Lit, u32)> {
        self.lits.iter().map(|&l| (l, 0)).collect()
    }

    fn propagate(&mut self, ctx: &mut Ctx<'_>) -> Result<(), Conflict> {
        let trues: Vec<Lit> = self.lits.iter().copied().filter(|&l| ctx.is_true(l)).collect();
        if trues.len() > self.bound {
            let r: Vec<Lit> = trues[..=self.bound].iter().map(|&l| !l).collect();
            return Err(ctx.conflict(&r));
        }
        if trues.len() == self.bound {
            let mut r: Vec<Lit> = trues.iter().map(|&l| !l).collect();
            for &l in &self.lits {
                if ctx.value(l) == super::lit::LBool::Undef {
                    r.push(!l);
                    ctx.imply(!l, &r)?;
                    r.pop();
                }
            }
        }
        Ok(())
    }
}
