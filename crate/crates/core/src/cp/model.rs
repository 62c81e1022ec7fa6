//! Declarative constraint model. The solver compiles it; the checker
//! evaluates it directly.

use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Not;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntVar(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoolVar(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    True,
    Bool(BoolVar),
    /// `x = v`
    Eq(IntVar, i32),
    /// `x >= v`
    Ge(IntVar, i32),
}

/// Literal over model variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MLit {
    pub atom: Atom,
    pub positive: bool,
}

impl MLit {
    pub const TRUE: MLit = MLit { atom: Atom::True, positive: true };
    pub const FALSE: MLit = MLit { atom: Atom::True, positive: false };

    pub fn holds(&self, a: &Assignment) -> bool {
        let v = match self.atom {
            Atom::True => true,
            Atom::Bool(b) => a.bools[b.0 as usize],
            Atom::Eq(x, v) => a.ints[x.0 as usize] == v,
            Atom::Ge(x, v) => a.ints[x.0 as usize] >= v,
        };
        v == self.positive
    }
}

impl Not for MLit {
    type Output = MLit;
    fn not(self) -> MLit {
        MLit { atom: self.atom, positive: !self.positive }
    }
}

impl IntVar {
    pub fn lit_eq(self, v: i32) -> MLit {
        MLit { atom: Atom::Eq(self, v), positive: true }
    }
    pub fn lit_ne(self, v: i32) -> MLit {
        MLit { atom: Atom::Eq(self, v), positive: false }
    }
    pub fn lit_ge(self, v: i32) -> MLit {
        MLit { atom: Atom::Ge(self, v), positive: true }
    }
    pub fn lit_le(self, v: i32) -> MLit {
        MLit { atom: Atom::Ge(self, v + 1), positive: false }
    }
}

impl BoolVar {
    pub fn lit(self) -> MLit {
        MLit { atom: Atom::Bool(self), positive: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Const(i32),
    Var(IntVar),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    Clause(Vec<MLit>),
    /// For the row keyed by the value of `index`, `targets[c] = cells[c]` for
    /// every column. Index values without a row are forbidden.
    Element { index: IntVar, targets: Vec<IntVar>, rows: Vec<(i32, Vec<Cell>)> },
    /// Allowed tuples; `None` matches anything.
    Table { vars: Vec<IntVar>, rows: Vec<Vec<Option<i32>>> },
    AtMost { lits: Vec<MLit>, bound: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntDecl {
    pub name: String,
    /// Ascending, distinct.
    pub values: Vec<i32>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Model {
    pub ints: Vec<IntDecl>,
    pub bools: Vec<String>,
    /// Booleans the solver never branches on.
    pub aux: Vec<BoolVar>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("variable `{0}` has an empty domain")]
    EmptyDomain(String),
}

/// Total assignment to model variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    pub ints: Vec<i32>,
    pub bools: Vec<bool>,
}

impl Assignment {
    pub fn int(&self, x: IntVar) -> i32 {
        self.ints[x.0 as usize]
    }
    pub fn bool(&self, b: BoolVar) -> bool {
        self.bools[b.0 as usize]
    }
}

impl Model {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn new_int_var(&mut self, name: impl Into<String>, lo: i32, hi: i32) -> Result<IntVar, ModelError> {
        self.new_int_var_values(name, (lo..=hi).collect())
    }

    pub fn new_int_var_values(&mut self, name: impl Into<String>, mut values: Vec<i32>) -> Result<IntVar, ModelError> {
        values.sort_unstable();
        values.dedup();
        let name = name.into();
        if values.is_empty() {
            return Err(ModelError::EmptyDomain(name));
        }
        self.ints.push(IntDecl { name, values });
        Ok(IntVar(self.ints.len() as u32 - 1))
    }

    pub fn new_bool(&mut self, name: impl Into<String>) -> BoolVar {
        self.bools.push(name.into());
        BoolVar(self.bools.len() as u32 - 1)
    }

    /// A Boolean defined by the constraints around it; never a decision.
    pub fn new_aux_bool(&mut self, name: impl Into<String>) -> BoolVar {
        let b = self.new_bool(name);
        self.aux.push(b);
        b
    }

    pub fn domain(&self, x: IntVar) -> &[i32] {
        &self.ints[x.0 as usize].values
    }

    pub fn in_domain(&self, x: IntVar, v: i32) -> bool {
        self.domain(x).binary_search(&v).is_ok()
    }

    /// Like `x.lit_eq(v)` but constant-folds values outside the domain.
    pub fn eq_lit(&self, x: IntVar, v: i32) -> MLit {
        if !self.in_domain(x, v) {
            MLit::FALSE
        } else if self.domain(x).len() == 1 {
            MLit::TRUE
        } else {
            x.lit_eq(v)
        }
    }

    pub fn post(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub fn clause(&mut self, lits: impl IntoIterator<Item = MLit>) {
        self.post(Constraint::Clause(lits.into_iter().collect()));
    }

    /// `guard -> a = b`
    pub fn post_eq_if(&mut self, guard: MLit, a: IntVar, b: IntVar) {
        let da = self.domain(a).to_vec();
        for &v in &da {
            let c = [!guard, !self.eq_lit(a, v), self.eq_lit(b, v)];
            self.clause(c);
        }
        let db = self.domain(b).to_vec();
        for &v in &db {
            if !self.in_domain(a, v) {
                let c = [!guard, !self.eq_lit(b, v)];
                self.clause(c);
            }
        }
    }

    /// `guard -> a != b`
    pub fn post_ne_if(&mut self, guard: MLit, a: IntVar, b: IntVar) {
        let da = self.domain(a).to_vec();
        for &v in &da {
            if self.in_domain(b, v) {
                let c = [!guard, !self.eq_lit(a, v), !self.eq_lit(b, v)];
                self.clause(c);
            }
        }
    }

    /// `guard -> a = v` (`!=` if `equal` is false) for a constant `v`.
    pub fn post_eq_const_if(&mut self, guard: MLit, a: IntVar, v: i32, equal: bool) {
        let l = self.eq_lit(a, v);
        let c = [!guard, if equal { l } else { !l }];
        self.clause(c);
    }

    /// Evaluates every constraint on `a`; returns the index of the first
    /// violated one.
    pub fn check(&self, a: &Assignment) -> Result<(), usize> {
        for (i, x) in a.ints.iter().enumerate() {
            if !self.ints[i].values.contains(x) {
                return Err(usize::MAX);
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            let ok = match c {
                Constraint::Clause(ls) => ls.iter().any(|l| l.holds(a)),
                Constraint::Element { index, targets, rows } => {
                    let iv = a.int(*index);
                    rows.iter().any(|(k, cells)| {
                        *k == iv
                            && cells.iter().zip(targets).all(|(cell, t)| {
                                let cv = match cell {
                                    Cell::Const(v) => *v,
                                    Cell::Var(y) => a.int(*y),
                                };
                                cv == a.int(*t)
                            })
                    })
                }
                Constraint::Table { vars, rows } => rows.iter().any(|r| {
                    r.iter().zip(vars).all(|(cell, x)| cell.is_none_or(|v| v == a.int(*x)))
                }),
                Constraint::AtMost { lits, bound } => lits.iter().filter(|l| l.holds(a)).count() <= *bound,
            };
            if !ok {
                return Err(i);
            }
        }
        Ok(())
    }

    fn lit_text(&self, l: &MLit) -> String {
        let neg = if l.positive { "" } else { "!" };
        match l.atom {
            Atom::True => alloc::format!("{}", l.positive),
            Atom::Bool(b) => alloc::format!("{neg}{}", self.bools[b.0 as usize]),
            Atom::Eq(x, v) => {
                let op = if l.positive { "=" } else { "!=" };
                alloc::format!("{} {op} {v}", self.ints[x.0 as usize].name)
            }
            Atom::Ge(x, v) => {
                let op = if l.positive { ">=" } else { "<" };
                alloc::format!("{} {op} {v}", self.ints[x.0 as usize].name)
            }
        }
    }

    /// Plain-text listing, one declaration or constraint per line, in
    /// creation order.
    pub fn dump(&self) -> String {
        use core::fmt::Write;
        let mut s = String::new();
        for d in &self.ints {
            let _ = writeln!(s, "int {} {:?}", d.name, d.values);
        }
        for b in &self.bools {
            let _ = writeln!(s, "bool {b}");
        }
        let name = |x: &IntVar| self.ints[x.0 as usize].name.as_str();
        let cell = |c: &Cell| match c {
            Cell::Const(v) => alloc::format!("{v}"),
            Cell::Var(y) => String::from(name(y)),
        };
        for c in &self.constraints {
            match c {
                Constraint::Clause(ls) => {
                    let parts: Vec<String> = ls.iter().map(|l| self.lit_text(l)).collect();
                    let _ = writeln!(s, "clause [{}]", parts.join(" | "));
                }
                Constraint::Element { index, targets, rows } => {
                    let t: Vec<&str> = targets.iter().map(name).collect();
                    let _ = writeln!(s, "element {} -> ({})", name(index), t.join(", "));
                    for (k, cells) in rows {
                        let cs: Vec<String> = cells.iter().map(cell).collect();
                        let _ = writeln!(s, "  {k}: ({})", cs.join(", "));
                    }
                }
                Constraint::Table { vars, rows } => {
                    let t: Vec<&str> = vars.iter().map(name).collect();
                    let _ = writeln!(s, "table ({})", t.join(", "));
                    for r in rows {
                        let cs: Vec<String> =
                            r.iter().map(|v| v.map_or(String::from("*"), |v| alloc::format!("{v}"))).collect();
                        let _ = writeln!(s, "  ({})", cs.join(", "));
                    }
                }
                Constraint::AtMost { lits, bound } => {
                    let parts: Vec<String> = lits.iter().map(|l| self.lit_text(l)).collect();
                    let _ = writeln!(s, "atmost {bound} [{}]", parts.join(", "));
                }
            }
        }
        s
    }
}
