use alloc::string::String;
use core::fmt::Write;

use super::{FstripsTask, Term};

impl FstripsTask {
    fn term_str(&self, t: Term, params: &[(String, usize)]) -> String {
        match t {
            Term::Var(i) => alloc::format!("?{}", params[i].0),
            Term::Obj(o) => self.universe[o as usize].clone(),
        }
    }

    /// Deterministic text listing with symbols in sorted order.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "task {}", self.name);
        let mut sorts: alloc::vec::Vec<usize> = (0..self.sorts.len()).collect();
        sorts.sort_by(|a, b| self.sorts[*a].name.cmp(&self.sorts[*b].name));
        for i in sorts {
            let so = &self.sorts[i];
            let _ = write!(s, "sort {} =", so.name);
            for &m in &so.members {
                let _ = write!(s, " {}", self.object_name(m));
            }
            s.push('\n');
        }
        let mut fs: alloc::vec::Vec<usize> = (0..self.functions.len()).collect();
        fs.sort_by(|a, b| self.functions[*a].name.cmp(&self.functions[*b].name));
        for fi in fs {
            let f = &self.functions[fi];
            let _ = write!(s, "function {} :", f.name);
            if f.domain.is_empty() {
                s.push_str(" ()");
            }
            for &d in &f.domain {
                let _ = write!(s, " {}", self.sorts[d].name);
            }
            let _ = writeln!(s, " -> {}", self.sorts[f.codomain].name);
            for p in 0..self.num_points(fi) {
                let args = self.point_args(fi, p);
                let _ = write!(s, "  init {}(", f.name);
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        s.push(',');
                    }
                    s.push_str(self.object_name(*a));
                }
                let _ = writeln!(s, ") = {}", self.object_name(self.init.value(fi, p)));
            }
        }
        let mut rs: alloc::vec::Vec<usize> = (0..self.statics.len()).collect();
        rs.sort_by(|a, b| self.statics[*a].name.cmp(&self.statics[*b].name));
        for ri in rs {
            let r = &self.statics[ri];
            let _ = writeln!(s, "static {} ({} tuples)", r.name, r.tuples.len());
            for t in &r.tuples {
                s.push_str("  (");
                for (k, a) in t.iter().enumerate() {
                    if k > 0 {
                        s.push(' ');
                    }
                    s.push_str(self.object_name(*a));
                }
                s.push_str(")\n");
            }
        }
        let mut ss: alloc::vec::Vec<usize> = (0..self.schemas.len()).collect();
        ss.sort_by(|a, b| self.schemas[*a].name.cmp(&self.schemas[*b].name));
        for si in ss {
            let sc = &self.schemas[si];
            let _ = write!(s, "schema {}(", sc.name);
            for (k, (n, so)) in sc.params.iter().enumerate() {
                if k > 0 {
                    s.push_str(", ");
                }
                let _ = write!(s, "?{} - {}", n, self.sorts[*so].name);
            }
            s.push_str(")\n");
            for (tag, atoms) in [("pre", &sc.pre), ("eff", &sc.eff)] {
                for a in atoms.iter() {
                    let _ = write!(s, "  {tag} {}(", self.functions[a.func].name);
                    for (k, t) in a.args.iter().enumerate() {
                        if k > 0 {
                            s.push(',');
                        }
                        s.push_str(&self.term_str(*t, &sc.params));
                    }
                    let _ = writeln!(s, ") = {}", self.term_str(a.value, &sc.params));
                }
            }
            for st in &sc.statics {
                let _ = write!(s, "  static {}{}(", if st.positive { "" } else { "not " }, self.statics[st.rel].name);
                for (k, t) in st.args.iter().enumerate() {
                    if k > 0 {
                        s.push(',');
                    }
                    s.push_str(&self.term_str(*t, &sc.params));
                }
                s.push_str(")\n");
            }
            for c in &sc.constraints {
                let _ = writeln!(
                    s,
                    "  where {} {} {}",
                    self.term_str(c.lhs, &sc.params),
                    if c.equal { "=" } else { "!=" },
                    self.term_str(c.rhs, &sc.params)
                );
            }
        }
        for g in &self.goal {
            let _ = write!(s, "goal {}(", self.functions[g.func].name);
            for (k, a) in g.args.iter().enumerate() {
                if k > 0 {
                    s.push(',');
                }
                s.push_str(self.object_name(*a));
            }
            let _ = writeln!(s, ") = {}", self.object_name(g.value));
        }
        for g in &self.static_goal {
            let _ = write!(s, "goal {}{}(", if g.positive { "" } else { "not " }, self.statics[g.rel].name);
            for (k, a) in g.args.iter().enumerate() {
                if k > 0 {
                    s.push(' ');
                }
                s.push_str(self.object_name(*a));
            }
            s.push_str(")\n");
        }
        s
    }
}
