//! Random micro-models and a brute-force enumerator sharing no code with the
//! solver's propagators.

use lcplan_core::cp::{Assignment, Cell, Constraint, IntVar, MLit, Model};
use rand::rngs::SmallRng;
use rand::Rng;

pub const MAX_PRODUCT: u64 = 4096;

fn random_lit(rng: &mut SmallRng, m: &Model) -> MLit {
    let nb = m.bools.len();
    let ni = m.ints.len();
    let k = rng.gen_range(0..nb + ni);
    let l = if k < nb {
        lcplan_core::cp::BoolVar(k as u32).lit()
    } else {
        let x = IntVar((k - nb) as u32);
        let d = m.domain(x);
        let v = d[rng.gen_range(0..d.len())];
        if rng.gen_bool(0.5) {
            x.lit_eq(v)
        } else {
            x.lit_ge(v + rng.gen_range(0..2))
        }
    };
    if rng.gen_bool(0.5) {
        l
    } else {
        !l
    }
}

pub fn random_model(rng: &mut SmallRng) -> Model {
    let mut m;
    loop {
        m = Model::new();
        let nvars = rng.gen_range(1..=10);
        let mut product: u64 = 1;
        for i in 0..nvars {
            if rng.gen_bool(0.3) {
                if rng.gen_bool(0.3) {
                    m.new_aux_bool(format!("b{i}"));
                } else {
                    m.new_bool(format!("b{i}"));
                }
                product *= 2;
            } else {
                let size = rng.gen_range(1..=5);
                let lo = rng.gen_range(-2..=2);
                let mut vals: Vec<i32> = (lo..lo + 7).collect();
                while vals.len() > size {
                    vals.remove(rng.gen_range(0..vals.len()));
                }
                m.new_int_var_values(format!("x{i}"), vals).unwrap();
                product *= size as u64;
            }
        }
        if product <= MAX_PRODUCT {
            break;
        }
    }
    let ints: Vec<IntVar> = (0..m.ints.len() as u32).map(IntVar).collect();
    let heavy = rng.gen_bool(0.5);
    let ncons = if heavy { rng.gen_range(8..=30) } else { rng.gen_range(0..=8) };
    for _ in 0..ncons {
        let kind = rng.gen_range(0..10);
        if kind < 5 || ints.is_empty() || (heavy && kind < 9) {
            let len = if heavy { 3 } else { rng.gen_range(1..=4) };
            let lits: Vec<MLit> = (0..len).map(|_| random_lit(rng, &m)).collect();
            m.post(Constraint::Clause(lits));
        } else if kind < 8 {
            let index = ints[rng.gen_range(0..ints.len())];
            let ncols = rng.gen_range(1..=2);
            let targets: Vec<IntVar> = (0..ncols).map(|_| ints[rng.gen_range(0..ints.len())]).collect();
            let mut rows = Vec::new();
            for &v in m.domain(index) {
                if rng.gen_bool(0.85) {
                    let cells = (0..ncols)
                        .map(|_| {
                            if rng.gen_bool(0.5) {
                                Cell::Const(rng.gen_range(-2..=8))
                            } else {
                                Cell::Var(ints[rng.gen_range(0..ints.len())])
                            }
                        })
                        .collect();
                    rows.push((v, cells));
                }
            }
            m.post(Constraint::Element { index, targets, rows });
        } else {
            let arity = rng.gen_range(1..=3);
            let vars: Vec<IntVar> = (0..arity).map(|_| ints[rng.gen_range(0..ints.len())]).collect();
            let nrows = rng.gen_range(0..=6);
            let rows = (0..nrows)
                .map(|_| {
                    vars.iter()
                        .map(|&x| {
                            if rng.gen_bool(0.2) {
                                None
                            } else {
                                let d = m.domain(x);
                                Some(d[rng.gen_range(0..d.len())])
                            }
                        })
                        .collect()
                })
                .collect();
            m.post(Constraint::Table { vars, rows });
        }
    }
    m
}

/// Every solution of `m`, by exhaustive enumeration.
pub fn enumerate(m: &Model) -> Vec<Assignment> {
    let mut out = Vec::new();
    let mut a = Assignment { ints: vec![0; m.ints.len()], bools: vec![false; m.bools.len()] };
    fn rec(m: &Model, a: &mut Assignment, i: usize, out: &mut Vec<Assignment>) {
        let nb = m.bools.len();
        if i == nb + m.ints.len() {
            if holds(m, a) {
                out.push(a.clone());
            }
            return;
        }
        if i < nb {
            for b in [false, true] {
                a.bools[i] = b;
                rec(m, a, i + 1, out);
            }
        } else {
            for &v in &m.ints[i - nb].values {
                a.ints[i - nb] = v;
                rec(m, a, i + 1, out);
            }
        }
    }
    rec(m, &mut a, 0, &mut out);
    out
}

fn lit_holds(l: &MLit, a: &Assignment) -> bool {
    use lcplan_core::cp::Atom;
    let v = match l.atom {
        Atom::True => true,
        Atom::Bool(b) => a.bools[b.0 as usize],
        Atom::Eq(x, v) => a.ints[x.0 as usize] == v,
        Atom::Ge(x, v) => a.ints[x.0 as usize] >= v,
    };
    v == l.positive
}

/// Direct semantics, written independently of `Model::check`.
pub fn holds(m: &Model, a: &Assignment) -> bool {
    m.constraints.iter().all(|c| match c {
        Constraint::Clause(ls) => ls.iter().any(|l| lit_holds(l, a)),
        Constraint::Element { index, targets, rows } => {
            let i = a.ints[index.0 as usize];
            match rows.iter().find(|r| r.0 == i) {
                None => false,
                Some((_, cells)) => cells.iter().zip(targets).all(|(c, t)| {
                    let v = match c {
                        Cell::Const(k) => *k,
                        Cell::Var(y) => a.ints[y.0 as usize],
                    };
                    v == a.ints[t.0 as usize]
                }),
            }
        }
        Constraint::Table { vars, rows } => rows
            .iter()
            .any(|r| r.iter().zip(vars).all(|(c, x)| c.is_none() || *c == Some(a.ints[x.0 as usize]))),
        Constraint::AtMost { lits, bound } => lits.iter().filter(|l| lit_holds(l, a)).count() <= *bound,
    })
}

pub struct MicroReport {
    pub models: usize,
    pub verdict_mismatches: usize,
    pub checker_failures: usize,
    pub learned_checked: usize,
    pub unsound_learned: usize,
    pub sat: usize,
    pub conflicts: u64,
}

/// Solves `count` random models, comparing against enumeration.
pub fn run_suite(seed: u64, count: usize) -> MicroReport {
    use lcplan_core::cp::{Budget, SolveResult, Solver, SolverConfig};
    use rand::SeedableRng;
    let mut rng = SmallRng::seed_from_u64(seed);
    let mut rep =
        MicroReport { models: 0, verdict_mismatches: 0, checker_failures: 0, learned_checked: 0, unsound_learned: 0, sat: 0, conflicts: 0 };
    for i in 0..count {
        let m = random_model(&mut rng);
        let sols = enumerate(&m);
        let cfg = SolverConfig { trace: true, seed: i as u64, restart_unit: 4, ..SolverConfig::default() };
        let mut s = Solver::new(&m, cfg);
        let r = s.solve(Budget::unlimited());
        rep.models += 1;
        rep.conflicts += s.stats().conflicts;
        rep.sat += usize::from(r == SolveResult::Sat);
        let expected = if sols.is_empty() { SolveResult::Unsat } else { SolveResult::Sat };
        if r != expected {
            rep.verdict_mismatches += 1;
        }
        if r == SolveResult::Sat {
            let a = s.assignment();
            if !holds(&m, &a) || m.check(&a).is_err() {
                rep.checker_failures += 1;
            }
        }
        for c in s.learned_trace() {
            rep.learned_checked += 1;
            let ml: Vec<MLit> = c.iter().map(|&l| s.lit_meaning(l)).collect();
            if !sols.iter().all(|a| ml.iter().any(|l| lit_holds(l, a))) {
                rep.unsound_learned += 1;
            }
        }
    }
    rep
}
