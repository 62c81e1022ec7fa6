use alloc::vec::Vec;

use crate::pddl::typecheck::{ObjId, PredId, SortId, TypedTask};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FTerm {
    Var(u32),
    Obj(ObjId),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FLit {
    pub pred: PredId,
    pub args: Vec<FTerm>,
    pub positive: bool,
}

/// `exists vars. lits and neqs`, where every entry of `neqs` is a
/// disjunction of disequalities.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Formula {
    pub vars: Vec<SortId>,
    pub lits: Vec<FLit>,
    pub neqs: Vec<Vec<(FTerm, FTerm)>>,
}

/// Intersection of two sorts of a tree hierarchy.
fn meet(task: &TypedTask, a: SortId, b: SortId) -> Option<SortId> {
    if task.is_subsort(a, b) {
        Some(a)
    } else if task.is_subsort(b, a) {
        Some(b)
    } else {
        None
    }
}

/// Builds the canonical form of `exists vars. lits and eqs and neqs`.
/// Returns `None` when the formula is unsatisfiable on syntactic grounds
/// (constant clash, complementary literals, empty disequality clause).
///
/// Disequality clauses over variables that no literal mentions are dropped,
/// which can only weaken the formula.
pub fn canonicalize(
    task: &TypedTask,
    vars: &[SortId],
    lits: &[FLit],
    eqs: &[(FTerm, FTerm)],
    neqs: &[Vec<(FTerm, FTerm)>],
) -> Option<Formula> {
    let n = vars.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut sort: Vec<SortId> = vars.to_vec();
    let mut bound: Vec<Option<ObjId>> = alloc::vec![None; n];
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b) in eqs {
        match (a, b) {
            (FTerm::Obj(x), FTerm::Obj(y)) => {
                if x != y {
                    return None;
                }
            }
            (FTerm::Var(v), FTerm::Obj(o)) | (FTerm::Obj(o), FTerm::Var(v)) => {
                let r = find(&mut parent, v as usize);
                if bound[r].is_some_and(|b| b != o) || !task.in_sort(o, sort[r]) {
                    return None;
                }
                bound[r] = Some(o);
            }
            (FTerm::Var(u), FTerm::Var(v)) => {
                let (ru, rv) = (find(&mut parent, u as usize), find(&mut parent, v as usize));
                if ru == rv {
                    continue;
                }
                let s = meet(task, sort[ru], sort[rv])?;
                let b = match (bound[ru], bound[rv]) {
                    (Some(x), Some(y)) if x != y => return None,
                    (Some(x), _) | (_, Some(x)) => Some(x),
                    _ => None,
                };
                if b.is_some_and(|o| !task.in_sort(o, s)) {
                    return None;
                }
                let (lo, hi) = if ru < rv { (ru, rv) } else { (rv, ru) };
                parent[hi] = lo;
                sort[lo] = s;
                bound[lo] = b;
            }
        }
    }
    let resolve = |p: &mut Vec<usize>, t: FTerm| match t {
        FTerm::Obj(_) => t,
        FTerm::Var(v) => {
            let r = find(p, v as usize);
            match bound[r] {
                Some(o) => FTerm::Obj(o),
                None => FTerm::Var(r as u32),
            }
        }
    };

    let mut ls: Vec<FLit> = lits
        .iter()
        .map(|l| FLit {
            pred: l.pred,
            args: l.args.iter().map(|&t| resolve(&mut parent, t)).collect(),
            positive: l.positive,
        })
        .collect();
    ls.sort();
    ls.dedup();
    for w in ls.windows(2) {
        if w[0].pred == w[1].pred && w[0].args == w[1].args {
            return None;
        }
    }
    let mut used = alloc::vec![false; n];
    for l in &ls {
        for t in &l.args {
            if let FTerm::Var(v) = t {
                used[*v as usize] = true;
            }
        }
    }
    for (v, &u) in used.iter().enumerate() {
        if u && task.sorts[sort[v]].members.is_empty() {
            return None;
        }
    }

    let mut clauses: Vec<Vec<(FTerm, FTerm)>> = Vec::new();
    'clause: for c in neqs {
        let mut out = Vec::new();
        for &(a, b) in c {
            let (a, b) = (resolve(&mut parent, a), resolve(&mut parent, b));
            if a == b {
                continue;
            }
            let always = match (a, b) {
                (FTerm::Obj(_), FTerm::Obj(_)) => true,
                (FTerm::Var(v), FTerm::Obj(o)) | (FTerm::Obj(o), FTerm::Var(v)) => {
                    !task.in_sort(o, sort[v as usize])
                }
                (FTerm::Var(u), FTerm::Var(v)) => meet(task, sort[u as usize], sort[v as usize]).is_none(),
            };
            if always {
                continue 'clause;
            }
            out.push(if a <= b { (a, b) } else { (b, a) });
        }
        if out.is_empty() {
            return None;
        }
        let mentions_unused = out.iter().any(|&(a, b)| {
            [a, b].iter().any(|t| matches!(t, FTerm::Var(v) if !used[*v as usize]))
        });
        if !mentions_unused {
            clauses.push(out);
        }
    }

    // Variable order: first occurrence in literals sorted by a key that
    // only sees already-ranked variables; repeat until stable.
    let mut rank: Vec<u32> = alloc::vec![u32::MAX; n];
    for _ in 0..8 {
        let key = |l: &FLit, rank: &[u32]| {
            let args: Vec<(u8, u32)> = l
                .args
                .iter()
                .map(|t| match *t {
                    FTerm::Obj(o) => (0, o),
                    FTerm::Var(v) => (1, rank[v as usize]),
                })
                .collect();
            (l.pred, l.positive, args)
        };
        ls.sort_by_cached_key(|l| key(l, &rank));
        let mut next = alloc::vec![u32::MAX; n];
        let mut k = 0;
        for l in &ls {
            for t in &l.args {
                if let FTerm::Var(v) = *t {
                    if next[v as usize] == u32::MAX {
                        next[v as usize] = k;
                        k += 1;
                    }
                }
            }
        }
        let stable = next == rank;
        rank = next;
        if stable {
            break;
        }
    }
    let nv = rank.iter().filter(|&&r| r != u32::MAX).count();
    let mut new_vars = alloc::vec![0; nv];
    for v in 0..n {
        if rank[v] != u32::MAX {
            new_vars[rank[v] as usize] = sort[v];
        }
    }
    let rn = |t: FTerm| match t {
        FTerm::Var(v) => FTerm::Var(rank[v as usize]),
        o => o,
    };
    for l in &mut ls {
        for t in &mut l.args {
            *t = rn(*t);
        }
    }
    ls.sort();
    for c in &mut clauses {
        for d in c.iter_mut() {
            let (a, b) = (rn(d.0), rn(d.1));
            *d = if a <= b { (a, b) } else { (b, a) };
        }
        c.sort();
        c.dedup();
    }
    clauses.sort();
    clauses.dedup();
    Some(Formula { vars: new_vars, lits: ls, neqs: clauses })
}

impl Formula {
    pub fn canonical(&self, task: &TypedTask) -> Option<Formula> {
        canonicalize(task, &self.vars, &self.lits, &[], &self.neqs)
    }

    /// The sub-formula on the literals selected by `keep`.
    pub fn restrict(&self, task: &TypedTask, keep: &[usize]) -> Option<Formula> {
        let lits: Vec<FLit> = keep.iter().map(|&i| self.lits[i].clone()).collect();
        canonicalize(task, &self.vars, &lits, &[], &self.neqs)
    }
}
