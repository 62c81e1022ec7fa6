#[path = "common/ground.rs"]
mod ground;

use std::collections::BTreeSet;

use lcplan_core::fstrips::{boolean_transform, FstripsTask, Mapping, State};
use lcplan_core::instances::{self, suite};
use lcplan_core::pddl::TypedTask;
use lcplan_core::reach::*;
use lcplan_core::validate::reachable_states;

fn var(i: u32) -> FTerm {
    FTerm::Var(i)
}

fn lit(t: &TypedTask, p: &str, args: Vec<FTerm>, positive: bool) -> FLit {
    FLit { pred: t.pred_by_name(p).unwrap(), args, positive }
}

fn obj(t: &TypedTask, n: &str) -> FTerm {
    FTerm::Obj(t.object_by_name(n).unwrap())
}

fn visitall3() -> TypedTask {
    instances::visitall(3, 3).load()
}

#[test]
fn match_pairs_examples() {
    let t = visitall3();
    let mv = &t.schemas[0];
    let (sp, ip) = match_pairs(mv, &[lit(&t, "visited", vec![var(0)], true)]);
    // move's effects: (not (at ?from)), (at ?to), (visited ?to)
    assert_eq!(sp, vec![(2, 0)]);
    assert!(ip.is_empty());

    let bw = instances::blocksworld_3ops(3, 0).load();
    let mv = &bw.schemas[0];
    let (sp, ip) = match_pairs(mv, &[lit(&bw, "clear", vec![var(0)], true)]);
    // move: on(x,z), not on(x,y), clear(y), not clear(z)
    assert_eq!(sp, vec![(2, 0)]);
    assert_eq!(ip, vec![(3, 0)]);
    let (sp, ip) = match_pairs(mv, &[]);
    assert!(sp.is_empty() && ip.is_empty());
    let (sp, ip) = match_pairs(&t.schemas[0], &[lit(&t, "connected", vec![var(0), var(1)], true)]);
    assert!(sp.is_empty() && ip.is_empty());
}

#[test]
fn regress_uniqueness_of_at() {
    let t = visitall3();
    let at = t.pred_by_name("at").unwrap();
    let psi = uniqueness_formula(&t, at, 0);
    let all = regress_all(&t, &psi, &t.schemas[0]);
    // two supporter pairs, one per literal: four subsets
    assert_eq!(all.len(), 4);
    let sat: Vec<_> = all.iter().filter(|(_, f)| f.is_some()).collect();
    // supporting both literals forces y1 = y2 = ?to against y1 != y2
    assert_eq!(sat.len(), 3);
    assert!(all.iter().any(|(s, f)| s.len() == 2 && f.is_none()));
    let r = regress(&t, &psi, &t.schemas[0]);
    assert_eq!(r.len(), 3);
    // the empty subset keeps both at-literals and adds the precondition
    let empty = r.iter().find(|g| g.support.is_empty()).unwrap();
    assert_eq!(empty.formula.lits.len(), 4);
}

#[test]
fn regress_without_shared_predicates() {
    let t = visitall3();
    let psi = Formula { vars: vec![1, 1], lits: vec![lit(&t, "connected", vec![var(0), var(1)], true)], neqs: vec![] };
    let r = regress(&t, &psi, &t.schemas[0]);
    assert_eq!(r.len(), 1);
    assert!(r[0].support.is_empty());
    assert_eq!(r[0].formula.lits.len(), 3);
}

#[test]
fn regress_full_support() {
    let t = visitall3();
    let psi = Formula { vars: vec![1], lits: vec![lit(&t, "visited", vec![var(0)], true)], neqs: vec![] };
    let r = regress(&t, &psi, &t.schemas[0]);
    let full = r.iter().find(|g| g.support.len() == 1).unwrap();
    // exactly move's precondition: at(from), connected(from, to)
    assert_eq!(full.formula.lits.len(), 2);
    assert!(full.formula.lits.iter().all(|l| t.predicates[l.pred].name != "visited"));
}

#[test]
fn canonicalize_examples() {
    let t = visitall3();
    let cell = t.sort_by_name("cell").unwrap();
    let v = lit(&t, "visited", vec![var(0)], true);
    // y1 = y2 on variables absent from the literals is dropped
    let f = canonicalize(&t, &[cell, cell, cell], std::slice::from_ref(&v), &[], &[vec![(var(1), var(2))]]).unwrap();
    assert!(f.neqs.is_empty());
    assert_eq!(f.vars.len(), 1);
    // x = x is dropped
    let g = canonicalize(&t, &[cell], std::slice::from_ref(&v), &[(var(0), var(0))], &[]).unwrap();
    assert_eq!(f, g);
    // distinct constants
    assert!(canonicalize(&t, &[cell], std::slice::from_ref(&v), &[(obj(&t, "c1"), obj(&t, "c2"))], &[]).is_none());
    // x != x is false
    assert!(canonicalize(&t, &[cell], std::slice::from_ref(&v), &[], &[vec![(var(0), var(0))]]).is_none());
    // complementary literals
    let nv = lit(&t, "visited", vec![var(0)], false);
    assert!(canonicalize(&t, &[cell], &[v.clone(), nv], &[], &[]).is_none());
    // renaming: order of variables does not matter
    let a = canonicalize(
        &t,
        &[cell, cell],
        &[lit(&t, "at", vec![var(0)], true), lit(&t, "visited", vec![var(1)], true)],
        &[],
        &[vec![(var(0), var(1))]],
    );
    let b = canonicalize(
        &t,
        &[cell, cell],
        &[lit(&t, "visited", vec![var(0)], true), lit(&t, "at", vec![var(1)], true)],
        &[],
        &[vec![(var(1), var(0))]],
    );
    assert_eq!(a, b);
}

#[test]
fn entailment_examples() {
    let t = visitall3();
    let idx = InitIndex::new(&t);
    let cell = t.sort_by_name("cell").unwrap();
    let visited = Formula { vars: vec![cell], lits: vec![lit(&t, "visited", vec![var(0)], true)], neqs: vec![] };
    assert!(entailed_by_init(&t, &idx, &visited));
    let two_at = uniqueness_formula(&t, t.pred_by_name("at").unwrap(), 0);
    assert!(!entailed_by_init(&t, &idx, &two_at));
    let empty = Formula { vars: vec![], lits: vec![], neqs: vec![] };
    assert!(entailed_by_init(&t, &idx, &empty));
    let unvisited = Formula { vars: vec![cell], lits: vec![lit(&t, "visited", vec![var(0)], false)], neqs: vec![] };
    assert!(entailed_by_init(&t, &idx, &unvisited));
}

#[test]
fn hm_on_visitall() {
    let t = visitall3();
    let at = t.pred_by_name("at").unwrap();
    assert_eq!(hm(&t, &uniqueness_formula(&t, at, 0), 2, 1_000_000), HmValue::Infinite);
    let corner = Formula { vars: vec![], lits: vec![lit(&t, "visited", vec![obj(&t, "c1")], true)], neqs: vec![] };
    // h^1 splits at(from) from connected(from, c1): one step
    assert_eq!(hm(&t, &corner, 1, 1_000_000), HmValue::Finite(1));
    // h^2 keeps them together and matches the true distance from c5
    assert_eq!(hm(&t, &corner, 2, 1_000_000), HmValue::Finite(2));
    assert_eq!(hm(&t, &corner, 2, 1), HmValue::Unknown);
    let start = Formula { vars: vec![], lits: vec![lit(&t, "visited", vec![obj(&t, "c5")], true)], neqs: vec![] };
    assert_eq!(hm(&t, &start, 2, 1_000_000), HmValue::Finite(0));
}

/// BFS layers of the Boolean translation.
fn layers(typed: &TypedTask) -> (FstripsTask, Vec<Vec<State>>) {
    let t = boolean_transform(typed);
    let mut out = vec![vec![t.init.clone()]];
    let mut seen: BTreeSet<_> = out[0].iter().cloned().collect();
    loop {
        let mut next = Vec::new();
        for s in out.last().unwrap() {
            for a in t.applicable_actions(s) {
                let n = t.apply(s, &a);
                if seen.insert(n.clone()) {
                    next.push(n);
                }
            }
        }
        if next.is_empty() {
            return (t, out);
        }
        out.push(next);
    }
}

/// Exact cost of reaching `psi`: index of the first layer with a
/// satisfying state.
fn exact(typed: &TypedTask, space: &(FstripsTask, Vec<Vec<State>>), psi: &Formula) -> Option<usize> {
    space.1.iter().position(|l| l.iter().any(|s| ground::holds(typed, &space.0, s, psi)))
}

/// Ground literal pairs over fluent predicates of a small task.
fn pair_formulas(t: &TypedTask, limit: usize) -> Vec<Formula> {
    let fluent = t.fluent_predicates();
    let mut atoms = Vec::new();
    for &p in &fluent {
        let params = &t.predicates[p].params;
        let mut args = vec![0u32; params.len()];
        fn rec(t: &TypedTask, ps: &[usize], i: usize, a: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if i == ps.len() {
                out.push(a.clone());
                return;
            }
            for &o in &t.sorts[ps[i]].members {
                a[i] = o;
                rec(t, ps, i + 1, a, out);
            }
        }
        let mut tuples = Vec::new();
        rec(t, params, 0, &mut args, &mut tuples);
        for tu in tuples {
            for pos in [true, false] {
                atoms.push(FLit { pred: p, args: tu.iter().map(|&o| FTerm::Obj(o)).collect(), positive: pos });
            }
        }
    }
    let mut out = Vec::new();
    let mut k = 0usize;
    for i in 0..atoms.len() {
        for j in i + 1..atoms.len() {
            k += 1;
            // thin the quadratic list deterministically
            if k.is_multiple_of(7) && out.len() < limit {
                out.push(Formula { vars: vec![], lits: vec![atoms[i].clone(), atoms[j].clone()], neqs: vec![] });
            }
        }
    }
    out
}

#[test]
fn admissible_and_sound_infinity() {
    // (instance, also check m = 3)
    let cases = [
        (instances::visitall(2, 3), true),
        (instances::blocksworld_3ops(3, 1), false),
        (instances::blocksworld_4ops(3, 2), false),
        (instances::gripper(2), false),
        (instances::logistics_micro(1), false),
    ];
    for (inst, third) in cases {
        let t = inst.load();
        let space = layers(&t);
        let mut h1 = Hm::new(&t, 1, 1_000_000);
        let mut h2 = Hm::new(&t, 2, 1_000_000);
        let mut h3 = Hm::new(&t, if third { 3 } else { 2 }, 1_000_000);
        let mut infinite = 0;
        for psi in pair_formulas(&t, 60) {
            let e = exact(&t, &space, &psi);
            let (a, b, c) = (h1.eval(&psi), h2.eval(&psi), h3.eval(&psi));
            let num = |v: HmValue| match v {
                HmValue::Finite(x) => Some(x as usize),
                HmValue::Infinite => None,
                HmValue::Unknown => panic!("budget"),
            };
            let le = |x: Option<usize>, y: Option<usize>| match (x, y) {
                (_, None) => true,
                (None, Some(_)) => false,
                (Some(x), Some(y)) => x <= y,
            };
            // h^m <= exact cost, inf only when BFS finds no state
            assert!(le(num(b), e), "{}: h2 {b} exact {e:?} for {psi:?}", inst.name);
            assert!(le(num(c), e), "{}: h3 {c} exact {e:?}", inst.name);
            assert!(le(num(a), num(b)) && le(num(b), num(c)), "{}: not monotone", inst.name);
            if b == HmValue::Infinite {
                infinite += 1;
            }
        }
        println!("{}: {infinite} pairs proven unreachable, nodes {} {} {}", inst.name, h1.nodes(), h2.nodes(), h3.nodes());
    }
}

/// Right-uniqueness of `pred` on split `y`, checked in every reachable state.
fn bfs_right_unique(typed: &TypedTask, pred: usize, y: usize) -> bool {
    let t = boolean_transform(typed);
    let states = reachable_states(&t, 1_000_000).unwrap();
    states.iter().all(|s| {
        let atoms: Vec<Vec<u32>> =
            ground::atoms(typed, &t, s).into_iter().filter(|(p, _)| *p == pred).map(|(_, a)| a).collect();
        atoms.iter().all(|a| {
            atoms.iter().all(|b| {
                let same_x = (0..a.len()).all(|i| i == y || a[i] == b[i]);
                !same_x || a[y] == b[y]
            })
        })
    })
}

#[test]
fn visitall_at_becomes_a_mapping() {
    let t = visitall3();
    let at = t.pred_by_name("at").unwrap();
    assert_eq!(right_unique(&t, at, 0, 2, 1_000_000), Uniqueness::Proven);
    assert!(bfs_right_unique(&t, at, 0));
    let (ft, rep) = functional_transform(&t, 2, 1_000_000);
    let by = |n: &str| rep.choices.iter().find(|c| c.predicate == n).unwrap().clone();
    assert_eq!(by("at").mapping, Mapping::Function { value_position: 0 });
    assert_eq!(by("at").signature, "at: {A} → cell∪{□}");
    assert_eq!(by("visited").mapping, Mapping::Boolean);
    assert_eq!(by("connected").mapping, Mapping::Static);
    let f_at = ft.functions.iter().find(|f| f.name == "at").unwrap();
    assert!(f_at.domain.is_empty());
    // one point for at, nine for visited
    let points: usize = (0..ft.functions.len()).map(|f| ft.num_points(f)).sum();
    assert_eq!(points, 10);
}

#[test]
fn blocksworld_on_splits() {
    let t = instances::blocksworld_3ops(3, 1).load();
    let on = t.pred_by_name("on").unwrap();
    assert_eq!(right_unique(&t, on, 1, 2, 1_000_000), Uniqueness::Proven);
    assert_eq!(right_unique(&t, on, 0, 2, 1_000_000), Uniqueness::NotProven);
    assert!(bfs_right_unique(&t, on, 1));
    assert!(!bfs_right_unique(&t, on, 0));
    let (_, rep) = functional_transform(&t, 2, 1_000_000);
    let c = rep.choices.iter().find(|c| c.predicate == "on").unwrap();
    assert_eq!(c.mapping, Mapping::Function { value_position: 1 });
    assert_eq!(c.signature, "on: block → place∪{□}");
}

#[test]
fn proven_mappings_hold_in_reachable_states() {
    for inst in suite() {
        let t = inst.load();
        let (_, rep) = functional_transform(&t, 2, 1_000_000);
        for (p, c) in rep.choices.iter().enumerate() {
            if let Mapping::Function { value_position } = c.mapping {
                assert!(bfs_right_unique(&t, p, value_position), "{}: {}", inst.name, c.signature);
            }
        }
    }
}

#[test]
fn translations_have_isomorphic_state_spaces() {
    for inst in suite() {
        let typed = inst.load();
        let b = boolean_transform(&typed);
        let (f, _) = functional_transform(&typed, 2, 1_000_000);
        let sb = reachable_states(&b, 1_000_000).unwrap();
        let sf = reachable_states(&f, 1_000_000).unwrap();
        assert_eq!(sb.len(), sf.len(), "{}", inst.name);
        let ab: BTreeSet<_> = sb.iter().map(|s| ground::atoms(&typed, &b, s)).collect();
        let af: BTreeSet<_> = sf.iter().map(|s| ground::atoms(&typed, &f, s)).collect();
        assert_eq!(ab, af, "{}", inst.name);
    }
}

#[test]
fn fuel_exhaustion_falls_back_to_boolean() {
    let t = visitall3();
    let (_, rep) = functional_transform(&t, 2, 3);
    let c = rep.choices.iter().find(|c| c.predicate == "at").unwrap();
    assert_eq!(c.mapping, Mapping::Boolean);
    assert_eq!(c.tried, vec![(0, Uniqueness::Unknown)]);
}
