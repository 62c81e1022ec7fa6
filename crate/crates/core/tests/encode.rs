use lcplan_core::cp::{minimize, Assignment, Budget, MLit, SolveResult, Solver, SolverConfig};
use lcplan_core::encode::{build, CausalModel, EncodeError, EncodeOptions, Persistence, PersistenceProp, RowRef};
use lcplan_core::fstrips::{boolean_transform, FstripsTask, GroundAction, Plan};
use lcplan_core::instances::{self, suite};
use lcplan_core::pddl::load_task;
use lcplan_core::reach::functional_transform;
use lcplan_core::validate::{bfs_oracle, validate, OracleResult};

fn fn_task(inst: &instances::Instance) -> FstripsTask {
    functional_transform(&inst.load(), 2, 100_000).0
}

fn eager() -> EncodeOptions {
    EncodeOptions { persistence: Persistence::Eager, ..EncodeOptions::default() }
}

fn solve_with(cm: &CausalModel, units: &[MLit]) -> Option<Assignment> {
    let (mut s, _) = cm.solver(SolverConfig::default());
    for &u in units {
        s.add_clause(&[u]);
    }
    match s.solve(Budget::unlimited()) {
        SolveResult::Sat => {
            let a = s.assignment();
            assert_eq!(cm.model.check(&a), Ok(()));
            assert!(cm.audit_persistence(&a).is_empty());
            Some(a)
        }
        SolveResult::Unsat => None,
        SolveResult::Unknown => panic!("no budget was set"),
    }
}

fn oracle_plan(t: &FstripsTask) -> Plan {
    match bfs_oracle(t, usize::MAX, 2_000_000) {
        OracleResult::Plan(p) => p,
        r => panic!("{r:?}"),
    }
}

fn without_goal(t: &FstripsTask) -> FstripsTask {
    let mut t = t.clone();
    t.goal.clear();
    t.static_goal.clear();
    t
}

#[test]
fn visitall_two_slots() {
    let t = fn_task(&instances::visitall(3, 3));
    let cm = build(&t, 2, EncodeOptions::default()).unwrap();
    assert_eq!(cm.slots.len(), 2);
    assert_eq!(cm.arity, vec![2]);
    for s in &cm.slots {
        assert_eq!(cm.model.domain(s.act), &[0, 1]);
        assert_eq!(s.args.len(), 2);
        // at() = ?from; connected is a table
        assert_eq!(s.inputs.len(), 1);
        assert_eq!(s.outputs.len(), 2);
    }
    // at + 9 visited points
    assert_eq!(cm.stats.init_pins, 10);
    assert_eq!(cm.stats.goal_pins, 9);
    assert_eq!(cm.supports.len(), 2 + 9);
    // the reader at slot 1 can only be fed by the initial position or be
    // inactive
    let s1 = &cm.supports[0];
    assert_eq!((s1.j, s1.k), (1, 0));
    assert_eq!(s1.rows.len(), 2);
    assert_eq!(s1.rows[0], RowRef::Inactive);
    assert!(matches!(s1.rows[1], RowRef::Init(_)));
    // visited(c1) is false initially: only the visited out pins of the two
    // slots remain; visited(c5) also keeps its init row
    let g = &cm.supports[2];
    assert_eq!(g.j, 3);
    assert_eq!(g.rows.len(), 2);
    assert!(g.rows.iter().all(|r| matches!(r, RowRef::Out { pin: 1, .. })));
    assert_eq!(cm.supports[2 + 4].rows.len(), 3);
}

#[test]
fn blocksworld_slot_shape() {
    let t = fn_task(&instances::blocksworld_3ops(3, 0));
    let cm = build(&t, 2, EncodeOptions::default()).unwrap();
    let k_alpha = t.schemas.iter().map(|s| s.params.len()).max().unwrap();
    let k_pre = t.schemas.iter().map(|s| s.pre.len()).max().unwrap();
    let k_eff = t.schemas.iter().map(|s| s.eff.len()).max().unwrap();
    assert_eq!(k_alpha, 3);
    for s in &cm.slots {
        assert_eq!(s.args.len(), k_alpha);
        assert_eq!(s.inputs.len(), k_pre);
        assert_eq!(s.outputs.len(), k_eff);
    }
}

#[test]
fn move_to_table_pins() {
    let t = without_goal(&fn_task(&instances::blocksworld_3ops(3, 0)));
    let mt = t.schema_by_name("move-to-table").unwrap();
    let a = t.applicable_actions(&t.init).into_iter().find(|a| a.schema == mt).unwrap();
    let cm = build(&t, 1, EncodeOptions::default()).unwrap();
    let units = cm.pin_plan(&Plan { steps: vec![a.clone()] }).unwrap();
    let asg = solve_with(&cm, &units).unwrap();
    let s = &cm.slots[0];
    assert_eq!(asg.int(s.args[2]), cm.box_obj);
    let active_out = s.outputs.iter().filter(|p| asg.int(p.fsym) != cm.box_fsym).count();
    let active_in = s.inputs.iter().filter(|p| asg.int(p.fsym) != cm.box_fsym).count();
    assert_eq!(active_out, t.schemas[mt].eff.len());
    assert_eq!(active_in, t.schemas[mt].pre.len());
    assert_eq!(cm.extract_plan(&asg).steps, vec![a]);
}

#[test]
fn disabled_slots_are_inert() {
    let t = without_goal(&fn_task(&instances::gripper(2)));
    let cm = build(&t, 3, EncodeOptions::default()).unwrap();
    assert_eq!(cm.stats.goal_pins, 0);
    let asg = solve_with(&cm, &cm.pin_plan(&Plan::default()).unwrap()).unwrap();
    for s in &cm.slots {
        assert!(!asg.bool(s.enabled));
        assert!(s.args.iter().all(|&x| asg.int(x) == cm.box_obj));
        for p in s.inputs.iter().chain(&s.outputs) {
            assert_eq!(asg.int(p.fsym), cm.box_fsym);
            assert!(p.args.iter().all(|&x| asg.int(x) == cm.box_obj));
            assert_eq!(asg.int(p.value), cm.box_obj);
        }
    }
    assert!(cm.extract_plan(&asg).steps.is_empty());
}

#[test]
fn zero_slots() {
    let t = fn_task(&instances::visitall(1, 2));
    let cm = build(&t, 0, EncodeOptions::default()).unwrap();
    assert!(cm.slots.is_empty());
    assert!(solve_with(&cm, &[]).is_none());

    let mut t = t;
    let holds: Vec<bool> =
        t.goal.iter().map(|g| t.init.value(g.func, t.point_index(g.func, &g.args).unwrap()) == g.value).collect();
    let mut keep = holds.into_iter();
    t.goal.retain(|_| keep.next().unwrap());
    assert!(!t.goal.is_empty());
    let cm = build(&t, 0, EncodeOptions::default()).unwrap();
    assert!(solve_with(&cm, &[]).is_some());
    let cm = build(&t, 3, EncodeOptions::default()).unwrap();
    let (mut s, _) = cm.solver(SolverConfig::default());
    let r = minimize(&mut s, &cm.objective, Budget::unlimited());
    assert_eq!(r.best.unwrap().0, 0);
}

const DEAD_END: &str = "(define (domain dead-end)
  (:requirements :strips :typing)
  (:types node)
  (:predicates (at ?n - node) (link ?a ?b - node))
  (:action go
    :parameters (?a ?b - node)
    :precondition (and (at ?a) (link ?a ?b))
    :effect (and (not (at ?a)) (at ?b))))
";

#[test]
fn empty_static_relation_blocks_schema() {
    let p = "(define (problem p) (:domain dead-end) (:objects n1 n2 - node)
      (:init (at n1)) (:goal (and (at n1))))";
    let typed = load_task(DEAD_END, p).unwrap();
    let t = boolean_transform(&typed);
    let cm = build(&t, 2, EncodeOptions::default()).unwrap();
    assert!(solve_with(&cm, &[]).is_some());
    assert!(solve_with(&cm, &[cm.slots[0].enabled.lit()]).is_none());
}

#[test]
fn violated_static_goal() {
    let p = "(define (problem p) (:domain dead-end) (:objects n1 n2 - node)
      (:init (at n1)) (:goal (and (link n1 n2))))";
    let t = boolean_transform(&load_task(DEAD_END, p).unwrap());
    assert_eq!(t.static_goal.len(), 1);
    for n in 0..3 {
        assert!(solve_with(&build(&t, n, EncodeOptions::default()).unwrap(), &[]).is_none());
    }
}

#[test]
fn capacity_limit() {
    let t = fn_task(&instances::visitall(3, 3));
    let opts = EncodeOptions { max_vars: 100, ..EncodeOptions::default() };
    assert!(matches!(build(&t, 8, opts), Err(EncodeError::Capacity(_))));
}

#[test]
fn dump_is_deterministic() {
    let t = fn_task(&instances::blocksworld_4ops(3, 1));
    for opts in [EncodeOptions::default(), eager()] {
        let a = build(&t, 3, opts).unwrap().dump();
        let b = build(&fn_task(&instances::blocksworld_4ops(3, 1)), 3, opts).unwrap().dump();
        assert_eq!(a, b);
        assert!(a.contains("int act[1]"));
        assert!(a.contains("element spt[4][0]"));
    }
    assert_ne!(build(&t, 3, EncodeOptions::default()).unwrap().dump(), build(&t, 3, eager()).unwrap().dump());
}

/// Oracle plans pinned into the model are solutions, for the exact length
/// and with spare slots; every solution found decodes to a valid plan.
#[test]
fn oracle_plans_are_solutions() {
    for inst in suite() {
        for t in [fn_task(&inst), boolean_transform(&inst.load())] {
            let plan = oracle_plan(&t);
            let l = plan.cost();
            for n in [l, l + 2] {
                let cm = build(&t, n, EncodeOptions::default()).unwrap();
                let asg = solve_with(&cm, &cm.pin_plan(&plan).unwrap())
                    .unwrap_or_else(|| panic!("{}: oracle plan rejected at N={n}", inst.name));
                assert_eq!(cm.extract_plan(&asg), plan);
            }
            if l > 0 {
                let cm = build(&t, l - 1, EncodeOptions::default()).unwrap();
                assert!(matches!(cm.pin_plan(&plan), Err(EncodeError::PlanTooLong(..))));
                assert!(solve_with(&cm, &[]).is_none(), "{}", inst.name);
            }
        }
    }
}

/// A plan that breaks persistence is rejected even though each step is
/// locally well formed.
#[test]
fn broken_plan_is_rejected() {
    let t = fn_task(&instances::visitall(1, 3));
    let mv = t.schema_by_name("move").unwrap();
    let c = |n: &str| t.object_by_name(n).unwrap();
    // c2 -> c1, then c2 -> c3 reads a position that no longer holds
    let bad = Plan {
        steps: vec![
            GroundAction { schema: mv, args: vec![c("c2"), c("c1")] },
            GroundAction { schema: mv, args: vec![c("c2"), c("c3")] },
        ],
    };
    assert!(validate(&t, &bad).is_err());
    for opts in [EncodeOptions::default(), eager()] {
        let cm = build(&without_goal(&t), 2, opts).unwrap();
        assert!(solve_with(&cm, &cm.pin_plan(&bad).unwrap()).is_none());
    }
}

#[test]
fn eager_and_propagator_agree() {
    for inst in suite().into_iter().filter(|i| !i.name.starts_with("bw4ops-4")) {
        let t = fn_task(&inst);
        let c = oracle_plan(&t).cost();
        for n in 0..=c {
            let a = solve_with(&build(&t, n, EncodeOptions::default()).unwrap(), &[]).is_some();
            let b = solve_with(&build(&t, n, eager()).unwrap(), &[]).is_some();
            assert_eq!(a, b, "{} N={n}", inst.name);
            assert_eq!(a, n == c, "{} N={n}", inst.name);
        }
        let mut opt = Vec::new();
        for opts in [EncodeOptions::default(), eager()] {
            let cm = build(&t, c + 2, opts).unwrap();
            let (mut s, _) = cm.solver(SolverConfig::default());
            let r = minimize(&mut s, &cm.objective, Budget::unlimited());
            let (z, asg) = r.best.unwrap();
            assert_eq!(validate(&t, &cm.extract_plan(&asg)), Ok(()));
            assert!(cm.audit_persistence(&asg).is_empty());
            opt.push(z);
        }
        assert_eq!(opt, vec![c, c], "{}", inst.name);
    }
}

/// Every emitted reason is false when emitted (checked by the solver),
/// has one literal per non-constant pin variable plus the bound literal,
/// and is implied by the eager model.
#[test]
fn propagator_reasons() {
    let t = boolean_transform(&instances::visitall(2, 3).load());
    let n = 6;
    let cm = build(&t, n, EncodeOptions::default()).unwrap();
    let mut s = Solver::new(&cm.model, SolverConfig::default());
    let mut p = PersistenceProp::new(&cm);
    let log = p.record_reasons();
    let stats = p.stats_handle();
    s.add_propagator(Box::new(p));
    assert_eq!(s.solve(Budget::unlimited()), SolveResult::Sat);
    let log = log.borrow();
    assert!(!log.is_empty());
    assert_eq!(stats.get().clauses as usize, log.len());
    assert!(stats.get().wakeups > 0);
    for (j, r) in log.iter() {
        // slot readers: 2 symbols, 2 arguments, 2 values, 1 bound;
        // goal readers are fixed, leaving the out pin and the bound
        let expect = if *j <= n { 7 } else { 4 };
        assert_eq!(r.len(), expect, "{:?}", r);
    }
    let ec = build(&t, n, eager()).unwrap();
    for (_, r) in log.iter().step_by(log.len() / 20 + 1) {
        let mut e = Solver::new(&ec.model, SolverConfig::default());
        for &l in r {
            e.add_clause(&[!s.lit_meaning(l)]);
        }
        assert_eq!(e.solve(Budget::unlimited()), SolveResult::Unsat);
    }
}
