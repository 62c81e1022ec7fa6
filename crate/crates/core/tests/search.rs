use std::cell::Cell;

use lcplan_core::cp::luby;
use lcplan_core::encode::{EncodeOptions, Persistence};
use lcplan_core::fstrips::FstripsTask;
use lcplan_core::instances;
use lcplan_core::reach::functional_transform;
use lcplan_core::search::*;
use lcplan_core::validate::validate;

fn fn_task(inst: &instances::Instance) -> FstripsTask {
    functional_transform(&inst.load(), 2, 100_000).0
}

#[test]
fn luby_prefix() {
    let v: Vec<u64> = (1..=15).map(luby).collect();
    assert_eq!(v, [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
}

#[test]
fn schedules() {
    let k: Vec<usize> = Schedule::new(8, Increments::Luby { scale: 1 }).take(8).collect();
    assert_eq!(k, [8, 9, 10, 12, 13, 14, 16, 20]);
    let k: Vec<usize> = Schedule::new(3, Increments::Luby { scale: 5 }).take(4).collect();
    assert_eq!(k, [3, 8, 13, 23]);
    let k: Vec<usize> = Schedule::new(0, Increments::Unit).take(3).collect();
    assert_eq!(k, [0, 1, 2]);
}

#[test]
fn budget_formula() {
    let r = 1000.0;
    assert_eq!(satisficing_budget(r, 60, 10, 50), r);
    assert_eq!(satisficing_budget(r, 60, 35, 50), r / 2.0);
    assert_eq!(satisficing_budget(r, 60, 60, 50), 0.0);
    assert_eq!(satisficing_budget(r, 60, 0, 50), r);
    assert_eq!(satisficing_budget(r, 12, 2, 50), r * 10.0 / 50.0);
    assert_eq!(satisficing_budget(0.0, 12, 2, 50), 0.0);
}

#[test]
fn visitall_optimal() {
    let t = fn_task(&instances::visitall(3, 3));
    let rep = solve_optimal(&t, &SearchOptions::default(), &NoClock).unwrap();
    let Outcome::OptimalPlan { plan, cost } = &rep.outcome else { panic!("{:?}", rep.outcome) };
    assert_eq!(*cost, 8);
    assert_eq!(validate(&t, plan), Ok(()));
    // k_1 is the goal count
    assert_eq!(rep.horizons(), [8]);
}

#[test]
fn goal_already_true() {
    let mut t = fn_task(&instances::visitall(1, 2));
    let held: Vec<_> = t
        .goal
        .iter()
        .filter(|g| t.init.value(g.func, t.point_index(g.func, &g.args).unwrap()) == g.value)
        .cloned()
        .collect();
    t.goal = held;
    assert!(t.is_goal(&t.init));
    let rep = solve_optimal(&t, &SearchOptions::default(), &NoClock).unwrap();
    assert_eq!(rep.outcome, Outcome::OptimalPlan { plan: Default::default(), cost: 0 });
    assert_eq!(rep.horizons(), [0]);
}

#[test]
fn unreachable_goal_up_to_horizon() {
    let t = fn_task(&instances::visitall_disconnected());
    let opts = SearchOptions { max_horizon: Some(3), ..SearchOptions::default() };
    let rep = solve_optimal(&t, &opts, &NoClock).unwrap();
    assert_eq!(rep.outcome, Outcome::ProvedInfeasibleUpTo { horizon: 3 });
    assert_eq!(rep.horizons(), [1, 2, 3]);
    assert_eq!(rep.lower_bounds(), [2, 3, 4]);
}

#[test]
fn deductive_lower_bounds() {
    let t = fn_task(&instances::visitall(3, 3));
    let opts = SearchOptions { first_horizon: Some(1), increments: Some(Increments::Unit), ..Default::default() };
    let rep = solve_optimal(&t, &opts, &NoClock).unwrap();
    assert_eq!(rep.horizons(), (1..=8).collect::<Vec<_>>());
    for it in &rep.iterations[..7] {
        assert_eq!(it.verdict, Verdict::Unsat);
    }
    assert_eq!(rep.lower_bounds(), (2..=8).chain([8]).collect::<Vec<_>>());
    assert!(matches!(rep.outcome, Outcome::OptimalPlan { cost: 8, .. }));
}

#[test]
fn satisficing_visitall() {
    let t = fn_task(&instances::visitall(4, 4));
    let rep = solve_satisficing(&t, &SearchOptions::default(), &NoClock).unwrap();
    let Outcome::FeasiblePlan { plan, upper, lower } = &rep.outcome else { panic!("{:?}", rep.outcome) };
    assert_eq!(validate(&t, plan), Ok(()));
    assert_eq!(plan.cost(), *upper);
    assert!(*upper >= 15);
    assert!(lower <= upper);
}

#[test]
fn modes_share_horizons() {
    for inst in [instances::gripper(2), instances::blocksworld_4ops(3, 3), instances::logistics_micro(1)] {
        let t = fn_task(&inst);
        let mut runs = Vec::new();
        for p in [Persistence::Propagator, Persistence::Eager] {
            let opts = SearchOptions {
                encode: EncodeOptions { persistence: p, ..EncodeOptions::default() },
                ..SearchOptions::default()
            };
            let rep = solve_optimal(&t, &opts, &NoClock).unwrap();
            let verdicts: Vec<Verdict> = rep.iterations.iter().map(|i| i.verdict).collect();
            runs.push((rep.horizons(), verdicts, rep.outcome.clone()));
        }
        assert_eq!(runs[0].0, runs[1].0);
        assert_eq!(runs[0].1, runs[1].1);
        let (Outcome::OptimalPlan { cost: a, .. }, Outcome::OptimalPlan { cost: b, .. }) = (&runs[0].2, &runs[1].2)
        else {
            panic!()
        };
        assert_eq!(a, b);
    }
}

/// Advances one second per reading.
struct Ticking(Cell<f64>);

impl Clock for Ticking {
    fn elapsed(&self) -> f64 {
        let t = self.0.get();
        self.0.set(t + 1.0);
        t
    }
}

#[test]
fn time_limit_gives_unknown() {
    let t = fn_task(&instances::visitall_disconnected());
    let opts = SearchOptions { time_limit: 0.5, ..SearchOptions::default() };
    let rep = solve_optimal(&t, &opts, &Ticking(Cell::new(0.0))).unwrap();
    assert!(matches!(rep.outcome, Outcome::Unknown { .. }));
}
