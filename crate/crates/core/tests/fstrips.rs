use lcplan_core::fstrips::{boolean_transform, GroundAction, Plan};
use lcplan_core::instances::{self, suite};
use lcplan_core::validate::{bfs_oracle, validate, OracleResult};

#[test]
fn suite_oracle_costs() {
    for inst in suite() {
        let t = boolean_transform(&inst.load());
        let r = bfs_oracle(&t, usize::MAX, 2_000_000);
        let c = r.cost().unwrap_or_else(|| panic!("{}: {:?}", inst.name, r));
        let OracleResult::Plan(p) = &r else { unreachable!() };
        assert_eq!(validate(&t, p), Ok(()));
        println!("{} cost {c} goal_count {}", inst.name, t.goal_count(&t.init));
    }
}

#[test]
fn visitall_center_start() {
    let t = boolean_transform(&instances::visitall(3, 3).load());
    assert_eq!(t.goal_count(&t.init), 8);
    assert_eq!(bfs_oracle(&t, usize::MAX, 100_000).cost(), Some(8));
    let mv = t.schema_by_name("move").unwrap();
    let c = |n: &str| t.object_by_name(n).unwrap();
    let a = GroundAction { schema: mv, args: vec![c("c5"), c("c2")] };
    assert!(t.applicable(&t.init, &a));
    assert!(!t.applicable(&t.init, &GroundAction { schema: mv, args: vec![c("c5"), c("c1")] }));
    let s = t.apply(&t.init, &a);
    assert_eq!(t.goal_count(&s), 7);
    let bad = Plan { steps: vec![GroundAction { schema: mv, args: vec![c("c5"), c("c9")] }] };
    assert!(validate(&t, &bad).is_err());
}
