mod common;

use common::micro::run_suite;

#[test]
fn micro_models_agree_with_enumeration() {
    let r = run_suite(7, 10000);
    eprintln!("models {} sat {} conflicts {} learned {}", r.models, r.sat, r.conflicts, r.learned_checked);
    assert_eq!(r.verdict_mismatches, 0);
    assert_eq!(r.checker_failures, 0);
    assert_eq!(r.unsound_learned, 0, "of {} learned clauses", r.learned_checked);
}
