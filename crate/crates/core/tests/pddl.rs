use lcplan_core::instances::{self, suite, BLOCKSWORLD_3OPS_DOMAIN, VISITALL_DOMAIN};
use lcplan_core::pddl::*;
use proptest::prelude::*;
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

fn unsupported(r: Result<DomainAst, ParseError>) -> String {
    match r {
        Err(ParseError { kind: ParseErrorKind::Unsupported { feature }, .. }) => feature,
        other => panic!("expected an unsupported-fragment error, got {other:?}"),
    }
}

#[test]
fn visitall_domain() {
    let d = parse_domain(VISITALL_DOMAIN).unwrap();
    assert_eq!(d.schemas.len(), 1);
    assert_eq!(d.schemas[0].name, "move");
    let mut preds: Vec<&str> = d.predicates.iter().map(|p| p.name.as_str()).collect();
    preds.sort();
    assert_eq!(preds, ["at", "connected", "visited"]);
    assert_eq!(d.predicate("connected").unwrap().arity(), 2);
}

#[test]
fn blocksworld_schemas() {
    let d = parse_domain(BLOCKSWORLD_3OPS_DOMAIN).unwrap();
    let names: Vec<&str> = d.schemas.iter().map(|s| s.name.as_str()).collect();
    assert_eq!(names, ["move", "move-to-table", "move-from-table"]);
}

#[test]
fn empty_input() {
    let e = parse_domain("").unwrap_err();
    assert_eq!(e.pos, Pos { line: 1, col: 1 });
    assert!(matches!(e.kind, ParseErrorKind::Syntax { .. }));
}

#[test]
fn syntax_error_position() {
    let e = parse_domain("(define (domain d)\n  (:predicates (p ?x)\n").unwrap_err();
    assert!(matches!(e.kind, ParseErrorKind::Syntax { .. }));
    // reported at end of input
    assert_eq!(e.pos, Pos { line: 3, col: 1 });
    assert!(e.to_string().starts_with("3:1"), "{e}");
}

#[test]
fn visitall_problem() {
    let inst = instances::visitall(3, 3);
    let d = parse_domain(&inst.domain).unwrap();
    let p = parse_problem(&inst.problem, &d).unwrap();
    assert_eq!(p.objects.len(), 9);
    let at = GroundAtomAst { predicate: "at".into(), args: vec!["c5".into()] };
    assert!(p.init.contains(&at));
    // 12 undirected edges, both directions
    assert_eq!(p.init.iter().filter(|a| a.predicate == "connected").count(), 24);
    assert_eq!(p.goal.len(), 9);
    assert!(p.goal.iter().all(|g| g.positive && g.atom.predicate == "visited"));
}

#[test]
fn undeclared_object() {
    let d = parse_domain(VISITALL_DOMAIN).unwrap();
    let e = parse_problem(
        "(define (problem p) (:domain visitall) (:objects c1 - cell) (:init (at c1)) (:goal (visited c7)))",
        &d,
    )
    .unwrap_err();
    let ParseErrorKind::Binding { message } = &e.kind else { panic!("{e:?}") };
    assert!(message.contains("c7"), "{message}");
}

#[test]
fn negative_goal() {
    let d = parse_domain(VISITALL_DOMAIN).unwrap();
    let text = "(define (problem p) (:domain visitall) (:objects c1 c2 - cell)
      (:init (at c1) (connected c1 c2) (connected c2 c1))
      (:goal (and (visited c2) (not (visited c1)))))";
    let p = parse_problem(text, &d).unwrap();
    assert_eq!(p.goal.len(), 2);
    assert!(!p.goal[1].positive);
    assert_eq!(p.goal[1].atom.args, ["c1"]);
    let t = typecheck(&d, &p).unwrap();
    assert!(!t.goal[1].positive);
}

#[test]
fn unsupported_fragments() {
    let wrap = |req: &str, pre: &str, eff: &str| {
        format!(
            "(define (domain d) (:requirements :strips {req}) (:predicates (p ?x) (q ?x))
               (:action a :parameters (?x) :precondition {pre} :effect {eff}))"
        )
    };
    let cases = [
        (wrap(":disjunctive-preconditions", "(p ?x)", "(q ?x)"), "disjunctive-preconditions"),
        (wrap(":conditional-effects", "(p ?x)", "(q ?x)"), "conditional-effects"),
        (wrap("", "(or (p ?x) (q ?x))", "(q ?x)"), "disjunctive-preconditions"),
        (wrap("", "(p ?x)", "(when (p ?x) (q ?x))"), "conditional-effects"),
        (wrap("", "(exists (?y) (p ?y))", "(q ?x)"), "existential-preconditions"),
        (wrap("", "(forall (?y) (p ?y))", "(q ?x)"), "universal-preconditions"),
        (wrap("", "(p ?x)", "(increase (total-cost) 1)"), "numeric-fluents"),
    ];
    for (text, feature) in cases {
        assert_eq!(unsupported(parse_domain(&text)), feature, "{text}");
    }
    let fluents = "(define (domain d) (:predicates (p)) (:functions (f)))";
    assert_eq!(unsupported(parse_domain(fluents)), "numeric-fluents");

    let d = parse_domain(VISITALL_DOMAIN).unwrap();
    let quantified = "(define (problem p) (:domain visitall) (:objects c1 - cell) (:init (at c1))
      (:goal (forall (?c - cell) (visited ?c))))";
    let e = parse_problem(quantified, &d).unwrap_err();
    assert!(matches!(e.kind, ParseErrorKind::Unsupported { .. }), "{e:?}");
}

#[test]
fn identifiers_are_case_insensitive() {
    let upper = VISITALL_DOMAIN.to_uppercase();
    assert_eq!(parse_domain(&upper).unwrap(), parse_domain(VISITALL_DOMAIN).unwrap());
}

#[test]
fn typed_move() {
    let t = instances::visitall(3, 3).load();
    let mv = &t.schemas[0];
    let cell = t.sort_by_name("cell").unwrap();
    assert_eq!(mv.params.iter().map(|p| p.1).collect::<Vec<_>>(), [cell, cell]);
    assert_eq!(t.sorts[cell].members.len(), 9);
}

#[test]
fn sort_errors() {
    let undeclared = "(define (domain d) (:requirements :strips :typing) (:types block)
      (:predicates (on ?x - block))
      (:action a :parameters (?x - brick) :precondition (on ?x) :effect (not (on ?x))))";
    assert!(parse_domain(undeclared).is_err());

    // an object-typed parameter in a block-typed slot
    let mismatch = "(define (domain d) (:requirements :strips :typing) (:types block - object)
      (:predicates (on ?x - block ?y - block))
      (:action a :parameters (?x - block ?y - object) :precondition (on ?x ?y) :effect (not (on ?x ?y))))";
    let d = parse_domain(mismatch).unwrap();
    let p = parse_problem("(define (problem p) (:domain d) (:objects b1 b2 - block) (:init) (:goal (and)))", &d)
        .unwrap();
    let e = typecheck(&d, &p).unwrap_err();
    assert!(e.0.contains("on"), "{e}");

    // the converse direction is fine: block is a subsort of object
    let ok = mismatch.replace("(on ?x - block ?y - block)", "(on ?x - block ?y - object)").replace(
        "?y - object) :precondition",
        "?y - block) :precondition",
    );
    let d = parse_domain(&ok).unwrap();
    assert!(typecheck(&d, &p).is_ok());
}

#[test]
fn suite_round_trips() {
    for inst in suite() {
        let d = parse_domain(&inst.domain).unwrap();
        let p = parse_problem(&inst.problem, &d).unwrap();
        let d2 = parse_domain(&d.to_string()).unwrap();
        assert_eq!(d, d2, "{}", inst.name);
        assert_eq!(parse_problem(&p.to_string(), &d2).unwrap(), p, "{}", inst.name);
    }
}

const WORDS: &[&str] = &["alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta", "iota", "kappa"];

fn name(rng: &mut SmallRng, prefix: &str, i: usize) -> String {
    format!("{prefix}{}-{i}", WORDS[rng.gen_range(0..WORDS.len())])
}

/// A random well-formed domain and problem over the supported fragment.
fn random_pair(seed: u64) -> (DomainAst, ProblemAst) {
    let mut rng = SmallRng::seed_from_u64(seed);
    let mut sorts: Vec<(String, Option<String>)> = Vec::new();
    for i in 0..rng.gen_range(0..4) {
        let parent = if i > 0 && rng.gen_bool(0.5) { Some(sorts[rng.gen_range(0..i)].0.clone()) } else { None };
        sorts.push((name(&mut rng, "s", i), parent));
    }
    let mut all_sorts: Vec<String> = vec!["object".into()];
    all_sorts.extend(sorts.iter().map(|s| s.0.clone()));
    let pick = |rng: &mut SmallRng, v: &[String]| v[rng.gen_range(0..v.len())].clone();
    let constants: Vec<(String, String)> =
        (0..rng.gen_range(0..3)).map(|i| (name(&mut rng, "k", i), pick(&mut rng, &all_sorts))).collect();
    let predicates: Vec<PredicateDecl> = (0..rng.gen_range(1..5))
        .map(|i| PredicateDecl {
            name: name(&mut rng, "p", i),
            param_sorts: (0..rng.gen_range(0..4)).map(|_| pick(&mut rng, &all_sorts)).collect(),
        })
        .collect();
    let mut schemas = Vec::new();
    for i in 0..rng.gen_range(0..4) {
        let params: Vec<(String, String)> =
            (0..rng.gen_range(0..4)).map(|j| (format!("v{j}"), pick(&mut rng, &all_sorts))).collect();
        let term = |rng: &mut SmallRng| {
            if !params.is_empty() && (constants.is_empty() || rng.gen_bool(0.8)) {
                Some(TermAst::Var(params[rng.gen_range(0..params.len())].0.clone()))
            } else if !constants.is_empty() {
                Some(TermAst::Const(constants[rng.gen_range(0..constants.len())].0.clone()))
            } else {
                None
            }
        };
        let atom = |rng: &mut SmallRng| {
            let p = &predicates[rng.gen_range(0..predicates.len())];
            let args: Option<Vec<TermAst>> = p.param_sorts.iter().map(|_| term(rng)).collect();
            args.map(|args| AtomAst { predicate: p.name.clone(), args })
        };
        let mut precondition = Vec::new();
        let mut effect = Vec::new();
        for _ in 0..rng.gen_range(0..4) {
            if let Some(a) = atom(&mut rng) {
                precondition.push(ConditionAst::Atom { atom: a, positive: rng.gen_bool(0.7) });
            }
        }
        if params.len() >= 2 && rng.gen_bool(0.5) {
            precondition.push(ConditionAst::Equal {
                lhs: TermAst::Var(params[0].0.clone()),
                rhs: TermAst::Var(params[1].0.clone()),
                positive: rng.gen_bool(0.5),
            });
        }
        for _ in 0..rng.gen_range(0..4) {
            if let Some(a) = atom(&mut rng) {
                effect.push(EffectAst { atom: a, positive: rng.gen_bool(0.5) });
            }
        }
        schemas.push(SchemaAst { name: name(&mut rng, "a", i), params, precondition, effect });
    }
    let domain = DomainAst {
        name: name(&mut rng, "d", 0),
        requirements: vec![":strips".into(), ":typing".into(), ":negative-preconditions".into(), ":equality".into()],
        sorts,
        constants,
        predicates,
        schemas,
    };

    let objects: Vec<(String, String)> =
        (0..rng.gen_range(0..5)).map(|i| (name(&mut rng, "o", i), pick(&mut rng, &all_sorts))).collect();
    let mut names: Vec<String> = objects.iter().map(|o| o.0.clone()).collect();
    names.extend(domain.constants.iter().map(|c| c.0.clone()));
    let ground = |rng: &mut SmallRng| {
        let p = &domain.predicates[rng.gen_range(0..domain.predicates.len())];
        if names.is_empty() && !p.param_sorts.is_empty() {
            return None;
        }
        let args = p.param_sorts.iter().map(|_| names[rng.gen_range(0..names.len())].clone()).collect();
        Some(GroundAtomAst { predicate: p.name.clone(), args })
    };
    let mut init = Vec::new();
    for _ in 0..rng.gen_range(0..6) {
        if let Some(a) = ground(&mut rng) {
            init.push(a);
        }
    }
    let mut goal = Vec::new();
    for _ in 0..rng.gen_range(0..4) {
        if let Some(a) = ground(&mut rng) {
            goal.push(GoalLiteralAst { atom: a, positive: rng.gen_bool(0.7) });
        }
    }
    let problem = ProblemAst { name: name(&mut rng, "q", 0), domain: domain.name.clone(), objects, init, goal };
    (domain, problem)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]
    #[test]
    fn print_then_parse(seed in any::<u64>()) {
        let (d, p) = random_pair(seed);
        let d2 = parse_domain(&d.to_string()).map_err(|e| TestCaseError::fail(format!("{e}\n{d}")))?;
        prop_assert_eq!(&d2, &d);
        let p2 = parse_problem(&p.to_string(), &d2).map_err(|e| TestCaseError::fail(format!("{e}\n{p}")))?;
        prop_assert_eq!(p2, p);
    }
}
