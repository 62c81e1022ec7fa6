//! Small benchmark generators producing PDDL text.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub name: String,
    pub domain: String,
    pub problem: String,
}

pub const VISITALL_DOMAIN: &str = "(define (domain visitall)
  (:requirements :strips :typing)
  (:types cell)
  (:predicates (at ?c - cell) (visited ?c - cell) (connected ?a - cell ?b - cell))
  (:action move
    :parameters (?from - cell ?to - cell)
    :precondition (and (at ?from) (connected ?from ?to))
    :effect (and (not (at ?from)) (at ?to) (visited ?to))))
";

pub const BLOCKSWORLD_3OPS_DOMAIN: &str = "(define (domain blocksworld-3ops)
  (:requirements :strips :typing :equality)
  (:types place - object block - place)
  (:constants table - place)
  (:predicates (on ?x - block ?y - place) (clear ?x - block))
  (:action move
    :parameters (?x - block ?y - block ?z - block)
    :precondition (and (on ?x ?y) (clear ?x) (clear ?z) (not (= ?x ?z)) (not (= ?y ?z)))
    :effect (and (on ?x ?z) (not (on ?x ?y)) (clear ?y) (not (clear ?z))))
  (:action move-to-table
    :parameters (?x - block ?y - block)
    :precondition (and (on ?x ?y) (clear ?x))
    :effect (and (on ?x table) (not (on ?x ?y)) (clear ?y)))
  (:action move-from-table
    :parameters (?x - block ?y - block)
    :precondition (and (on ?x table) (clear ?x) (clear ?y) (not (= ?x ?y)))
    :effect (and (on ?x ?y) (not (on ?x table)) (not (clear ?y)))))
";

pub const BLOCKSWORLD_4OPS_DOMAIN: &str = "(define (domain blocksworld-4ops)
  (:requirements :strips :typing)
  (:types block)
  (:predicates (on ?x - block ?y - block) (ontable ?x - block) (clear ?x - block)
               (handempty) (holding ?x - block))
  (:action pick-up
    :parameters (?x - block)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (not (ontable ?x)) (not (clear ?x)) (not (handempty)) (holding ?x)))
  (:action put-down
    :parameters (?x - block)
    :precondition (and (holding ?x))
    :effect (and (not (holding ?x)) (clear ?x) (handempty) (ontable ?x)))
  (:action stack
    :parameters (?x - block ?y - block)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (not (holding ?x)) (not (clear ?y)) (clear ?x) (handempty) (on ?x ?y)))
  (:action unstack
    :parameters (?x - block ?y - block)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y) (not (clear ?x)) (not (handempty)) (not (on ?x ?y)))))
";

pub const GRIPPER_DOMAIN: &str = "(define (domain gripper)
  (:requirements :strips :typing :equality)
  (:types room ball gripper)
  (:predicates (at-robby ?r - room) (at ?b - ball ?r - room) (free ?g - gripper)
               (carry ?b - ball ?g - gripper))
  (:action move
    :parameters (?from - room ?to - room)
    :precondition (and (at-robby ?from) (not (= ?from ?to)))
    :effect (and (at-robby ?to) (not (at-robby ?from))))
  (:action pick
    :parameters (?obj - ball ?room - room ?g - gripper)
    :precondition (and (at ?obj ?room) (at-robby ?room) (free ?g))
    :effect (and (carry ?obj ?g) (not (at ?obj ?room)) (not (free ?g))))
  (:action drop
    :parameters (?obj - ball ?room - room ?g - gripper)
    :precondition (and (carry ?obj ?g) (at-robby ?room))
    :effect (and (at ?obj ?room) (free ?g) (not (carry ?obj ?g)))))
";

pub const LOGISTICS_DOMAIN: &str = "(define (domain logistics-micro)
  (:requirements :strips :typing :equality)
  (:types locatable location - object truck package - locatable)
  (:predicates (at ?o - locatable ?l - location) (in ?p - package ?t - truck))
  (:action load
    :parameters (?p - package ?t - truck ?l - location)
    :precondition (and (at ?t ?l) (at ?p ?l))
    :effect (and (not (at ?p ?l)) (in ?p ?t)))
  (:action unload
    :parameters (?p - package ?t - truck ?l - location)
    :precondition (and (at ?t ?l) (in ?p ?t))
    :effect (and (not (in ?p ?t)) (at ?p ?l)))
  (:action drive
    :parameters (?t - truck ?from - location ?to - location)
    :precondition (and (at ?t ?from) (not (= ?from ?to)))
    :effect (and (not (at ?t ?from)) (at ?t ?to))))
";

fn cell(rows: usize, cols: usize, r: usize, c: usize) -> String {
    let _ = rows;
    format!("c{}", r * cols + c + 1)
}

/// `rows x cols` grid, 4-connected, agent starting at the centre cell
/// (row-major numbering from `c1`).
pub fn visitall(rows: usize, cols: usize) -> Instance {
    visitall_from(rows, cols, rows / 2, cols / 2)
}

pub fn visitall_from(rows: usize, cols: usize, sr: usize, sc: usize) -> Instance {
    let mut p = String::new();
    let _ = writeln!(p, "(define (problem visitall-{rows}x{cols})");
    p.push_str("  (:domain visitall)\n  (:objects");
    for r in 0..rows {
        for c in 0..cols {
            let _ = write!(p, " {}", cell(rows, cols, r, c));
        }
    }
    p.push_str(" - cell)\n  (:init");
    let start = cell(rows, cols, sr, sc);
    let _ = write!(p, " (at {start}) (visited {start})");
    for r in 0..rows {
        for c in 0..cols {
            let here = cell(rows, cols, r, c);
            let mut nb = Vec::new();
            if r > 0 {
                nb.push((r - 1, c));
            }
            if r + 1 < rows {
                nb.push((r + 1, c));
            }
            if c > 0 {
                nb.push((r, c - 1));
            }
            if c + 1 < cols {
                nb.push((r, c + 1));
            }
            for (a, b) in nb {
                let _ = write!(p, " (connected {here} {})", cell(rows, cols, a, b));
            }
        }
    }
    p.push_str(")\n  (:goal (and");
    for r in 0..rows {
        for c in 0..cols {
            let _ = write!(p, " (visited {})", cell(rows, cols, r, c));
        }
    }
    p.push_str(")))\n");
    Instance { name: format!("visitall-{rows}x{cols}"), domain: VISITALL_DOMAIN.into(), problem: p }
}

/// Two cells with no connection; the goal is unreachable.
pub fn visitall_disconnected() -> Instance {
    let p = "(define (problem visitall-disconnected)
  (:domain visitall)
  (:objects c1 c2 - cell)
  (:init (at c1) (visited c1))
  (:goal (and (visited c1) (visited c2))))
";
    Instance { name: "visitall-disconnected".into(), domain: VISITALL_DOMAIN.into(), problem: p.into() }
}

/// Random stacking of `n` blocks: `below[i]` is `None` for the table.
fn random_towers(rng: &mut SmallRng, n: usize) -> Vec<Option<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let mut below = alloc::vec![None; n];
    let mut prev: Option<usize> = None;
    for &b in &order {
        if prev.is_some() && rng.gen_bool(0.6) {
            below[b] = prev;
        }
        prev = Some(b);
    }
    below
}

/// Initial and goal stackings; the goal has at least one `on` atom that
/// does not already hold.
fn towers_pair(rng: &mut SmallRng, n: usize) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    let init = random_towers(rng, n);
    loop {
        let goal = random_towers(rng, n);
        if (0..n).any(|i| goal[i].is_some() && goal[i] != init[i]) {
            return (init, goal);
        }
    }
}

fn block(i: usize) -> String {
    format!("b{}", i + 1)
}

/// Blocksworld with `move`, `move-to-table` and `move-from-table`.
pub fn blocksworld_3ops(n: usize, seed: u64) -> Instance {
    let mut rng = SmallRng::seed_from_u64(seed);
    let (init, goal) = towers_pair(&mut rng, n);
    let mut p = String::new();
    let _ = writeln!(p, "(define (problem bw3-{n}-{seed})");
    p.push_str("  (:domain blocksworld-3ops)\n  (:objects");
    for i in 0..n {
        let _ = write!(p, " {}", block(i));
    }
    p.push_str(" - block)\n  (:init");
    for i in 0..n {
        match init[i] {
            Some(b) => {
                let _ = write!(p, " (on {} {})", block(i), block(b));
            }
            None => {
                let _ = write!(p, " (on {} table)", block(i));
            }
        }
        if !init.contains(&Some(i)) {
            let _ = write!(p, " (clear {})", block(i));
        }
    }
    p.push_str(")\n  (:goal (and");
    for i in 0..n {
        if let Some(b) = goal[i] {
            let _ = write!(p, " (on {} {})", block(i), block(b));
        }
    }
    p.push_str(")))\n");
    Instance {
        name: format!("bw3ops-{n}-{seed}"),
        domain: BLOCKSWORLD_3OPS_DOMAIN.into(),
        problem: p,
    }
}

/// Blocksworld with a gripper hand: `pick-up`, `put-down`, `stack`, `unstack`.
pub fn blocksworld_4ops(n: usize, seed: u64) -> Instance {
    let mut rng = SmallRng::seed_from_u64(seed);
    let (init, goal) = towers_pair(&mut rng, n);
    let mut p = String::new();
    let _ = writeln!(p, "(define (problem bw4-{n}-{seed})");
    p.push_str("  (:domain blocksworld-4ops)\n  (:objects");
    for i in 0..n {
        let _ = write!(p, " {}", block(i));
    }
    p.push_str(" - block)\n  (:init (handempty)");
    for i in 0..n {
        match init[i] {
            Some(b) => {
                let _ = write!(p, " (on {} {})", block(i), block(b));
            }
            None => {
                let _ = write!(p, " (ontable {})", block(i));
            }
        }
        if !init.contains(&Some(i)) {
            let _ = write!(p, " (clear {})", block(i));
        }
    }
    p.push_str(")\n  (:goal (and");
    for i in 0..n {
        if let Some(b) = goal[i] {
            let _ = write!(p, " (on {} {})", block(i), block(b));
        }
    }
    p.push_str(")))\n");
    Instance {
        name: format!("bw4ops-{n}-{seed}"),
        domain: BLOCKSWORLD_4OPS_DOMAIN.into(),
        problem: p,
    }
}

/// Two rooms, two grippers, all balls start in `rooma` and must reach `roomb`.
pub fn gripper(balls: usize) -> Instance {
    let mut p = String::new();
    let _ = writeln!(p, "(define (problem gripper-{balls})");
    p.push_str("  (:domain gripper)\n  (:objects rooma roomb - room left right - gripper");
    for i in 0..balls {
        let _ = write!(p, " ball{}", i + 1);
    }
    p.push_str(" - ball)\n  (:init (at-robby rooma) (free left) (free right)");
    for i in 0..balls {
        let _ = write!(p, " (at ball{} rooma)", i + 1);
    }
    p.push_str(")\n  (:goal (and");
    for i in 0..balls {
        let _ = write!(p, " (at ball{} roomb)", i + 1);
    }
    p.push_str(")))\n");
    Instance { name: format!("gripper-{balls}"), domain: GRIPPER_DOMAIN.into(), problem: p }
}

/// Two trucks, three locations; `variant` picks the package routing.
pub fn logistics_micro(variant: usize) -> Instance {
    let (init, goal): (&str, &str) = match variant % 2 {
        0 => ("(at p1 l1)", "(at p1 l3)"),
        _ => ("(at p1 l1) (at p2 l3)", "(at p1 l2) (at p2 l1)"),
    };
    let objects = if variant.is_multiple_of(2) { "p1 - package" } else { "p1 p2 - package" };
    let p = format!(
        "(define (problem logistics-micro-{variant})
  (:domain logistics-micro)
  (:objects t1 t2 - truck l1 l2 l3 - location {objects})
  (:init (at t1 l1) (at t2 l3) {init})
  (:goal (and {goal})))
"
    );
    Instance { name: format!("logistics-micro-{variant}"), domain: LOGISTICS_DOMAIN.into(), problem: p }
}

/// The desk-scale suite: visitall up to 3x3, blocksworld with up to four
/// blocks in both formulations, gripper up to three balls and two logistics
/// micro-instances.
pub fn suite() -> Vec<Instance> {
    let mut v = Vec::new();
    for (r, c) in [(1, 2), (1, 3), (1, 4), (2, 2), (2, 3), (3, 2), (3, 3)] {
        v.push(visitall(r, c));
    }
    for (n, seeds) in [(2usize, 0..2u64), (3, 0..5), (4, 0..2)] {
        for s in seeds {
            v.push(blocksworld_3ops(n, s));
            v.push(blocksworld_4ops(n, s));
        }
    }
    for b in 1..=3 {
        v.push(gripper(b));
    }
    for k in 0..2 {
        v.push(logistics_micro(k));
    }
    v
}

impl Instance {
    pub fn load(&self) -> crate::pddl::TypedTask {
        crate::pddl::load_task(&self.domain, &self.problem).expect("generated instance is well-formed")
    }
}
