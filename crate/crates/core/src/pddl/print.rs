//! PDDL rendering of the ASTs; output re-parses to an equal AST.

use core::fmt::{self, Display, Formatter, Write};

use super::ast::*;

impl Display for TermAst {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            TermAst::Var(v) => write!(f, "?{v}"),
            TermAst::Const(c) => f.write_str(c),
        }
    }
}

impl Display for AtomAst {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_char(')')
    }
}

impl Display for GroundAtomAst {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_char(')')
    }
}

fn negate(f: &mut Formatter<'_>, positive: bool, inner: &dyn Display) -> fmt::Result {
    if positive {
        write!(f, "{inner}")
    } else {
        write!(f, "(not {inner})")
    }
}

impl Display for ConditionAst {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            ConditionAst::Atom { atom, positive } => negate(f, *positive, atom),
            ConditionAst::Equal { lhs, rhs, positive } => {
                negate(f, *positive, &format_args!("(= {lhs} {rhs})"))
            }
        }
    }
}

fn typed(f: &mut Formatter<'_>, items: &[(alloc::string::String, alloc::string::String)], var: bool) -> fmt::Result {
    for (i, (n, t)) in items.iter().enumerate() {
        if i > 0 {
            f.write_char(' ')?;
        }
        if var {
            f.write_char('?')?;
        }
        write!(f, "{n} - {t}")?;
    }
    Ok(())
}

impl Display for DomainAst {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        writeln!(f, "(define (domain {})", self.name)?;
        if !self.requirements.is_empty() {
            f.write_str("  (:requirements")?;
            for r in &self.requirements {
                write!(f, " {r}")?;
            }
            f.write_str(")\n")?;
        }
        if !self.sorts.is_empty() {
            f.write_str("  (:types")?;
            for (s, p) in &self.sorts {
                write!(f, " {s} - {}", p.as_deref().unwrap_or("object"))?;
            }
            f.write_str(")\n")?;
        }
        if !self.constants.is_empty() {
            f.write_str("  (:constants ")?;
            typed(f, &self.constants, false)?;
            f.write_str(")\n")?;
        }
        f.write_str("  (:predicates")?;
        for p in &self.predicates {
            write!(f, " ({}", p.name)?;
            for (i, s) in p.param_sorts.iter().enumerate() {
                write!(f, " ?a{i} - {s}")?;
            }
            f.write_char(')')?;
        }
        f.write_str(")\n")?;
        for a in &self.schemas {
            writeln!(f, "  (:action {}", a.name)?;
            f.write_str("    :parameters (")?;
            typed(f, &a.params, true)?;
            f.write_str(")\n    :precondition (and")?;
            for c in &a.precondition {
                write!(f, " {c}")?;
            }
            f.write_str(")\n    :effect (and")?;
            for e in &a.effect {
                f.write_char(' ')?;
                negate(f, e.positive, &e.atom)?;
            }
            f.write_str("))\n")?;
        }
        f.write_str(")\n")
    }
}

impl Display for ProblemAst {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        writeln!(f, "(define (problem {})", self.name)?;
        writeln!(f, "  (:domain {})", self.domain)?;
        f.write_str("  (:objects ")?;
        typed(f, &self.objects, false)?;
        f.write_str(")\n  (:init")?;
        for a in &self.init {
            write!(f, " {a}")?;
        }
        f.write_str(")\n  (:goal (and")?;
        for g in &self.goal {
            f.write_char(' ')?;
            negate(f, g.positive, &g.atom)?;
        }
        f.write_str(")))\n")
    }
}
