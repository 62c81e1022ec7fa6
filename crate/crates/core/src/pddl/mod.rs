//! Reader for the STRIPS fragment of PDDL with typing, negative
//! preconditions and equality.

mod ast;
mod parser;
mod print;
mod sexp;
pub mod typecheck;

use alloc::string::String;
use core::fmt;

pub use ast::*;
pub use parser::{parse_domain, parse_problem};
pub use typecheck::{typecheck, TypeError, TypedTask};

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax { expected: String, found: String },
    Unsupported { feature: String },
    Binding { message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {kind}")]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax { expected, found } => {
                write!(f, "syntax error: expected {expected}, found {found}")
            }
            ParseErrorKind::Unsupported { feature } => {
                write!(f, "unsupported fragment: {feature}")
            }
            ParseErrorKind::Binding { message } => write!(f, "binding error: {message}"),
        }
    }
}

impl ParseError {
    pub(crate) fn syntax(pos: Pos, expected: &str, found: &str) -> Self {
        ParseError {
            pos,
            kind: ParseErrorKind::Syntax { expected: expected.into(), found: found.into() },
        }
    }

    pub(crate) fn unsupported(pos: Pos, feature: &str) -> Self {
        ParseError { pos, kind: ParseErrorKind::Unsupported { feature: feature.into() } }
    }

    pub(crate) fn binding(pos: Pos, message: String) -> Self {
        ParseError { pos, kind: ParseErrorKind::Binding { message } }
    }

    /// The message without the position prefix.
    pub fn message(&self) -> String {
        alloc::format!("{}", self.kind)
    }
}

/// Which input a [`LoadError`] came from.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LoadError {
    #[error("domain: {0}")]
    Domain(ParseError),
    #[error("problem: {0}")]
    Problem(ParseError),
    #[error("{0}")]
    Type(#[from] TypeError),
}

/// Parses and type-checks a domain/problem pair.
pub fn load_task(domain: &str, problem: &str) -> Result<TypedTask, LoadError> {
    let d = parse_domain(domain).map_err(LoadError::Domain)?;
    let p = parse_problem(problem, &d).map_err(LoadError::Problem)?;
    Ok(typecheck(&d, &p)?)
}
