//! S-expression reader with source positions.

use alloc::string::String;
use alloc::vec::Vec;

use super::{ParseError, Pos};

#[derive(Debug, Clone)]
pub(crate) enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub(crate) fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub(crate) fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    pub(crate) fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            Sexp::Atom(..) => None,
        }
    }

    pub(crate) fn describe(&self) -> String {
        match self {
            Sexp::Atom(s, _) => alloc::format!("`{s}`"),
            Sexp::List(..) => String::from("a list"),
        }
    }
}

struct Reader<'a> {
    chars: core::iter::Peekable<core::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl Reader<'_> {
    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(&c) = self.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Sexp, ParseError> {
        self.skip_trivia();
        let start = self.pos();
        match self.chars.peek().copied() {
            None => Err(ParseError::syntax(start, "`(`", "end of input")),
            Some(')') => Err(ParseError::syntax(start, "an expression", "`)`")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => return Err(ParseError::syntax(self.pos(), "`)`", "end of input")),
                        Some(')') => {
                            self.bump();
                            return Ok(Sexp::List(items, start));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(_) => {
                let mut tok = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    tok.extend(c.to_lowercase());
                    self.bump();
                }
                Ok(Sexp::Atom(tok, start))
            }
        }
    }
}

/// Reads exactly one top-level expression; trailing non-whitespace is an error.
pub(crate) fn read_one(text: &str) -> Result<Sexp, ParseError> {
    let mut r = Reader { chars: text.chars().peekable(), line: 1, col: 1 };
    r.skip_trivia();
    if r.chars.peek().is_none() {
        return Err(ParseError::syntax(r.pos(), "`(`", "end of input"));
    }
    if r.chars.peek() != Some(&'(') {
        let p = r.pos();
        let found = r.read()?;
        return Err(ParseError::syntax(p, "`(`", &found.describe()));
    }
    let e = r.read()?;
    r.skip_trivia();
    if r.chars.peek().is_some() {
        let p = r.pos();
        return Err(ParseError::syntax(p, "end of input", "trailing input"));
    }
    Ok(e)
}
