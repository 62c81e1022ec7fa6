use alloc::string::String;
use alloc::vec::Vec;

/// A term inside a schema body: `?x` or a domain constant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TermAst {
    Var(String),
    Const(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomAst {
    pub predicate: String,
    pub args: Vec<TermAst>,
}

/// One conjunct of a precondition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConditionAst {
    Atom { atom: AtomAst, positive: bool },
    Equal { lhs: TermAst, rhs: TermAst, positive: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectAst {
    pub atom: AtomAst,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    pub param_sorts: Vec<String>,
}

impl PredicateDecl {
    pub fn arity(&self) -> usize {
        self.param_sorts.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaAst {
    pub name: String,
    /// `(variable-name without '?', sort)`
    pub params: Vec<(String, String)>,
    pub precondition: Vec<ConditionAst>,
    pub effect: Vec<EffectAst>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainAst {
    pub name: String,
    pub requirements: Vec<String>,
    /// `(sort, parent)`; `object` is implicit and never listed.
    pub sorts: Vec<(String, Option<String>)>,
    pub constants: Vec<(String, String)>,
    pub predicates: Vec<PredicateDecl>,
    pub schemas: Vec<SchemaAst>,
}

impl DomainAst {
    pub fn predicate(&self, name: &str) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn has_sort(&self, name: &str) -> bool {
        name == "object" || self.sorts.iter().any(|(s, _)| s == name)
    }

    pub fn schema(&self, name: &str) -> Option<&SchemaAst> {
        self.schemas.iter().find(|s| s.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroundAtomAst {
    pub predicate: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoalLiteralAst {
    pub atom: GroundAtomAst,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemAst {
    pub name: String,
    pub domain: String,
    pub objects: Vec<(String, String)>,
    pub init: Vec<GroundAtomAst>,
    pub goal: Vec<GoalLiteralAst>,
}
