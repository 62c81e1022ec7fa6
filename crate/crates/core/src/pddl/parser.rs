use alloc::borrow::ToOwned;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::*;
use super::sexp::{read_one, Sexp};
use super::{ParseError, Pos};

const SUPPORTED_REQUIREMENTS: &[&str] =
    &[":strips", ":typing", ":negative-preconditions", ":equality"];

fn expect_list<'a>(e: &'a Sexp, what: &str) -> Result<&'a [Sexp], ParseError> {
    e.as_list().ok_or_else(|| ParseError::syntax(e.pos(), what, &e.describe()))
}

fn expect_atom<'a>(e: &'a Sexp, what: &str) -> Result<&'a str, ParseError> {
    e.as_atom().ok_or_else(|| ParseError::syntax(e.pos(), what, &e.describe()))
}

fn expect_keyword(e: &Sexp, kw: &str) -> Result<(), ParseError> {
    match e.as_atom() {
        Some(a) if a == kw => Ok(()),
        _ => Err(ParseError::syntax(e.pos(), &format!("`{kw}`"), &e.describe())),
    }
}

fn expect_name(e: &Sexp, what: &str) -> Result<String, ParseError> {
    let s = expect_atom(e, what)?;
    if s.starts_with('?') || s.starts_with(':') || s == "-" {
        return Err(ParseError::syntax(e.pos(), what, &e.describe()));
    }
    Ok(s.to_owned())
}

/// `(<head> <name>)`, e.g. `(domain foo)`.
fn header(e: &Sexp, head: &str) -> Result<String, ParseError> {
    let items = expect_list(e, &format!("`({head} <name>)`"))?;
    match items {
        [h, n] => {
            expect_keyword(h, head)?;
            expect_name(n, "a name")
        }
        _ => Err(ParseError::syntax(e.pos(), &format!("`({head} <name>)`"), &e.describe())),
    }
}

/// Typed list `a b - t c - u d`; untyped trailing names get `object`.
fn typed_list(items: &[Sexp], variables: bool) -> Result<Vec<(String, String, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut pending: Vec<(String, Pos)> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let e = &items[i];
        if let Some(l) = e.as_list() {
            if l.first().and_then(Sexp::as_atom) == Some("either") {
                return Err(ParseError::unsupported(e.pos(), "either types"));
            }
            return Err(ParseError::syntax(e.pos(), "a name", "a list"));
        }
        let s = e.as_atom().unwrap_or_default();
        if s == "-" {
            let t = items
                .get(i + 1)
                .ok_or_else(|| ParseError::syntax(e.pos(), "a type after `-`", "end of list"))?;
            if let Some(l) = t.as_list() {
                if l.first().and_then(Sexp::as_atom) == Some("either") {
                    return Err(ParseError::unsupported(t.pos(), "either types"));
                }
            }
            let ty = expect_name(t, "a type name")?;
            if pending.is_empty() {
                return Err(ParseError::syntax(e.pos(), "a name before `-`", "`-`"));
            }
            for (n, p) in pending.drain(..) {
                out.push((n, ty.clone(), p));
            }
            i += 2;
            continue;
        }
        if variables {
            let Some(v) = s.strip_prefix('?') else {
                return Err(ParseError::syntax(e.pos(), "a variable `?name`", &e.describe()));
            };
            if v.is_empty() {
                return Err(ParseError::syntax(e.pos(), "a variable name", "`?`"));
            }
            pending.push((v.to_owned(), e.pos()));
        } else {
            pending.push((expect_name(e, "a name")?, e.pos()));
        }
        i += 1;
    }
    for (n, p) in pending {
        out.push((n, "object".to_owned(), p));
    }
    Ok(out)
}

/// `items` is the whole list; `at`/`over` only count as temporal when
/// followed by `start`, `end` or `all`, since `at` is a common predicate name.
fn unsupported_head(items: &[Sexp]) -> Option<&'static str> {
    let head = items.first()?.as_atom()?;
    let timed = matches!(items.get(1).and_then(Sexp::as_atom), Some("start" | "end" | "all"));
    Some(match head {
        "or" | "imply" => "disjunctive-preconditions",
        "exists" => "existential-preconditions",
        "forall" => "universal-preconditions",
        "when" => "conditional-effects",
        "increase" | "decrease" | "assign" | "scale-up" | "scale-down" | "<" | ">" | "<="
        | ">=" | "+" | "-" | "*" | "/" => "numeric-fluents",
        "at" | "over" if timed => "durative-actions",
        "preference" => "preferences",
        _ => return None,
    })
}

/// Flattens nested `and`s; returns `(expression, negated)` leaves.
fn conjuncts<'a>(e: &'a Sexp, out: &mut Vec<(&'a Sexp, bool)>) -> Result<(), ParseError> {
    let items = expect_list(e, "a formula")?;
    let Some(head) = items.first() else {
        return Ok(());
    };
    let h = expect_atom(head, "a formula head")?;
    match h {
        "and" => {
            for c in &items[1..] {
                conjuncts(c, out)?;
            }
            Ok(())
        }
        "not" => {
            let [_, inner] = items else {
                return Err(ParseError::syntax(e.pos(), "`(not <atom>)`", &e.describe()));
            };
            let inner_items = expect_list(inner, "an atom")?;
            if let Some(ih) = inner_items.first().and_then(Sexp::as_atom) {
                if ih == "not" || ih == "and" {
                    return Err(ParseError::unsupported(inner.pos(), "nested negation"));
                }
                if let Some(f) = unsupported_head(inner_items) {
                    return Err(ParseError::unsupported(inner.pos(), f));
                }
            }
            out.push((inner, true));
            Ok(())
        }
        _ => {
            if let Some(f) = unsupported_head(items) {
                return Err(ParseError::unsupported(e.pos(), f));
            }
            out.push((e, false));
            Ok(())
        }
    }
}

fn term(e: &Sexp) -> Result<TermAst, ParseError> {
    if let Some(l) = e.as_list() {
        if l.is_empty() {
            return Err(ParseError::syntax(e.pos(), "a term", "`()`"));
        }
        return Err(ParseError::unsupported(e.pos(), "object-fluents"));
    }
    let s = e.as_atom().unwrap_or_default();
    match s.strip_prefix('?') {
        Some("") => Err(ParseError::syntax(e.pos(), "a variable name", "`?`")),
        Some(v) => Ok(TermAst::Var(v.to_owned())),
        None => Ok(TermAst::Const(expect_name(e, "a term")?)),
    }
}

fn atom(e: &Sexp) -> Result<AtomAst, ParseError> {
    let items = expect_list(e, "an atom")?;
    let Some(h) = items.first() else {
        return Err(ParseError::syntax(e.pos(), "a predicate name", "`()`"));
    };
    let predicate = expect_name(h, "a predicate name")?;
    let args = items[1..].iter().map(term).collect::<Result<_, _>>()?;
    Ok(AtomAst { predicate, args })
}

struct DomainScope<'a> {
    params: &'a [(String, String)],
    constants: &'a [(String, String)],
    predicates: &'a [PredicateDecl],
}

impl DomainScope<'_> {
    fn check_term(&self, t: &TermAst, pos: Pos) -> Result<(), ParseError> {
        match t {
            TermAst::Var(v) if !self.params.iter().any(|(p, _)| p == v) => {
                Err(ParseError::binding(pos, format!("undeclared variable `?{v}`")))
            }
            TermAst::Const(c) if !self.constants.iter().any(|(n, _)| n == c) => {
                Err(ParseError::binding(pos, format!("undeclared constant `{c}`")))
            }
            _ => Ok(()),
        }
    }

    fn check_atom(&self, a: &AtomAst, pos: Pos) -> Result<(), ParseError> {
        let Some(decl) = self.predicates.iter().find(|p| p.name == a.predicate) else {
            return Err(ParseError::binding(pos, format!("undeclared predicate `{}`", a.predicate)));
        };
        if decl.arity() != a.args.len() {
            return Err(ParseError::binding(
                pos,
                format!(
                    "predicate `{}` expects {} arguments, found {}",
                    a.predicate,
                    decl.arity(),
                    a.args.len()
                ),
            ));
        }
        for t in &a.args {
            self.check_term(t, pos)?;
        }
        Ok(())
    }
}

fn parse_action(items: &[Sexp], pos: Pos, dom: &DomainAst) -> Result<SchemaAst, ParseError> {
    let name = expect_name(
        items.get(1).ok_or_else(|| ParseError::syntax(pos, "an action name", "end of list"))?,
        "an action name",
    )?;
    let mut params = Vec::new();
    let mut pre_e = None;
    let mut eff_e = None;
    let mut i = 2;
    while i < items.len() {
        let k = expect_atom(&items[i], "an action keyword")?;
        let v = items
            .get(i + 1)
            .ok_or_else(|| ParseError::syntax(items[i].pos(), "a value after keyword", "end of list"))?;
        match k {
            ":parameters" => {
                let l = expect_list(v, "a parameter list")?;
                for (n, s, p) in typed_list(l, true)? {
                    if !dom.has_sort(&s) {
                        return Err(ParseError::binding(p, format!("undeclared sort `{s}`")));
                    }
                    if params.iter().any(|(m, _)| *m == n) {
                        return Err(ParseError::binding(p, format!("duplicate parameter `?{n}`")));
                    }
                    params.push((n, s));
                }
            }
            ":precondition" => pre_e = Some(v),
            ":effect" => eff_e = Some(v),
            ":observe" | ":duration" | ":condition" => {
                return Err(ParseError::unsupported(items[i].pos(), "durative-actions"))
            }
            other => {
                return Err(ParseError::syntax(
                    items[i].pos(),
                    "`:parameters`, `:precondition` or `:effect`",
                    &format!("`{other}`"),
                ))
            }
        }
        i += 2;
    }
    let scope = DomainScope { params: &params, constants: &dom.constants, predicates: &dom.predicates };
    let mut precondition = Vec::new();
    if let Some(e) = pre_e {
        let mut leaves = Vec::new();
        conjuncts(e, &mut leaves)?;
        for (leaf, negated) in leaves {
            let l = expect_list(leaf, "an atom")?;
            if l.first().and_then(Sexp::as_atom) == Some("=") {
                let [_, a, b] = l else {
                    return Err(ParseError::syntax(leaf.pos(), "`(= <term> <term>)`", &leaf.describe()));
                };
                let (lhs, rhs) = (term(a)?, term(b)?);
                scope.check_term(&lhs, leaf.pos())?;
                scope.check_term(&rhs, leaf.pos())?;
                precondition.push(ConditionAst::Equal { lhs, rhs, positive: !negated });
            } else {
                let a = atom(leaf)?;
                scope.check_atom(&a, leaf.pos())?;
                precondition.push(ConditionAst::Atom { atom: a, positive: !negated });
            }
        }
    }
    let mut effect = Vec::new();
    if let Some(e) = eff_e {
        let mut leaves = Vec::new();
        conjuncts(e, &mut leaves)?;
        for (leaf, negated) in leaves {
            let l = expect_list(leaf, "an atom")?;
            if l.first().and_then(Sexp::as_atom) == Some("=") {
                return Err(ParseError::unsupported(leaf.pos(), "equality effects"));
            }
            let a = atom(leaf)?;
            scope.check_atom(&a, leaf.pos())?;
            effect.push(EffectAst { atom: a, positive: !negated });
        }
    }
    Ok(SchemaAst { name, params, precondition, effect })
}

/// Parses a PDDL domain in the conjunctive STRIPS fragment with typing,
/// negative preconditions and equality.
pub fn parse_domain(text: &str) -> Result<DomainAst, ParseError> {
    let top = read_one(text)?;
    let items = expect_list(&top, "`(define ...)`")?;
    if items.is_empty() {
        return Err(ParseError::syntax(top.pos(), "`define`", "`()`"));
    }
    expect_keyword(&items[0], "define")?;
    let name = header(
        items.get(1).ok_or_else(|| ParseError::syntax(top.pos(), "`(domain <name>)`", "end of list"))?,
        "domain",
    )?;
    let mut dom = DomainAst {
        name,
        requirements: Vec::new(),
        sorts: Vec::new(),
        constants: Vec::new(),
        predicates: Vec::new(),
        schemas: Vec::new(),
    };
    let mut sort_pos = Vec::new();
    for sec in &items[2..] {
        let s = expect_list(sec, "a domain section")?;
        let Some(head) = s.first() else {
            return Err(ParseError::syntax(sec.pos(), "a section keyword", "`()`"));
        };
        let kw = expect_atom(head, "a section keyword")?;
        match kw {
            ":requirements" => {
                for r in &s[1..] {
                    let r_name = expect_atom(r, "a requirement")?;
                    if !SUPPORTED_REQUIREMENTS.contains(&r_name) {
                        return Err(ParseError::unsupported(r.pos(), r_name.trim_start_matches(':')));
                    }
                    dom.requirements.push(r_name.to_owned());
                }
            }
            ":types" => {
                for (n, parent, p) in typed_list(&s[1..], false)? {
                    if n == "object" {
                        continue;
                    }
                    if dom.sorts.iter().any(|(m, _)| *m == n) {
                        return Err(ParseError::binding(p, format!("duplicate sort `{n}`")));
                    }
                    let parent = if parent == "object" { None } else { Some(parent) };
                    dom.sorts.push((n, parent));
                    sort_pos.push(p);
                }
            }
            ":constants" => {
                for (n, t, p) in typed_list(&s[1..], false)? {
                    if dom.constants.iter().any(|(m, _)| *m == n) {
                        return Err(ParseError::binding(p, format!("duplicate constant `{n}`")));
                    }
                    dom.constants.push((n, t));
                }
            }
            ":predicates" => {
                for pe in &s[1..] {
                    let pl = expect_list(pe, "a predicate declaration")?;
                    let Some(ph) = pl.first() else {
                        return Err(ParseError::syntax(pe.pos(), "a predicate name", "`()`"));
                    };
                    let name = expect_name(ph, "a predicate name")?;
                    if dom.predicates.iter().any(|p| p.name == name) {
                        return Err(ParseError::binding(pe.pos(), format!("duplicate predicate `{name}`")));
                    }
                    let params = typed_list(&pl[1..], true)?;
                    dom.predicates.push(PredicateDecl {
                        name,
                        param_sorts: params.into_iter().map(|(_, t, _)| t).collect(),
                    });
                }
            }
            ":functions" => return Err(ParseError::unsupported(head.pos(), "numeric-fluents")),
            ":derived" => return Err(ParseError::unsupported(head.pos(), "derived-predicates")),
            ":durative-action" => return Err(ParseError::unsupported(head.pos(), "durative-actions")),
            ":constraints" => return Err(ParseError::unsupported(head.pos(), "constraints")),
            ":action" => {
                check_sorts(&dom, &sort_pos)?;
                let a = parse_action(s, sec.pos(), &dom)?;
                if dom.schemas.iter().any(|b| b.name == a.name) {
                    return Err(ParseError::binding(sec.pos(), format!("duplicate action `{}`", a.name)));
                }
                dom.schemas.push(a);
            }
            other => {
                return Err(ParseError::syntax(head.pos(), "a domain section keyword", &format!("`{other}`")))
            }
        }
    }
    check_sorts(&dom, &sort_pos)?;
    Ok(dom)
}

fn check_sorts(dom: &DomainAst, sort_pos: &[Pos]) -> Result<(), ParseError> {
    for ((n, parent), p) in dom.sorts.iter().zip(sort_pos) {
        if let Some(par) = parent {
            if !dom.has_sort(par) {
                return Err(ParseError::binding(*p, format!("undeclared sort `{par}`")));
            }
        }
        // walk to the root; a cycle never reaches `None`
        let mut cur = parent.clone();
        let mut steps = 0;
        while let Some(c) = cur {
            steps += 1;
            if steps > dom.sorts.len() || c == *n {
                return Err(ParseError::binding(*p, format!("cyclic sort hierarchy at `{n}`")));
            }
            cur = dom.sorts.iter().find(|(m, _)| *m == c).and_then(|(_, q)| q.clone());
        }
    }
    for (c, t) in &dom.constants {
        if !dom.has_sort(t) {
            return Err(ParseError::binding(
                sort_pos.first().copied().unwrap_or(Pos { line: 1, col: 1 }),
                format!("constant `{c}` has undeclared sort `{t}`"),
            ));
        }
    }
    for pr in &dom.predicates {
        for t in &pr.param_sorts {
            if !dom.has_sort(t) {
                return Err(ParseError::binding(
                    Pos { line: 1, col: 1 },
                    format!("predicate `{}` uses undeclared sort `{t}`", pr.name),
                ));
            }
        }
    }
    Ok(())
}

fn ground_atom(e: &Sexp) -> Result<GroundAtomAst, ParseError> {
    let items = expect_list(e, "a ground atom")?;
    let Some(h) = items.first() else {
        return Err(ParseError::syntax(e.pos(), "a predicate name", "`()`"));
    };
    let hs = expect_atom(h, "a predicate name")?;
    if hs == "=" {
        return Err(ParseError::unsupported(e.pos(), "numeric-fluents"));
    }
    let predicate = expect_name(h, "a predicate name")?;
    let mut args = Vec::new();
    for a in &items[1..] {
        if a.as_atom().is_some_and(|s| s.starts_with('?')) {
            return Err(ParseError::binding(a.pos(), "variables are not allowed in problem atoms".to_string()));
        }
        args.push(expect_name(a, "an object name")?);
    }
    Ok(GroundAtomAst { predicate, args })
}

fn check_ground(
    a: &GroundAtomAst,
    pos: Pos,
    domain: &DomainAst,
    objects: &BTreeSet<&str>,
) -> Result<(), ParseError> {
    let Some(decl) = domain.predicate(&a.predicate) else {
        return Err(ParseError::binding(pos, format!("undeclared predicate `{}`", a.predicate)));
    };
    if decl.arity() != a.args.len() {
        return Err(ParseError::binding(
            pos,
            format!("predicate `{}` expects {} arguments, found {}", a.predicate, decl.arity(), a.args.len()),
        ));
    }
    for o in &a.args {
        if !objects.contains(o.as_str()) {
            return Err(ParseError::binding(pos, format!("undeclared object `{o}`")));
        }
    }
    Ok(())
}

/// Parses a problem file and binds its names against `domain`.
pub fn parse_problem(text: &str, domain: &DomainAst) -> Result<ProblemAst, ParseError> {
    let top = read_one(text)?;
    let items = expect_list(&top, "`(define ...)`")?;
    if items.is_empty() {
        return Err(ParseError::syntax(top.pos(), "`define`", "`()`"));
    }
    expect_keyword(&items[0], "define")?;
    let name = header(
        items.get(1).ok_or_else(|| ParseError::syntax(top.pos(), "`(problem <name>)`", "end of list"))?,
        "problem",
    )?;
    let mut prob = ProblemAst { name, domain: String::new(), objects: Vec::new(), init: Vec::new(), goal: Vec::new() };
    let mut init_e = None;
    let mut goal_e = None;
    for sec in &items[2..] {
        let s = expect_list(sec, "a problem section")?;
        let Some(head) = s.first() else {
            return Err(ParseError::syntax(sec.pos(), "a section keyword", "`()`"));
        };
        match expect_atom(head, "a section keyword")? {
            ":domain" => {
                let d = expect_name(
                    s.get(1).ok_or_else(|| ParseError::syntax(sec.pos(), "a domain name", "end of list"))?,
                    "a domain name",
                )?;
                if d != domain.name {
                    return Err(ParseError::binding(
                        sec.pos(),
                        format!("problem is for domain `{d}`, not `{}`", domain.name),
                    ));
                }
                prob.domain = d;
            }
            ":requirements" => {}
            ":objects" => {
                for (n, t, p) in typed_list(&s[1..], false)? {
                    if !domain.has_sort(&t) {
                        return Err(ParseError::binding(p, format!("undeclared sort `{t}`")));
                    }
                    if prob.objects.iter().any(|(m, _)| *m == n) || domain.constants.iter().any(|(m, _)| *m == n) {
                        return Err(ParseError::binding(p, format!("duplicate object `{n}`")));
                    }
                    prob.objects.push((n, t));
                }
            }
            ":init" => init_e = Some(&s[1..]),
            ":goal" => {
                let [_, g] = s else {
                    return Err(ParseError::syntax(sec.pos(), "`(:goal <formula>)`", &sec.describe()));
                };
                goal_e = Some(g);
            }
            ":metric" => return Err(ParseError::unsupported(head.pos(), "action-costs")),
            ":constraints" => return Err(ParseError::unsupported(head.pos(), "constraints")),
            other => {
                return Err(ParseError::syntax(head.pos(), "a problem section keyword", &format!("`{other}`")))
            }
        }
    }
    if prob.domain.is_empty() {
        return Err(ParseError::syntax(top.pos(), "a `(:domain <name>)` section", "none"));
    }
    let objects: BTreeSet<&str> = prob
        .objects
        .iter()
        .map(|(n, _)| n.as_str())
        .chain(domain.constants.iter().map(|(n, _)| n.as_str()))
        .collect();
    let mut init = Vec::new();
    for e in init_e.unwrap_or_default() {
        if let Some(l) = e.as_list() {
            if l.first().and_then(Sexp::as_atom) == Some("not") {
                return Err(ParseError::syntax(e.pos(), "a positive ground atom", "a negated atom"));
            }
            let timed = l.get(1).is_some_and(|t| {
                t.as_list().is_some() || t.as_atom().is_some_and(|a| a.parse::<f64>().is_ok())
            });
            if l.first().and_then(Sexp::as_atom) == Some("at") && timed {
                return Err(ParseError::unsupported(e.pos(), "timed-initial-literals"));
            }
        }
        let a = ground_atom(e)?;
        check_ground(&a, e.pos(), domain, &objects)?;
        init.push(a);
    }
    let mut goal = Vec::new();
    if let Some(g) = goal_e {
        let mut leaves = Vec::new();
        conjuncts(g, &mut leaves)?;
        for (leaf, negated) in leaves {
            if leaf.as_list().and_then(|l| l.first()).and_then(Sexp::as_atom) == Some("=") {
                return Err(ParseError::unsupported(leaf.pos(), "equality in goals"));
            }
            let a = ground_atom(leaf)?;
            check_ground(&a, leaf.pos(), domain, &objects)?;
            goal.push(GoalLiteralAst { atom: a, positive: !negated });
        }
    }
    prob.init = init;
    prob.goal = goal;
    Ok(prob)
}
