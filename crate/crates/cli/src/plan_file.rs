//! IPC-style plan files: one `(schema obj ...)` per line, `;` comments.

use std::fmt::Write;

use lcplan_core::fstrips::{FstripsTask, GroundAction, Plan};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct PlanParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

pub fn format_plan(task: &FstripsTask, plan: &Plan) -> String {
    let mut s = String::new();
    for a in &plan.steps {
        s += &task.format_action(a);
        s.push('\n');
    }
    let _ = writeln!(s, "; cost = {} (unit cost)", plan.cost());
    s
}

/// A parsed plan with the 1-based source line of every step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanFile {
    pub plan: Plan,
    pub lines: Vec<usize>,
}

pub fn parse_plan(task: &FstripsTask, text: &str) -> Result<PlanFile, PlanParseError> {
    let mut out = PlanFile { plan: Plan::default(), lines: Vec::new() };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split(';').next().unwrap_or("");
        let trimmed = body.trim_start();
        if trimmed.trim_end().is_empty() {
            continue;
        }
        let start = body.len() - trimmed.len();
        let err = |col: usize, message: String| PlanParseError { line, col: col + 1, message };
        let Some(inner) = trimmed.trim_end().strip_prefix('(') else {
            return Err(err(start, "expected `(`".into()));
        };
        let Some(inner) = inner.strip_suffix(')') else {
            return Err(err(start + trimmed.trim_end().len(), "expected `)`".into()));
        };
        if inner.contains(['(', ')']) {
            return Err(err(start, "nested parentheses in plan step".into()));
        }
        let mut words = Vec::new();
        let base = start + 1;
        let mut pos = 0;
        for w in inner.split_whitespace() {
            let off = pos + inner[pos..].find(w).unwrap();
            pos = off + w.len();
            words.push((base + off, w.to_ascii_lowercase()));
        }
        let Some(((col, name), args)) = words.split_first() else {
            return Err(err(start, "empty plan step".into()));
        };
        let schema = task.schema_by_name(name).ok_or_else(|| err(*col, format!("unknown action `{name}`")))?;
        let args = args
            .iter()
            .map(|(c, o)| task.object_by_name(o).ok_or_else(|| err(*c, format!("unknown object `{o}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        out.plan.steps.push(GroundAction { schema, args });
        out.lines.push(line);
    }
    Ok(out)
}
