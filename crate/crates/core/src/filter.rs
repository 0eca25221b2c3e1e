//! Validity and usefulness checks, and the triage that applies them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{BlockKind, LongMethod, StmtKind, StmtRange, VarOrigin};
use crate::suggestion::{
    merge_collisions, normalize_scope, ExtractSuggestion, ReasonCode, SuggestionSet, Verdict,
    VerdictClass,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    /// Fragments covering at least this share of the counted statements are
    /// rejected as whole-method extractions.
    pub max_coverage_fraction: f64,
    /// Fragments with fewer counted statements are one-liners.
    pub min_statements: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            max_coverage_fraction: 0.88,
            min_statements: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("coverage fraction must be in (0, 1], got {0}")]
    Coverage(f64),
    #[error("minimum statement count must be at least 2, got {0}")]
    MinStatements(usize),
}

impl FilterConfig {
    pub fn new(max_coverage_fraction: f64, min_statements: usize) -> Result<Self, ConfigError> {
        if !(max_coverage_fraction > 0.0 && max_coverage_fraction <= 1.0) {
            return Err(ConfigError::Coverage(max_coverage_fraction));
        }
        if min_statements < 2 {
            return Err(ConfigError::MinStatements(min_statements));
        }
        Ok(Self {
            max_coverage_fraction,
            min_statements,
        })
    }
}

/// Whether `s` can be extracted without breaking compilation or behavior.
/// Expects a normalized suggestion; an unbalanced range is rejected.
pub fn check_validity(method: &LongMethod, s: &ExtractSuggestion) -> Verdict {
    let invalid = |reason, detail: String| Verdict::new(s.clone(), reason, detail);
    let Some(range) = method
        .statements_in(s.span())
        .filter(|_| method.body_span().contains_span(s.span()))
    else {
        return invalid(
            ReasonCode::ScopeUnbalanced,
            format!("lines {} hold no body statements", s.span()),
        );
    };
    if !method.is_balanced(range) {
        return invalid(
            ReasonCode::ScopeUnbalanced,
            format!("lines {} split a block", s.span()),
        );
    }
    if let Some(name) = inaccessible(method, range) {
        return invalid(
            ReasonCode::VariableInaccessible,
            format!("`{name}` is out of scope here"),
        );
    }
    let live_out = method.live_out_vars(range);
    if live_out.len() > 1 {
        let names: Vec<_> = live_out
            .iter()
            .map(|v| method.variable(*v).name.as_str())
            .collect();
        return invalid(
            ReasonCode::MultipleReturns,
            format!("values flow out: {}", names.join(", ")),
        );
    }
    if let Some(detail) = control_escape(method, range) {
        return invalid(ReasonCode::ControlFlowEscape, detail);
    }
    Verdict::ok(s.clone())
}

/// A name the fragment reads that lexically resolves to nothing in scope,
/// while the method does declare a local of that name elsewhere.
fn inaccessible(method: &LongMethod, range: StmtRange) -> Option<String> {
    let locals = method.local_names();
    method.statements()[range.first..=range.last]
        .iter()
        .flat_map(|s| &s.refs)
        .map(|r| method.variable(r.var))
        .find(|v| v.origin == VarOrigin::External && locals.contains(v.name.as_str()))
        .map(|v| v.name.clone())
}

fn control_escape(method: &LongMethod, range: StmtRange) -> Option<String> {
    let stmts = method.statements();
    let blocks = method.blocks();
    let inside = |b: usize| blocks[b].header.is_some_and(|h| range.contains(h));
    for s in &stmts[range.first..=range.last] {
        match s.kind {
            StmtKind::Break | StmtKind::Continue => {
                let is_break = s.kind == StmtKind::Break;
                let target = method.enclosing_blocks(s.block).find(|b| {
                    let block = &blocks[*b];
                    match &s.jump_label {
                        Some(label) => block.label.as_ref() == Some(label),
                        None => {
                            block.kind == BlockKind::Loop
                                || (is_break && block.kind == BlockKind::Switch)
                        }
                    }
                });
                if !target.is_some_and(inside) {
                    let what = if is_break { "break" } else { "continue" };
                    return Some(format!(
                        "`{what}` on line {} leaves the fragment",
                        s.start_line
                    ));
                }
            }
            StmtKind::Return => {
                if !is_suffix(method, range) {
                    return Some(format!(
                        "`return` on line {} is not at the end of the method",
                        s.start_line
                    ));
                }
            }
            StmtKind::Throw => {
                let caught_outside = method.enclosing_blocks(s.block).any(|b| {
                    blocks[b].kind == BlockKind::Try
                        && !inside(b)
                        && blocks[b].chain.is_some_and(|c| {
                            method.chains()[c]
                                .blocks
                                .iter()
                                .any(|cb| blocks[*cb].kind == BlockKind::Catch)
                        })
                });
                if caught_outside {
                    return Some(format!(
                        "`throw` on line {} is caught outside the fragment",
                        s.start_line
                    ));
                }
            }
            _ => {}
        }
    }
    None
}

/// Nothing executes after the fragment: only closing braces of non-loop
/// blocks follow it.
pub(crate) fn is_suffix(method: &LongMethod, range: StmtRange) -> bool {
    method.statements()[range.last + 1..].iter().all(|s| {
        s.kind == StmtKind::BlockClose
            && s.closes
                .is_none_or(|b| method.blocks()[b].kind != BlockKind::Loop)
    })
}

/// Counted statements covered by `s`.
pub fn fragment_statements(method: &LongMethod, s: &ExtractSuggestion) -> usize {
    method
        .statements()
        .iter()
        .filter(|st| st.counts() && s.span().contains_span(st.span()))
        .count()
}

/// Whether a valid suggestion is worth extracting.
pub fn check_usefulness(method: &LongMethod, s: &ExtractSuggestion, cfg: &FilterConfig) -> Verdict {
    let covered = fragment_statements(method, s);
    let total = method.counted_statements();
    if total > 0 && covered as f64 / total as f64 >= cfg.max_coverage_fraction {
        return Verdict::new(
            s.clone(),
            ReasonCode::WholeMethod,
            format!("covers {covered} of {total} statements"),
        );
    }
    if covered < cfg.min_statements {
        return Verdict::new(
            s.clone(),
            ReasonCode::OneLiner,
            format!("{covered} statement(s)"),
        );
    }
    Verdict::ok(s.clone())
}

/// Normalize, then check validity, then usefulness.
pub fn classify(method: &LongMethod, s: &ExtractSuggestion, cfg: &FilterConfig) -> Verdict {
    let normalized = match normalize_scope(method, s) {
        Ok(n) => n,
        Err(e) => return Verdict::new(s.clone(), ReasonCode::ScopeUnbalanced, e.to_string()),
    };
    let v = check_validity(method, &normalized);
    if !v.is_applicable() {
        return v;
    }
    check_usefulness(method, &normalized, cfg)
}

/// One verdict per distinct raw suggestion, in set order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Triage {
    pub raw: Vec<ExtractSuggestion>,
    pub verdicts: Vec<Verdict>,
}

impl Triage {
    pub fn of_class(
        &self,
        class: VerdictClass,
    ) -> impl Iterator<Item = (&ExtractSuggestion, &Verdict)> {
        self.raw
            .iter()
            .zip(&self.verdicts)
            .filter(move |(_, v)| v.class() == class)
    }

    pub fn invalid(&self) -> usize {
        self.of_class(VerdictClass::Invalid).count()
    }

    pub fn not_useful(&self) -> usize {
        self.of_class(VerdictClass::NotUseful).count()
    }

    pub fn useful(&self) -> usize {
        self.of_class(VerdictClass::Applicable).count()
    }

    /// Applicable ranges with colliding normalized ranges merged.
    pub fn applicable(&self) -> Vec<ExtractSuggestion> {
        merge_collisions(
            self.of_class(VerdictClass::Applicable)
                .map(|(_, v)| v.suggestion.clone()),
        )
    }
}

pub fn triage(method: &LongMethod, set: &SuggestionSet, cfg: &FilterConfig) -> Triage {
    let raw = set.entries();
    let verdicts = raw.iter().map(|s| classify(method, s, cfg)).collect();
    Triage { raw, verdicts }
}
