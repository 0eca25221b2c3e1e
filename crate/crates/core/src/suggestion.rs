//! Extract Method suggestions, their multiset, verdicts, and scope
//! normalization.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{lexer, LineSpan, LongMethod};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    #[default]
    Raw,
    Normalized,
    Enhanced,
}

/// A named line-range candidate `(name, (start, end))` with the number of
/// times it was proposed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExtractSuggestion {
    pub name: String,
    pub start_line: usize,
    pub end_line: usize,
    pub count: u32,
    #[serde(default)]
    pub provenance: Provenance,
}

impl ExtractSuggestion {
    pub fn new(name: &str, start_line: usize, end_line: usize) -> Self {
        Self {
            name: sanitize_name(name),
            start_line,
            end_line,
            count: 1,
            provenance: Provenance::Raw,
        }
    }

    pub fn with_count(mut self, count: u32) -> Self {
        self.count = count;
        self
    }

    pub fn span(&self) -> LineSpan {
        LineSpan::new(self.start_line, self.end_line)
    }

    pub fn key(&self) -> (usize, usize) {
        (self.start_line, self.end_line)
    }

    /// Same suggestion moved to `span`.
    pub fn moved(&self, span: LineSpan, provenance: Provenance) -> Self {
        Self {
            start_line: span.start,
            end_line: span.end,
            provenance,
            ..self.clone()
        }
    }
}

impl fmt::Display for ExtractSuggestion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({}-{}) x{}",
            self.name, self.start_line, self.end_line, self.count
        )
    }
}

/// Keep identifier characters only; `extracted` when nothing usable remains.
pub fn sanitize_name(raw: &str) -> String {
    let kept: String = raw
        .chars()
        .filter(|c| c.is_ascii_alphanumeric() || *c == '_' || *c == '$')
        .skip_while(|c| c.is_ascii_digit())
        .collect();
    if kept.is_empty() || lexer::is_keyword(&kept) {
        "extracted".to_string()
    } else {
        kept
    }
}

/// The multiset of proposals for one host method, keyed by line range.
///
/// Names proposed for the same range are tallied; the entry carries the
/// most frequent one (lexicographically smallest on ties).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuggestionSet {
    entries: BTreeMap<(usize, usize), BTreeMap<String, u32>>,
}

impl SuggestionSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: &str, start_line: usize, end_line: usize, count: u32) {
        if count == 0 {
            return;
        }
        *self
            .entries
            .entry((start_line, end_line))
            .or_default()
            .entry(sanitize_name(name))
            .or_default() += count;
    }

    pub fn insert(&mut self, s: &ExtractSuggestion) {
        self.add(&s.name, s.start_line, s.end_line, s.count);
    }

    /// Union with counts summed. Associative and commutative.
    pub fn merge(&mut self, other: &SuggestionSet) {
        for (&(s, e), names) in &other.entries {
            for (name, n) in names {
                self.add(name, s, e, *n);
            }
        }
    }

    /// Number of distinct ranges.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum of occurrence counts.
    pub fn total_count(&self) -> u32 {
        self.entries.values().flat_map(|n| n.values()).sum()
    }

    /// Entries ordered by range.
    pub fn entries(&self) -> Vec<ExtractSuggestion> {
        self.entries
            .iter()
            .map(|(&(s, e), names)| {
                let (name, _) = names
                    .iter()
                    .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
                    .expect("entries are never empty");
                ExtractSuggestion {
                    name: name.clone(),
                    start_line: s,
                    end_line: e,
                    count: names.values().sum(),
                    provenance: Provenance::Raw,
                }
            })
            .collect()
    }
}

impl FromIterator<ExtractSuggestion> for SuggestionSet {
    fn from_iter<T: IntoIterator<Item = ExtractSuggestion>>(iter: T) -> Self {
        let mut set = Self::new();
        for s in iter {
            set.insert(&s);
        }
        set
    }
}

/// Merge suggestions that landed on the same range, summing counts and
/// keeping the name of the most popular contributor.
pub fn merge_collisions(
    items: impl IntoIterator<Item = ExtractSuggestion>,
) -> Vec<ExtractSuggestion> {
    let mut by_key: BTreeMap<(usize, usize), Vec<ExtractSuggestion>> = BTreeMap::new();
    for s in items {
        by_key.entry(s.key()).or_default().push(s);
    }
    by_key
        .into_values()
        .map(|group| {
            let count = group.iter().map(|s| s.count).sum();
            let provenance = group
                .iter()
                .map(|s| s.provenance)
                .max_by_key(|p| *p as u8)
                .unwrap_or_default();
            let best = group
                .into_iter()
                .max_by(|a, b| a.count.cmp(&b.count).then_with(|| b.name.cmp(&a.name)))
                .expect("groups are never empty");
            ExtractSuggestion {
                count,
                provenance,
                ..best
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictClass {
    Invalid,
    NotUseful,
    Applicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReasonCode {
    ScopeUnbalanced,
    MultipleReturns,
    ControlFlowEscape,
    VariableInaccessible,
    WholeMethod,
    OneLiner,
    Ok,
}

impl ReasonCode {
    pub fn class(self) -> VerdictClass {
        match self {
            ReasonCode::ScopeUnbalanced
            | ReasonCode::MultipleReturns
            | ReasonCode::ControlFlowEscape
            | ReasonCode::VariableInaccessible => VerdictClass::Invalid,
            ReasonCode::WholeMethod | ReasonCode::OneLiner => VerdictClass::NotUseful,
            ReasonCode::Ok => VerdictClass::Applicable,
        }
    }
}

/// Classification of one suggestion. `suggestion` is the range that was
/// judged (after normalization when that succeeded).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub suggestion: ExtractSuggestion,
    pub reason: ReasonCode,
    pub detail: String,
}

impl Verdict {
    pub fn new(
        suggestion: ExtractSuggestion,
        reason: ReasonCode,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            suggestion,
            reason,
            detail: detail.into(),
        }
    }

    pub fn ok(suggestion: ExtractSuggestion) -> Self {
        Self::new(suggestion, ReasonCode::Ok, "")
    }

    pub fn class(&self) -> VerdictClass {
        self.reason.class()
    }

    pub fn is_applicable(&self) -> bool {
        self.reason == ReasonCode::Ok
    }

    pub fn to_record(&self) -> VerdictRecord {
        VerdictRecord {
            name: self.suggestion.name.clone(),
            start_line: self.suggestion.start_line,
            end_line: self.suggestion.end_line,
            count: self.suggestion.count,
            class: self.class(),
            reason_code: self.reason,
        }
    }
}

/// Flat JSON shape of a verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub name: String,
    pub start_line: usize,
    pub end_line: usize,
    pub count: u32,
    pub class: VerdictClass,
    pub reason_code: ReasonCode,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("lines {span} fall outside the body of the method at {host}")]
    Unsalvageable { span: LineSpan, host: LineSpan },
    #[error("lines {0} hold no statements")]
    NoStatements(LineSpan),
}

/// Widen `s` until it starts and ends at the same nesting level without
/// splitting a compound statement. Never shrinks the range.
pub fn normalize_scope(
    method: &LongMethod,
    s: &ExtractSuggestion,
) -> Result<ExtractSuggestion, NormalizeError> {
    let host = method.span();
    if s.start_line <= host.start || s.end_line >= host.end || s.start_line > s.end_line {
        return Err(NormalizeError::Unsalvageable {
            span: s.span(),
            host,
        });
    }
    let range = method
        .statements_in(s.span())
        .ok_or(NormalizeError::NoStatements(s.span()))?;
    let stmts = method.lines_of(method.balance(range));
    let span = LineSpan::new(s.start_line.min(stmts.start), s.end_line.max(stmts.end));
    if span == s.span() {
        Ok(s.clone())
    } else {
        Ok(s.moved(span, Provenance::Normalized))
    }
}
