//! Post-filter adjustments of applicable suggestions: absorb declarations
//! feeding the fragment, and drop a lone `if` check from its start.

use crate::filter::{check_usefulness, check_validity, FilterConfig};
use crate::model::{BlockKind, LineSpan, LongMethod, StmtKind, StmtRange};
use crate::suggestion::{merge_collisions, ExtractSuggestion, Provenance};

fn applicable(method: &LongMethod, s: &ExtractSuggestion, cfg: &FilterConfig) -> bool {
    check_validity(method, s).is_applicable() && check_usefulness(method, s, cfg).is_applicable()
}

fn range_of(method: &LongMethod, s: &ExtractSuggestion) -> Option<StmtRange> {
    method.statements_in(s.span())
}

/// Number of values the fragment would take as parameters.
pub fn live_in_count(method: &LongMethod, s: &ExtractSuggestion) -> usize {
    range_of(method, s).map_or(0, |r| method.live_in_vars(r).len())
}

/// Pull in the declaration right above the fragment while it declares
/// something the fragment reads. Each step must keep the suggestion
/// applicable and must not add parameters; the last good step wins.
pub fn extend_for_declaration(
    method: &LongMethod,
    s: &ExtractSuggestion,
    cfg: &FilterConfig,
) -> ExtractSuggestion {
    let mut cur = s.clone();
    while let Some(next) = extend_once(method, &cur) {
        if !applicable(method, &next, cfg)
            || live_in_count(method, &next) > live_in_count(method, &cur)
        {
            break;
        }
        cur = next;
    }
    cur
}

fn extend_once(method: &LongMethod, s: &ExtractSuggestion) -> Option<ExtractSuggestion> {
    let range = range_of(method, s)?;
    let prev = method.statements().get(range.first.checked_sub(1)?)?;
    if prev.kind != StmtKind::Declaration || prev.block != method.statements()[range.first].block {
        return None;
    }
    let declared: Vec<_> = prev
        .refs
        .iter()
        .filter(|r| {
            method.variable(r.var).is_local() && prev.defs.contains(&method.variable(r.var).name)
        })
        .map(|r| r.var)
        .collect();
    let read_inside = method.statements()[range.first..=range.last]
        .iter()
        .flat_map(|st| &st.refs)
        .any(|r| r.access.is_use() && declared.contains(&r.var));
    if !read_inside {
        return None;
    }
    Some(s.moved(
        LineSpan::new(prev.start_line.min(s.start_line), s.end_line),
        Provenance::Enhanced,
    ))
}

/// When the fragment is exactly a braced `if` without `else`, keep the
/// check in the host and extract the block only. Repeats for nested
/// single-`if` blocks; a step that stops being applicable is undone.
pub fn shrink_control_header(
    method: &LongMethod,
    s: &ExtractSuggestion,
    cfg: &FilterConfig,
) -> ExtractSuggestion {
    let mut cur = s.clone();
    while let Some(next) = shrink_once(method, &cur) {
        if !applicable(method, &next, cfg) {
            break;
        }
        cur = next;
    }
    cur
}

fn shrink_once(method: &LongMethod, s: &ExtractSuggestion) -> Option<ExtractSuggestion> {
    let range = range_of(method, s)?;
    let first = &method.statements()[range.first];
    let chain = &method.chains()[first.chain?];
    if first.kind != StmtKind::ControlHeader || chain.span != range || chain.blocks.len() != 1 {
        return None;
    }
    let block = &method.blocks()[chain.blocks[0]];
    if block.kind != BlockKind::If || !block.braced {
        return None;
    }
    let inner = block.inner?;
    Some(s.moved(method.lines_of(inner), Provenance::Enhanced))
}

/// Extension then shrinking, repeated until neither changes the range.
pub fn enhance(
    method: &LongMethod,
    s: &ExtractSuggestion,
    cfg: &FilterConfig,
) -> ExtractSuggestion {
    let mut cur = s.clone();
    for _ in 0..=method.statements().len() {
        let next = shrink_control_header(method, &extend_for_declaration(method, &cur, cfg), cfg);
        if next.span() == cur.span() {
            break;
        }
        cur = next;
    }
    cur
}

/// Enhance every applicable suggestion and merge those that end up on the
/// same range.
pub fn enhance_all(
    method: &LongMethod,
    applicable: &[ExtractSuggestion],
    cfg: &FilterConfig,
) -> Vec<ExtractSuggestion> {
    merge_collisions(applicable.iter().map(|s| enhance(method, s, cfg)))
}
