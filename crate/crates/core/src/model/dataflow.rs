//! Def-use chains and fragment liveness over the lexical statement model.

use std::collections::BTreeSet;

use super::{BlockKind, LongMethod, StmtKind, StmtRange, VarId, VarOrigin, Variable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Access {
    Def,
    Use,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DefUseEvent {
    pub statement: usize,
    pub access: Access,
}

/// Per-variable event lists, sorted by statement index. Within a statement
/// a read precedes the write it feeds (`x += 1` is use, then def).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefUseChains {
    vars: Vec<Variable>,
    events: Vec<Vec<DefUseEvent>>,
}

impl DefUseChains {
    pub fn variables(&self) -> impl Iterator<Item = (VarId, &Variable)> {
        self.vars.iter().enumerate()
    }

    pub fn events(&self, var: VarId) -> &[DefUseEvent] {
        &self.events[var]
    }

    /// Every variable carrying `name`, with its events.
    pub fn by_name<'a>(
        &'a self,
        name: &'a str,
    ) -> impl Iterator<Item = (&'a Variable, &'a [DefUseEvent])> + 'a {
        self.vars
            .iter()
            .zip(&self.events)
            .filter(move |(v, _)| v.name == name)
            .map(|(v, e)| (v, e.as_slice()))
    }

    /// Events of the single variable named `name`; `None` when absent or
    /// ambiguous.
    pub fn of<'a>(&'a self, name: &'a str) -> Option<&'a [DefUseEvent]> {
        let mut it = self.by_name(name);
        let first = it.next()?;
        if it.next().is_some() {
            return None;
        }
        Some(first.1)
    }

    pub fn is_external(&self, name: &str) -> bool {
        self.by_name(name)
            .any(|(v, _)| v.is_external() || v.is_parameter())
    }
}

pub(super) fn def_use(method: &LongMethod) -> DefUseChains {
    let mut events = vec![Vec::new(); method.vars.len()];
    for stmt in &method.statements {
        let mut used = BTreeSet::new();
        let mut defined = BTreeSet::new();
        for r in &stmt.refs {
            if r.access.is_use() {
                used.insert(r.var);
            }
            if r.access.is_def() {
                defined.insert(r.var);
            }
        }
        for v in used {
            events[v].push(DefUseEvent {
                statement: stmt.index,
                access: Access::Use,
            });
        }
        for v in defined {
            events[v].push(DefUseEvent {
                statement: stmt.index,
                access: Access::Def,
            });
        }
    }
    DefUseChains {
        vars: method.vars.clone(),
        events,
    }
}

/// Statements whose reads can observe values written by `range`: everything
/// after it, plus the stretch of any enclosing loop that precedes it (the
/// back edge re-enters there).
pub(crate) fn after_region(method: &LongMethod, range: StmtRange) -> Vec<usize> {
    let n = method.statements.len();
    let mut region: BTreeSet<usize> = (range.last + 1..n).collect();
    let anchor = &method.statements[range.first];
    for b in method.enclosing_blocks(anchor.block) {
        let block = &method.blocks[b];
        if block.kind == BlockKind::Loop {
            if let Some(h) = block.header {
                region.extend(h..range.first);
            }
        }
    }
    region.into_iter().collect()
}

pub(super) fn live_out(method: &LongMethod, range: StmtRange) -> Vec<VarId> {
    let defined: BTreeSet<VarId> = method.statements[range.first..=range.last]
        .iter()
        .flat_map(|s| s.refs.iter().filter(|r| r.access.is_def()).map(|r| r.var))
        .filter(|v| !method.vars[*v].is_external())
        .collect();
    let after = after_region(method, range);
    let headers = enclosing_loop_headers(method, range);
    defined
        .into_iter()
        .filter(|v| {
            after.iter().any(|i| {
                method.statements[*i]
                    .refs
                    .iter()
                    .any(|r| r.var == *v && r.access.is_use())
            }) || (headers.iter().any(|h| declared_before(method, *v, *h))
                && upward_exposed(method, range, *v))
        })
        .collect()
}

fn enclosing_loop_headers(method: &LongMethod, range: StmtRange) -> Vec<usize> {
    let anchor = &method.statements[range.first];
    method
        .enclosing_blocks(anchor.block)
        .filter_map(|b| {
            let block = &method.blocks[b];
            (block.kind == BlockKind::Loop)
                .then_some(block.header)
                .flatten()
        })
        .filter(|h| *h < range.first)
        .collect()
}

fn declared_before(method: &LongMethod, v: VarId, stmt: usize) -> bool {
    match method.vars[v].origin {
        VarOrigin::Local { decl_stmt } => decl_stmt < stmt,
        VarOrigin::Parameter { .. } => true,
        VarOrigin::External => false,
    }
}

/// Read inside `range` before any unconditional write there, so a value
/// from a previous pass over the fragment can reach it.
fn upward_exposed(method: &LongMethod, range: StmtRange, v: VarId) -> bool {
    method.statements[range.first..=range.last].iter().any(|s| {
        s.refs.iter().any(|r| r.var == v && r.access.is_use())
            && !definitely_assigned(method, range, v, s.index)
    })
}

/// Whether `var` is unconditionally assigned by a top-level statement of
/// `range` strictly before statement `before`.
pub(crate) fn definitely_assigned(
    method: &LongMethod,
    range: StmtRange,
    var: VarId,
    before: usize,
) -> bool {
    let base = method.statements[range.first].scope_depth;
    method.statements[range.first..before.min(range.last + 1)]
        .iter()
        .any(|s| {
            s.scope_depth == base
                && s.opens.is_none()
                && s.closes.is_none()
                && matches!(s.kind, StmtKind::Declaration | StmtKind::Expression)
                && s.refs
                    .iter()
                    .any(|r| r.var == var && r.access == super::RefAccess::Def)
        })
}

pub(super) fn live_in(method: &LongMethod, range: StmtRange) -> Vec<VarId> {
    let declared_before = |v: &Variable| match v.origin {
        VarOrigin::Local { decl_stmt } => decl_stmt < range.first,
        VarOrigin::Parameter { .. } => true,
        VarOrigin::External => false,
    };
    let mut order: Vec<VarId> = Vec::new();
    for stmt in &method.statements[range.first..=range.last] {
        for r in &stmt.refs {
            let var = &method.vars[r.var];
            if !declared_before(var) || order.contains(&r.var) {
                continue;
            }
            if r.access.is_use() && !definitely_assigned(method, range, r.var, stmt.index) {
                order.push(r.var);
            }
        }
    }
    // A live-out variable the fragment may leave untouched must flow in too.
    for v in live_out(method, range) {
        if declared_before(&method.vars[v])
            && !order.contains(&v)
            && !definitely_assigned(method, range, v, range.last + 1)
        {
            order.push(v);
        }
    }
    let first_ref = |v: VarId| {
        method.statements[range.first..=range.last]
            .iter()
            .flat_map(|s| {
                s.refs
                    .iter()
                    .enumerate()
                    .map(move |(k, r)| (s.index, k, r.var))
            })
            .find(|(_, _, var)| *var == v)
            .map_or((usize::MAX, 0), |(s, k, _)| (s, k))
    };
    order.sort_by_key(|v| first_ref(*v));
    order
}
