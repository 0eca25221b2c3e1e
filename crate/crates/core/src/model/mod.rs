//! Statement-level model of a single brace-delimited method.
//!
//! [`parse_method`] turns a line range of a source file into a [`LongMethod`]:
//! an ordered statement list with scope depths, the block tree those
//! statements live in, and lexically resolved variable references. The
//! def-use and liveness queries in [`dataflow`] run on top of it.

mod dataflow;
pub mod lexer;
mod locate;
mod parse;
mod refs;

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dataflow::{Access, DefUseChains, DefUseEvent};
pub use lexer::LexError;
pub use locate::{locate_methods, MethodLocation};

pub type VarId = usize;
pub type BlockId = usize;

/// Inclusive, 1-based, absolute line span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LineSpan {
    pub start: usize,
    pub end: usize,
}

impl LineSpan {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end < self.start
    }

    pub fn contains(&self, line: usize) -> bool {
        self.start <= line && line <= self.end
    }

    pub fn contains_span(&self, other: LineSpan) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn intersects(&self, other: LineSpan) -> bool {
        self.start <= other.end && other.start <= self.end
    }
}

impl fmt::Display for LineSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start, self.end)
    }
}

/// Inclusive range of statement indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StmtRange {
    pub first: usize,
    pub last: usize,
}

impl StmtRange {
    pub fn new(first: usize, last: usize) -> Self {
        debug_assert!(first <= last);
        Self { first, last }
    }

    pub fn contains(&self, index: usize) -> bool {
        self.first <= index && index <= self.last
    }

    pub fn contains_range(&self, other: StmtRange) -> bool {
        self.first <= other.first && other.last <= self.last
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<usize> {
        self.first..=self.last
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StmtKind {
    Declaration,
    Expression,
    ControlHeader,
    BlockClose,
    Return,
    Break,
    Continue,
    Throw,
    TryBoundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockKind {
    Method,
    Plain,
    If,
    Else,
    Loop,
    Switch,
    Try,
    Catch,
    Finally,
    Synchronized,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub kind: BlockKind,
    pub parent: Option<BlockId>,
    /// Statement that opens the block; `None` for the method body.
    pub header: Option<usize>,
    /// Statement holding the closing brace; `None` for brace-less bodies.
    pub close: Option<usize>,
    pub chain: Option<usize>,
    pub label: Option<String>,
    pub braced: bool,
    /// Statements strictly inside the block, excluding header and close.
    pub inner: Option<StmtRange>,
}

/// Compound statement chain (`if`/`else if`/`else`, `try`/`catch`/`finally`,
/// a loop, a switch): must be extracted whole or not at all.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub members: Vec<usize>,
    pub blocks: Vec<BlockId>,
    pub span: StmtRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarOrigin {
    /// Declared by a statement of the method body.
    Local { decl_stmt: usize },
    /// A formal parameter of the method.
    Parameter { index: usize },
    /// Never declared in the method: a field, a class name, an outer binding.
    External,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub origin: VarOrigin,
    /// Declared type text, when it can be read off the declaration.
    pub ty: Option<String>,
    pub scope: BlockId,
}

impl Variable {
    pub fn is_external(&self) -> bool {
        matches!(self.origin, VarOrigin::External)
    }

    pub fn is_local(&self) -> bool {
        matches!(self.origin, VarOrigin::Local { .. })
    }

    pub fn is_parameter(&self) -> bool {
        matches!(self.origin, VarOrigin::Parameter { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RefAccess {
    Def,
    Use,
    DefUse,
}

impl RefAccess {
    pub fn is_def(self) -> bool {
        matches!(self, RefAccess::Def | RefAccess::DefUse)
    }

    pub fn is_use(self) -> bool {
        matches!(self, RefAccess::Use | RefAccess::DefUse)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarRef {
    pub var: VarId,
    pub access: RefAccess,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub index: usize,
    pub start_line: usize,
    pub end_line: usize,
    pub scope_depth: usize,
    pub kind: StmtKind,
    pub defs: BTreeSet<String>,
    pub uses: BTreeSet<String>,
    /// Innermost block the statement sits in.
    pub block: BlockId,
    pub opens: Option<BlockId>,
    pub closes: Option<BlockId>,
    /// Chain this statement is a structural member of.
    pub chain: Option<usize>,
    pub label: Option<String>,
    /// Target label of a labelled `break` / `continue`.
    pub jump_label: Option<String>,
    pub case_label: bool,
    /// Token text joined by single spaces; comments and literal contents gone.
    pub text: String,
    pub refs: Vec<VarRef>,
}

impl Statement {
    pub fn span(&self) -> LineSpan {
        LineSpan::new(self.start_line, self.end_line)
    }

    /// Block-close pseudo-statements do not count towards coverage.
    pub fn counts(&self) -> bool {
        self.kind != StmtKind::BlockClose
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub text: String,
    pub name: String,
    /// `None` for constructors.
    pub return_type: Option<String>,
    pub params: Vec<Param>,
    pub type_params: Option<String>,
    pub throws: Option<String>,
    pub is_static: bool,
}

impl Signature {
    pub fn returns_value(&self) -> bool {
        self.return_type.as_deref().is_some_and(|t| t != "void")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("method range {start}-{end} does not fit in a file of {lines} lines")]
    RangeOutsideFile {
        start: usize,
        end: usize,
        lines: usize,
    },
    #[error("no method signature on line {line}")]
    MissingSignature { line: usize },
    #[error("unbalanced braces in method range {start}-{end}: {detail}")]
    UnbalancedBraces {
        start: usize,
        end: usize,
        detail: String,
    },
    #[error("method body has no statements")]
    EmptyBody,
    #[error("syntax error on line {line}: {detail}")]
    Syntax { line: usize, detail: String },
    #[error("lexical error: {0:?}")]
    Lex(LexError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScopeError {
    #[error("line {0} is not in the method body")]
    LineNotInBody(usize),
}

/// The host method of an extraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LongMethod {
    file_path: PathBuf,
    start_line: usize,
    end_line: usize,
    /// First and last line that may hold body statements.
    body: LineSpan,
    signature: Signature,
    doc_comment: Option<String>,
    indent: String,
    lines: Vec<String>,
    code_lines: BTreeSet<usize>,
    statements: Vec<Statement>,
    blocks: Vec<Block>,
    chains: Vec<Chain>,
    vars: Vec<Variable>,
}

impl LongMethod {
    pub fn file_path(&self) -> &Path {
        &self.file_path
    }

    pub fn start_line(&self) -> usize {
        self.start_line
    }

    pub fn end_line(&self) -> usize {
        self.end_line
    }

    pub fn span(&self) -> LineSpan {
        LineSpan::new(self.start_line, self.end_line)
    }

    /// L_i = e_i - s_i.
    pub fn length(&self) -> usize {
        self.end_line - self.start_line
    }

    pub fn body_span(&self) -> LineSpan {
        self.body
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn signature_text(&self) -> &str {
        &self.signature.text
    }

    pub fn name(&self) -> &str {
        &self.signature.name
    }

    pub fn doc_comment(&self) -> Option<&str> {
        self.doc_comment.as_deref()
    }

    /// Leading whitespace of the signature line.
    pub fn indent(&self) -> &str {
        &self.indent
    }

    pub fn statements(&self) -> &[Statement] {
        &self.statements
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn chains(&self) -> &[Chain] {
        &self.chains
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn variable(&self, id: VarId) -> &Variable {
        &self.vars[id]
    }

    /// Source text of `line` (absolute); `None` outside the method.
    pub fn line_text(&self, line: usize) -> Option<&str> {
        if line < self.start_line || line > self.end_line {
            return None;
        }
        self.lines.get(line - self.start_line).map(String::as_str)
    }

    /// The method's source lines, signature through closing brace.
    pub fn text(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }

    pub fn has_code(&self, line: usize) -> bool {
        self.code_lines.contains(&line)
    }

    /// Body lines that are blank or hold only comments.
    pub fn non_code_body_lines(&self) -> usize {
        (self.body.start..=self.body.end)
            .filter(|l| !self.has_code(*l))
            .count()
    }

    pub fn counted_statements(&self) -> usize {
        self.statements.iter().filter(|s| s.counts()).count()
    }

    /// Statements touching any line of `span`.
    pub fn statements_in(&self, span: LineSpan) -> Option<StmtRange> {
        let mut hit = self.statements.iter().filter(|s| s.span().intersects(span));
        let first = hit.next()?.index;
        let last = hit.next_back().map_or(first, |s| s.index);
        Some(StmtRange::new(first, last))
    }

    pub fn lines_of(&self, range: StmtRange) -> LineSpan {
        let end = self.statements[range.first..=range.last]
            .iter()
            .map(|s| s.end_line)
            .max()
            .unwrap_or(self.statements[range.last].end_line);
        LineSpan::new(self.statements[range.first].start_line, end)
    }

    pub fn scope_depth_at(&self, line: usize) -> Result<usize, ScopeError> {
        if !self.body.contains(line) {
            return Err(ScopeError::LineNotInBody(line));
        }
        if let Some(stmt) = self.statements.iter().find(|s| s.span().contains(line)) {
            return Ok(stmt.scope_depth);
        }
        // Blank or comment line: depth of whatever block is open there.
        let before = self.statements.iter().rev().find(|s| s.end_line < line);
        Ok(match before {
            Some(s) if s.opens.is_some() && self.blocks[s.opens.unwrap()].braced => {
                s.scope_depth + 1
            }
            Some(s) => s.scope_depth,
            None => 0,
        })
    }

    pub fn is_ancestor_block(&self, ancestor: BlockId, mut block: BlockId) -> bool {
        loop {
            if block == ancestor {
                return true;
            }
            match self.blocks[block].parent {
                Some(p) => block = p,
                None => return false,
            }
        }
    }

    /// Blocks enclosing `block`, innermost first, including itself.
    pub fn enclosing_blocks(&self, block: BlockId) -> impl Iterator<Item = BlockId> + '_ {
        std::iter::successors(Some(block), move |b| self.blocks[*b].parent)
    }

    /// Names declared as locals anywhere in the body.
    pub fn local_names(&self) -> BTreeSet<&str> {
        self.vars
            .iter()
            .filter(|v| v.is_local() || v.is_parameter())
            .map(|v| v.name.as_str())
            .collect()
    }

    pub fn def_use(&self) -> DefUseChains {
        dataflow::def_use(self)
    }

    /// Variables assigned in `span` and read after it.
    pub fn live_out(&self, span: LineSpan) -> BTreeSet<String> {
        match self.statements_in(span) {
            Some(range) => self
                .live_out_vars(range)
                .into_iter()
                .map(|v| self.vars[v].name.clone())
                .collect(),
            None => BTreeSet::new(),
        }
    }

    pub fn live_out_vars(&self, range: StmtRange) -> Vec<VarId> {
        dataflow::live_out(self, range)
    }

    /// Variables whose incoming value the fragment may read: the future
    /// parameters of an extracted method.
    pub fn live_in_vars(&self, range: StmtRange) -> Vec<VarId> {
        dataflow::live_in(self, range)
    }

    /// Whether `range` can be cut out without splitting any block or chain.
    pub fn is_balanced(&self, range: StmtRange) -> bool {
        self.chains
            .iter()
            .all(|c| chain_respects(c, &self.blocks, range))
    }

    /// Smallest balanced range containing `range`.
    pub fn balance(&self, range: StmtRange) -> StmtRange {
        let mut cur = range;
        loop {
            let mut next = cur;
            for chain in &self.chains {
                if !chain_respects(chain, &self.blocks, cur) {
                    next.first = next.first.min(chain.span.first);
                    next.last = next.last.max(chain.span.last);
                }
            }
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }
}

fn chain_respects(chain: &Chain, blocks: &[Block], range: StmtRange) -> bool {
    let span = chain.span;
    if range.last < span.first || span.last < range.first {
        return true;
    }
    if range.contains_range(span) {
        return true;
    }
    if chain.members.iter().any(|m| range.contains(*m)) {
        return false;
    }
    chain
        .blocks
        .iter()
        .filter_map(|b| blocks[*b].inner)
        .any(|inner| inner.contains_range(range))
}

/// Parse the method occupying `span` of `source`.
pub fn parse_method(
    file_path: impl Into<PathBuf>,
    source: &str,
    span: LineSpan,
) -> Result<LongMethod, ParseError> {
    parse::parse(file_path.into(), source, span)
}
