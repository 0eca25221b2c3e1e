use std::collections::BTreeSet;
use std::path::PathBuf;

use super::lexer::{tokenize, Token};
use super::refs::{self, matching, render};
use super::{
    Block, BlockId, BlockKind, Chain, LineSpan, LongMethod, Param, ParseError, Signature,
    Statement, StmtKind, StmtRange, VarOrigin, VarRef, Variable,
};

pub(super) fn parse(
    file_path: PathBuf,
    source: &str,
    span: LineSpan,
) -> Result<LongMethod, ParseError> {
    let src_lines: Vec<&str> = source.lines().collect();
    if span.start == 0 || span.start >= span.end || span.end > src_lines.len() {
        return Err(ParseError::RangeOutsideFile {
            start: span.start,
            end: span.end,
            lines: src_lines.len(),
        });
    }
    let lexed = tokenize(source).map_err(ParseError::Lex)?;
    let toks: Vec<Token> = lexed
        .tokens
        .iter()
        .filter(|t| span.contains(t.line))
        .cloned()
        .collect();
    if !toks.first().is_some_and(|t| t.line == span.start) {
        return Err(ParseError::MissingSignature { line: span.start });
    }
    let unbalanced = |detail: &str| ParseError::UnbalancedBraces {
        start: span.start,
        end: span.end,
        detail: detail.to_string(),
    };

    let mut paren = 0i32;
    let open = toks
        .iter()
        .position(|t| {
            if t.is("(") {
                paren += 1;
            } else if t.is(")") {
                paren -= 1;
            }
            paren == 0 && (t.is("{") || t.is(";"))
        })
        .ok_or_else(|| unbalanced("no opening brace"))?;
    if !toks[open].is("{") {
        return Err(unbalanced("declaration without a body"));
    }
    let close = matching(&toks, open).ok_or_else(|| unbalanced("opening brace is never closed"))?;
    if close != toks.len() - 1 {
        return Err(unbalanced("tokens after the closing brace"));
    }
    if toks[close].line != span.end {
        return Err(unbalanced("closing brace is not on the last line"));
    }

    let signature = parse_signature(&toks[..open], &src_lines)?;
    let body = LineSpan::new(toks[open].line + 1, span.end - 1);
    if let Some(t) = toks[open + 1..close]
        .iter()
        .find(|t| !body.contains(t.line))
    {
        return Err(ParseError::Syntax {
            line: t.line,
            detail: "body statements must not share a line with the signature or the closing brace"
                .into(),
        });
    }

    let body_toks = &toks[open + 1..close];
    if body_toks.is_empty() {
        return Err(ParseError::EmptyBody);
    }

    let mut builder = Builder::new(body_toks);
    builder.items(0, 0)?;
    if let Some(t) = builder.peek() {
        return Err(ParseError::Syntax {
            line: t.line,
            detail: "unexpected `}`".into(),
        });
    }

    let Builder {
        stmts: raw,
        mut blocks,
        chains: raw_chains,
        ..
    } = builder;
    compute_inner(&raw, &mut blocks);
    let chains = raw_chains
        .into_iter()
        .map(|(members, chain_blocks)| {
            let first = members.iter().copied().min().unwrap_or(0);
            let mut last = members.iter().copied().max().unwrap_or(0);
            for b in &chain_blocks {
                if let Some(inner) = blocks[*b].inner {
                    last = last.max(inner.last);
                }
            }
            Chain {
                members,
                blocks: chain_blocks,
                span: StmtRange::new(first, last),
            }
        })
        .collect();

    let (statements, vars) = resolve(raw, &blocks, &signature, &src_lines);

    let code_lines = (span.start..=span.end)
        .filter(|l| lexed.line_has_code(*l))
        .collect();
    let indent: String = src_lines[span.start - 1]
        .chars()
        .take_while(|c| c.is_whitespace())
        .collect();
    Ok(LongMethod {
        file_path,
        start_line: span.start,
        end_line: span.end,
        body,
        signature,
        doc_comment: doc_comment(&src_lines, span.start),
        indent,
        lines: src_lines[span.start - 1..span.end]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        code_lines,
        statements,
        blocks,
        chains,
        vars,
    })
}

struct RawStmt {
    toks: Vec<Token>,
    depth: usize,
    kind: StmtKind,
    block: BlockId,
    opens: Option<BlockId>,
    closes: Option<BlockId>,
    chain: Option<usize>,
    label: Option<String>,
    case_label: bool,
}

enum BodyEnd {
    Braced(BlockId),
    Bare(BlockId),
}

struct Builder<'t> {
    toks: &'t [Token],
    pos: usize,
    stmts: Vec<RawStmt>,
    blocks: Vec<Block>,
    chains: Vec<(Vec<usize>, Vec<BlockId>)>,
}

impl<'t> Builder<'t> {
    fn new(toks: &'t [Token]) -> Self {
        let root = Block {
            kind: BlockKind::Method,
            parent: None,
            header: None,
            close: None,
            chain: None,
            label: None,
            braced: true,
            inner: None,
        };
        Self {
            toks,
            pos: 0,
            stmts: Vec::new(),
            blocks: vec![root],
            chains: Vec::new(),
        }
    }

    fn peek(&self) -> Option<&'t Token> {
        self.toks.get(self.pos)
    }

    fn peek_is(&self, s: &str) -> bool {
        self.peek().is_some_and(|t| t.is(s))
    }

    fn at(&self, k: usize) -> Option<&'t Token> {
        self.toks.get(self.pos + k)
    }

    fn err<T>(&self, detail: &str) -> Result<T, ParseError> {
        let line = self
            .peek()
            .or_else(|| self.toks.last())
            .map_or(0, |t| t.line);
        Err(ParseError::Syntax {
            line,
            detail: detail.to_string(),
        })
    }

    fn expect(&mut self, s: &str) -> Result<(), ParseError> {
        if self.peek_is(s) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("expected `{s}`"))
        }
    }

    fn parens(&mut self) -> Result<(), ParseError> {
        if !self.peek_is("(") {
            return self.err("expected `(`");
        }
        match matching(self.toks, self.pos) {
            Some(close) => {
                self.pos = close + 1;
                Ok(())
            }
            None => self.err("unclosed `(`"),
        }
    }

    fn new_chain(&mut self) -> usize {
        self.chains.push((Vec::new(), Vec::new()));
        self.chains.len() - 1
    }

    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        start: usize,
        depth: usize,
        kind: StmtKind,
        block: BlockId,
        opens: Option<BlockId>,
        closes: Option<BlockId>,
        chain: Option<usize>,
        label: Option<String>,
    ) -> usize {
        let idx = self.stmts.len();
        if let Some(c) = chain {
            self.chains[c].0.push(idx);
        }
        if let Some(b) = opens {
            self.blocks[b].header = Some(idx);
        }
        if let Some(b) = closes {
            self.blocks[b].close = Some(idx);
        }
        self.stmts.push(RawStmt {
            toks: self.toks[start..self.pos].to_vec(),
            depth,
            kind,
            block,
            opens,
            closes,
            chain,
            label,
            case_label: false,
        });
        idx
    }

    fn items(&mut self, block: BlockId, depth: usize) -> Result<(), ParseError> {
        while let Some(t) = self.peek() {
            if t.is("}") {
                return Ok(());
            }
            self.statement(block, depth)?;
        }
        Ok(())
    }

    fn statement(&mut self, block: BlockId, depth: usize) -> Result<(), ParseError> {
        let start = self.pos;
        let mut label = None;
        while self.peek().is_some_and(|t| t.is_ident()) && self.at(1).is_some_and(|t| t.is(":")) {
            label = Some(self.peek().unwrap().text.clone());
            self.pos += 2;
        }
        let Some(t) = self.peek() else {
            return self.err("label without a statement");
        };
        match t.text.as_str() {
            "{" if t.kind == super::lexer::TokKind::Punct => {
                let chain = self.new_chain();
                let end =
                    self.open_body(start, block, depth, BlockKind::Plain, chain, label, None)?;
                self.finish_simple(end, depth, block, chain)
            }
            "if" => self.if_chain(start, block, depth, label),
            "for" | "while" => {
                self.pos += 1;
                self.parens()?;
                let chain = self.new_chain();
                let end =
                    self.open_body(start, block, depth, BlockKind::Loop, chain, label, None)?;
                self.finish_simple(end, depth, block, chain)
            }
            "do" => {
                self.pos += 1;
                let chain = self.new_chain();
                let end =
                    self.open_body(start, block, depth, BlockKind::Loop, chain, label, None)?;
                let (close_start, closes) = match end {
                    BodyEnd::Braced(b) => {
                        let s = self.pos;
                        self.pos += 1;
                        (s, b)
                    }
                    BodyEnd::Bare(b) => (self.pos, b),
                };
                self.expect("while")?;
                self.parens()?;
                self.expect(";")?;
                self.push(
                    close_start,
                    depth,
                    StmtKind::BlockClose,
                    block,
                    None,
                    Some(closes),
                    Some(chain),
                    None,
                );
                Ok(())
            }
            "switch" | "synchronized" if self.at(1).is_some_and(|t| t.is("(")) => {
                let kind = if t.is("switch") {
                    BlockKind::Switch
                } else {
                    BlockKind::Synchronized
                };
                self.pos += 1;
                self.parens()?;
                if !self.peek_is("{") {
                    return self.err("expected `{`");
                }
                let chain = self.new_chain();
                let end = self.open_body(start, block, depth, kind, chain, label, None)?;
                self.finish_simple(end, depth, block, chain)
            }
            "try" => self.try_chain(start, block, depth, label),
            "case" | "default"
                if t.is("case") || self.at(1).is_some_and(|n| n.is(":") || n.is("->")) =>
            {
                self.pos += 1;
                let mut paren = 0i32;
                loop {
                    let Some(t) = self.peek() else {
                        return self.err("unterminated case label");
                    };
                    if t.is("(") {
                        paren += 1;
                    } else if t.is(")") {
                        paren -= 1;
                    }
                    self.pos += 1;
                    if paren == 0 && (t.is(":") || t.is("->")) {
                        break;
                    }
                }
                let chain = self.blocks[block]
                    .chain
                    .filter(|_| self.blocks[block].kind == BlockKind::Switch);
                let idx = self.push(
                    start,
                    depth,
                    StmtKind::ControlHeader,
                    block,
                    None,
                    None,
                    chain,
                    label,
                );
                self.stmts[idx].case_label = true;
                Ok(())
            }
            "return" | "break" | "continue" | "throw" => {
                let kind = match t.text.as_str() {
                    "return" => StmtKind::Return,
                    "break" => StmtKind::Break,
                    "continue" => StmtKind::Continue,
                    _ => StmtKind::Throw,
                };
                self.skip_to_semicolon()?;
                self.push(start, depth, kind, block, None, None, None, label);
                Ok(())
            }
            "class" | "interface" | "enum" => {
                while !self.peek_is("{") {
                    if self.peek().is_none() {
                        return self.err("local type without a body");
                    }
                    self.pos += 1;
                }
                let close = matching(self.toks, self.pos)
                    .map_or_else(|| self.err("unclosed local type"), Ok)?;
                self.pos = close + 1;
                self.push(
                    start,
                    depth,
                    StmtKind::Declaration,
                    block,
                    None,
                    None,
                    None,
                    label,
                );
                Ok(())
            }
            ";" => {
                self.pos += 1;
                self.push(
                    start,
                    depth,
                    StmtKind::Expression,
                    block,
                    None,
                    None,
                    None,
                    label,
                );
                Ok(())
            }
            "else" | "catch" | "finally" => {
                self.err(&format!("`{}` without a matching statement", t.text))
            }
            _ => {
                self.skip_to_semicolon()?;
                self.push(
                    start,
                    depth,
                    StmtKind::Expression,
                    block,
                    None,
                    None,
                    None,
                    label,
                );
                Ok(())
            }
        }
    }

    fn skip_to_semicolon(&mut self) -> Result<(), ParseError> {
        let mut depth = 0i32;
        while let Some(t) = self.peek() {
            if t.kind == super::lexer::TokKind::Punct {
                match t.text.as_str() {
                    "(" | "[" | "{" => depth += 1,
                    ")" | "]" | "}" => {
                        depth -= 1;
                        if depth < 0 {
                            return self.err("missing `;`");
                        }
                    }
                    ";" if depth == 0 => {
                        self.pos += 1;
                        return Ok(());
                    }
                    _ => {}
                }
            }
            self.pos += 1;
        }
        self.err("missing `;` at end of body")
    }

    /// Push the header statement `toks[start..]` and parse the body it opens.
    /// A braced body returns with the cursor on its closing `}`.
    #[allow(clippy::too_many_arguments)]
    fn open_body(
        &mut self,
        start: usize,
        block: BlockId,
        depth: usize,
        kind: BlockKind,
        chain: usize,
        label: Option<String>,
        closes: Option<BlockId>,
    ) -> Result<BodyEnd, ParseError> {
        let braced = self.peek_is("{");
        if braced {
            self.pos += 1;
        }
        let inner = self.blocks.len();
        self.blocks.push(Block {
            kind,
            parent: Some(block),
            header: None,
            close: None,
            chain: Some(chain),
            label: label.clone(),
            braced,
            inner: None,
        });
        self.chains[chain].1.push(inner);
        let stmt_kind = match kind {
            BlockKind::Try | BlockKind::Catch | BlockKind::Finally => StmtKind::TryBoundary,
            _ => StmtKind::ControlHeader,
        };
        self.push(
            start,
            depth,
            stmt_kind,
            block,
            Some(inner),
            closes,
            Some(chain),
            label,
        );
        if braced {
            self.items(inner, depth + 1)?;
            if !self.peek_is("}") {
                return self.err("unclosed block");
            }
            Ok(BodyEnd::Braced(inner))
        } else {
            if self.peek().is_none() || self.peek_is("}") {
                return self.err("missing statement body");
            }
            self.statement(inner, depth + 1)?;
            Ok(BodyEnd::Bare(inner))
        }
    }

    fn finish_simple(
        &mut self,
        end: BodyEnd,
        depth: usize,
        block: BlockId,
        chain: usize,
    ) -> Result<(), ParseError> {
        if let BodyEnd::Braced(b) = end {
            let s = self.pos;
            self.pos += 1;
            self.push(
                s,
                depth,
                StmtKind::BlockClose,
                block,
                None,
                Some(b),
                Some(chain),
                None,
            );
        }
        Ok(())
    }

    fn if_chain(
        &mut self,
        start: usize,
        block: BlockId,
        depth: usize,
        label: Option<String>,
    ) -> Result<(), ParseError> {
        let chain = self.new_chain();
        let mut start = start;
        let mut closes = None;
        let mut label = label;
        loop {
            let kind = if self.peek_is("else") {
                self.pos += 1;
                if self.peek_is("if") {
                    self.pos += 1;
                    self.parens()?;
                    BlockKind::If
                } else {
                    BlockKind::Else
                }
            } else {
                self.expect("if")?;
                self.parens()?;
                BlockKind::If
            };
            let end = self.open_body(
                start,
                block,
                depth,
                kind,
                chain,
                label.take(),
                closes.take(),
            )?;
            match end {
                BodyEnd::Braced(b) => {
                    let close_tok = self.pos;
                    self.pos += 1;
                    if self.peek_is("else") && kind == BlockKind::If {
                        if self.peek().unwrap().line == self.toks[close_tok].line {
                            start = close_tok;
                            closes = Some(b);
                        } else {
                            self.pos = close_tok;
                            self.finish_simple(BodyEnd::Braced(b), depth, block, chain)?;
                            start = self.pos;
                        }
                        continue;
                    }
                    self.pos = close_tok;
                    return self.finish_simple(BodyEnd::Braced(b), depth, block, chain);
                }
                BodyEnd::Bare(_) => {
                    if self.peek_is("else") && kind == BlockKind::If {
                        start = self.pos;
                        continue;
                    }
                    return Ok(());
                }
            }
        }
    }

    fn try_chain(
        &mut self,
        start: usize,
        block: BlockId,
        depth: usize,
        label: Option<String>,
    ) -> Result<(), ParseError> {
        let chain = self.new_chain();
        self.expect("try")?;
        if self.peek_is("(") {
            self.parens()?;
        }
        if !self.peek_is("{") {
            return self.err("expected `{` after try");
        }
        let mut end = self.open_body(start, block, depth, BlockKind::Try, chain, label, None)?;
        loop {
            let BodyEnd::Braced(b) = end else {
                unreachable!("try blocks are braced")
            };
            let close_tok = self.pos;
            self.pos += 1;
            let kind = if self.peek_is("catch") {
                BlockKind::Catch
            } else if self.peek_is("finally") {
                BlockKind::Finally
            } else {
                self.pos = close_tok;
                return self.finish_simple(BodyEnd::Braced(b), depth, block, chain);
            };
            let (start, closes) = if self.peek().unwrap().line == self.toks[close_tok].line {
                (close_tok, Some(b))
            } else {
                self.pos = close_tok;
                self.finish_simple(BodyEnd::Braced(b), depth, block, chain)?;
                (self.pos, None)
            };
            self.pos += 1;
            if kind == BlockKind::Catch {
                self.parens()?;
            }
            if !self.peek_is("{") {
                return self.err("expected `{`");
            }
            end = self.open_body(start, block, depth, kind, chain, None, closes)?;
        }
    }
}

fn compute_inner(stmts: &[RawStmt], blocks: &mut [Block]) {
    for (idx, s) in stmts.iter().enumerate() {
        let mut b = Some(s.block);
        while let Some(id) = b {
            if blocks[id].parent.is_some() {
                let inner = blocks[id].inner.get_or_insert(StmtRange::new(idx, idx));
                inner.first = inner.first.min(idx);
                inner.last = inner.last.max(idx);
            }
            b = blocks[id].parent;
        }
    }
}

fn resolve(
    raw: Vec<RawStmt>,
    blocks: &[Block],
    signature: &Signature,
    src_lines: &[&str],
) -> (Vec<Statement>, Vec<Variable>) {
    let mut vars: Vec<Variable> = signature
        .params
        .iter()
        .enumerate()
        .map(|(index, p)| Variable {
            name: p.name.clone(),
            origin: VarOrigin::Parameter { index },
            ty: Some(p.ty.clone()),
            scope: 0,
        })
        .collect();
    let is_ancestor = |anc: BlockId, mut b: BlockId| loop {
        if b == anc {
            return true;
        }
        match blocks[b].parent {
            Some(p) => b = p,
            None => return false,
        }
    };
    let block_depth = |mut b: BlockId| {
        let mut d = 0;
        while let Some(p) = blocks[b].parent {
            d += 1;
            b = p;
        }
        d
    };

    let mut out = Vec::with_capacity(raw.len());
    for (idx, s) in raw.into_iter().enumerate() {
        let opens_block =
            s.opens.is_some_and(|b| blocks[b].braced) && s.toks.last().is_some_and(|t| t.is("{"));
        let scan = refs::scan(&s.toks, opens_block, src_lines);
        let scope = s.opens.unwrap_or(s.block);
        let mut refs_out = Vec::new();
        let mut defs = BTreeSet::new();
        let mut uses = BTreeSet::new();
        for r in scan.refs {
            let var = if let Some(ty) = r.declares {
                vars.push(Variable {
                    name: r.name.clone(),
                    origin: VarOrigin::Local { decl_stmt: idx },
                    ty: Some(ty),
                    scope,
                });
                vars.len() - 1
            } else {
                let local = vars
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| v.name == r.name)
                    .filter(|(_, v)| match v.origin {
                        VarOrigin::Local { decl_stmt } => {
                            decl_stmt <= idx && is_ancestor(v.scope, scope)
                        }
                        _ => false,
                    })
                    .max_by_key(|(id, v)| (block_depth(v.scope), *id))
                    .map(|(id, _)| id);
                let fallback = || {
                    vars.iter()
                        .position(|v| v.name == r.name && (v.is_parameter() || v.is_external()))
                };
                match local.or_else(fallback) {
                    Some(id) => id,
                    None => {
                        vars.push(Variable {
                            name: r.name.clone(),
                            origin: VarOrigin::External,
                            ty: None,
                            scope: 0,
                        });
                        vars.len() - 1
                    }
                }
            };
            if r.access.is_def() {
                defs.insert(r.name.clone());
            }
            if r.access.is_use() {
                uses.insert(r.name.clone());
            }
            refs_out.push(VarRef {
                var,
                access: r.access,
            });
        }
        let kind = if s.kind == StmtKind::Expression && scan.is_declaration {
            StmtKind::Declaration
        } else {
            s.kind
        };
        let jump_label = match kind {
            StmtKind::Break | StmtKind::Continue => s
                .toks
                .get(1)
                .filter(|t| t.is_ident())
                .map(|t| t.text.clone()),
            _ => None,
        };
        out.push(Statement {
            index: idx,
            start_line: s.toks.first().map_or(0, |t| t.line),
            end_line: s.toks.last().map_or(0, |t| t.line),
            scope_depth: s.depth,
            kind,
            defs,
            uses,
            block: s.block,
            opens: s.opens,
            closes: s.closes,
            chain: s.chain,
            label: s.label,
            jump_label,
            case_label: s.case_label,
            text: s
                .toks
                .iter()
                .map(|t| t.text.as_str())
                .collect::<Vec<_>>()
                .join(" "),
            refs: refs_out,
        });
    }
    (out, vars)
}

const MODIFIERS: &[&str] = &[
    "public",
    "private",
    "protected",
    "static",
    "final",
    "abstract",
    "synchronized",
    "native",
    "strictfp",
    "default",
];

fn parse_signature(toks: &[Token], src_lines: &[&str]) -> Result<Signature, ParseError> {
    let line = toks.first().map_or(0, |t| t.line);
    let missing = || ParseError::MissingSignature { line };
    let mut i = 0;
    let mut is_static = false;
    loop {
        match toks.get(i) {
            Some(t) if t.is("@") => {
                i += 2;
                while toks.get(i).is_some_and(|t| t.is(".")) {
                    i += 2;
                }
                if toks.get(i).is_some_and(|t| t.is("(")) {
                    i = matching(toks, i).ok_or_else(missing)? + 1;
                }
            }
            Some(t) if MODIFIERS.iter().any(|m| t.is(m)) => {
                is_static |= t.is("static");
                i += 1;
            }
            _ => break,
        }
    }
    let mut type_params = None;
    if toks.get(i).is_some_and(|t| t.is("<")) {
        let mut depth = 0i32;
        let s = i;
        while let Some(t) = toks.get(i) {
            match t.text.as_str() {
                "<" => depth += 1,
                ">" => depth -= 1,
                ">>" => depth -= 2,
                _ => {}
            }
            i += 1;
            if depth <= 0 {
                break;
            }
        }
        type_params = Some(render(toks, s, i, src_lines));
    }
    let open = (i..toks.len())
        .find(|k| toks[*k].is("("))
        .ok_or_else(missing)?;
    if open == 0 || !toks[open - 1].is_ident() {
        return Err(missing());
    }
    let name = toks[open - 1].text.clone();
    let return_type = if open - 1 > i {
        Some(render(toks, i, open - 1, src_lines))
    } else {
        None
    };
    let close = matching(toks, open).ok_or_else(missing)?;

    let mut params = Vec::new();
    let mut seg_start = open + 1;
    let mut depth = 0i32;
    for k in open + 1..=close {
        let t = &toks[k];
        match t.text.as_str() {
            "<" | "(" => depth += 1,
            ">" | ")" if k != close => depth -= 1,
            ">>" => depth -= 2,
            _ => {}
        }
        if (k == close || (t.is(",") && depth == 0)) && k > seg_start {
            let name_idx = k - 1;
            let mut ty_start = seg_start;
            while toks[ty_start].is("final") || toks[ty_start].is("@") {
                ty_start += if toks[ty_start].is("@") { 2 } else { 1 };
            }
            let mut dims = String::new();
            let mut n = name_idx;
            while toks[n].is("]") && n >= 2 && toks[n - 1].is("[") {
                dims.push_str("[]");
                n -= 2;
            }
            if toks[n].is_ident() && n > ty_start {
                let mut ty = render(toks, ty_start, n, src_lines);
                ty.push_str(&dims);
                params.push(Param {
                    name: toks[n].text.clone(),
                    ty,
                });
            }
            seg_start = k + 1;
        }
    }
    let throws = toks[close + 1..]
        .iter()
        .position(|t| t.is("throws"))
        .map(|p| render(toks, close + 2 + p, toks.len(), src_lines));
    let text = render(toks, 0, toks.len(), src_lines);
    Ok(Signature {
        text,
        name,
        return_type,
        params,
        type_params,
        throws,
        is_static,
    })
}

fn doc_comment(src_lines: &[&str], start: usize) -> Option<String> {
    let mut line = start - 1;
    while line >= 1 && src_lines[line - 1].trim_start().starts_with('@') {
        line -= 1;
    }
    if line == 0 || !src_lines[line - 1].trim_end().ends_with("*/") {
        return None;
    }
    let end = line;
    loop {
        let text = src_lines[line - 1].trim_start();
        if text.starts_with("/**") {
            break;
        }
        if text.starts_with("/*") || line == 1 {
            return None;
        }
        line -= 1;
    }
    let first = src_lines[line - 1];
    let indent = &first[..first.len() - first.trim_start().len()];
    Some(
        src_lines[line - 1..end]
            .iter()
            .map(|l| l.strip_prefix(indent).unwrap_or(l.trim_start()).trim_end())
            .collect::<Vec<_>>()
            .join("\n"),
    )
}
