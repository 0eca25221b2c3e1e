//! Lexical declaration parsing and identifier classification within one
//! statement's token slice.

use super::lexer::{Token, COMPOUND_ASSIGN, PRIMITIVES};
use super::RefAccess;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RawRef {
    pub name: String,
    pub access: RefAccess,
    pub tok: usize,
    /// `Some(type)` when this token introduces a new local.
    pub declares: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Scan {
    pub refs: Vec<RawRef>,
    pub is_declaration: bool,
}

#[derive(Debug, Clone)]
pub(crate) struct Decl {
    pub type_start: usize,
    pub type_end: usize,
    /// Token index of each declared name with its trailing `[]` count.
    pub names: Vec<(usize, usize)>,
}

fn is_type_word(t: &Token) -> bool {
    t.is_ident() || PRIMITIVES.contains(&t.text.as_str())
}

/// Parse a type starting at `i`; returns the index just past it.
pub(crate) fn parse_type(toks: &[Token], mut i: usize) -> Option<usize> {
    if !toks.get(i).is_some_and(is_type_word) {
        return None;
    }
    i += 1;
    while toks.get(i).is_some_and(|t| t.is(".")) && toks.get(i + 1).is_some_and(|t| t.is_ident()) {
        i += 2;
    }
    if toks.get(i).is_some_and(|t| t.is("<")) {
        let mut depth: i32 = 0;
        loop {
            let t = toks.get(i)?;
            match t.text.as_str() {
                "<" => depth += 1,
                ">" => depth -= 1,
                ">>" => depth -= 2,
                ">>>" => depth -= 3,
                "," | "." | "?" | "[" | "]" | "&" | "extends" | "super" => {}
                _ if is_type_word(t) => {}
                _ => return None,
            }
            i += 1;
            if depth < 0 {
                return None;
            }
            if depth == 0 {
                break;
            }
        }
        while toks.get(i).is_some_and(|t| t.is("."))
            && toks.get(i + 1).is_some_and(|t| t.is_ident())
        {
            i += 2;
        }
    }
    while toks.get(i).is_some_and(|t| t.is("[")) && toks.get(i + 1).is_some_and(|t| t.is("]")) {
        i += 2;
    }
    if toks.get(i).is_some_and(|t| t.is("...")) {
        i += 1;
    }
    Some(i)
}

fn skip_modifiers(toks: &[Token], mut i: usize) -> usize {
    loop {
        match toks.get(i) {
            Some(t) if t.is("final") => i += 1,
            Some(t)
                if t.is("@")
                    && toks
                        .get(i + 1)
                        .is_some_and(|t| t.kind == super::lexer::TokKind::Ident) =>
            {
                i += 2;
                while toks.get(i).is_some_and(|t| t.is(".")) {
                    i += 2;
                }
                if toks.get(i).is_some_and(|t| t.is("(")) {
                    match matching(toks, i) {
                        Some(close) => i = close + 1,
                        None => return i,
                    }
                }
            }
            _ => return i,
        }
    }
}

/// Index of the bracket closing the one opened at `open`.
pub(crate) fn matching(toks: &[Token], open: usize) -> Option<usize> {
    let (o, c) = match toks[open].text.as_str() {
        "(" => ("(", ")"),
        "[" => ("[", "]"),
        "{" => ("{", "}"),
        _ => return None,
    };
    let mut depth = 0usize;
    for (k, t) in toks.iter().enumerate().skip(open) {
        if t.is(o) {
            depth += 1;
        } else if t.is(c) {
            depth -= 1;
            if depth == 0 {
                return Some(k);
            }
        }
    }
    None
}

/// Local variable declaration starting at `start`: `[final] Type a [= e], b;`
pub(crate) fn parse_decl(toks: &[Token], start: usize) -> Option<Decl> {
    let type_start = skip_modifiers(toks, start);
    let type_end = parse_type(toks, type_start)?;
    let name = type_end;
    if !toks.get(name).is_some_and(|t| t.is_ident()) {
        return None;
    }
    let mut names = Vec::new();
    let mut i = name;
    loop {
        let mut dims = 0;
        let mut j = i + 1;
        while toks.get(j).is_some_and(|t| t.is("[")) && toks.get(j + 1).is_some_and(|t| t.is("]")) {
            dims += 1;
            j += 2;
        }
        let follow = toks.get(j)?;
        if !(follow.is("=") || follow.is(";") || follow.is(",") || follow.is(":") || follow.is(")"))
        {
            return if names.is_empty() {
                None
            } else {
                Some(Decl {
                    type_start,
                    type_end,
                    names,
                })
            };
        }
        names.push((i, dims));
        // Look for `, nextName` at nesting zero.
        let mut depth = 0i32;
        let mut k = j;
        let mut next_name = None;
        while let Some(t) = toks.get(k) {
            match t.text.as_str() {
                "(" | "[" | "{" if t.kind == super::lexer::TokKind::Punct => depth += 1,
                ")" | "]" | "}" if t.kind == super::lexer::TokKind::Punct => {
                    depth -= 1;
                    if depth < 0 {
                        break;
                    }
                }
                ";" | ":" if depth == 0 && t.kind == super::lexer::TokKind::Punct => break,
                "," if depth == 0 && t.kind == super::lexer::TokKind::Punct => {
                    if toks.get(k + 1).is_some_and(|t| t.is_ident()) {
                        next_name = Some(k + 1);
                    }
                    break;
                }
                _ => {}
            }
            k += 1;
        }
        match next_name {
            Some(n) => i = n,
            None => break,
        }
    }
    Some(Decl {
        type_start,
        type_end,
        names,
    })
}

/// Source text of `toks[a..b]`, sliced from the original line when it sits on one.
pub(crate) fn render(toks: &[Token], a: usize, b: usize, src_lines: &[&str]) -> String {
    if a >= b {
        return String::new();
    }
    let first = &toks[a];
    let last = &toks[b - 1];
    if first.line == last.line {
        if let Some(line) = src_lines.get(first.line - 1) {
            let chars: Vec<char> = line.chars().collect();
            let from = first.col - 1;
            let to = (last.col - 1 + last.text.chars().count()).min(chars.len());
            if from < to {
                return chars[from..to].iter().collect();
            }
        }
    }
    toks[a..b]
        .iter()
        .map(|t| t.text.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

fn type_text(toks: &[Token], decl: &Decl, dims: usize, src_lines: &[&str]) -> String {
    let mut ty = render(toks, decl.type_start, decl.type_end, src_lines);
    for _ in 0..dims {
        ty.push_str("[]");
    }
    ty
}

/// Classify every identifier of one statement.
///
/// `opens_block` marks header statements whose trailing `{` opens the
/// statement's block; any other brace pair is an opaque region (lambda
/// body, anonymous class, array initializer) whose identifiers count as
/// plain uses.
pub(crate) fn scan(toks: &[Token], opens_block: bool, src_lines: &[&str]) -> Scan {
    let n = toks.len();
    let mut scan = Scan::default();
    if n == 0 {
        return scan;
    }
    let lo = usize::from(toks[0].is("}"));
    let hi = if opens_block && toks[n - 1].is("{") {
        n - 1
    } else {
        n
    };

    let mut opaque = vec![false; n];
    let mut depth = 0usize;
    for i in lo..hi {
        if toks[i].is("{") {
            depth += 1;
            opaque[i] = true;
        } else if toks[i].is("}") {
            depth = depth.saturating_sub(1);
            opaque[i] = true;
        } else {
            opaque[i] = depth > 0;
        }
    }

    let mut skip = vec![false; n];
    let mut declared: Vec<Option<String>> = vec![None; n];
    let mut start = lo;
    while toks.get(start).is_some_and(|t| t.is_ident())
        && toks.get(start + 1).is_some_and(|t| t.is(":"))
    {
        skip[start] = true;
        start += 2;
    }

    let mark_decl = |decl: &Decl, skip: &mut Vec<bool>, declared: &mut Vec<Option<String>>| {
        for s in skip.iter_mut().take(decl.type_end).skip(decl.type_start) {
            *s = true;
        }
        for &(name, dims) in &decl.names {
            declared[name] = Some(type_text(toks, decl, dims, src_lines));
        }
    };

    if start < hi && !toks[start].is("}") {
        if let Some(decl) = parse_decl(&toks[..hi], start) {
            if !toks.get(decl.type_start).is_some_and(|t| t.is("return")) {
                scan.is_declaration = true;
                mark_decl(&decl, &mut skip, &mut declared);
            }
        }
    }

    for i in lo..hi {
        if opaque[i] {
            continue;
        }
        let t = &toks[i];
        let paren = toks.get(i + 1).is_some_and(|t| t.is("("));
        if t.is("for") && paren {
            if let Some(decl) = parse_decl(&toks[..hi], i + 2) {
                mark_decl(&decl, &mut skip, &mut declared);
            }
        } else if t.is("catch") && paren {
            if let Some(close) = matching(toks, i + 1) {
                if close > i + 2 && toks[close - 1].is_ident() {
                    let ty_start = skip_modifiers(toks, i + 2);
                    for s in skip.iter_mut().take(close - 1).skip(ty_start) {
                        *s = true;
                    }
                    declared[close - 1] = Some(render(toks, ty_start, close - 1, src_lines));
                }
            }
        } else if t.is("try") && paren {
            if let Some(close) = matching(toks, i + 1) {
                let mut k = i + 2;
                while k < close {
                    if let Some(decl) = parse_decl(&toks[..close + 1], k) {
                        mark_decl(&decl, &mut skip, &mut declared);
                    }
                    match (k..close).find(|j| toks[*j].is(";")) {
                        Some(semi) => k = semi + 1,
                        None => break,
                    }
                }
            }
        }
    }

    // Names bound inside opaque regions and lambda parameters never refer
    // to the method's locals.
    let mut inner_names: Vec<String> = Vec::new();
    let mut lambda_params: Vec<String> = Vec::new();
    for i in lo..hi {
        if opaque[i] && i > 0 && (toks[i - 1].is("{") || toks[i - 1].is(";") || toks[i - 1].is("("))
        {
            if let Some(decl) = parse_decl(&toks[..hi], i) {
                for s in skip.iter_mut().take(decl.type_end).skip(decl.type_start) {
                    *s = true;
                }
                for &(name, _) in &decl.names {
                    inner_names.push(toks[name].text.clone());
                }
            }
        }
        if toks[i].is("->") && i > 0 {
            if toks[i - 1].is_ident() {
                lambda_params.push(toks[i - 1].text.clone());
            } else if toks[i - 1].is(")") {
                let mut depth = 0;
                let mut k = i - 1;
                loop {
                    if toks[k].is(")") {
                        depth += 1;
                    } else if toks[k].is("(") {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    } else if depth == 1
                        && toks[k].is_ident()
                        && (toks[k + 1].is(",") || toks[k + 1].is(")"))
                    {
                        lambda_params.push(toks[k].text.clone());
                        if k > 0 && is_type_word(&toks[k - 1]) {
                            skip[k - 1] = true;
                        }
                    }
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                }
            }
        }
    }

    for i in lo..hi {
        let t = &toks[i];
        if skip[i] || !t.is_ident() {
            continue;
        }
        if lambda_params.contains(&t.text) {
            continue;
        }
        if opaque[i] && inner_names.contains(&t.text) {
            continue;
        }
        let prev = i.checked_sub(1).map(|p| &toks[p]);
        let next = toks.get(i + 1);
        if prev.is_some_and(|p| {
            [".", "::", "@", "new", "instanceof", "break", "continue"]
                .iter()
                .any(|s| p.is(s))
        }) {
            continue;
        }
        if let Some(ty) = declared[i].take() {
            scan.refs.push(RawRef {
                name: t.text.clone(),
                access: RefAccess::Def,
                tok: i,
                declares: Some(ty),
            });
            continue;
        }
        if next.is_some_and(|n| n.is("(") || n.is_ident()) {
            continue;
        }
        let access = if opaque[i] {
            RefAccess::Use
        } else {
            classify_access(toks, i)
        };
        scan.refs.push(RawRef {
            name: t.text.clone(),
            access,
            tok: i,
            declares: None,
        });
    }
    scan
}

fn classify_access(toks: &[Token], i: usize) -> RefAccess {
    let prev = i.checked_sub(1).map(|p| &toks[p]);
    if prev.is_some_and(|p| p.is("++") || p.is("--")) {
        return RefAccess::DefUse;
    }
    let mut j = i + 1;
    let mut indexed = false;
    while toks.get(j).is_some_and(|t| t.is("[")) {
        match matching(toks, j) {
            Some(close) => {
                j = close + 1;
                indexed = true;
            }
            None => break,
        }
    }
    match toks.get(j) {
        Some(n) if n.is("=") => {
            if indexed {
                RefAccess::DefUse
            } else {
                RefAccess::Def
            }
        }
        Some(n) if COMPOUND_ASSIGN.iter().any(|op| n.is(op)) => RefAccess::DefUse,
        Some(n) if (n.is("++") || n.is("--")) => RefAccess::DefUse,
        _ => RefAccess::Use,
    }
}
