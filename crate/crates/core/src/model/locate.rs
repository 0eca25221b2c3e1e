use serde::Serialize;

use super::lexer::{tokenize, Token};
use super::refs::matching;
use super::{LexError, LineSpan};

/// A method declaration found in a source file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MethodLocation {
    pub name: String,
    pub span: LineSpan,
}

const NOT_METHODS: &[&str] = &[
    "if",
    "for",
    "while",
    "switch",
    "catch",
    "synchronized",
    "return",
    "new",
    "else",
    "do",
    "try",
    "class",
    "interface",
    "enum",
    "record",
];

/// Methods and constructors declared directly in type bodies (not inside
/// other method bodies).
pub fn locate_methods(source: &str) -> Result<Vec<MethodLocation>, LexError> {
    let toks = tokenize(source)?.tokens;
    let mut found = Vec::new();
    scan(&toks, 0, toks.len(), &mut found);
    found.sort_by_key(|m| m.span.start);
    Ok(found)
}

fn scan(toks: &[Token], from: usize, to: usize, out: &mut Vec<MethodLocation>) {
    let mut i = from;
    let mut member_start = from;
    while i < to {
        let t = &toks[i];
        if t.is(";") || t.is("}") {
            member_start = i + 1;
            i += 1;
            continue;
        }
        if !t.is("{") {
            i += 1;
            continue;
        }
        let Some(close) = matching(toks, i) else {
            return;
        };
        let header = &toks[member_start..i];
        if let Some((name, start)) = method_header(header) {
            out.push(MethodLocation {
                name,
                span: LineSpan::new(header[start].line, toks[close].line),
            });
        } else if header.iter().any(|t| {
            ["class", "interface", "enum", "record"]
                .iter()
                .any(|k| t.is(k))
        }) || header.is_empty()
            || header.last().is_some_and(|t| t.is(")") || t.is_ident())
        {
            // Type body or initializer: look for members inside.
            scan(toks, i + 1, close, out);
        }
        i = close + 1;
        member_start = i;
    }
}

/// Name and first signature token (annotations skipped) of a method header.
fn method_header(header: &[Token]) -> Option<(String, usize)> {
    if header
        .iter()
        .any(|t| t.is("=") || t.is("->") || NOT_METHODS.iter().any(|k| t.is(k)))
    {
        return None;
    }
    let mut start = 0;
    while header.get(start).is_some_and(|t| t.is("@")) {
        start += 2;
        while header.get(start).is_some_and(|t| t.is(".")) {
            start += 2;
        }
        if header.get(start).is_some_and(|t| t.is("(")) {
            start = matching(header, start)? + 1;
        }
    }
    let open = (start..header.len()).find(|k| header[*k].is("("))?;
    if open == 0 || !header[open - 1].is_ident() {
        return None;
    }
    let close = matching(header, open)?;
    let rest = &header[close + 1..];
    if !(rest.is_empty() || rest[0].is("throws")) {
        return None;
    }
    Some((header[open - 1].text.clone(), start))
}
