//! Tolerant recovery of `(name, start, end)` triples from model replies.

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawEntry {
    pub name: String,
    pub start_line: usize,
    pub end_line: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedResponse {
    pub entries: Vec<RawEntry>,
    pub diagnostics: Vec<String>,
    /// Nothing resembling the requested list was found.
    pub failed: bool,
}

const NAME_KEYS: &[&str] = &[
    "function_name",
    "name",
    "method_name",
    "new_method_name",
    "function",
    "method",
];
const START_KEYS: &[&str] = &[
    "line_start",
    "start_line",
    "start",
    "from",
    "begin",
    "startLine",
    "lineStart",
];
const END_KEYS: &[&str] = &["line_end", "end_line", "end", "to", "endLine", "lineEnd"];

static FENCE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?s)```[A-Za-z]*\s*\n?(.*?)```").unwrap());
static LOOSE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?m)([A-Za-z_$][A-Za-z0-9_$]*)\W{1,12}?(?:lines?\s*)?(\d+)\s*(?:-|to|,)\s*(\d+)")
        .unwrap()
});

pub fn parse_response(raw_text: &str) -> ParsedResponse {
    let mut candidates: Vec<&str> = FENCE
        .captures_iter(raw_text)
        .filter_map(|c| c.get(1))
        .map(|m| m.as_str())
        .collect();
    candidates.push(raw_text);
    for text in candidates {
        for array in json_arrays(text) {
            if let Some(parsed) = from_json(&array) {
                return parsed;
            }
        }
    }
    let mut out = ParsedResponse::default();
    for c in LOOSE.captures_iter(raw_text) {
        push_entry(
            &mut out,
            c[1].to_string(),
            c[2].parse().ok(),
            c[3].parse().ok(),
        );
    }
    if out.entries.is_empty() && out.diagnostics.is_empty() {
        out.failed = true;
        out.diagnostics
            .push("no suggestion list found in reply".into());
    }
    out
}

/// Every balanced `[...]` substring that parses as a JSON array, outermost
/// first.
fn json_arrays(text: &str) -> Vec<Vec<Value>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'[' {
            if let Some(end) = closing_bracket(bytes, i) {
                if let Ok(Value::Array(items)) = serde_json::from_str(&text[i..=end]) {
                    out.push(items);
                    i = end + 1;
                    continue;
                }
            }
        }
        i += 1;
    }
    out
}

fn closing_bracket(bytes: &[u8], open: usize) -> Option<usize> {
    let mut depth = 0usize;
    let mut in_str = false;
    let mut escaped = false;
    for (k, &b) in bytes.iter().enumerate().skip(open) {
        if in_str {
            match b {
                _ if escaped => escaped = false,
                b'\\' => escaped = true,
                b'"' => in_str = false,
                _ => {}
            }
            continue;
        }
        match b {
            b'"' => in_str = true,
            b'[' | b'{' => depth += 1,
            b']' | b'}' => {
                depth = depth.checked_sub(1)?;
                if depth == 0 {
                    return Some(k);
                }
            }
            _ => {}
        }
    }
    None
}

fn field<'a>(obj: &'a serde_json::Map<String, Value>, keys: &[&str]) -> Option<&'a Value> {
    keys.iter().find_map(|k| obj.get(*k))
}

fn as_line(v: Option<&Value>) -> Option<usize> {
    match v? {
        Value::Number(n) => n.as_u64().map(|n| n as usize),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

/// `None` when the array does not look like the requested list at all.
fn from_json(items: &[Value]) -> Option<ParsedResponse> {
    let looks_right = items.is_empty()
        || items.iter().any(|v| match v {
            Value::Object(o) => field(o, NAME_KEYS).is_some() || field(o, START_KEYS).is_some(),
            Value::Array(a) => a.len() == 3,
            _ => false,
        });
    if !looks_right {
        return None;
    }
    let mut out = ParsedResponse::default();
    for v in items {
        match v {
            Value::Object(o) => {
                let name = field(o, NAME_KEYS)
                    .and_then(Value::as_str)
                    .unwrap_or("")
                    .to_string();
                push_entry(
                    &mut out,
                    name,
                    as_line(field(o, START_KEYS)),
                    as_line(field(o, END_KEYS)),
                );
            }
            Value::Array(a) if a.len() == 3 => {
                let name = a[0].as_str().unwrap_or("").to_string();
                push_entry(&mut out, name, as_line(a.get(1)), as_line(a.get(2)));
            }
            other => out.diagnostics.push(format!("ignored entry {other}")),
        }
    }
    Some(out)
}

fn push_entry(out: &mut ParsedResponse, name: String, start: Option<usize>, end: Option<usize>) {
    match (start, end) {
        (Some(s), Some(e)) if s == 0 => out
            .diagnostics
            .push(format!("`{name}`: line numbers start at 1, got {s}-{e}")),
        (Some(s), Some(e)) if s > e => out
            .diagnostics
            .push(format!("`{name}`: start {s} is after end {e}")),
        (Some(start_line), Some(end_line)) => out.entries.push(RawEntry {
            name,
            start_line,
            end_line,
        }),
        _ => out
            .diagnostics
            .push(format!("`{name}`: missing or non-numeric line numbers")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triples(p: &ParsedResponse) -> Vec<(&str, usize, usize)> {
        p.entries
            .iter()
            .map(|e| (e.name.as_str(), e.start_line, e.end_line))
            .collect()
    }

    #[test]
    fn well_formed_list() {
        let p = parse_response(
            r#"[{"function_name": "a", "line_start": 3, "line_end": 5},
                {"function_name": "b", "line_start": 6, "line_end": 9},
                {"function_name": "c", "line_start": 10, "line_end": 10}]"#,
        );
        assert_eq!(triples(&p), [("a", 3, 5), ("b", 6, 9), ("c", 10, 10)]);
        assert!(p.diagnostics.is_empty() && !p.failed);
    }

    #[test]
    fn list_inside_prose_and_fences() {
        let reply = "Sure! Here are some options [ranked]:\n\n```json\n[\n  {\"function_name\": \"emptyPropertyArray\", \"line_start\": 157, \"line_end\": 158},\n  {\"function_name\": \"readProperties\", \"line_start\": \"159\", \"line_end\": \"165\"}\n]\n```\nLet me know if you need more.";
        let p = parse_response(reply);
        assert_eq!(
            triples(&p),
            [
                ("emptyPropertyArray", 157, 158),
                ("readProperties", 159, 165)
            ]
        );
    }

    #[test]
    fn reversed_and_non_numeric_entries_are_dropped() {
        let p = parse_response(
            r#"[{"name": "a", "start": 9, "end": 4}, {"name": "b", "start": "x", "end": 5}, {"name": "c", "start": 2, "end": 2}]"#,
        );
        assert_eq!(triples(&p), [("c", 2, 2)]);
        assert_eq!(p.diagnostics.len(), 2);
    }

    #[test]
    fn loose_text_fallback() {
        let p = parse_response("1. validateInput: lines 12-15\n2. buildResult (20 to 24)");
        assert_eq!(
            triples(&p),
            [("validateInput", 12, 15), ("buildResult", 20, 24)]
        );
    }

    #[test]
    fn garbage_is_a_failure() {
        let p = parse_response("I'm sorry, I can't help with that.");
        assert!(p.failed);
        assert!(p.entries.is_empty());
        assert_eq!(p.diagnostics.len(), 1);
    }

    #[test]
    fn empty_list_is_not_a_failure() {
        let p = parse_response("[]");
        assert!(!p.failed && p.entries.is_empty());
    }

    #[test]
    fn tuple_arrays() {
        let p = parse_response(r#"[["a", 1, 2], ["b", 3, 4]]"#);
        assert_eq!(triples(&p), [("a", 1, 2), ("b", 3, 4)]);
    }
}
