//! Mechanical Extract Method: plan the new method and call site, rewrite the
//! source, and check that the result still parses and resolves.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::filter::{check_validity, is_suffix};
use crate::model::{parse_method, LineSpan, LongMethod, StmtKind, StmtRange, VarId, VarOrigin};
use crate::suggestion::ExtractSuggestion;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("cannot plan extraction: {0}")]
    PlanInfeasible(String),
    #[error("source changed since planning (line {line})")]
    StaleSource { line: usize },
    #[error("rewritten source failed validation: {0}")]
    ReparseFailure(String),
    #[error("i/o error: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PlanOptions {
    /// Emit `var` for parameters whose type cannot be read off a
    /// declaration instead of failing.
    pub var_fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlanParam {
    pub name: String,
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReturnVariable {
    pub name: String,
    pub ty: String,
    /// Declared by the fragment itself, so the call site declares it too.
    pub declared_in_fragment: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtractionPlan {
    pub new_method_name: String,
    pub parameters: Vec<PlanParam>,
    pub return_variable: Option<ReturnVariable>,
    /// Lines replaced by the call.
    pub fragment: LineSpan,
    pub fragment_text: String,
    pub call_site_text: String,
    /// The new method is inserted after this line (the host's last line).
    pub insertion_line: usize,
    pub signature: String,
    pub new_method_text: String,
    host: LineSpan,
    host_lines: Vec<String>,
    externals: BTreeSet<String>,
}

impl ExtractionPlan {
    pub fn host(&self) -> LineSpan {
        self.host
    }
}

fn leading_ws(line: &str) -> &str {
    &line[..line.len() - line.trim_start().len()]
}

fn type_of(method: &LongMethod, v: VarId, opts: PlanOptions) -> Result<String, ExtractError> {
    let var = method.variable(v);
    match var.ty.as_deref() {
        Some(t) if t != "var" => Ok(t.to_string()),
        _ if opts.var_fallback => Ok("var".to_string()),
        _ => Err(ExtractError::PlanInfeasible(format!(
            "type of `{}` cannot be recovered",
            var.name
        ))),
    }
}

/// Plan the extraction of an applicable suggestion.
pub fn plan_extraction(
    method: &LongMethod,
    s: &ExtractSuggestion,
    opts: PlanOptions,
) -> Result<ExtractionPlan, ExtractError> {
    let verdict = check_validity(method, s);
    if !verdict.is_applicable() {
        return Err(ExtractError::PlanInfeasible(verdict.detail));
    }
    let range = method
        .statements_in(s.span())
        .ok_or_else(|| ExtractError::PlanInfeasible("fragment holds no statements".into()))?;
    let stmt_lines = method.lines_of(range);
    let fragment = LineSpan::new(
        s.start_line.min(stmt_lines.start),
        s.end_line.max(stmt_lines.end),
    );
    if method
        .statements()
        .iter()
        .any(|st| !range.contains(st.index) && st.span().intersects(fragment))
    {
        return Err(ExtractError::PlanInfeasible(
            "fragment shares a line with surrounding code".into(),
        ));
    }

    let params = method.live_in_vars(range);
    let live_out = method.live_out_vars(range);
    let ret_var = live_out.first().copied();
    let fragment_stmts = &method.statements()[range.first..=range.last];

    let mut parameters = Vec::new();
    for &v in &params {
        parameters.push(PlanParam {
            name: method.variable(v).name.clone(),
            ty: type_of(method, v, opts)?,
        });
    }
    let declared_before = |v: VarId| match method.variable(v).origin {
        VarOrigin::Local { decl_stmt } => decl_stmt < range.first,
        VarOrigin::Parameter { .. } => true,
        VarOrigin::External => false,
    };
    // Written before being read inside: needs a local of its own.
    let mut locals: Vec<VarId> = Vec::new();
    for r in fragment_stmts.iter().flat_map(|st| &st.refs) {
        if declared_before(r.var) && !params.contains(&r.var) && !locals.contains(&r.var) {
            locals.push(r.var);
        }
    }
    let return_variable = match ret_var {
        Some(v) => Some(ReturnVariable {
            name: method.variable(v).name.clone(),
            ty: type_of(method, v, opts)?,
            declared_in_fragment: !declared_before(v),
        }),
        None => None,
    };
    let has_return = fragment_stmts.iter().any(|st| st.kind == StmtKind::Return);
    if has_return && !is_suffix(method, range) {
        return Err(ExtractError::PlanInfeasible(
            "early return in fragment".into(),
        ));
    }

    let sig = method.signature();
    let return_type = match (&return_variable, has_return) {
        (Some(r), _) => r.ty.clone(),
        (None, true) => sig.return_type.clone().unwrap_or_else(|| "void".into()),
        (None, false) => "void".into(),
    };
    let name = s.name.clone();
    let args: Vec<&str> = parameters.iter().map(|p| p.name.as_str()).collect();
    let call = format!("{name}({})", args.join(", "));
    let call_site_text = match (&return_variable, has_return) {
        (Some(r), _) if r.declared_in_fragment => format!("{} {} = {call};", r.ty, r.name),
        (Some(r), _) => format!("{} = {call};", r.name),
        (None, true) if sig.returns_value() => format!("return {call};"),
        _ => format!("{call};"),
    };

    let mut modifiers = String::from("private ");
    if sig.is_static {
        modifiers.push_str("static ");
    }
    if let Some(tp) = &sig.type_params {
        modifiers.push_str(tp);
        modifiers.push(' ');
    }
    let param_list: Vec<String> = parameters
        .iter()
        .map(|p| format!("{} {}", p.ty, p.name))
        .collect();
    let mut signature = format!("{modifiers}{return_type} {name}({})", param_list.join(", "));
    if let Some(t) = &sig.throws {
        signature.push_str(" throws ");
        signature.push_str(t);
    }

    let indent = method.indent().to_string();
    let unit = indent_unit(method);
    let frag_lines: Vec<&str> = (fragment.start..=fragment.end)
        .map(|l| method.line_text(l).unwrap_or(""))
        .collect();
    let common = frag_lines
        .iter()
        .filter(|l| !l.trim().is_empty())
        .map(|l| leading_ws(l))
        .min_by_key(|w| w.len())
        .unwrap_or("")
        .to_string();
    let inner = format!("{indent}{unit}");
    let mut body = Vec::new();
    for &v in &locals {
        body.push(format!(
            "{inner}{} {};",
            type_of(method, v, opts)?,
            method.variable(v).name
        ));
    }
    for line in &frag_lines {
        if line.trim().is_empty() {
            body.push(String::new());
        } else {
            let rest = line
                .strip_prefix(common.as_str())
                .unwrap_or_else(|| line.trim_start());
            body.push(format!("{inner}{rest}"));
        }
    }
    if let Some(r) = &return_variable {
        body.push(format!("{inner}return {};", r.name));
    }
    let mut new_method_text = format!("{indent}{signature} {{\n");
    for line in body {
        new_method_text.push_str(&line);
        new_method_text.push('\n');
    }
    new_method_text.push_str(&format!("{indent}}}\n"));

    let call_indent = leading_ws(method.line_text(stmt_lines.start).unwrap_or("")).to_string();
    let externals = fragment_stmts
        .iter()
        .flat_map(|st| &st.refs)
        .map(|r| method.variable(r.var))
        .filter(|v| v.is_external())
        .map(|v| v.name.clone())
        .collect();
    Ok(ExtractionPlan {
        new_method_name: name,
        parameters,
        return_variable,
        fragment,
        fragment_text: frag_lines.join("\n"),
        call_site_text: format!("{call_indent}{call_site_text}"),
        insertion_line: method.end_line(),
        signature,
        new_method_text,
        host: method.span(),
        host_lines: (method.start_line()..=method.end_line())
            .map(|l| method.line_text(l).unwrap_or("").to_string())
            .collect(),
        externals,
    })
}

/// One level of indentation as used by the host's body.
fn indent_unit(method: &LongMethod) -> String {
    let host = method.indent();
    method
        .statements()
        .iter()
        .find(|s| s.scope_depth == 0)
        .and_then(|s| method.line_text(s.start_line))
        .map(leading_ws)
        .and_then(|w| w.strip_prefix(host))
        .filter(|u| !u.is_empty())
        .unwrap_or("    ")
        .to_string()
}

/// Rewrite `source` according to `plan`, then validate the result.
pub fn apply(source: &str, plan: &ExtractionPlan) -> Result<String, ExtractError> {
    let lines: Vec<&str> = source.lines().collect();
    for (k, expected) in plan.host_lines.iter().enumerate() {
        let line = plan.host.start + k;
        if lines.get(line - 1).copied() != Some(expected.as_str()) {
            return Err(ExtractError::StaleSource { line });
        }
    }
    let mut out: Vec<String> = Vec::with_capacity(lines.len() + 8);
    out.extend(
        lines[..plan.fragment.start - 1]
            .iter()
            .map(|l| l.to_string()),
    );
    out.push(plan.call_site_text.clone());
    out.extend(
        lines[plan.fragment.end..plan.host.end]
            .iter()
            .map(|l| l.to_string()),
    );
    let new_host_end = out.len();
    out.push(String::new());
    let method_start = out.len() + 1;
    out.extend(plan.new_method_text.lines().map(str::to_string));
    let method_end = out.len();
    out.extend(lines[plan.host.end..].iter().map(|l| l.to_string()));
    let mut text = out.join("\n");
    if source.ends_with('\n') || source.is_empty() {
        text.push('\n');
    }
    validate(
        &text,
        plan,
        LineSpan::new(plan.host.start, new_host_end),
        LineSpan::new(method_start, method_end),
    )?;
    Ok(text)
}

fn validate(
    text: &str,
    plan: &ExtractionPlan,
    host: LineSpan,
    extracted: LineSpan,
) -> Result<(), ExtractError> {
    let fail = |what: &str, e: &dyn std::fmt::Display| {
        ExtractError::ReparseFailure(format!("{what}: {e}"))
    };
    let host_m = parse_method("", text, host).map_err(|e| fail("host method", &e))?;
    let new_m = parse_method("", text, extracted).map_err(|e| fail("extracted method", &e))?;
    // Every name the new method cannot resolve locally must have been
    // unresolved in the fragment as well.
    if let Some(v) = new_m
        .variables()
        .iter()
        .find(|v| v.is_external() && !plan.externals.contains(&v.name))
    {
        return Err(ExtractError::ReparseFailure(format!(
            "`{}` does not resolve in the extracted method",
            v.name
        )));
    }
    let host_locals = host_m.local_names();
    if let Some(v) = host_m
        .variables()
        .iter()
        .find(|v| v.is_external() && host_locals.contains(v.name.as_str()))
    {
        return Err(ExtractError::ReparseFailure(format!(
            "`{}` no longer resolves in the host",
            v.name
        )));
    }
    Ok(())
}

/// Apply `plan` to the file at `path`. The original is kept as `<path>.bak`;
/// nothing is written unless the rewritten text validates.
pub fn apply_to_file(path: &Path, plan: &ExtractionPlan) -> Result<String, ExtractError> {
    let io = |e: std::io::Error| ExtractError::Io(e.to_string());
    let source = fs::read_to_string(path).map_err(io)?;
    let text = apply(&source, plan)?;
    let mut backup = path.as_os_str().to_owned();
    backup.push(".bak");
    fs::write(&backup, &source).map_err(io)?;
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(text)
}

/// Statement range covered by a plan in the original host.
pub fn planned_range(method: &LongMethod, plan: &ExtractionPlan) -> Option<StmtRange> {
    method.statements_in(plan.fragment)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ENTITY_STORE: &str = include_str!("../fixtures/motivating/EntityStore.java");

    fn host() -> LongMethod {
        parse_method("EntityStore.java", ENTITY_STORE, LineSpan::new(150, 166)).unwrap()
    }

    fn whole(src: &str) -> LongMethod {
        parse_method("f.java", src, LineSpan::new(1, src.lines().count())).unwrap()
    }

    #[test]
    fn motivating_plan() {
        let m = host();
        let plan = plan_extraction(
            &m,
            &ExtractSuggestion::new("emptyPropertyArray", 157, 158),
            PlanOptions::default(),
        )
        .unwrap();
        assert_eq!(plan.new_method_name, "emptyPropertyArray");
        assert_eq!(
            plan.parameters,
            [PlanParam {
                name: "itemsToReturn".into(),
                ty: "int".into()
            }]
        );
        let ret = plan.return_variable.as_ref().unwrap();
        assert_eq!(
            (ret.name.as_str(), ret.ty.as_str(), ret.declared_in_fragment),
            ("values", "Value[]", true)
        );
        assert_eq!(
            plan.call_site_text.trim(),
            "Value[] values = emptyPropertyArray(itemsToReturn);"
        );
        assert_eq!(plan.insertion_line, 166);
        assert_eq!(
            plan.signature,
            "private Value[] emptyPropertyArray(int itemsToReturn)"
        );
    }

    #[test]
    fn motivating_apply() {
        let m = host();
        let plan = plan_extraction(
            &m,
            &ExtractSuggestion::new("emptyPropertyArray", 157, 158),
            PlanOptions::default(),
        )
        .unwrap();
        let out = apply(ENTITY_STORE, &plan).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(
            lines[156],
            "        Value[] values = emptyPropertyArray(itemsToReturn);"
        );
        assert_eq!(lines[164], "    }");
        assert_eq!(
            &lines[165..171],
            [
                "",
                "    private Value[] emptyPropertyArray(int itemsToReturn) {",
                "        Value[] values = new Value[itemsToReturn];",
                "        Arrays.fill(values, Values.NO_VALUE);",
                "        return values;",
                "    }",
            ]
        );
        assert_eq!(lines[171], "}");
        assert_eq!(out.lines().count(), ENTITY_STORE.lines().count() + 5);
    }

    #[test]
    fn no_inputs_no_outputs_is_a_bare_call() {
        let src = "\
void f() {
    start();
    log(1);
    log(2);
    finish();
}
";
        let m = whole(src);
        let plan = plan_extraction(
            &m,
            &ExtractSuggestion::new("logBoth", 3, 4),
            PlanOptions::default(),
        )
        .unwrap();
        assert!(plan.parameters.is_empty());
        assert!(plan.return_variable.is_none());
        assert_eq!(plan.call_site_text, "    logBoth();");
        let out = apply(src, &plan).unwrap();
        assert!(out.contains("private void logBoth() {\n    log(1);\n    log(2);\n}\n"));
    }

    #[test]
    fn two_live_in_locals_become_parameters() {
        let src = "\
static <T> int f(List<T> xs, int bias) throws IOException {
    int lo = xs.size();
    long hi = bias * 2L;
    check(lo);
    int mid = (int) ((lo + hi) / 2);
    emit(mid, xs.get(0));
    return mid;
}
";
        let m = whole(src);
        let plan = plan_extraction(
            &m,
            &ExtractSuggestion::new("middle", 5, 6),
            PlanOptions::default(),
        )
        .unwrap();
        let params: Vec<_> = plan
            .parameters
            .iter()
            .map(|p| (p.name.as_str(), p.ty.as_str()))
            .collect();
        assert_eq!(params, [("lo", "int"), ("hi", "long"), ("xs", "List<T>")]);
        assert_eq!(
            plan.signature,
            "private static <T> int middle(int lo, long hi, List<T> xs) throws IOException"
        );
        apply(src, &plan).unwrap();
    }

    #[test]
    fn suffix_with_return_returns_call() {
        let src = "\
int f(int a) {
    start(a);
    if (a > 0) {
        return a;
    }
    return -a;
}
";
        let m = whole(src);
        let plan = plan_extraction(
            &m,
            &ExtractSuggestion::new("sign", 3, 6),
            PlanOptions::default(),
        )
        .unwrap();
        assert_eq!(plan.call_site_text, "    return sign(a);");
        assert!(plan
            .new_method_text
            .starts_with("private int sign(int a) {"));
        apply(src, &plan).unwrap();
    }

    #[test]
    fn assigned_outer_variable_is_returned() {
        let src = "\
void f(int a) {
    int total;
    total = a + 1;
    total *= 2;
    use(total);
}
";
        let m = whole(src);
        let plan = plan_extraction(
            &m,
            &ExtractSuggestion::new("compute", 3, 4),
            PlanOptions::default(),
        )
        .unwrap();
        assert_eq!(plan.call_site_text, "    total = compute(a);");
        assert!(plan
            .new_method_text
            .contains("    int total;\n    total = a + 1;"));
        apply(src, &plan).unwrap();
    }

    #[test]
    fn unknown_types_are_infeasible_without_fallback() {
        let src = "\
void f() {
    var n = load();
    n.touch();
    n.save();
    done(n);
}
";
        let m = whole(src);
        let s = ExtractSuggestion::new("persist", 3, 4);
        assert!(matches!(
            plan_extraction(&m, &s, PlanOptions::default()),
            Err(ExtractError::PlanInfeasible(_))
        ));
        let plan = plan_extraction(&m, &s, PlanOptions { var_fallback: true }).unwrap();
        assert_eq!(plan.parameters[0].ty, "var");
    }

    #[test]
    fn stale_source_is_detected() {
        let m = host();
        let plan = plan_extraction(
            &m,
            &ExtractSuggestion::new("emptyPropertyArray", 157, 158),
            PlanOptions::default(),
        )
        .unwrap();
        let edited = ENTITY_STORE.replacen("        int i = 0;\n", "        int i = 1;\n", 1);
        assert_eq!(
            apply(&edited, &plan),
            Err(ExtractError::StaleSource { line: 155 })
        );
    }

    #[test]
    fn file_is_backed_up_and_rewritten() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("EntityStore.java");
        fs::write(&path, ENTITY_STORE).unwrap();
        let m = host();
        let plan = plan_extraction(
            &m,
            &ExtractSuggestion::new("emptyPropertyArray", 157, 158),
            PlanOptions::default(),
        )
        .unwrap();
        let out = apply_to_file(&path, &plan).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), out);
        assert_eq!(
            fs::read_to_string(dir.path().join("EntityStore.java.bak")).unwrap(),
            ENTITY_STORE
        );
        assert!(matches!(
            apply_to_file(&path, &plan),
            Err(ExtractError::StaleSource { .. })
        ));
        assert_eq!(fs::read_to_string(&path).unwrap(), out);
    }
}
