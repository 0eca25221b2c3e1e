//! Random Java-like host methods whose block structure and per-line reads
//! and writes are recorded while the text is generated, plus brute-force
//! verdicts worked out from that record alone.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use exmeth::filter::classify;
use exmeth::{parse_method, ExtractSuggestion, FilterConfig, LineSpan, ReasonCode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const PARAMS: [&str; 2] = ["p0", "p1"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Kind {
    Decl,
    Assign,
    Call,
    /// Reads a local whose block has already closed.
    Stray,
    IfHead,
    Else,
    Close {
        is_loop: bool,
    },
    LoopHead,
    Break(usize),
    Continue(usize),
    Return,
}

#[derive(Debug, Clone)]
pub struct Line {
    pub text: String,
    pub kind: Kind,
    pub uses: BTreeSet<String>,
    pub defs: BTreeSet<String>,
    pub depth: usize,
    /// Loops whose body holds this line, outermost first.
    pub loops: Vec<usize>,
}

impl Line {
    pub fn counted(&self) -> bool {
        !matches!(self.kind, Kind::Close { .. })
    }
}

#[derive(Debug, Clone)]
pub struct Compound {
    pub header: usize,
    pub end: usize,
    /// Body ranges, inclusive; empty when `lo > hi`.
    pub inners: Vec<(usize, usize)>,
    pub is_loop: bool,
    pub has_else: bool,
}

#[derive(Debug, Clone)]
pub struct GenMethod {
    pub source: String,
    pub host: LineSpan,
    /// Source line of `lines[0]`.
    pub first: usize,
    pub lines: Vec<Line>,
    pub compounds: Vec<Compound>,
    pub decl_line: BTreeMap<String, usize>,
}

struct Gen {
    rng: ChaCha8Rng,
    lines: Vec<Line>,
    compounds: Vec<Compound>,
    scopes: Vec<Vec<String>>,
    closed: Vec<String>,
    loops: Vec<usize>,
    decl_line: BTreeMap<String, usize>,
    next_var: usize,
    budget: usize,
}

impl Gen {
    fn visible(&self) -> Vec<String> {
        PARAMS
            .iter()
            .map(|p| p.to_string())
            .chain(self.scopes.iter().flatten().cloned())
            .collect()
    }

    fn pick(&mut self) -> String {
        let v = self.visible();
        v[self.rng.random_range(0..v.len())].clone()
    }

    fn expr(&mut self) -> (String, BTreeSet<String>) {
        match self.rng.random_range(0..4) {
            0 => (self.rng.random_range(0..9).to_string(), BTreeSet::new()),
            1 => {
                let a = self.pick();
                (format!("{a} + 1"), [a].into())
            }
            _ => {
                let (a, b) = (self.pick(), self.pick());
                (format!("{a} * 2 - {b}"), [a, b].into())
            }
        }
    }

    fn cond(&mut self) -> (String, BTreeSet<String>) {
        let (a, b) = (self.pick(), self.pick());
        (format!("{a} < {b}"), [a, b].into())
    }

    fn push(
        &mut self,
        depth: usize,
        text: String,
        kind: Kind,
        uses: BTreeSet<String>,
        defs: BTreeSet<String>,
    ) -> usize {
        let indent = " ".repeat(4 * (depth + 2));
        self.lines.push(Line {
            text: format!("{indent}{text}"),
            kind,
            uses,
            defs,
            depth,
            loops: self.loops.clone(),
        });
        self.lines.len() - 1
    }

    fn fresh(&mut self) -> String {
        self.next_var += 1;
        format!("v{}", self.next_var)
    }

    fn block(&mut self, depth: usize) {
        let n = self.rng.random_range(1..=4);
        for k in 0..n {
            if k > 0 && self.budget == 0 {
                break;
            }
            self.stmt(depth);
        }
    }

    fn stmt(&mut self, depth: usize) {
        self.budget = self.budget.saturating_sub(1);
        let nested_ok = depth < 3 && self.budget > 2;
        let roll = self.rng.random_range(0..100);
        match roll {
            0..=24 => {
                let name = self.fresh();
                let (e, uses) = self.expr();
                let at = self.push(
                    depth,
                    format!("int {name} = {e};"),
                    Kind::Decl,
                    uses,
                    [name.clone()].into(),
                );
                self.decl_line.insert(name.clone(), at);
                self.scopes.last_mut().unwrap().push(name);
            }
            25..=41 => {
                let t = self.pick();
                let (e, uses) = self.expr();
                self.push(depth, format!("{t} = {e};"), Kind::Assign, uses, [t].into());
            }
            42..=49 => {
                let t = self.pick();
                let (e, mut uses) = self.expr();
                uses.insert(t.clone());
                self.push(
                    depth,
                    format!("{t} += {e};"),
                    Kind::Assign,
                    uses,
                    [t].into(),
                );
            }
            50..=54 if !self.closed.is_empty() => {
                let z = self.closed[self.rng.random_range(0..self.closed.len())].clone();
                self.push(
                    depth,
                    format!("sink({z});"),
                    Kind::Stray,
                    BTreeSet::new(),
                    BTreeSet::new(),
                );
            }
            55..=74 if nested_ok => self.if_chain(depth),
            75..=86 if nested_ok => self.while_loop(depth),
            _ => {
                let (e, uses) = self.expr();
                self.push(
                    depth,
                    format!("sink({e});"),
                    Kind::Call,
                    uses,
                    BTreeSet::new(),
                );
            }
        }
    }

    fn body(&mut self, depth: usize, jump: bool) -> (usize, usize) {
        let lo = self.lines.len();
        self.scopes.push(Vec::new());
        self.block(depth + 1);
        if jump {
            self.jump(depth + 1);
        }
        let done = self.scopes.pop().unwrap();
        self.closed.extend(done);
        (lo, self.lines.len() - 1)
    }

    fn jump(&mut self, depth: usize) {
        let inner = self.loops.last().copied();
        match (self.rng.random_range(0..3), inner) {
            (0, Some(l)) => {
                self.push(
                    depth,
                    "break;".into(),
                    Kind::Break(l),
                    BTreeSet::new(),
                    BTreeSet::new(),
                );
            }
            (1, Some(l)) => {
                self.push(
                    depth,
                    "continue;".into(),
                    Kind::Continue(l),
                    BTreeSet::new(),
                    BTreeSet::new(),
                );
            }
            _ => {
                let (e, uses) = self.expr();
                self.push(
                    depth,
                    format!("return {e};"),
                    Kind::Return,
                    uses,
                    BTreeSet::new(),
                );
            }
        }
    }

    fn if_chain(&mut self, depth: usize) {
        let id = self.compounds.len();
        self.compounds.push(Compound {
            header: 0,
            end: 0,
            inners: Vec::new(),
            is_loop: false,
            has_else: false,
        });
        let (c, uses) = self.cond();
        let header = self.push(
            depth,
            format!("if ({c}) {{"),
            Kind::IfHead,
            uses,
            BTreeSet::new(),
        );
        let jump = self.rng.random_bool(0.3);
        let mut inners = vec![self.body(depth, jump)];
        let has_else = self.rng.random_bool(0.35);
        if has_else {
            self.push(
                depth,
                "} else {".into(),
                Kind::Else,
                BTreeSet::new(),
                BTreeSet::new(),
            );
            inners.push(self.body(depth, false));
        }
        let end = self.push(
            depth,
            "}".into(),
            Kind::Close { is_loop: false },
            BTreeSet::new(),
            BTreeSet::new(),
        );
        self.compounds[id] = Compound {
            header,
            end,
            inners,
            is_loop: false,
            has_else,
        };
    }

    fn while_loop(&mut self, depth: usize) {
        let id = self.compounds.len();
        self.compounds.push(Compound {
            header: 0,
            end: 0,
            inners: Vec::new(),
            is_loop: true,
            has_else: false,
        });
        let (c, uses) = self.cond();
        let header = self.push(
            depth,
            format!("while ({c}) {{"),
            Kind::LoopHead,
            uses,
            BTreeSet::new(),
        );
        self.loops.push(id);
        let inner = self.body(depth, false);
        self.loops.pop();
        let end = self.push(
            depth,
            "}".into(),
            Kind::Close { is_loop: true },
            BTreeSet::new(),
            BTreeSet::new(),
        );
        self.compounds[id] = Compound {
            header,
            end,
            inners: vec![inner],
            is_loop: true,
            has_else: false,
        };
    }
}

/// A host method built from `seed`, roughly `size` statements long.
pub fn generate(seed: u64, size: usize) -> GenMethod {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        lines: Vec::new(),
        compounds: Vec::new(),
        scopes: vec![Vec::new()],
        closed: Vec::new(),
        loops: Vec::new(),
        decl_line: BTreeMap::new(),
        next_var: 0,
        budget: size,
    };
    while g.budget > 0 {
        g.stmt(0);
    }
    if g.rng.random_bool(0.7) {
        let (e, uses) = g.expr();
        g.push(
            0,
            format!("return {e};"),
            Kind::Return,
            uses,
            BTreeSet::new(),
        );
    }
    let mut source = String::from("class G {\n    int m(int p0, int p1) {\n");
    for l in &g.lines {
        source.push_str(&l.text);
        source.push('\n');
    }
    source.push_str("    }\n}\n");
    let host = LineSpan::new(2, 3 + g.lines.len());
    GenMethod {
        source,
        host,
        first: 3,
        lines: g.lines,
        compounds: g.compounds,
        decl_line: g.decl_line,
    }
}

/// What the checks should conclude for a raw suggestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Expected {
    pub reason: ReasonCode,
    /// Line span after widening; `None` when widening is impossible.
    pub span: Option<(usize, usize)>,
}

impl GenMethod {
    pub fn line_of(&self, idx: usize) -> usize {
        self.first + idx
    }

    pub fn counted_total(&self) -> usize {
        self.lines.iter().filter(|l| l.counted()).count()
    }

    pub fn counted_in(&self, i: usize, j: usize) -> usize {
        self.lines[i..=j].iter().filter(|l| l.counted()).count()
    }

    /// No compound is cut: each is disjoint from `[i, j]`, inside it, or
    /// holds it within one body.
    pub fn balanced(&self, i: usize, j: usize) -> bool {
        self.compounds.iter().all(|c| {
            j < c.header
                || i > c.end
                || (i <= c.header && c.end <= j)
                || c.inners.iter().any(|&(lo, hi)| lo <= i && j <= hi)
        })
    }

    /// Shortest balanced index range containing `[i, j]`.
    pub fn widen(&self, i: usize, j: usize) -> (usize, usize) {
        let n = self.lines.len();
        for len in (j - i)..n {
            for a in (0..=i).rev() {
                let b = a + len;
                if b >= j && b < n && self.balanced(a, b) {
                    return (a, b);
                }
            }
        }
        (0, n - 1)
    }

    fn declared_before(&self, v: &str, idx: usize) -> bool {
        PARAMS.contains(&v) || self.decl_line.get(v).is_some_and(|d| *d < idx)
    }

    /// Some top-level write in `[i, k)` assigns `v` whatever path is taken.
    fn assigned_before(&self, v: &str, i: usize, k: usize) -> bool {
        self.lines[i..k].iter().any(|l| {
            l.depth == self.lines[i].depth
                && matches!(l.kind, Kind::Decl | Kind::Assign)
                && l.defs.contains(v)
        })
    }

    fn enclosing_loops(&self, i: usize) -> Vec<usize> {
        self.lines[i]
            .loops
            .iter()
            .map(|c| self.compounds[*c].header)
            .filter(|h| *h < i)
            .collect()
    }

    /// Written in `[i, j]` and readable afterwards.
    pub fn live_out(&self, i: usize, j: usize) -> BTreeSet<String> {
        let written: BTreeSet<&String> = self.lines[i..=j].iter().flat_map(|l| &l.defs).collect();
        let headers = self.enclosing_loops(i);
        let mut later: Vec<usize> = (j + 1..self.lines.len()).collect();
        for h in &headers {
            later.extend(*h..i);
        }
        written
            .into_iter()
            .filter(|v| {
                let read_later = later.iter().any(|k| self.lines[*k].uses.contains(*v));
                let carried = headers.iter().any(|h| self.declared_before(v, *h))
                    && (i..=j)
                        .any(|k| self.lines[k].uses.contains(*v) && !self.assigned_before(v, i, k));
                read_later || carried
            })
            .cloned()
            .collect()
    }

    /// Reads in `[i, j]` of values that exist before it.
    pub fn live_in(&self, i: usize, j: usize) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = (i..=j)
            .flat_map(|k| self.lines[k].uses.iter().map(move |v| (k, v)))
            .filter(|(k, v)| self.declared_before(v, i) && !self.assigned_before(v, i, *k))
            .map(|(_, v)| v.clone())
            .collect();
        for v in self.live_out(i, j) {
            if self.declared_before(&v, i) && !self.assigned_before(&v, i, j + 1) {
                out.insert(v);
            }
        }
        out
    }

    fn escapes(&self, i: usize, j: usize) -> bool {
        let suffix = self.lines[j + 1..]
            .iter()
            .all(|l| l.kind == Kind::Close { is_loop: false });
        self.lines[i..=j].iter().any(|l| match l.kind {
            Kind::Break(c) | Kind::Continue(c) => !(i..=j).contains(&self.compounds[c].header),
            Kind::Return => !suffix,
            _ => false,
        })
    }

    /// Brute-force verdict for source lines `[a, b]` with the given
    /// coverage threshold in percent.
    pub fn expected(
        &self,
        a: usize,
        b: usize,
        max_cover_pct: usize,
        min_statements: usize,
    ) -> Expected {
        if a <= self.host.start || b >= self.host.end || a > b {
            return Expected {
                reason: ReasonCode::ScopeUnbalanced,
                span: None,
            };
        }
        let (i, j) = self.widen(a - self.first, b - self.first);
        let span = Some((self.line_of(i), self.line_of(j)));
        let reason = if self.lines[i..=j].iter().any(|l| l.kind == Kind::Stray) {
            ReasonCode::VariableInaccessible
        } else if self.live_out(i, j).len() > 1 {
            ReasonCode::MultipleReturns
        } else if self.escapes(i, j) {
            ReasonCode::ControlFlowEscape
        } else if self.counted_in(i, j) * 100 >= max_cover_pct * self.counted_total() {
            ReasonCode::WholeMethod
        } else if self.counted_in(i, j) < min_statements {
            ReasonCode::OneLiner
        } else {
            ReasonCode::Ok
        };
        Expected { reason, span }
    }
}

pub struct OracleRun {
    pub instances: usize,
    pub mismatches: Vec<String>,
    pub seen: HashMap<ReasonCode, usize>,
}

/// Classify random suggestions over `methods` generated hosts, `per` each,
/// and compare with [`GenMethod::expected`].
pub fn filter_oracle(seed: u64, methods: u64, per: usize) -> OracleRun {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut run = OracleRun {
        instances: 0,
        mismatches: Vec::new(),
        seen: HashMap::new(),
    };
    for k in 0..methods {
        let g = generate(k, rng.random_range(4..30));
        let m = match parse_method("G.java", &g.source, g.host) {
            Ok(m) => m,
            Err(e) => {
                run.mismatches
                    .push(format!("method {k} does not parse: {e}\n{}", g.source));
                continue;
            }
        };
        for _ in 0..per {
            let a = rng.random_range(g.host.start - 1..=g.host.end);
            let b = rng.random_range(a..=g.host.end + 1);
            let want = g.expected(a, b, 88, 2);
            let v = classify(
                &m,
                &ExtractSuggestion::new("f", a, b),
                &FilterConfig::default(),
            );
            let got = Expected {
                reason: v.reason,
                span: want.span.map(|_| v.suggestion.key()),
            };
            *run.seen.entry(want.reason).or_insert(0) += 1;
            run.instances += 1;
            if got != want {
                run.mismatches.push(format!(
                    "method {k} lines {a}-{b}: want {want:?}, got {got:?}\n{}",
                    g.source
                ));
            }
        }
    }
    run
}

/// `n` independent one-line statements in a method starting at line 1.
pub fn flat_method(n: usize) -> exmeth::LongMethod {
    let mut src = String::from("void f(int p0) {\n");
    for k in 0..n {
        src.push_str(&format!("    sink(p0, {k});\n"));
    }
    src.push_str("}\n");
    parse_method("F.java", &src, LineSpan::new(1, n + 2)).unwrap()
}

/// Smallest statement count rejected as whole-method for `n` statements at
/// `pct` percent, in exact integer arithmetic.
pub fn coverage_cutoff(n: usize, pct: usize) -> usize {
    (pct * n).div_ceil(100)
}

/// For a flat method of `n` statements, the first `cutoff` statements are
/// rejected as whole-method and one fewer are not.
pub fn boundary_holds(n: usize) -> Result<(), String> {
    let m = flat_method(n);
    let k = coverage_cutoff(n, 88);
    let cfg = FilterConfig::default();
    let at = classify(&m, &ExtractSuggestion::new("f", 2, 1 + k), &cfg);
    if at.reason != ReasonCode::WholeMethod {
        return Err(format!("n={n}: {k} statements gave {:?}", at.reason));
    }
    let below = classify(&m, &ExtractSuggestion::new("f", 2, k), &cfg);
    if below.reason == ReasonCode::WholeMethod {
        return Err(format!(
            "n={n}: {} statements rejected as whole-method",
            k - 1
        ));
    }
    let want = if k - 1 < 2 {
        ReasonCode::OneLiner
    } else {
        ReasonCode::Ok
    };
    if below.reason != want {
        return Err(format!(
            "n={n}: {} statements gave {:?}",
            k - 1,
            below.reason
        ));
    }
    Ok(())
}

/// Enhancement worked out on the generator's record, one step at a time.
impl GenMethod {
    pub fn ok(&self, i: usize, j: usize) -> bool {
        self.expected(self.line_of(i), self.line_of(j), 88, 2)
            .reason
            == ReasonCode::Ok
    }

    pub fn extend(&self, (mut i, j): (usize, usize)) -> (usize, usize) {
        while i > 0 {
            let p = &self.lines[i - 1];
            if p.kind != Kind::Decl || p.depth != self.lines[i].depth {
                break;
            }
            if !self.lines[i..=j]
                .iter()
                .any(|l| l.uses.iter().any(|u| p.defs.contains(u)))
            {
                break;
            }
            if !self.ok(i - 1, j) || self.live_in(i - 1, j).len() > self.live_in(i, j).len() {
                break;
            }
            i -= 1;
        }
        (i, j)
    }

    pub fn shrink(&self, (mut i, mut j): (usize, usize)) -> (usize, usize) {
        while let Some(c) = self
            .compounds
            .iter()
            .find(|c| c.header == i && c.end == j && !c.is_loop && !c.has_else)
        {
            let (lo, hi) = c.inners[0];
            if lo > hi || !self.ok(lo, hi) {
                break;
            }
            (i, j) = (lo, hi);
        }
        (i, j)
    }

    pub fn enhance(&self, range: (usize, usize)) -> (usize, usize) {
        let mut cur = range;
        loop {
            let next = self.shrink(self.extend(cur));
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    /// Every applicable index range.
    pub fn applicable(&self) -> Vec<(usize, usize)> {
        let n = self.lines.len();
        (0..n)
            .flat_map(|i| (i..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.balanced(i, j) && self.ok(i, j))
            .collect()
    }
}

/// Extract `s` from `source`, then undo it by hand: put the new method's
/// body back in place of the call and delete the new method. The result must
/// be the original text, and every name the new method reads must resolve.
pub fn round_trip(
    source: &str,
    method: &exmeth::LongMethod,
    s: &ExtractSuggestion,
) -> Result<(), String> {
    use exmeth::extract::{apply, plan_extraction, PlanOptions};
    use exmeth::model::locate_methods;

    let plan =
        plan_extraction(method, s, PlanOptions::default()).map_err(|e| format!("plan: {e}"))?;
    let text = apply(source, &plan).map_err(|e| format!("apply: {e}"))?;
    let located = locate_methods(&text).map_err(|e| format!("relex: {e}"))?;
    let new = located
        .iter()
        .find(|l| l.name == plan.new_method_name && l.span.start > method.start_line())
        .ok_or("extracted method not found")?;
    let host = located
        .iter()
        .find(|l| l.span.start == method.start_line())
        .ok_or("host not found")?;
    let new_m = parse_method("", &text, new.span).map_err(|e| format!("reparse new: {e}"))?;
    let host_m = parse_method("", &text, host.span).map_err(|e| format!("reparse host: {e}"))?;

    let old_names: BTreeSet<&str> = method.variables().iter().map(|v| v.name.as_str()).collect();
    let old_external: BTreeSet<&str> = method
        .variables()
        .iter()
        .filter(|v| v.is_external())
        .map(|v| v.name.as_str())
        .collect();
    for v in new_m.variables().iter().filter(|v| v.is_external()) {
        if old_names.contains(v.name.as_str()) && !old_external.contains(v.name.as_str()) {
            return Err(format!("`{}` is unresolved in the new method", v.name));
        }
    }
    let host_locals = host_m.local_names();
    if let Some(v) = host_m
        .variables()
        .iter()
        .find(|v| v.is_external() && host_locals.contains(v.name.as_str()))
    {
        return Err(format!("`{}` is unresolved in the host", v.name));
    }
    for p in &plan.parameters {
        if !new_m.signature().params.iter().any(|q| q.name == p.name) {
            return Err(format!("parameter `{}` missing", p.name));
        }
    }

    let lines: Vec<&str> = text.lines().collect();
    let mut body: Vec<&str> = lines[new.span.start..new.span.end - 1].to_vec();
    if let Some(r) = &plan.return_variable {
        let last = body.pop().unwrap_or("");
        if last.trim() != format!("return {};", r.name) {
            return Err(format!("unexpected last line `{last}`"));
        }
    }
    let frag_len = plan.fragment.len();
    let extra = body
        .len()
        .checked_sub(frag_len)
        .ok_or("body shorter than fragment")?;
    for l in &body[..extra] {
        let decl = l.trim().trim_end_matches(';');
        let name = decl.rsplit(' ').next().unwrap_or("");
        if !l.trim().ends_with(';') || !method.local_names().contains(name) {
            return Err(format!("unexpected preamble `{l}`"));
        }
    }
    let body = &body[extra..];
    let call_line = lines[plan.fragment.start - 1];
    if call_line != plan.call_site_text {
        return Err(format!("call site is `{call_line}`"));
    }
    let call_indent = &call_line[..call_line.len() - call_line.trim_start().len()];
    let body_indent = body
        .iter()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.len() - l.trim_start().len())
        .min()
        .unwrap_or(0);
    let mut restored: Vec<String> = lines[..plan.fragment.start - 1]
        .iter()
        .map(|l| l.to_string())
        .collect();
    for l in body {
        restored.push(if l.trim().is_empty() {
            String::new()
        } else {
            format!("{call_indent}{}", &l[body_indent..])
        });
    }
    // Host tail, then skip the blank separator and the new method.
    restored.extend(
        lines[plan.fragment.start..new.span.start - 2]
            .iter()
            .map(|l| l.to_string()),
    );
    restored.extend(lines[new.span.end..].iter().map(|l| l.to_string()));
    let original: Vec<&str> = source.lines().collect();
    if restored != original {
        let at = restored
            .iter()
            .zip(&original)
            .position(|(a, b)| a != b)
            .unwrap_or(restored.len().min(original.len()));
        return Err(format!(
            "inlined text differs at line {}: `{}` vs `{}`",
            at + 1,
            restored.get(at).map_or("", |s| s.as_str()),
            original.get(at).copied().unwrap_or("")
        ));
    }
    Ok(())
}

/// Tallies of a check run over many instances.
#[derive(Debug, Default)]
pub struct CheckRun {
    pub checked: usize,
    pub moved: usize,
    pub failures: Vec<String>,
}

/// Compare extension, shrinking and full enhancement of every applicable
/// range against the stepwise model, on `count` hosts from `first_seed`.
pub fn enhancement_check(first_seed: u64, count: u64) -> CheckRun {
    use exmeth::enhance::{enhance, extend_for_declaration, live_in_count, shrink_control_header};
    let cfg = FilterConfig::default();
    let mut run = CheckRun::default();
    for seed in first_seed..first_seed + count {
        let g = generate(seed, 18);
        let m = parse_method("G.java", &g.source, g.host).unwrap();
        let lines = |(a, b): (usize, usize)| (g.line_of(a), g.line_of(b));
        for (i, j) in g.applicable() {
            let s = ExtractSuggestion::new("s", g.line_of(i), g.line_of(j));
            let ext = extend_for_declaration(&m, &s, &cfg);
            let shr = shrink_control_header(&m, &s, &cfg);
            let e = enhance(&m, &s, &cfg);
            let problems = [
                (ext.key() != lines(g.extend((i, j))), "extension differs"),
                (
                    live_in_count(&m, &ext) > live_in_count(&m, &s),
                    "extension added a parameter",
                ),
                (shr.key() != lines(g.shrink((i, j))), "shrinking differs"),
                (e.key() != lines(g.enhance((i, j))), "enhancement differs"),
                (
                    classify(&m, &e, &cfg).reason != ReasonCode::Ok,
                    "enhanced range not applicable",
                ),
                (
                    enhance(&m, &e, &cfg).key() != e.key(),
                    "enhancement not idempotent",
                ),
            ];
            for (bad, what) in problems {
                if bad {
                    run.failures.push(format!(
                        "seed {seed} lines {}-{}: {what}\n{}",
                        s.start_line, s.end_line, g.source
                    ));
                }
            }
            run.checked += 1;
            run.moved += usize::from(e.key() != s.key());
        }
    }
    run
}

pub fn corpus_source(c: &exmeth::eval::Corpus, k: usize) -> String {
    std::fs::read_to_string(
        c.root
            .join(exmeth::eval::Corpus::SOURCES_DIR)
            .join(&c.entries[k].file),
    )
    .unwrap()
}

/// [`round_trip`] for every distinct applicable range of every corpus host.
pub fn corpus_round_trip(c: &exmeth::eval::Corpus) -> CheckRun {
    let cfg = FilterConfig::default();
    let mut run = CheckRun::default();
    for (k, m) in c.methods.iter().enumerate() {
        let src = corpus_source(c, k);
        let stmts = m.statements();
        let mut seen = BTreeSet::new();
        for i in 0..stmts.len() {
            for j in i..stmts.len() {
                let v = classify(
                    m,
                    &ExtractSuggestion::new("extracted", stmts[i].start_line, stmts[j].end_line),
                    &cfg,
                );
                if v.reason != ReasonCode::Ok || !seen.insert(v.suggestion.key()) {
                    continue;
                }
                run.checked += 1;
                if let Err(e) = round_trip(&src, m, &v.suggestion) {
                    run.failures.push(format!(
                        "{} {}: {e}",
                        c.entries[k].file.display(),
                        v.suggestion
                    ));
                }
            }
        }
    }
    run
}

pub type RecallCorpus = (
    BTreeMap<exmeth::eval::MethodKey, Vec<ExtractSuggestion>>,
    Vec<exmeth::eval::OracleEntry>,
);

/// `(length, oracle end a, oracle end b, ranked candidates)`, all positions
/// relative to the host start.
pub type HostSpec = (usize, usize, usize, Vec<(usize, usize)>);

pub fn build_corpus(hosts: &[HostSpec]) -> RecallCorpus {
    let mut results = BTreeMap::new();
    let mut oracle = Vec::new();
    for (k, (len, x, y, tops)) in hosts.iter().enumerate() {
        let base = 1000 * k;
        let o = exmeth::eval::OracleEntry {
            file: format!("M{}.java", k % 3).into(),
            host_start: base,
            host_end: base + len,
            oracle_start: base + x.min(y),
            oracle_end: base + x.max(y),
            oracle_name: String::new(),
        };
        let top = tops
            .iter()
            .map(|(a, b)| ExtractSuggestion::new("s", base + a.min(b), base + a.max(b)))
            .collect();
        results.insert(o.key(), top);
        oracle.push(o);
    }
    (results, oracle)
}

pub fn random_corpus(rng: &mut ChaCha8Rng) -> RecallCorpus {
    let hosts: Vec<_> = (0..rng.random_range(1..20))
        .map(|_| {
            let len = rng.random_range(10..80);
            let tops = (0..rng.random_range(0..8))
                .map(|_| (rng.random_range(1..len), rng.random_range(1..len)))
                .collect();
            (
                len,
                rng.random_range(1..len),
                rng.random_range(1..len),
                tops,
            )
        })
        .collect();
    build_corpus(&hosts)
}

/// Hits counted with two plain loops and integer arithmetic.
pub fn brute_recall(
    results: &BTreeMap<exmeth::eval::MethodKey, Vec<ExtractSuggestion>>,
    oracle: &[exmeth::eval::OracleEntry],
    n: usize,
    m: usize,
) -> f64 {
    let mut hits = 0;
    for o in oracle {
        let len = o.host_end - o.host_start;
        let mut hit = false;
        for (rank, s) in results[&o.key()].iter().enumerate() {
            if rank >= n {
                break;
            }
            let dev = s.start_line.abs_diff(o.oracle_start) + s.end_line.abs_diff(o.oracle_end);
            if dev * 100 <= m * len {
                hit = true;
            }
        }
        hits += usize::from(hit);
    }
    hits as f64 / oracle.len() as f64
}
