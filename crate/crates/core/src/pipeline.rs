//! Generation, triage, enhancement and ranking for one host method, and the
//! report that `apply` later reads back.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::enhance::enhance_all;
use crate::extract::{plan_extraction, PlanOptions};
use crate::filter::{triage, FilterConfig, Triage};
use crate::llm::{generate, Gateway, GenerateError, Generation, LlmParams};
use crate::model::LongMethod;
use crate::rank::{rank, top_n, Ranked, Strategy};
use crate::suggestion::{ExtractSuggestion, Provenance, SuggestionSet, VerdictRecord};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub filter: FilterConfig,
    pub strategy: Strategy,
    pub top_n: usize,
    pub enhance: bool,
    pub plan: PlanOptions,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            filter: FilterConfig::default(),
            strategy: Strategy::Combined,
            top_n: 5,
            enhance: true,
            plan: PlanOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub triage: Triage,
    /// Applicable suggestions after (optional) enhancement.
    pub candidates: Vec<ExtractSuggestion>,
    /// All candidates, best first.
    pub ranked: Vec<Ranked>,
}

impl Outcome {
    pub fn top(&self, n: usize) -> Vec<ExtractSuggestion> {
        top_n(&self.ranked, n)
            .iter()
            .map(|r| r.suggestion.clone())
            .collect()
    }
}

/// Everything after generation. Pure.
pub fn process(method: &LongMethod, set: &SuggestionSet, cfg: &PipelineConfig) -> Outcome {
    let triage = triage(method, set, &cfg.filter);
    let applicable = triage.applicable();
    let candidates = if cfg.enhance {
        enhance_all(method, &applicable, &cfg.filter)
    } else {
        applicable
    };
    let ranked = rank(method, &candidates, cfg.strategy);
    Outcome {
        triage,
        candidates,
        ranked,
    }
}

pub fn run(
    method: &LongMethod,
    params: &LlmParams,
    gateway: Gateway<'_>,
    cfg: &PipelineConfig,
) -> Result<(Generation, Outcome), GenerateError> {
    let generation = generate(method, params, gateway)?;
    let outcome = process(method, &generation.set, cfg);
    Ok((generation, outcome))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictCounts {
    pub total: usize,
    pub invalid: usize,
    pub not_useful: usize,
    pub useful: usize,
}

impl VerdictCounts {
    pub fn of(t: &Triage) -> Self {
        Self {
            total: t.raw.len(),
            invalid: t.invalid(),
            not_useful: t.not_useful(),
            useful: t.useful(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportEntry {
    /// 1-based position, as accepted by `apply`.
    pub index: usize,
    pub name: String,
    pub start_line: usize,
    pub end_line: usize,
    pub count: u32,
    pub provenance: Provenance,
    pub heat: u64,
    pub popularity: u64,
    pub combined: u64,
    /// Signature of the method extraction would create.
    pub signature: Option<String>,
    /// Why no extraction plan could be built.
    pub plan_error: Option<String>,
}

impl ReportEntry {
    pub fn suggestion(&self) -> ExtractSuggestion {
        ExtractSuggestion::new(&self.name, self.start_line, self.end_line)
            .with_count(self.count)
            .moved(
                crate::model::LineSpan::new(self.start_line, self.end_line),
                self.provenance,
            )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuggestReport {
    pub file: String,
    pub method: String,
    pub host_start: usize,
    pub host_end: usize,
    /// Hash of the host method text when the report was made.
    pub host_sha256: String,
    pub temperature: f64,
    pub iterations: usize,
    pub strategy: Strategy,
    pub enhanced: bool,
    pub counts: VerdictCounts,
    pub suggestions: Vec<ReportEntry>,
    pub verdicts: Vec<VerdictRecord>,
    pub diagnostics: Vec<String>,
}

pub fn host_hash(method: &LongMethod) -> String {
    hex::encode(Sha256::digest(method.text().as_bytes()))
}

impl SuggestReport {
    pub fn build(
        method: &LongMethod,
        params: &LlmParams,
        cfg: &PipelineConfig,
        generation: &Generation,
        outcome: &Outcome,
    ) -> Self {
        let suggestions = top_n(&outcome.ranked, cfg.top_n)
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let s = &r.suggestion;
                let (signature, plan_error) = match plan_extraction(method, s, cfg.plan) {
                    Ok(p) => (Some(p.signature), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                ReportEntry {
                    index: k + 1,
                    name: s.name.clone(),
                    start_line: s.start_line,
                    end_line: s.end_line,
                    count: s.count,
                    provenance: s.provenance,
                    heat: r.score.heat,
                    popularity: r.score.popularity,
                    combined: r.score.combined,
                    signature,
                    plan_error,
                }
            })
            .collect();
        Self {
            file: method.file_path().display().to_string(),
            method: method.name().to_string(),
            host_start: method.start_line(),
            host_end: method.end_line(),
            host_sha256: host_hash(method),
            temperature: params.temperature,
            iterations: generation.responses.len(),
            strategy: cfg.strategy,
            enhanced: cfg.enhance,
            counts: VerdictCounts::of(&outcome.triage),
            suggestions,
            verdicts: outcome
                .triage
                .verdicts
                .iter()
                .map(|v| v.to_record())
                .collect(),
            diagnostics: generation
                .diagnostics()
                .map(|(i, d)| format!("iteration {i}: {d}"))
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn table(&self) -> String {
        use std::fmt::Write;
        let c = self.counts;
        let mut out = format!(
            "{} ({}:{}-{})\nsuggestions: {} total, {} invalid, {} not useful, {} useful\n",
            self.method,
            self.file,
            self.host_start,
            self.host_end,
            c.total,
            c.invalid,
            c.not_useful,
            c.useful
        );
        if self.suggestions.is_empty() {
            out.push_str("no applicable suggestions\n");
            return out;
        }
        let _ = writeln!(
            out,
            "{:>3}  {:>9}  {:>5}  {:>5}  {:>8}  signature",
            "#", "lines", "heat", "pop", self.strategy
        );
        for e in &self.suggestions {
            let score = match self.strategy {
                Strategy::Heat => e.heat,
                Strategy::Popularity => e.popularity,
                Strategy::Combined => e.combined,
            };
            let sig = e.signature.clone().unwrap_or_else(|| {
                format!(
                    "{} (not extractable: {})",
                    e.name,
                    e.plan_error.as_deref().unwrap_or("")
                )
            });
            let _ = writeln!(
                out,
                "{:>3}  {:>9}  {:>5}  {:>5}  {:>8}  {}",
                e.index,
                format!("{}-{}", e.start_line, e.end_line),
                e.heat,
                e.popularity,
                score,
                sig
            );
        }
        out
    }
}
