//! Recall@n with an m% tolerance against oracle corpora, repeated
//! experiments, the temperature/iteration sweep, and the ablation variants.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::llm::{generate, Gateway, GenerateError, Generation, LlmParams};
use crate::model::{parse_method, LineSpan, LongMethod, ParseError};
use crate::pipeline::{process, PipelineConfig};
use crate::suggestion::{ExtractSuggestion, SuggestionSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleEntry {
    /// Relative to the corpus `sources/` directory.
    pub file: PathBuf,
    pub host_start: usize,
    pub host_end: usize,
    pub oracle_start: usize,
    pub oracle_end: usize,
    #[serde(default)]
    pub oracle_name: String,
}

impl OracleEntry {
    pub fn key(&self) -> MethodKey {
        MethodKey {
            file: self.file.clone(),
            host_start: self.host_start,
            host_end: self.host_end,
        }
    }

    /// Host length in lines, `e_i - s_i`.
    pub fn host_len(&self) -> usize {
        self.host_end - self.host_start
    }

    fn check(&self) -> Result<(), String> {
        if self.host_start < self.oracle_start
            && self.oracle_start <= self.oracle_end
            && self.oracle_end < self.host_end
        {
            Ok(())
        } else {
            Err(format!(
                "{}: oracle {}-{} is not strictly inside host {}-{}",
                self.file.display(),
                self.oracle_start,
                self.oracle_end,
                self.host_start,
                self.host_end
            ))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MethodKey {
    pub file: PathBuf,
    pub host_start: usize,
    pub host_end: usize,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("oracle line {line}: {detail}")]
    BadOracle { line: usize, detail: String },
    #[error("{file}: {source}")]
    Parse { file: PathBuf, source: ParseError },
    #[error("result for a method not in the corpus: {}:{}", .0.file.display(), .0.host_start)]
    CorpusMismatch(MethodKey),
    #[error("{}:{}: {source}", .key.file.display(), .key.host_start)]
    Generate {
        key: MethodKey,
        source: GenerateError,
    },
    #[error("{0}")]
    InvalidArgument(String),
}

/// `|end_s - end_o| + |start_s - start_o| <= m/100 * host_len`.
pub fn within_tolerance(
    s: &ExtractSuggestion,
    oracle: &OracleEntry,
    m: f64,
    host_len: usize,
) -> bool {
    let dev = s.start_line.abs_diff(oracle.oracle_start) + s.end_line.abs_diff(oracle.oracle_end);
    (dev as f64) * 100.0 <= m * host_len as f64
}

/// Rank (1-based) of the first of the top `n` suggestions that matches.
pub fn first_hit(
    top: &[ExtractSuggestion],
    oracle: &OracleEntry,
    n: usize,
    m: f64,
) -> Option<usize> {
    top.iter()
        .take(n)
        .position(|s| within_tolerance(s, oracle, m, oracle.host_len()))
        .map(|k| k + 1)
}

/// Fraction of oracle entries with a tolerant match among their top `n`.
/// An oracle method without results counts as a miss.
pub fn recall_at_n(
    results: &BTreeMap<MethodKey, Vec<ExtractSuggestion>>,
    oracle: &[OracleEntry],
    n: usize,
    m: f64,
) -> Result<f64, EvalError> {
    if let Some(k) = results
        .keys()
        .find(|k| !oracle.iter().any(|o| &o.key() == *k))
    {
        return Err(EvalError::CorpusMismatch(k.clone()));
    }
    if oracle.is_empty() {
        return Ok(0.0);
    }
    let hits = oracle
        .iter()
        .filter(|o| {
            results
                .get(&o.key())
                .is_some_and(|top| first_hit(top, o, n, m).is_some())
        })
        .count();
    Ok(hits as f64 / oracle.len() as f64)
}

pub struct Corpus {
    pub root: PathBuf,
    pub entries: Vec<OracleEntry>,
    pub methods: Vec<LongMethod>,
}

impl Corpus {
    pub const ORACLE_FILE: &'static str = "oracle.jsonl";
    pub const SOURCES_DIR: &'static str = "sources";

    /// Read `oracle.jsonl` and parse every host method under `sources/`.
    pub fn load(root: &Path) -> Result<Self, EvalError> {
        let oracle_path = root.join(Self::ORACLE_FILE);
        let text = fs::read_to_string(&oracle_path).map_err(|source| EvalError::Io {
            path: oracle_path,
            source,
        })?;
        let mut entries = Vec::new();
        for (k, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let e: OracleEntry = serde_json::from_str(line).map_err(|e| EvalError::BadOracle {
                line: k + 1,
                detail: e.to_string(),
            })?;
            e.check().map_err(|detail| EvalError::BadOracle {
                line: k + 1,
                detail,
            })?;
            entries.push(e);
        }
        let mut sources: BTreeMap<PathBuf, String> = BTreeMap::new();
        let mut methods = Vec::with_capacity(entries.len());
        for e in &entries {
            if !sources.contains_key(&e.file) {
                let path = root.join(Self::SOURCES_DIR).join(&e.file);
                let src =
                    fs::read_to_string(&path).map_err(|source| EvalError::Io { path, source })?;
                sources.insert(e.file.clone(), src);
            }
            let m = parse_method(
                &e.file,
                &sources[&e.file],
                LineSpan::new(e.host_start, e.host_end),
            )
            .map_err(|source| EvalError::Parse {
                file: e.file.clone(),
                source,
            })?;
            methods.push(m);
        }
        Ok(Self {
            root: root.to_path_buf(),
            entries,
            methods,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One generation per method, in corpus order.
    pub fn generate_all(
        &self,
        params: &LlmParams,
        gateway: Gateway<'_>,
    ) -> Result<Vec<Generation>, EvalError> {
        self.methods
            .par_iter()
            .zip(&self.entries)
            .map(|(m, e)| {
                generate(m, params, gateway).map_err(|source| EvalError::Generate {
                    key: e.key(),
                    source,
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodDetail {
    pub file: PathBuf,
    pub host_start: usize,
    pub host_end: usize,
    pub oracle_start: usize,
    pub oracle_end: usize,
    /// 1-based rank of the first tolerant match.
    pub hit_rank: Option<usize>,
    pub top: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecallReport {
    pub label: String,
    pub n: usize,
    pub tolerance: f64,
    pub runs: Vec<f64>,
    pub mean: f64,
    pub stddev: f64,
    /// From the first run.
    pub methods: Vec<MethodDetail>,
    pub note: String,
}

pub const MISS_POLICY: &str = "methods with no surviving suggestion count as misses";

/// Mean and sample standard deviation; 0 for a single value.
pub fn mean_stddev(xs: &[f64]) -> (f64, f64) {
    let Some(&x0) = xs.first() else {
        return (0.0, 0.0);
    };
    // Offsets from the first run: identical runs give exactly zero spread.
    let n = xs.len() as f64;
    let d: Vec<f64> = xs.iter().map(|x| x - x0).collect();
    let sum: f64 = d.iter().sum();
    let mean = x0 + sum / n;
    if xs.len() == 1 {
        return (mean, 0.0);
    }
    let var = (d.iter().map(|v| v * v).sum::<f64>() - sum * sum / n) / (n - 1.0);
    (mean, var.max(0.0).sqrt())
}

impl RecallReport {
    fn from_runs(
        label: &str,
        n: usize,
        m: f64,
        runs: Vec<f64>,
        methods: Vec<MethodDetail>,
    ) -> Self {
        let (mean, stddev) = mean_stddev(&runs);
        Self {
            label: label.to_string(),
            n,
            tolerance: m,
            runs,
            mean,
            stddev,
            methods,
            note: MISS_POLICY.into(),
        }
    }

    pub fn table(&self) -> String {
        let mut out = format!(
            "{}: Recall@{} at {}% = {:.1}% +/- {:.1} over {} run(s)\n",
            self.label,
            self.n,
            self.tolerance,
            self.mean * 100.0,
            self.stddev * 100.0,
            self.runs.len()
        );
        let _ = writeln!(
            out,
            "{:<28} {:>9} {:>9} {:>5}",
            "method", "host", "oracle", "hit"
        );
        for d in &self.methods {
            let _ = writeln!(
                out,
                "{:<28} {:>9} {:>9} {:>5}",
                d.file.display(),
                format!("{}-{}", d.host_start, d.host_end),
                format!("{}-{}", d.oracle_start, d.oracle_end),
                d.hit_rank
                    .map_or_else(|| "-".to_string(), |r| format!("#{r}"))
            );
        }
        let _ = writeln!(out, "({})", self.note);
        out
    }
}

fn score_run(
    corpus: &Corpus,
    tops: Vec<Vec<ExtractSuggestion>>,
    n: usize,
    m: f64,
) -> (f64, Vec<MethodDetail>) {
    let details = corpus
        .entries
        .iter()
        .zip(&tops)
        .map(|(e, top)| MethodDetail {
            file: e.file.clone(),
            host_start: e.host_start,
            host_end: e.host_end,
            oracle_start: e.oracle_start,
            oracle_end: e.oracle_end,
            hit_rank: first_hit(top, e, n, m),
            top: top.iter().take(n).map(|s| s.key()).collect(),
        })
        .collect();
    let results: BTreeMap<_, _> = corpus.entries.iter().map(|e| e.key()).zip(tops).collect();
    let recall = recall_at_n(&results, &corpus.entries, n, m).expect("keys come from the corpus");
    (recall, details)
}

fn check_args(n: usize, m: f64, repetitions: usize) -> Result<(), EvalError> {
    if n == 0 || repetitions == 0 || m.is_nan() || m < 0.0 {
        return Err(EvalError::InvalidArgument(format!(
            "need n >= 1, repetitions >= 1 and tolerance >= 0 (got n={n}, repetitions={repetitions}, m={m})"
        )));
    }
    Ok(())
}

/// `repetitions` full pipeline runs over the corpus.
pub fn run_experiment(
    corpus: &Corpus,
    params: &LlmParams,
    gateway: Gateway<'_>,
    cfg: &PipelineConfig,
    n: usize,
    m: f64,
    repetitions: usize,
) -> Result<RecallReport, EvalError> {
    check_args(n, m, repetitions)?;
    let mut runs = Vec::with_capacity(repetitions);
    let mut first = None;
    for _ in 0..repetitions {
        let generations = corpus.generate_all(params, gateway)?;
        let tops = corpus
            .methods
            .par_iter()
            .zip(&generations)
            .map(|(method, g)| process(method, &g.set, cfg).top(n))
            .collect();
        let (recall, details) = score_run(corpus, tops, n, m);
        runs.push(recall);
        first.get_or_insert(details);
    }
    Ok(RecallReport::from_runs(
        "pipeline",
        n,
        m,
        runs,
        first.unwrap_or_default(),
    ))
}

pub const SWEEP_TEMPERATURES: [f64; 7] = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2];
pub const SWEEP_MAX_ITERATIONS: usize = 10;

/// Suggestions from the first `i` responses only.
pub fn prefix_set(g: &Generation, i: usize) -> SuggestionSet {
    let mut set = SuggestionSet::new();
    for r in g.responses.iter().take(i) {
        for e in &r.parsed {
            set.add(&e.name, e.start_line, e.end_line, 1);
        }
    }
    set
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub temperatures: Vec<f64>,
    pub iterations: Vec<usize>,
    /// `recall[t][i]`.
    pub recall: Vec<Vec<f64>>,
}

impl SweepGrid {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["temperature".to_string()];
        header.extend(self.iterations.iter().map(|i| format!("i{i}")));
        w.write_record(&header).expect("in-memory write");
        for (t, row) in self.temperatures.iter().zip(&self.recall) {
            let mut rec = vec![format!("{t:.1}")];
            rec.extend(row.iter().map(|r| format!("{r:.4}")));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
    }
}

/// Recall@n for every temperature in `temperatures` and every iteration
/// count `1..=max_iterations`. Each temperature is generated once at
/// `max_iterations` and smaller counts use a prefix of the replies.
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    corpus: &Corpus,
    base: &LlmParams,
    gateway: Gateway<'_>,
    cfg: &PipelineConfig,
    temperatures: &[f64],
    max_iterations: usize,
    n: usize,
    m: f64,
) -> Result<SweepGrid, EvalError> {
    check_args(n, m, max_iterations)?;
    let mut recall = Vec::with_capacity(temperatures.len());
    for &t in temperatures {
        let params = LlmParams {
            temperature: t,
            iterations: max_iterations,
            fixpoint: false,
            ..base.clone()
        };
        let generations = corpus.generate_all(&params, gateway)?;
        let row = (1..=max_iterations)
            .into_par_iter()
            .map(|i| {
                let tops = corpus
                    .methods
                    .iter()
                    .zip(&generations)
                    .map(|(method, g)| process(method, &prefix_set(g, i), cfg).top(n))
                    .collect();
                score_run(corpus, tops, n, m).0
            })
            .collect();
        recall.push(row);
    }
    Ok(SweepGrid {
        temperatures: temperatures.to_vec(),
        iterations: (1..=max_iterations).collect(),
        recall,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AblationMode {
    /// Unfiltered model output, `n` picked at random.
    Raw,
    /// Filtered and enhanced, `n` picked at random.
    EnhancedRandom5,
    /// Filtered, enhanced and ranked.
    EnhancedRanked,
}

impl AblationMode {
    pub const ALL: [AblationMode; 3] = [
        AblationMode::Raw,
        AblationMode::EnhancedRandom5,
        AblationMode::EnhancedRanked,
    ];

    pub fn label(self) -> &'static str {
        match self {
            AblationMode::Raw => "raw",
            AblationMode::EnhancedRandom5 => "enhanced-random5",
            AblationMode::EnhancedRanked => "enhanced-ranked",
        }
    }
}

fn pick(pool: Vec<ExtractSuggestion>, n: usize, rng: &mut ChaCha8Rng) -> Vec<ExtractSuggestion> {
    pool.choose_multiple(rng, n).cloned().collect()
}

/// One pipeline variant, `repetitions` times. Random picks are drawn from a
/// generator seeded with `seed`, on a separate stream per repetition and
/// method so results do not depend on scheduling.
#[allow(clippy::too_many_arguments)]
pub fn ablation(
    corpus: &Corpus,
    generations: &[Generation],
    mode: AblationMode,
    cfg: &PipelineConfig,
    n: usize,
    m: f64,
    repetitions: usize,
    seed: u64,
) -> Result<RecallReport, EvalError> {
    check_args(n, m, repetitions)?;
    if generations.len() != corpus.len() {
        return Err(EvalError::InvalidArgument(format!(
            "{} generations for {} corpus methods",
            generations.len(),
            corpus.len()
        )));
    }
    let cfg = PipelineConfig {
        enhance: true,
        ..*cfg
    };
    let outcomes: Vec<_> = corpus
        .methods
        .par_iter()
        .zip(generations)
        .map(|(method, g)| process(method, &g.set, &cfg))
        .collect();
    let mut runs = Vec::with_capacity(repetitions);
    let mut first = None;
    for rep in 0..repetitions {
        let tops = outcomes
            .iter()
            .zip(generations)
            .enumerate()
            .map(|(k, (out, g))| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream((rep * corpus.len() + k) as u64);
                match mode {
                    AblationMode::Raw => pick(g.set.entries(), n, &mut rng),
                    AblationMode::EnhancedRandom5 => pick(out.candidates.clone(), n, &mut rng),
                    AblationMode::EnhancedRanked => out.top(n),
                }
            })
            .collect();
        let (recall, details) = score_run(corpus, tops, n, m);
        runs.push(recall);
        first.get_or_insert(details);
    }
    Ok(RecallReport::from_runs(
        mode.label(),
        n,
        m,
        runs,
        first.unwrap_or_default(),
    ))
}
