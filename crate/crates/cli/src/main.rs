//! `exmeth` command line: suggest, apply, evaluate, sweep, ablation, record.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use exmeth::eval::{
    ablation, run_experiment, sweep, AblationMode, Corpus, RecallReport, SWEEP_MAX_ITERATIONS,
    SWEEP_TEMPERATURES,
};
use exmeth::extract::{apply_to_file, plan_extraction, PlanOptions};
use exmeth::llm::{
    CacheMode, FixtureCache, Gateway, HttpClient, LlmClient, LlmParams, ScriptedClient, TOKEN_ENV,
};
use exmeth::model::locate_methods;
use exmeth::pipeline::{host_hash, run, PipelineConfig, SuggestReport};
use exmeth::rank::Strategy;
use exmeth::{parse_method, FilterConfig, LineSpan, LongMethod};

#[derive(Parser)]
#[command(
    name = "exmeth",
    version,
    about = "Extract Method suggestions from a language model, filtered and ranked by static analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Suggest fragments of one method to extract.
    Suggest {
        file: PathBuf,
        /// Pick the method enclosing this line.
        #[arg(long, conflicts_with = "method", required_unless_present = "method")]
        line: Option<usize>,
        /// Pick the method by name.
        #[arg(long)]
        method: Option<String>,
        #[command(flatten)]
        llm: LlmArgs,
        #[command(flatten)]
        pipe: PipeArgs,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Perform one suggestion from a report written by `suggest`.
    Apply {
        #[arg(long)]
        report: PathBuf,
        /// 1-based index into the report.
        #[arg(long)]
        index: usize,
        /// Write `var` for parameter types that cannot be read off a declaration.
        #[arg(long)]
        var_fallback: bool,
    },
    /// Recall@n over an oracle corpus, repeated.
    Evaluate {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        llm: LlmArgs,
        #[command(flatten)]
        pipe: PipeArgs,
        #[arg(long, default_value_t = 30)]
        repetitions: usize,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recall@n over every temperature and iteration count; writes CSV.
    Sweep {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        llm: LlmArgs,
        #[command(flatten)]
        pipe: PipeArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recall of the raw, randomly picked and ranked pipeline variants.
    Ablation {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        llm: LlmArgs,
        #[command(flatten)]
        pipe: PipeArgs,
        #[arg(long, default_value_t = 30)]
        repetitions: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Query the model for every corpus method and store the replies.
    Record {
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        llm: LlmArgs,
        /// Record every sweep temperature with the maximum iteration count.
        #[arg(long)]
        sweep: bool,
    },
}

#[derive(Args, Clone)]
struct LlmArgs {
    /// Chat-completions endpoint URL.
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long, default_value = "gpt-4o")]
    model: String,
    #[arg(long, default_value_t = 1.2)]
    temperature: f64,
    #[arg(long, default_value_t = 10)]
    iterations: usize,
    /// Keep prompting until no new suggestion appears (at most 25 times).
    #[arg(long)]
    fixpoint: bool,
    #[arg(long, value_enum, default_value_t = CacheArg::Replay)]
    cache: CacheArg,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Answer from a scripted model instead of an endpoint.
    #[arg(long)]
    script: Option<PathBuf>,
    /// Per-request timeout in seconds.
    #[arg(long, default_value_t = 120)]
    timeout: u64,
}

#[derive(Args, Clone)]
struct PipeArgs {
    #[arg(long, default_value_t = 5)]
    top: usize,
    /// heat, popularity or combined (also t1, t2, t3).
    #[arg(long, default_value = "combined")]
    rank_strategy: Strategy,
    #[arg(long, default_value_t = 0.88)]
    max_coverage: f64,
    #[arg(long, default_value_t = 2)]
    min_statements: usize,
    #[arg(long)]
    no_enhance: bool,
    /// Percent of the host length a match may deviate by.
    #[arg(long, default_value_t = 3.0)]
    tolerance: f64,
    #[arg(long, default_value_t = 5)]
    recall_n: usize,
}

#[derive(Args, Clone)]
struct CorpusArgs {
    /// Directory with `oracle.jsonl` and `sources/`.
    #[arg(long)]
    corpus: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum CacheArg {
    Record,
    Replay,
    Live,
}

impl From<CacheArg> for CacheMode {
    fn from(c: CacheArg) -> Self {
        match c {
            CacheArg::Record => CacheMode::Record,
            CacheArg::Replay => CacheMode::Replay,
            CacheArg::Live => CacheMode::Live,
        }
    }
}

enum Failure {
    Usage(String),
    Pipeline(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Pipeline(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Resolved model access for one invocation.
struct Backend {
    params: LlmParams,
    mode: CacheMode,
    cache: Option<FixtureCache>,
    client: Option<Box<dyn LlmClient>>,
}

impl Backend {
    fn gateway(&self) -> Gateway<'_> {
        Gateway {
            mode: self.mode,
            cache: self.cache.as_ref(),
            client: self.client.as_deref(),
        }
    }
}

impl LlmArgs {
    fn backend(&self) -> Result<Backend, Failure> {
        let params = LlmParams {
            temperature: self.temperature,
            iterations: self.iterations,
            model_name: self.model.clone(),
            endpoint_url: self.endpoint.clone().unwrap_or_default(),
            request_timeout_secs: self.timeout,
            fixpoint: self.fixpoint,
        };
        params.validate().map_err(|e| usage(e.to_string()))?;
        let mode = CacheMode::from(self.cache);
        let cache = match (mode, &self.cache_dir) {
            (CacheMode::Live, _) => None,
            (_, Some(dir)) => Some(FixtureCache::new(dir)),
            (_, None) => {
                return Err(usage(format!(
                    "--cache {} requires --cache-dir",
                    mode_name(mode)
                )))
            }
        };
        let client: Option<Box<dyn LlmClient>> = match (mode, &self.script) {
            (CacheMode::Replay, _) => None,
            (_, Some(path)) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading script {}", path.display()))?;
                Some(Box::new(ScriptedClient::from_json(&text).with_context(
                    || format!("parsing script {}", path.display()),
                )?))
            }
            (_, None) => {
                let endpoint = self.endpoint.as_deref().ok_or_else(|| {
                    usage(format!(
                        "--cache {} requires --endpoint (or --script)",
                        mode_name(mode)
                    ))
                })?;
                if std::env::var(TOKEN_ENV).map_or(true, |t| t.is_empty()) {
                    return Err(usage(format!(
                        "--cache {} requires the {TOKEN_ENV} environment variable",
                        mode_name(mode)
                    )));
                }
                Some(Box::new(HttpClient::from_env(
                    endpoint,
                    &self.model,
                    Duration::from_secs(self.timeout),
                )))
            }
        };
        Ok(Backend {
            params,
            mode,
            cache,
            client,
        })
    }
}

fn mode_name(mode: CacheMode) -> &'static str {
    match mode {
        CacheMode::Record => "record",
        CacheMode::Replay => "replay",
        CacheMode::Live => "live",
    }
}

impl PipeArgs {
    fn config(&self, var_fallback: bool) -> Result<PipelineConfig, Failure> {
        let filter = FilterConfig::new(self.max_coverage, self.min_statements)
            .map_err(|e| usage(e.to_string()))?;
        if self.top == 0 || self.recall_n == 0 {
            return Err(usage("--top and --recall-n must be at least 1"));
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(usage("--tolerance must be a non-negative percentage"));
        }
        Ok(PipelineConfig {
            filter,
            strategy: self.rank_strategy,
            top_n: self.top,
            enhance: !self.no_enhance,
            plan: PlanOptions { var_fallback },
        })
    }
}

fn load_corpus(args: &CorpusArgs) -> Result<Corpus, Failure> {
    if !args.corpus.join(Corpus::ORACLE_FILE).is_file() {
        return Err(usage(format!(
            "{} has no {}",
            args.corpus.display(),
            Corpus::ORACLE_FILE
        )));
    }
    Ok(Corpus::load(&args.corpus).context("loading corpus")?)
}

fn select_method(
    file: &Path,
    line: Option<usize>,
    name: Option<&str>,
) -> Result<LongMethod, Failure> {
    let source = fs::read_to_string(file).map_err(|e| usage(format!("{}: {e}", file.display())))?;
    let found = locate_methods(&source).with_context(|| format!("scanning {}", file.display()))?;
    let chosen = match (line, name) {
        (Some(line), _) => found
            .iter()
            .filter(|m| m.span.contains(line))
            .min_by_key(|m| m.span.len())
            .ok_or_else(|| {
                usage(format!(
                    "no method encloses line {line} of {}",
                    file.display()
                ))
            })?,
        (None, Some(name)) => {
            let hits: Vec<_> = found.iter().filter(|m| m.name == name).collect();
            match hits.as_slice() {
                [one] => *one,
                [] => {
                    return Err(usage(format!(
                        "no method named `{name}` in {}",
                        file.display()
                    )))
                }
                many => {
                    let lines: Vec<_> = many.iter().map(|m| m.span.start.to_string()).collect();
                    return Err(usage(format!(
                        "`{name}` is ambiguous (lines {}); use --line",
                        lines.join(", ")
                    )));
                }
            }
        }
        (None, None) => return Err(usage("give --line or --method")),
    };
    Ok(parse_method(file, &source, chosen.span)
        .with_context(|| format!("parsing {}", chosen.name))?)
}

fn write_out(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    if let Some(p) = path {
        fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn suggest(
    file: &Path,
    line: Option<usize>,
    name: Option<&str>,
    llm: &LlmArgs,
    pipe: &PipeArgs,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let backend = llm.backend()?;
    let cfg = pipe.config(false)?;
    let method = select_method(file, line, name)?;
    let (generation, outcome) =
        run(&method, &backend.params, backend.gateway(), &cfg).map_err(anyhow::Error::from)?;
    let report = SuggestReport::build(&method, &backend.params, &cfg, &generation, &outcome);
    for d in &report.diagnostics {
        eprintln!("warning: {d}");
    }
    print!("{}", report.table());
    write_out(out, &report.to_json())?;
    Ok(())
}

fn apply(report_path: &Path, index: usize, var_fallback: bool) -> Result<(), Failure> {
    let text = fs::read_to_string(report_path)
        .map_err(|e| usage(format!("{}: {e}", report_path.display())))?;
    let report: SuggestReport = serde_json::from_str(&text).context("reading report")?;
    let entry = report
        .suggestions
        .iter()
        .find(|e| e.index == index)
        .ok_or_else(|| {
            anyhow!(
                "index {index} out of range (report has {} suggestions)",
                report.suggestions.len()
            )
        })?;
    let path = PathBuf::from(&report.file);
    let source =
        fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let stale = || {
        anyhow!(
            "{} changed since the report was written; run suggest again",
            path.display()
        )
    };
    let method = parse_method(
        &path,
        &source,
        LineSpan::new(report.host_start, report.host_end),
    )
    .map_err(|_| stale())?;
    if host_hash(&method) != report.host_sha256 {
        return Err(stale().into());
    }
    let plan = plan_extraction(&method, &entry.suggestion(), PlanOptions { var_fallback })
        .context("planning extraction")?;
    apply_to_file(&path, &plan).context("applying extraction")?;
    println!(
        "extracted lines {}-{} of {} into {}; original saved as {}.bak",
        plan.fragment.start,
        plan.fragment.end,
        report.method,
        plan.signature,
        path.display()
    );
    Ok(())
}

fn print_reports(reports: &[RecallReport], out: Option<&Path>) -> anyhow::Result<()> {
    for r in reports {
        print!("{}", r.table());
    }
    let json = if let [one] = reports {
        serde_json::to_string_pretty(one)?
    } else {
        serde_json::to_string_pretty(reports)?
    };
    write_out(out, &(json + "\n"))
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Suggest {
            file,
            line,
            method,
            llm,
            pipe,
            out,
        } => suggest(&file, line, method.as_deref(), &llm, &pipe, out.as_deref()),
        Command::Apply {
            report,
            index,
            var_fallback,
        } => apply(&report, index, var_fallback),
        Command::Evaluate {
            corpus,
            llm,
            pipe,
            repetitions,
            out,
        } => {
            let backend = llm.backend()?;
            let cfg = pipe.config(false)?;
            let corpus = load_corpus(&corpus)?;
            let report = run_experiment(
                &corpus,
                &backend.params,
                backend.gateway(),
                &cfg,
                pipe.recall_n,
                pipe.tolerance,
                repetitions,
            )
            .map_err(anyhow::Error::from)?;
            print_reports(&[report], out.as_deref())?;
            Ok(())
        }
        Command::Sweep {
            corpus,
            llm,
            pipe,
            out,
        } => {
            let backend = llm.backend()?;
            let cfg = pipe.config(false)?;
            let corpus = load_corpus(&corpus)?;
            let grid = sweep(
                &corpus,
                &backend.params,
                backend.gateway(),
                &cfg,
                &SWEEP_TEMPERATURES,
                SWEEP_MAX_ITERATIONS,
                pipe.recall_n,
                pipe.tolerance,
            )
            .map_err(anyhow::Error::from)?;
            let csv = grid.to_csv();
            match out {
                Some(p) => write_out(Some(&p), &csv)?,
                None => print!("{csv}"),
            }
            Ok(())
        }
        Command::Ablation {
            corpus,
            llm,
            pipe,
            repetitions,
            seed,
            out,
        } => {
            let backend = llm.backend()?;
            let cfg = pipe.config(false)?;
            let corpus = load_corpus(&corpus)?;
            let generations = corpus
                .generate_all(&backend.params, backend.gateway())
                .map_err(anyhow::Error::from)?;
            let reports = AblationMode::ALL
                .iter()
                .map(|&mode| {
                    ablation(
                        &corpus,
                        &generations,
                        mode,
                        &cfg,
                        pipe.recall_n,
                        pipe.tolerance,
                        repetitions,
                        seed,
                    )
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(anyhow::Error::from)?;
            print_reports(&reports, out.as_deref())?;
            Ok(())
        }
        Command::Record { corpus, llm, sweep } => {
            if !matches!(llm.cache, CacheArg::Record) {
                return Err(usage("record needs --cache record"));
            }
            let backend = llm.backend()?;
            let corpus = load_corpus(&CorpusArgs { corpus })?;
            let temps: Vec<f64> = if sweep {
                SWEEP_TEMPERATURES.to_vec()
            } else {
                vec![backend.params.temperature]
            };
            let iterations = if sweep {
                SWEEP_MAX_ITERATIONS.max(backend.params.iterations)
            } else {
                backend.params.iterations
            };
            for t in temps {
                let params = LlmParams {
                    temperature: t,
                    iterations,
                    ..backend.params.clone()
                };
                corpus
                    .generate_all(&params, backend.gateway())
                    .map_err(anyhow::Error::from)?;
                println!(
                    "recorded {} method(s) x {iterations} at temperature {t}",
                    corpus.len()
                );
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Pipeline(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
