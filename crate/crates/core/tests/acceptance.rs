//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.

mod common;

use std::path::Path;
use std::time::{Duration, Instant};

use exmeth::eval::{ablation, recall_at_n, run_experiment, AblationMode, Corpus};
use exmeth::llm::{FixtureCache, Gateway, LlmParams};
use exmeth::pipeline::{run, PipelineConfig, VerdictCounts};
use exmeth::rank::{build_heatmap, rank, Strategy};
use exmeth::{parse_method, ExtractSuggestion, LineSpan};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

const MOTIVATING_BUDGET: Duration = Duration::from_secs(1);
const EVALUATE_BUDGET: Duration = Duration::from_secs(30);
const REPETITIONS: usize = 30;
const PINNED_RECALL: f64 = 0.80;
const RECALL_EPS: f64 = 1e-12;
const RANDOM_INSTANCES: usize = 1000;

type Outcome = Result<String, String>;

fn motivating_example() -> Outcome {
    let dir = Path::new(FIXTURES).join("motivating");
    let src = std::fs::read_to_string(dir.join("EntityStore.java")).map_err(|e| e.to_string())?;
    let cache = FixtureCache::new(dir.join("cache"));
    let started = Instant::now();
    let m = parse_method("EntityStore.java", &src, LineSpan::new(150, 166))
        .map_err(|e| e.to_string())?;
    let (g, out) = run(
        &m,
        &LlmParams::default(),
        Gateway::replay(&cache),
        &PipelineConfig::default(),
    )
    .map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    let c = VerdictCounts::of(&out.triage);
    let useful = out
        .triage
        .of_class(exmeth::VerdictClass::Applicable)
        .any(|(s, _)| s.key() == (157, 158));
    let top3: Vec<_> = out.top(3).iter().map(|s| s.key()).collect();
    let detail = format!(
        "{} suggestions: {} invalid / {} not useful / {} useful; top3 {:?}; {:.1} ms",
        g.set.len(),
        c.invalid,
        c.not_useful,
        c.useful,
        top3,
        elapsed.as_secs_f64() * 1e3
    );
    let ok = (c.total, c.invalid, c.not_useful, c.useful) == (9, 3, 3, 3)
        && useful
        && top3.contains(&(157, 158))
        && elapsed < MOTIVATING_BUDGET;
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn filtering_oracle() -> Outcome {
    let r = common::filter_oracle(7, 400, 5);
    let detail = format!(
        "{} instances, {} mismatches",
        r.instances,
        r.mismatches.len()
    );
    if r.instances >= RANDOM_INSTANCES && r.mismatches.is_empty() {
        Ok(detail)
    } else {
        Err(format!(
            "{detail}; first: {}",
            r.mismatches
                .first()
                .map_or("", |s| s.lines().next().unwrap_or(""))
        ))
    }
}

fn coverage_boundary() -> Outcome {
    let failures: Vec<String> = (3..=200)
        .filter_map(|n| common::boundary_holds(n).err())
        .collect();
    match failures.first() {
        None => Ok("sizes 3..=200: at cutoff rejected, one below accepted".into()),
        Some(f) => Err(format!("{} sizes fail; first: {f}", failures.len())),
    }
}

fn recall_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut bad = Vec::new();
    for k in 0..RANDOM_INSTANCES {
        let (results, oracle) = common::random_corpus(&mut rng);
        let n = rng.random_range(1..8);
        let m = rng.random_range(0..12);
        let r = |n: usize, m: usize| recall_at_n(&results, &oracle, n, m as f64).unwrap();
        if r(n, m) != common::brute_recall(&results, &oracle, n, m) {
            bad.push(format!("corpus {k}: n={n} m={m} differs"));
        }
        if r(n, m) > r(n + 1, m) || r(n, m) > r(n, m + 1) {
            bad.push(format!("corpus {k}: not monotone at n={n} m={m}"));
        }
    }
    if bad.is_empty() {
        Ok(format!(
            "{RANDOM_INSTANCES} corpora agree, monotone in n and m"
        ))
    } else {
        Err(format!("{} problems; first: {}", bad.len(), bad[0]))
    }
}

fn ranking_identities() -> Outcome {
    let host = common::flat_method(200);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut bad = Vec::new();
    for k in 0..RANDOM_INSTANCES {
        let raw: Vec<(usize, usize, u32)> = (0..rng.random_range(1..30))
            .map(|_| {
                let (a, b) = (rng.random_range(2..=201), rng.random_range(2..=201));
                (a.min(b), a.max(b), rng.random_range(1..10))
            })
            .collect();
        let set: Vec<_> = raw
            .iter()
            .map(|&(a, b, c)| ExtractSuggestion::new("s", a, b).with_count(c))
            .collect();
        let h = build_heatmap(&host, &set);
        let freq = |l: usize| {
            raw.iter()
                .filter(|(a, b, _)| (*a..=*b).contains(&l))
                .count() as u64
        };
        let heat_sum: u64 = set.iter().map(|s| h.heat(s)).sum();
        let squares: u64 = (1..=202).map(|l| freq(l) * freq(l)).sum();
        if heat_sum != squares {
            bad.push(format!("set {k}: heat sum {heat_sum} != {squares}"));
        }
        let c = rng.random_range(2..50);
        let scaled: Vec<_> = set
            .iter()
            .map(|s| s.clone().with_count(s.count * c))
            .collect();
        let order = |v: &[ExtractSuggestion]| -> Vec<_> {
            rank(&host, v, Strategy::Combined)
                .iter()
                .map(|r| r.suggestion.key())
                .collect()
        };
        if order(&set) != order(&scaled) {
            bad.push(format!("set {k}: order changes when counts scale by {c}"));
        }
    }
    if bad.is_empty() {
        Ok(format!(
            "{RANDOM_INSTANCES} sets: heat double count and scaling invariance hold"
        ))
    } else {
        Err(format!("{} problems; first: {}", bad.len(), bad[0]))
    }
}

fn enhancement() -> Outcome {
    let r = common::enhancement_check(5000, 150);
    let detail = format!(
        "{} ranges, {} moved, {} failures",
        r.checked,
        r.moved,
        r.failures.len()
    );
    if r.failures.is_empty() && r.moved > 0 {
        Ok(detail)
    } else {
        Err(format!(
            "{detail}; first: {}",
            r.failures
                .first()
                .map_or("", |s| s.lines().next().unwrap_or(""))
        ))
    }
}

fn corpus() -> Result<Corpus, String> {
    Corpus::load(&Path::new(FIXTURES).join("corpus")).map_err(|e| e.to_string())
}

fn extraction_round_trip() -> Outcome {
    let c = corpus()?;
    let r = common::corpus_round_trip(&c);
    let detail = format!(
        "{} applicable ranges over {} hosts, {} failures",
        r.checked,
        c.len(),
        r.failures.len()
    );
    if r.failures.is_empty() && r.checked > 0 {
        Ok(detail)
    } else {
        Err(format!("{detail}; first: {}", r.failures[0]))
    }
}

fn determinism() -> Outcome {
    let c = corpus()?;
    let cache = FixtureCache::new(c.root.join("cache"));
    let started = Instant::now();
    let report = run_experiment(
        &c,
        &LlmParams::default(),
        Gateway::replay(&cache),
        &PipelineConfig::default(),
        5,
        3.0,
        REPETITIONS,
    )
    .map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    let detail = format!(
        "Recall@5@3% = {:.4} (pinned {PINNED_RECALL}), stddev {} over {REPETITIONS} runs, {:.2} s",
        report.mean,
        report.stddev,
        elapsed.as_secs_f64()
    );
    let ok = (report.mean - PINNED_RECALL).abs() < RECALL_EPS
        && report.stddev == 0.0
        && report.runs.len() == REPETITIONS
        && elapsed < EVALUATE_BUDGET;
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ablation_order() -> Outcome {
    let c = corpus()?;
    let cache = FixtureCache::new(c.root.join("cache"));
    let generations = c
        .generate_all(&LlmParams::default(), Gateway::replay(&cache))
        .map_err(|e| e.to_string())?;
    let cfg = PipelineConfig::default();
    let mut means = Vec::new();
    for mode in AblationMode::ALL {
        let r = ablation(&c, &generations, mode, &cfg, 5, 3.0, REPETITIONS, 42)
            .map_err(|e| e.to_string())?;
        means.push((mode.label(), r.mean));
    }
    let detail = means
        .iter()
        .map(|(l, m)| format!("{l} {m:.4}"))
        .collect::<Vec<_>>()
        .join(", ");
    let (raw, random, ranked) = (means[0].1, means[1].1, means[2].1);
    if ranked >= random && random >= raw {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    type Check = (&'static str, fn() -> Outcome);
    let criteria: [Check; 9] = [
        ("motivating example triage and ranking", motivating_example),
        ("filtering matches brute force", filtering_oracle),
        ("88% coverage boundary", coverage_boundary),
        ("recall matches brute force", recall_oracle),
        ("ranking identities", ranking_identities),
        ("enhancement safety", enhancement),
        ("extraction round trip", extraction_round_trip),
        ("replay determinism", determinism),
        ("ablation ordering", ablation_order),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS [{}] {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{}] {name}: {detail}", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
