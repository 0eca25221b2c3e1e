//! Heat, popularity, and combined ranking of applicable suggestions.

use std::cmp::Reverse;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::{LineSpan, LongMethod};
use crate::suggestion::ExtractSuggestion;

/// Per-line count of how many applicable suggestions cover the line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeatMap {
    span: LineSpan,
    freq: Vec<u32>,
}

impl HeatMap {
    /// Frequency of `line`; zero for lines nobody covers.
    pub fn at(&self, line: usize) -> u32 {
        if !self.span.contains(line) {
            return 0;
        }
        self.freq[line - self.span.start]
    }

    /// Sum of frequencies over the lines of `s`.
    pub fn heat(&self, s: &ExtractSuggestion) -> u64 {
        (s.start_line..=s.end_line)
            .map(|l| u64::from(self.at(l)))
            .sum()
    }

    pub fn total(&self) -> u64 {
        self.freq.iter().map(|f| u64::from(*f)).sum()
    }

    /// `(line, frequency)` for every line of the host method.
    pub fn lines(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.freq
            .iter()
            .enumerate()
            .map(|(k, f)| (self.span.start + k, *f))
    }
}

pub fn build_heatmap(host: &LongMethod, applicable: &[ExtractSuggestion]) -> HeatMap {
    let span = host.span();
    let lo = applicable
        .iter()
        .map(|s| s.start_line)
        .min()
        .map_or(span.start, |m| m.min(span.start));
    let hi = applicable
        .iter()
        .map(|s| s.end_line)
        .max()
        .map_or(span.end, |m| m.max(span.end));
    let span = LineSpan::new(lo, hi);
    let mut freq = vec![0u32; span.len()];
    for s in applicable {
        for line in s.start_line..=s.end_line {
            freq[line - span.start] += 1;
        }
    }
    HeatMap { span, freq }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Heat only.
    Heat,
    /// Occurrence count only.
    Popularity,
    /// Heat times occurrence count.
    #[default]
    Combined,
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "heat" | "t1" | "T1" => Ok(Strategy::Heat),
            "popularity" | "t2" | "T2" => Ok(Strategy::Popularity),
            "combined" | "t3" | "T3" => Ok(Strategy::Combined),
            other => Err(format!("unknown rank strategy `{other}`")),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Heat => "heat",
            Strategy::Popularity => "popularity",
            Strategy::Combined => "combined",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RankScore {
    pub heat: u64,
    pub popularity: u64,
    pub combined: u64,
}

impl RankScore {
    pub fn get(&self, strategy: Strategy) -> u64 {
        match strategy {
            Strategy::Heat => self.heat,
            Strategy::Popularity => self.popularity,
            Strategy::Combined => self.combined,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranked {
    pub suggestion: ExtractSuggestion,
    pub score: RankScore,
}

/// Order by the chosen score, descending. Ties go to the more popular, then
/// the longer, then the earlier fragment.
pub fn score(
    applicable: &[ExtractSuggestion],
    heatmap: &HeatMap,
    strategy: Strategy,
) -> Vec<Ranked> {
    let mut out: Vec<Ranked> = applicable
        .iter()
        .map(|s| {
            let heat = heatmap.heat(s);
            let popularity = u64::from(s.count);
            Ranked {
                suggestion: s.clone(),
                score: RankScore {
                    heat,
                    popularity,
                    combined: heat * popularity,
                },
            }
        })
        .collect();
    out.sort_by_key(|r| {
        let s = &r.suggestion;
        (
            Reverse(r.score.get(strategy)),
            Reverse(r.score.popularity),
            Reverse(s.end_line - s.start_line),
            s.start_line,
            s.end_line,
            s.name.clone(),
        )
    });
    out
}

pub fn top_n(ordered: &[Ranked], n: usize) -> &[Ranked] {
    &ordered[..n.min(ordered.len())]
}

/// Heat map plus scoring in one call.
pub fn rank(
    host: &LongMethod,
    applicable: &[ExtractSuggestion],
    strategy: Strategy,
) -> Vec<Ranked> {
    score(applicable, &build_heatmap(host, applicable), strategy)
}
