//! Candidate generation: prompt construction, querying a model across
//! iterations, reply parsing, and the record/replay fixture cache.

pub mod cache;
pub mod client;
pub mod prompt;
pub mod response;

use std::collections::BTreeSet;
use std::io;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cache::{fixture_key, Fixture, FixtureCache};
pub use client::{HttpClient, LlmClient, ScriptedClient, TOKEN_ENV};
pub use prompt::{build_prompt, PromptBundle};
pub use response::{parse_response, ParsedResponse, RawEntry};

use crate::model::LongMethod;
use crate::suggestion::SuggestionSet;

/// Hard cap on iterations in fix-point mode.
pub const FIXPOINT_CAP: usize = 25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmParams {
    pub temperature: f64,
    pub iterations: usize,
    pub model_name: String,
    pub endpoint_url: String,
    pub request_timeout_secs: u64,
    /// Keep prompting until an iteration yields no new range (capped).
    pub fixpoint: bool,
}

impl Default for LlmParams {
    fn default() -> Self {
        Self {
            temperature: 1.2,
            iterations: 10,
            model_name: "gpt-4o".into(),
            endpoint_url: "http://localhost:8080/v1/chat/completions".into(),
            request_timeout_secs: 120,
            fixpoint: false,
        }
    }
}

impl LlmParams {
    pub fn validate(&self) -> Result<(), GenerateError> {
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(GenerateError::InvalidParams(format!(
                "temperature {} outside [0, 2]",
                self.temperature
            )));
        }
        if self.iterations == 0 {
            return Err(GenerateError::InvalidParams(
                "at least one iteration is required".into(),
            ));
        }
        Ok(())
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_secs(self.request_timeout_secs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CacheMode {
    /// Query the client and store every reply.
    Record,
    /// Serve stored replies only.
    Replay,
    /// Query the client, store nothing.
    Live,
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("iteration {iteration}: endpoint unreachable: {detail}")]
    EndpointUnreachable { iteration: usize, detail: String },
    #[error("iteration {iteration}: no recorded reply (fixture {key})")]
    MissingFixture { iteration: usize, key: String },
    #[error("fixture cache: {0}")]
    Cache(#[from] io::Error),
    #[error("{0}")]
    InvalidParams(String),
    #[error("{0:?} mode needs a {1}")]
    Misconfigured(CacheMode, &'static str),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RawResponse {
    pub iteration: usize,
    pub temperature: f64,
    pub raw_text: String,
    pub parsed: Vec<RawEntry>,
    /// Set when entries were dropped or nothing could be parsed.
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generation {
    pub set: SuggestionSet,
    pub responses: Vec<RawResponse>,
}

impl Generation {
    pub fn diagnostics(&self) -> impl Iterator<Item = (usize, &str)> {
        self.responses
            .iter()
            .filter_map(|r| r.diagnostic.as_deref().map(|d| (r.iteration, d)))
    }
}

/// Where replies come from.
#[derive(Clone, Copy)]
pub struct Gateway<'a> {
    pub mode: CacheMode,
    pub cache: Option<&'a FixtureCache>,
    pub client: Option<&'a dyn LlmClient>,
}

impl<'a> Gateway<'a> {
    pub fn replay(cache: &'a FixtureCache) -> Self {
        Self {
            mode: CacheMode::Replay,
            cache: Some(cache),
            client: None,
        }
    }

    pub fn record(cache: &'a FixtureCache, client: &'a dyn LlmClient) -> Self {
        Self {
            mode: CacheMode::Record,
            cache: Some(cache),
            client: Some(client),
        }
    }

    pub fn live(client: &'a dyn LlmClient) -> Self {
        Self {
            mode: CacheMode::Live,
            cache: None,
            client: Some(client),
        }
    }

    fn reply(
        &self,
        prompt: &PromptBundle,
        text: &str,
        temperature: f64,
        iteration: usize,
    ) -> Result<String, GenerateError> {
        let key = fixture_key(text, temperature, iteration);
        let ask = || {
            let client = self
                .client
                .ok_or(GenerateError::Misconfigured(self.mode, "client"))?;
            client
                .complete(prompt, temperature, iteration)
                .map_err(|e| GenerateError::EndpointUnreachable {
                    iteration,
                    detail: e.to_string(),
                })
        };
        match self.mode {
            CacheMode::Live => ask(),
            CacheMode::Replay => {
                let cache = self
                    .cache
                    .ok_or(GenerateError::Misconfigured(self.mode, "cache directory"))?;
                match cache.load(&key)? {
                    Some(f) => Ok(f.raw_text),
                    None => Err(GenerateError::MissingFixture { iteration, key }),
                }
            }
            CacheMode::Record => {
                let cache = self
                    .cache
                    .ok_or(GenerateError::Misconfigured(self.mode, "cache directory"))?;
                let raw_text = ask()?;
                let model = self
                    .client
                    .map_or_else(String::new, |c| c.model().to_string());
                cache.store(&Fixture {
                    key,
                    prompt_sha256: cache::prompt_hash(text),
                    temperature,
                    iteration,
                    model,
                    raw_text: raw_text.clone(),
                })?;
                Ok(raw_text)
            }
        }
    }
}

/// Prompt the model `params.iterations` times (or to a fix point) and
/// collect every parsed suggestion with its occurrence count. Unparseable
/// replies are skipped and noted.
pub fn generate(
    method: &LongMethod,
    params: &LlmParams,
    gateway: Gateway<'_>,
) -> Result<Generation, GenerateError> {
    params.validate()?;
    let prompt = build_prompt(method);
    let text = prompt.render();
    let rounds = if params.fixpoint {
        FIXPOINT_CAP
    } else {
        params.iterations
    };
    let mut set = SuggestionSet::new();
    let mut responses = Vec::with_capacity(rounds);
    for iteration in 0..rounds {
        let raw_text = gateway.reply(&prompt, &text, params.temperature, iteration)?;
        let parsed = parse_response(&raw_text);
        let before: BTreeSet<_> = set.entries().iter().map(|s| s.key()).collect();
        if !parsed.failed {
            for e in &parsed.entries {
                set.add(&e.name, e.start_line, e.end_line, 1);
            }
        }
        let diagnostic = (!parsed.diagnostics.is_empty()).then(|| parsed.diagnostics.join("; "));
        let grew = set.len() > before.len();
        responses.push(RawResponse {
            iteration,
            temperature: params.temperature,
            raw_text,
            parsed: if parsed.failed {
                Vec::new()
            } else {
                parsed.entries
            },
            diagnostic,
        });
        if params.fixpoint && !grew && iteration > 0 {
            break;
        }
    }
    Ok(Generation { set, responses })
}
