//! Model back ends: a chat-completions HTTP endpoint, and a deterministic
//! scripted stand-in used to record fixtures offline.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::prompt::PromptBundle;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClientError {
    #[error("endpoint unreachable: {0}")]
    Unreachable(String),
    #[error("unexpected reply shape: {0}")]
    Protocol(String),
    #[error("no scripted replies for {0}")]
    NoScript(String),
}

pub trait LlmClient: Sync {
    fn model(&self) -> &str;

    /// One completion for `prompt` at `temperature`. `iteration` only
    /// matters to deterministic back ends.
    fn complete(
        &self,
        prompt: &PromptBundle,
        temperature: f64,
        iteration: usize,
    ) -> Result<String, ClientError>;
}

/// Bearer token for live requests.
pub const TOKEN_ENV: &str = "EXMETH_API_TOKEN";

pub struct HttpClient {
    agent: ureq::Agent,
    endpoint: String,
    model: String,
    token: Option<String>,
}

impl HttpClient {
    pub fn new(endpoint: &str, model: &str, timeout: Duration, token: Option<String>) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        Self {
            agent,
            endpoint: endpoint.to_string(),
            model: model.to_string(),
            token,
        }
    }

    /// Token taken from the environment.
    pub fn from_env(endpoint: &str, model: &str, timeout: Duration) -> Self {
        Self::new(
            endpoint,
            model,
            timeout,
            std::env::var(TOKEN_ENV).ok().filter(|t| !t.is_empty()),
        )
    }
}

impl LlmClient for HttpClient {
    fn model(&self) -> &str {
        &self.model
    }

    fn complete(
        &self,
        prompt: &PromptBundle,
        temperature: f64,
        _iteration: usize,
    ) -> Result<String, ClientError> {
        let body = json!({
            "model": self.model,
            "temperature": temperature,
            "messages": prompt.messages(),
        });
        let mut req = self
            .agent
            .post(&self.endpoint)
            .header("Content-Type", "application/json");
        if let Some(t) = &self.token {
            req = req.header("Authorization", format!("Bearer {t}"));
        }
        let mut resp = req
            .send_json(&body)
            .map_err(|e| ClientError::Unreachable(e.to_string()))?;
        let reply: Value = resp
            .body_mut()
            .read_json()
            .map_err(|e| ClientError::Protocol(e.to_string()))?;
        reply["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| ClientError::Protocol("missing choices[0].message.content".into()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub name: String,
    pub start: usize,
    pub end: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodScript {
    /// Fixed reply per iteration (cycled).
    Canned(Vec<String>),
    /// Replies sampled from a weighted pool; sharper at low temperature.
    Sampled(Vec<Candidate>),
}

/// Scripts keyed by `<file name>:<first line of the method>`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Script {
    pub methods: BTreeMap<String, MethodScript>,
}

pub struct ScriptedClient {
    script: Script,
    model: String,
}

impl ScriptedClient {
    pub fn new(script: Script) -> Self {
        Self {
            script,
            model: "scripted".into(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        Ok(Self::new(serde_json::from_str(text)?))
    }

    pub fn key(prompt: &PromptBundle) -> String {
        format!("{}:{}", prompt.target_file, prompt.target.start)
    }
}

impl LlmClient for ScriptedClient {
    fn model(&self) -> &str {
        &self.model
    }

    fn complete(
        &self,
        prompt: &PromptBundle,
        temperature: f64,
        iteration: usize,
    ) -> Result<String, ClientError> {
        let key = Self::key(prompt);
        match self.script.methods.get(&key) {
            Some(MethodScript::Canned(replies)) if !replies.is_empty() => {
                Ok(replies[iteration % replies.len()].clone())
            }
            Some(MethodScript::Sampled(pool)) if !pool.is_empty() => {
                Ok(sample_reply(&key, pool, temperature, iteration))
            }
            _ => Err(ClientError::NoScript(key)),
        }
    }
}

fn sample_reply(key: &str, pool: &[Candidate], temperature: f64, iteration: usize) -> String {
    let mut h = Sha256::new();
    h.update(key.as_bytes());
    h.update(format!("|{temperature:.3}|{iteration}").as_bytes());
    let mut rng = ChaCha8Rng::from_seed(h.finalize().into());

    if rng.random_ratio(1, 25) {
        return "I could not identify a clear extraction in this method.".into();
    }
    let sharpness = 1.0 / temperature.max(0.05);
    let mut weights: Vec<f64> = pool
        .iter()
        .map(|c| c.weight.max(0.0).powf(sharpness))
        .collect();
    let picks = rng.random_range(3..=5).min(pool.len());
    let mut chosen = Vec::with_capacity(picks);
    for _ in 0..picks {
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            break;
        }
        let mut r = rng.random::<f64>() * total;
        let idx = weights
            .iter()
            .position(|w| {
                r -= w;
                r < 0.0
            })
            .unwrap_or_else(|| weights.iter().rposition(|w| *w > 0.0).unwrap_or(0));
        weights[idx] = 0.0;
        chosen.push(&pool[idx]);
    }

    let list = |name_key: &str, start_key: &str, end_key: &str| {
        let items: Vec<Value> = chosen
            .iter()
            .map(|c| json!({ name_key: c.name, start_key: c.start, end_key: c.end }))
            .collect();
        serde_json::to_string_pretty(&items).expect("plain values serialize")
    };
    match rng.random_range(0..6) {
        0..=2 => list("function_name", "line_start", "line_end"),
        3 => format!(
            "Here are the extraction candidates I found:\n\n```json\n{}\n```\n",
            list("function_name", "line_start", "line_end")
        ),
        4 => list("name", "start_line", "end_line"),
        _ => {
            let mut out = String::from("Suggested extractions:\n");
            for (k, c) in chosen.iter().enumerate() {
                let _ = writeln!(out, "{}. {}: lines {}-{}", k + 1, c.name, c.start, c.end);
            }
            out
        }
    }
}
