//! Entailment scoring of (context, hypothesis) pairs.
//!
//! [`BaselineScorer`] is a lexical-overlap stand-in that needs no model;
//! [`RemoteScorer`] calls a model service over the `/score` protocol:
//!
//! ```text
//! POST /score   {"pairs": [{"context": "...", "hypothesis": "..."}]}
//! 200           {"probabilities": [0.97, ...]}
//! ```

use std::collections::HashSet;
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use reqwest::blocking::Client;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::TdmTriple;
use crate::replay::{self, ReplayMode};

pub const SCORE_PATH: &str = "/score";
pub const HYPOTHESIS_SEPARATOR: &str = " : ";

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("cannot render the Unknown label as a hypothesis")]
    UnknownTriple,
    #[error("score request has an empty {0}")]
    EmptyField(&'static str),
    #[error("scoring endpoint unreachable: {0}")]
    EndpointUnreachable(String),
    #[error("scoring endpoint returned HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("unexpected response from scoring endpoint: {0}")]
    Schema(String),
    #[error("scoring request timed out after {0:?}")]
    Timeout(Duration),
    #[error("no recorded response for request {0}")]
    ReplayMiss(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreRequest {
    pub context: String,
    pub hypothesis: String,
}

impl ScoreRequest {
    pub fn new(context: impl Into<String>, hypothesis: impl Into<String>) -> Result<Self, ScoreError> {
        let req = ScoreRequest {
            context: context.into(),
            hypothesis: hypothesis.into(),
        };
        req.validate()?;
        Ok(req)
    }

    fn validate(&self) -> Result<(), ScoreError> {
        if self.context.trim().is_empty() {
            return Err(ScoreError::EmptyField("context"));
        }
        if self.hypothesis.trim().is_empty() {
            return Err(ScoreError::EmptyField("hypothesis"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreResult {
    pub probability_true: f64,
}

/// `task : dataset : metric`.
pub fn render_hypothesis(triple: &TdmTriple) -> Result<String, ScoreError> {
    if triple.is_unknown() {
        return Err(ScoreError::UnknownTriple);
    }
    Ok([triple.task(), triple.dataset(), triple.metric()].join(HYPOTHESIS_SEPARATOR))
}

pub trait Scorer: Send + Sync {
    fn name(&self) -> &str;

    /// Largest batch the scorer accepts in one call.
    fn max_batch(&self) -> usize {
        64
    }

    /// Probabilities in request order.
    fn score_batch(&self, requests: &[ScoreRequest]) -> Result<Vec<ScoreResult>, ScoreError>;
}

/// Lowercased maximal alphanumeric runs.
pub fn word_tokens(text: &str) -> HashSet<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Fraction of hypothesis words that occur in the context.
pub fn score_baseline(req: &ScoreRequest) -> ScoreResult {
    let hypothesis = word_tokens(&req.hypothesis);
    if hypothesis.is_empty() {
        return ScoreResult {
            probability_true: 0.0,
        };
    }
    let context = word_tokens(&req.context);
    let hits = hypothesis.iter().filter(|w| context.contains(*w)).count();
    ScoreResult {
        probability_true: hits as f64 / hypothesis.len() as f64,
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BaselineScorer;

impl Scorer for BaselineScorer {
    fn name(&self) -> &str {
        "baseline"
    }

    fn max_batch(&self) -> usize {
        usize::MAX
    }

    fn score_batch(&self, requests: &[ScoreRequest]) -> Result<Vec<ScoreResult>, ScoreError> {
        requests
            .iter()
            .map(|r| r.validate().map(|_| score_baseline(r)))
            .collect()
    }
}

#[derive(Serialize)]
struct WireRequest<'a> {
    pairs: &'a [ScoreRequest],
}

#[derive(Deserialize)]
struct WireResponse {
    probabilities: Vec<f64>,
}

/// Serialize a batch exactly as sent on the wire.
pub fn encode_request(requests: &[ScoreRequest]) -> Vec<u8> {
    serde_json::to_vec(&WireRequest { pairs: requests }).expect("request serializes")
}

/// Parse and check a `/score` response body against the batch size.
pub fn decode_response(body: &str, expected: usize) -> Result<Vec<ScoreResult>, ScoreError> {
    let parsed: WireResponse =
        serde_json::from_str(body).map_err(|e| ScoreError::Schema(e.to_string()))?;
    if parsed.probabilities.len() != expected {
        return Err(ScoreError::Schema(format!(
            "expected {expected} probabilities, got {}",
            parsed.probabilities.len()
        )));
    }
    parsed
        .probabilities
        .into_iter()
        .map(|p| {
            if p.is_finite() && (0.0..=1.0).contains(&p) {
                Ok(ScoreResult {
                    probability_true: p,
                })
            } else {
                Err(ScoreError::Schema(format!("probability {p} outside [0, 1]")))
            }
        })
        .collect()
}

/// Counting semaphore bounding concurrent in-flight batches.
#[derive(Debug)]
struct Permits {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Permits {
    fn new(n: usize) -> Self {
        Permits {
            free: Mutex::new(n.max(1)),
            cv: Condvar::new(),
        }
    }

    fn acquire(&self) -> PermitGuard<'_> {
        let mut free = self.free.lock().unwrap_or_else(|e| e.into_inner());
        while *free == 0 {
            free = self.cv.wait(free).unwrap_or_else(|e| e.into_inner());
        }
        *free -= 1;
        PermitGuard(self)
    }
}

struct PermitGuard<'a>(&'a Permits);

impl Drop for PermitGuard<'_> {
    fn drop(&mut self) {
        let mut free = self.0.free.lock().unwrap_or_else(|e| e.into_inner());
        *free += 1;
        self.0.cv.notify_one();
    }
}

#[derive(Debug, Clone)]
pub struct RemoteConfig {
    pub endpoint: String,
    pub max_batch: usize,
    pub timeout: Duration,
    pub retries: u32,
    pub backoff: Duration,
    pub max_concurrent: usize,
    /// Sent as a bearer token when set.
    pub token: Option<String>,
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        RemoteConfig {
            endpoint: endpoint.into(),
            max_batch: 64,
            timeout: Duration::from_secs(30),
            retries: 2,
            backoff: Duration::from_millis(200),
            max_concurrent: 4,
            token: None,
        }
    }
}

/// Client for a model service speaking the `/score` protocol. Shareable
/// across threads; retries are safe because scoring is read-only.
#[derive(Debug)]
pub struct RemoteScorer {
    cfg: RemoteConfig,
    client: Client,
    permits: Permits,
    replay: Option<ReplayMode>,
}

impl RemoteScorer {
    pub fn new(cfg: RemoteConfig) -> Result<Self, ScoreError> {
        let client = Client::builder()
            .timeout(cfg.timeout)
            .build()
            .map_err(|e| ScoreError::EndpointUnreachable(e.to_string()))?;
        Ok(RemoteScorer {
            permits: Permits::new(cfg.max_concurrent),
            cfg,
            client,
            replay: None,
        })
    }

    pub fn with_replay(mut self, mode: ReplayMode) -> Self {
        self.replay = Some(mode);
        self
    }

    fn url(&self) -> String {
        format!("{}{}", self.cfg.endpoint.trim_end_matches('/'), SCORE_PATH)
    }

    fn post_once(&self, body: &[u8]) -> Result<String, ScoreError> {
        let mut req = self
            .client
            .post(self.url())
            .header(reqwest::header::CONTENT_TYPE, "application/json")
            .body(body.to_vec());
        if let Some(token) = &self.cfg.token {
            req = req.bearer_auth(token);
        }
        let response = req.send().map_err(|e| self.transport_error(e))?;
        let status = response.status();
        let text = response.text().map_err(|e| self.transport_error(e))?;
        if !status.is_success() {
            return Err(ScoreError::Http {
                status: status.as_u16(),
                body: text,
            });
        }
        Ok(text)
    }

    fn transport_error(&self, e: reqwest::Error) -> ScoreError {
        if e.is_timeout() {
            ScoreError::Timeout(self.cfg.timeout)
        } else {
            ScoreError::EndpointUnreachable(e.to_string())
        }
    }

    fn post_with_retries(&self, body: &[u8]) -> Result<String, ScoreError> {
        let mut attempt = 0;
        loop {
            match self.post_once(body) {
                Err(e) if attempt < self.cfg.retries && retryable(&e) => {
                    std::thread::sleep(self.cfg.backoff * 2u32.pow(attempt));
                    attempt += 1;
                }
                other => return other,
            }
        }
    }

    fn score_chunk(&self, chunk: &[ScoreRequest]) -> Result<Vec<ScoreResult>, ScoreError> {
        let body = encode_request(chunk);
        let key = replay::request_key(SCORE_PATH, &body);
        let text = match &self.replay {
            Some(ReplayMode::Replay(dir)) => {
                replay::load(dir, &key).ok_or_else(|| ScoreError::ReplayMiss(key.clone()))?
            }
            _ => {
                let _permit = self.permits.acquire();
                self.post_with_retries(&body)?
            }
        };
        let results = decode_response(&text, chunk.len())?;
        if let Some(ReplayMode::Record(dir)) = &self.replay {
            replay::store(dir, &key, &text)?;
        }
        Ok(results)
    }
}

fn retryable(e: &ScoreError) -> bool {
    match e {
        ScoreError::EndpointUnreachable(_) | ScoreError::Timeout(_) => true,
        ScoreError::Http { status, .. } => *status >= 500,
        _ => false,
    }
}

impl Scorer for RemoteScorer {
    fn name(&self) -> &str {
        "remote"
    }

    fn max_batch(&self) -> usize {
        self.cfg.max_batch.max(1)
    }

    fn score_batch(&self, requests: &[ScoreRequest]) -> Result<Vec<ScoreResult>, ScoreError> {
        for r in requests {
            r.validate()?;
        }
        let mut out = Vec::with_capacity(requests.len());
        for chunk in requests.chunks(self.max_batch()) {
            out.extend(self.score_chunk(chunk)?);
        }
        Ok(out)
    }
}
