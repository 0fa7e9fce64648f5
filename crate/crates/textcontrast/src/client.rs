//! HTTP client for an external text-completion endpoint.

use std::time::Duration;

use futures::stream::{self, StreamExt};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::archive::Prompt;

/// Environment variable holding the bearer credential, if any.
pub const CREDENTIAL_ENV: &str = "TEXTCONTRAST_API_KEY";

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("invalid generation parameters: {0}")]
    InvalidParams(String),
    #[error("empty prompt")]
    EmptyPrompt,
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("rate limited (HTTP 429)")]
    RateLimited,
    #[error("server error {status}: {body}")]
    Server { status: u16, body: String },
    #[error("request rejected with HTTP {status}: {body}")]
    Rejected { status: u16, body: String },
    #[error("response has no completion text: {0}")]
    MissingText(String),
    #[error("gave up after {attempts} attempts: {last}")]
    Exhausted { attempts: u32, last: Box<ClientError> },
}

impl ClientError {
    pub fn is_retryable(&self) -> bool {
        matches!(
            self,
            ClientError::Transport(_) | ClientError::RateLimited | ClientError::Server { .. }
        )
    }
}

/// Sampling configuration sent with every request.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationParams {
    pub temperature: f64,
    pub top_p: f64,
    pub repetition_penalty: f64,
    #[serde(rename = "max_tokens")]
    pub max_new_tokens: u32,
}

impl Default for GenerationParams {
    fn default() -> Self {
        GenerationParams {
            temperature: 0.7,
            top_p: 0.9,
            repetition_penalty: 1.1,
            max_new_tokens: 200,
        }
    }
}

impl GenerationParams {
    pub fn validate(&self) -> Result<(), ClientError> {
        let bad = |m: &str| Err(ClientError::InvalidParams(m.into()));
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return bad("temperature must be a non-negative number");
        }
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return bad("top_p must lie in (0, 1]");
        }
        if !(self.repetition_penalty >= 1.0 && self.repetition_penalty.is_finite()) {
            return bad("repetition_penalty must be at least 1");
        }
        if self.max_new_tokens == 0 {
            return bad("max_new_tokens must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay: Duration,
    pub max_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 5,
            base_delay: Duration::from_secs(1),
            max_delay: Duration::from_secs(60),
        }
    }
}

impl RetryPolicy {
    /// Wait after failed attempt `attempt` (1-based): exponential in the
    /// attempt number, scaled into `[0.5, 1)` by a hash of `key` so that
    /// concurrent requests spread out without a random source.
    pub fn delay(&self, attempt: u32, key: &str) -> Duration {
        let exp = self.base_delay.saturating_mul(1u32 << attempt.saturating_sub(1).min(16));
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in key.bytes().chain(attempt.to_le_bytes()) {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        let frac = (h >> 11) as f64 / (1u64 << 53) as f64;
        exp.mul_f64(0.5 + 0.5 * frac).min(self.max_delay)
    }
}

#[derive(Clone, Debug)]
pub struct EndpointConfig {
    /// Full URL the JSON body is POSTed to.
    pub url: String,
    pub model: String,
    pub credential: Option<String>,
    pub timeout: Duration,
    pub retry: RetryPolicy,
}

impl EndpointConfig {
    pub fn new(url: &str, model: &str) -> Self {
        EndpointConfig {
            url: url.into(),
            model: model.into(),
            credential: None,
            timeout: Duration::from_secs(120),
            retry: RetryPolicy::default(),
        }
    }

    /// Reads the credential from [`CREDENTIAL_ENV`] when set.
    pub fn with_env_credential(mut self) -> Self {
        self.credential = std::env::var(CREDENTIAL_ENV).ok().filter(|s| !s.is_empty());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratedDoc {
    pub doc_id: String,
    pub prompt: String,
    pub completion: String,
    pub model_name: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generation {
    pub doc: GeneratedDoc,
    pub attempts: u32,
}

#[derive(Serialize)]
struct CompletionRequest<'a> {
    model: &'a str,
    prompt: &'a str,
    #[serde(flatten)]
    params: &'a GenerationParams,
}

/// First `max` whitespace-delimited words of `text`, original spacing kept.
pub fn truncate_words(text: &str, max: usize) -> &str {
    let mut words = 0;
    let mut in_word = false;
    for (i, ch) in text.char_indices() {
        if ch.is_whitespace() {
            if in_word && words == max {
                return &text[..i];
            }
            in_word = false;
        } else if !in_word {
            in_word = true;
            words += 1;
        }
    }
    text
}

fn completion_text(body: &Value) -> Option<&str> {
    body.pointer("/choices/0/text")
        .or_else(|| body.get("text"))
        .and_then(Value::as_str)
}

pub struct CompletionClient {
    http: reqwest::Client,
    config: EndpointConfig,
}

impl CompletionClient {
    pub fn new(config: EndpointConfig) -> Result<Self, ClientError> {
        let http = reqwest::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| ClientError::Transport(e.to_string()))?;
        Ok(CompletionClient { http, config })
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.config
    }

    async fn attempt(&self, prompt: &str, params: &GenerationParams) -> Result<String, ClientError> {
        let body = CompletionRequest {
            model: &self.config.model,
            prompt,
            params,
        };
        let mut req = self.http.post(&self.config.url).json(&body);
        if let Some(key) = &self.config.credential {
            req = req.bearer_auth(key);
        }
        let resp = req.send().await.map_err(|e| ClientError::Transport(e.to_string()))?;
        let status = resp.status();
        let text = resp.text().await.map_err(|e| ClientError::Transport(e.to_string()))?;
        match status.as_u16() {
            429 => return Err(ClientError::RateLimited),
            s if status.is_server_error() => return Err(ClientError::Server { status: s, body: text }),
            s if !status.is_success() => return Err(ClientError::Rejected { status: s, body: text }),
            _ => {}
        }
        let json: Value = serde_json::from_str(&text).map_err(|_| ClientError::MissingText(text.clone()))?;
        let out = completion_text(&json).ok_or_else(|| ClientError::MissingText(text.clone()))?;
        Ok(truncate_words(out, params.max_new_tokens as usize).to_owned())
    }

    /// Runs one prompt with retries, returning the error together with the
    /// number of attempts made.
    async fn run(
        &self,
        doc_id: &str,
        prompt: &str,
        params: &GenerationParams,
    ) -> Result<Generation, (ClientError, u32)> {
        if prompt.trim().is_empty() {
            return Err((ClientError::EmptyPrompt, 0));
        }
        params.validate().map_err(|e| (e, 0))?;
        let policy = self.config.retry;
        let mut attempts = 0;
        loop {
            attempts += 1;
            match self.attempt(prompt, params).await {
                Ok(completion) => {
                    return Ok(Generation {
                        doc: GeneratedDoc {
                            doc_id: doc_id.into(),
                            prompt: prompt.into(),
                            completion,
                            model_name: self.config.model.clone(),
                        },
                        attempts,
                    })
                }
                Err(e) if e.is_retryable() && attempts < policy.max_attempts => {
                    let wait = policy.delay(attempts, doc_id);
                    log::debug!("{doc_id}: attempt {attempts} failed ({e}), retrying in {wait:?}");
                    tokio::time::sleep(wait).await;
                }
                Err(e) if e.is_retryable() => {
                    return Err((
                        ClientError::Exhausted {
                            attempts,
                            last: Box::new(e),
                        },
                        attempts,
                    ))
                }
                Err(e) => return Err((e, attempts)),
            }
        }
    }

    /// Completes one prompt. Transport failures, 429 and 5xx responses are
    /// retried with backoff; other client errors are fatal.
    pub async fn generate(
        &self,
        doc_id: &str,
        prompt: &str,
        params: &GenerationParams,
    ) -> Result<Generation, ClientError> {
        self.run(doc_id, prompt, params).await.map_err(|(e, _)| e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationFailure {
    pub doc_id: String,
    /// Position of the prompt in the input.
    pub index: usize,
    pub attempts: u32,
    pub error: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BatchOutcome {
    /// Successful generations in input order.
    pub docs: Vec<GeneratedDoc>,
    pub failures: Vec<GenerationFailure>,
    /// Attempts per prompt, in input order.
    pub attempts: Vec<u32>,
}

#[derive(Debug, Error)]
pub enum BatchError {
    #[error("max_in_flight must be at least 1")]
    ZeroInFlight,
    #[error("invalid generation parameters: {0}")]
    InvalidParams(ClientError),
    #[error("all {count} prompts failed; first error: {first}")]
    AllFailed { count: usize, first: String },
}

/// Completes every prompt with at most `max_in_flight` requests outstanding.
/// Per-prompt failures are recorded; the batch fails only when nothing
/// succeeds.
pub async fn generate_corpus(
    client: &CompletionClient,
    prompts: &[Prompt],
    params: &GenerationParams,
    max_in_flight: usize,
) -> Result<BatchOutcome, BatchError> {
    if max_in_flight == 0 {
        return Err(BatchError::ZeroInFlight);
    }
    params.validate().map_err(BatchError::InvalidParams)?;
    if params.repetition_penalty != 1.0 {
        log::warn!("repetition_penalty is passed through; endpoints without support ignore it");
    }
    let results: Vec<_> = stream::iter(prompts)
        .map(|p| client.run(&p.doc_id, &p.text, params))
        .buffered(max_in_flight)
        .collect()
        .await;
    let mut out = BatchOutcome::default();
    for (index, (prompt, result)) in prompts.iter().zip(results).enumerate() {
        match result {
            Ok(g) => {
                out.attempts.push(g.attempts);
                out.docs.push(g.doc);
            }
            Err((e, attempts)) => {
                log::warn!("{}: generation failed: {e}", prompt.doc_id);
                out.attempts.push(attempts);
                out.failures.push(GenerationFailure {
                    doc_id: prompt.doc_id.clone(),
                    index,
                    attempts,
                    error: e.to_string(),
                });
            }
        }
    }
    if out.docs.is_empty() && !out.failures.is_empty() {
        return Err(BatchError::AllFailed {
            count: out.failures.len(),
            first: out.failures[0].error.clone(),
        });
    }
    Ok(out)
}
