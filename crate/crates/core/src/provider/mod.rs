//! Uniform access to chat-completion and embedding services.
//!
//! The [`Gateway`] wraps a chat backend and an embedding backend behind one
//! validated, retried, cost-accounted surface. Deterministic mock backends
//! ([`mock`]) make every downstream stage runnable offline; the [`http`]
//! backend speaks the prevalent chat-completions / embeddings JSON
//! conventions with configurable paths and field names.

pub mod gate;
pub mod http;
pub mod mock;
pub mod pricing;

use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::ProviderError;
use crate::{Error, Result};
pub use gate::ConcurrencyGate;
pub use pricing::{estimate_dialogue_cost, Money, PricingModel, UsageLedger, UsageRecord};

/// Message role in a chat request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

impl Role {
    pub fn as_str(&self) -> &'static str {
        match self {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        }
    }
}

/// One message of a chat request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub text: String,
}

impl Message {
    pub fn system(text: impl Into<String>) -> Self {
        Message { role: Role::System, text: text.into() }
    }
    pub fn user(text: impl Into<String>) -> Self {
        Message { role: Role::User, text: text.into() }
    }
    pub fn assistant(text: impl Into<String>) -> Self {
        Message { role: Role::Assistant, text: text.into() }
    }
}

/// A chat-completion request.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model_id: String,
    pub messages: Vec<Message>,
    pub temperature: f64,
    pub max_output_tokens: u32,
    pub seed: Option<u64>,
    /// Pricing hint: later turns of a dialogue reuse a cached prefix, so the
    /// first turn is billed at the miss rate and the rest at the hit rate.
    #[serde(default)]
    pub assume_cache_hit: bool,
}

impl ChatRequest {
    pub fn new(model_id: impl Into<String>, messages: Vec<Message>) -> Self {
        ChatRequest {
            model_id: model_id.into(),
            messages,
            temperature: 0.0,
            max_output_tokens: 1024,
            seed: None,
            assume_cache_hit: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_cache_hit(mut self, hit: bool) -> Self {
        self.assume_cache_hit = hit;
        self
    }

    /// Non-empty messages; roles alternate user/assistant after an optional
    /// leading system message; temperature finite and non-negative.
    pub fn validate(&self) -> Result<()> {
        if self.messages.is_empty() {
            return Err(Error::Precondition("chat request has no messages".into()));
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(Error::Precondition(format!(
                "temperature must be a finite real >= 0, got {}",
                self.temperature
            )));
        }
        if self.max_output_tokens == 0 {
            return Err(Error::Precondition("max_output_tokens must be positive".into()));
        }
        let mut body = self.messages.as_slice();
        if body[0].role == Role::System {
            body = &body[1..];
        }
        if body.is_empty() {
            return Err(Error::Precondition(
                "chat request needs at least one non-system message".into(),
            ));
        }
        for (i, msg) in body.iter().enumerate() {
            let expected = if i % 2 == 0 { Role::User } else { Role::Assistant };
            if msg.role != expected {
                return Err(Error::Precondition(format!(
                    "message roles must alternate user/assistant after the system prompt; \
                     message {} has role {}",
                    i,
                    msg.role.as_str()
                )));
            }
        }
        Ok(())
    }

    /// Total prompt bytes, the basis for approximate token counting.
    pub fn prompt_bytes(&self) -> usize {
        self.messages.iter().map(|m| m.text.len()).sum()
    }
}

/// Token usage as reported by a provider, when it reports any.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct TokenUsage {
    pub input_tokens: u64,
    pub output_tokens: u64,
}

/// Raw reply from a chat backend before accounting.
#[derive(Debug, Clone)]
pub struct ChatReply {
    pub text: String,
    /// None when the backend does not report usage; the gateway then falls
    /// back to the byte-length approximation.
    pub usage: Option<TokenUsage>,
}

/// An L2-normalized embedding.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingVector {
    pub values: Vec<f32>,
    pub model_id: String,
    /// Norm of the raw vector before normalization.
    pub norm: f32,
}

impl EmbeddingVector {
    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    /// Cosine similarity; vectors are unit-length so this is a dot product.
    pub fn cosine(&self, other: &EmbeddingVector) -> f64 {
        dot(&self.values, &other.values)
    }
}

pub(crate) fn dot(a: &[f32], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(x, y)| *x as f64 * *y as f64).sum()
}

/// Backend that produces chat completions. One attempt, no retries: the
/// gateway layers retry/backoff on top.
pub trait ChatBackend: Send + Sync {
    fn complete(&self, req: &ChatRequest) -> std::result::Result<ChatReply, ProviderError>;
}

/// Backend that produces raw (not yet normalized) embedding vectors.
pub trait EmbedBackend: Send + Sync {
    fn embed(&self, texts: &[String]) -> std::result::Result<Vec<Vec<f32>>, ProviderError>;
    fn model_id(&self) -> &str;
}

/// Retry policy for transient chat failures: capped exponential backoff with
/// jitter. Rate limits and transport errors retry; auth failures do not.
#[derive(Debug, Clone)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { max_retries: 3, base_delay: Duration::from_secs(1) }
    }
}

impl RetryPolicy {
    /// Zero-delay policy for tests.
    pub fn immediate(max_retries: u32) -> Self {
        RetryPolicy { max_retries, base_delay: Duration::ZERO }
    }

    fn delay(&self, attempt: u32) -> Duration {
        // 1s, 2s, 4s, ... with up to +25% jitter.
        let backoff = self.base_delay.saturating_mul(1 << attempt.min(16));
        let jitter = backoff.mul_f64(0.25 * rand::random::<f64>());
        backoff + jitter
    }
}

fn retryable(err: &ProviderError) -> bool {
    matches!(
        err,
        ProviderError::RateLimited { .. }
            | ProviderError::Exhausted { .. }
            | ProviderError::Transport(_)
    )
}

/// The provider gateway: validation, bounded concurrency, retries, and
/// usage/cost accounting in front of interchangeable backends.
pub struct Gateway {
    chat_backend: Arc<dyn ChatBackend>,
    embed_backend: Arc<dyn EmbedBackend>,
    gate: ConcurrencyGate,
    ledger: UsageLedger,
    retry: RetryPolicy,
}

impl Gateway {
    pub fn new(
        chat_backend: Arc<dyn ChatBackend>,
        embed_backend: Arc<dyn EmbedBackend>,
        pricing: PricingModel,
        max_in_flight: usize,
    ) -> Self {
        Gateway {
            chat_backend,
            embed_backend,
            gate: ConcurrencyGate::new(max_in_flight),
            ledger: UsageLedger::new(pricing),
            retry: RetryPolicy::default(),
        }
    }

    /// Offline gateway over the deterministic mocks. Zero pricing, immediate
    /// retries, and a hash embedder of the given dimension.
    pub fn mock(dim: usize) -> Self {
        Gateway::new(
            Arc::new(mock::SimulatedChat::new()),
            Arc::new(mock::HashEmbedder::new("mock-embedder", dim)),
            PricingModel::free(),
            8,
        )
        .with_retry(RetryPolicy::immediate(3))
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn ledger(&self) -> &UsageLedger {
        &self.ledger
    }

    /// Send a chat request; returns the assistant text and appends usage to
    /// the ledger. Transient failures retry with capped exponential backoff.
    pub fn chat(&self, req: &ChatRequest) -> Result<String> {
        req.validate()?;
        let _slot = self.gate.acquire();
        let mut attempt = 0u32;
        let reply = loop {
            match self.chat_backend.complete(req) {
                Ok(reply) => break reply,
                Err(err) if retryable(&err) && attempt < self.retry.max_retries => {
                    log::warn!("provider attempt {attempt} failed ({err}); retrying");
                    std::thread::sleep(self.retry.delay(attempt));
                    attempt += 1;
                }
                Err(ProviderError::RateLimited { message, .. }) => {
                    return Err(ProviderError::RateLimited {
                        retries: self.retry.max_retries,
                        message,
                    }
                    .into());
                }
                Err(ProviderError::Transport(message)) | Err(ProviderError::Exhausted { message, .. }) => {
                    return Err(ProviderError::Exhausted {
                        retries: self.retry.max_retries,
                        message,
                    }
                    .into());
                }
                Err(err) => return Err(err.into()),
            }
        };
        if reply.text.is_empty() {
            return Err(ProviderError::EmptyReply.into());
        }
        let usage = reply.usage.unwrap_or(TokenUsage {
            input_tokens: approx_tokens(req.prompt_bytes()),
            output_tokens: approx_tokens(reply.text.len()),
        });
        self.ledger.record(usage.input_tokens, req.assume_cache_hit, usage.output_tokens);
        Ok(reply.text)
    }

    /// Embed a batch of texts. One unit vector per input, all of one
    /// dimension, in input order.
    pub fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>> {
        if texts.is_empty() {
            return Err(Error::Precondition("embed: empty batch".into()));
        }
        if let Some(i) = texts.iter().position(|t| t.is_empty()) {
            return Err(Error::Precondition(format!("embed: text {i} is empty")));
        }
        let _slot = self.gate.acquire();
        let raw = self.embed_backend.embed(texts)?;
        if raw.len() != texts.len() {
            return Err(ProviderError::MalformedResponse {
                message: format!("expected {} vectors, got {}", texts.len(), raw.len()),
                raw: String::new(),
            }
            .into());
        }
        let dim = raw[0].len();
        let model_id = self.embed_backend.model_id().to_string();
        let mut out = Vec::with_capacity(raw.len());
        for values in raw {
            if values.len() != dim {
                return Err(ProviderError::DimensionMismatch { expected: dim, got: values.len() }.into());
            }
            out.push(normalize(values, &model_id)?);
        }
        let total_bytes: usize = texts.iter().map(|t| t.len()).sum();
        self.ledger.record(approx_tokens(total_bytes), false, 0);
        Ok(out)
    }

    pub fn embed_model_id(&self) -> &str {
        self.embed_backend.model_id()
    }
}

/// Byte-length token approximation used whenever a backend reports no usage.
pub fn approx_tokens(bytes: usize) -> u64 {
    (bytes as u64).div_ceil(4)
}

fn normalize(values: Vec<f32>, model_id: &str) -> Result<EmbeddingVector> {
    let norm = (values.iter().map(|v| (*v as f64).powi(2)).sum::<f64>()).sqrt() as f32;
    if !(norm > 0.0) {
        return Err(ProviderError::MalformedResponse {
            message: "zero-norm embedding".into(),
            raw: String::new(),
        }
        .into());
    }
    let values = values.iter().map(|v| v / norm).collect();
    Ok(EmbeddingVector { values, model_id: model_id.to_string(), norm })
}
