//! HTTP+JSON chat and embedding backend.
//!
//! Speaks the prevalent chat-completions / embeddings request shapes. Path
//! templates and response field paths are configurable so near-compatible
//! providers can be pointed at without code changes. Credentials come from
//! the environment variable named in the config, never from the config file
//! itself.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::ProviderError;

use super::{ChatBackend, ChatReply, ChatRequest, EmbedBackend, TokenUsage};

/// Connection settings for an HTTP provider.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HttpProviderConfig {
    /// Base URL, e.g. `https://api.example.com`.
    pub endpoint: String,
    /// Name of the environment variable holding the bearer token.
    pub api_key_env: Option<String>,
    #[serde(default = "default_chat_path")]
    pub chat_path: String,
    #[serde(default = "default_embed_path")]
    pub embed_path: String,
    /// Embedding model id sent with embed requests.
    #[serde(default)]
    pub embed_model: String,
    /// Dot-path to the assistant text in the chat response.
    #[serde(default = "default_reply_path")]
    pub reply_path: String,
    /// Dot-path to the prompt token count, if the provider reports usage.
    #[serde(default = "default_input_tokens_path")]
    pub input_tokens_path: String,
    #[serde(default = "default_output_tokens_path")]
    pub output_tokens_path: String,
    /// Dot-path to the vector list inside each embedding datum.
    #[serde(default = "default_embedding_path")]
    pub embedding_path: String,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: u64,
}

fn default_chat_path() -> String {
    "/v1/chat/completions".into()
}
fn default_embed_path() -> String {
    "/v1/embeddings".into()
}
fn default_reply_path() -> String {
    "choices.0.message.content".into()
}
fn default_input_tokens_path() -> String {
    "usage.prompt_tokens".into()
}
fn default_output_tokens_path() -> String {
    "usage.completion_tokens".into()
}
fn default_embedding_path() -> String {
    "data.*.embedding".into()
}
fn default_timeout_secs() -> u64 {
    60
}

/// Blocking HTTP backend for both chat and embeddings.
pub struct HttpProvider {
    config: HttpProviderConfig,
    client: reqwest::blocking::Client,
    api_key: Option<String>,
}

impl HttpProvider {
    pub fn new(config: HttpProviderConfig) -> Result<Self, ProviderError> {
        let api_key = match &config.api_key_env {
            Some(var) => Some(std::env::var(var).map_err(|_| {
                ProviderError::Auth(format!("credential env var {var} is not set"))
            })?),
            None => None,
        };
        let client = reqwest::blocking::Client::builder()
            .timeout(std::time::Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| ProviderError::Transport(e.to_string()))?;
        Ok(HttpProvider { config, client, api_key })
    }

    fn post(&self, path: &str, body: &Value) -> Result<Value, ProviderError> {
        let url = format!("{}{}", self.config.endpoint.trim_end_matches('/'), path);
        let mut req = self.client.post(&url).json(body);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| ProviderError::Transport(e.to_string()))?;
        let status = resp.status();
        let text = resp.text().map_err(|e| ProviderError::Transport(e.to_string()))?;
        match status.as_u16() {
            200..=299 => serde_json::from_str(&text).map_err(|e| {
                ProviderError::MalformedResponse { message: e.to_string(), raw: text }
            }),
            401 | 403 => Err(ProviderError::Auth(format!("{status}: {text}"))),
            429 => Err(ProviderError::RateLimited { retries: 0, message: text }),
            500..=599 => Err(ProviderError::Transport(format!("{status}: {text}"))),
            _ => Err(ProviderError::MalformedResponse {
                message: format!("unexpected status {status}"),
                raw: text,
            }),
        }
    }
}

impl ChatBackend for HttpProvider {
    fn complete(&self, req: &ChatRequest) -> Result<ChatReply, ProviderError> {
        let messages: Vec<Value> = req
            .messages
            .iter()
            .map(|m| json!({"role": m.role.as_str(), "content": m.text}))
            .collect();
        let mut body = json!({
            "model": req.model_id,
            "messages": messages,
            "temperature": req.temperature,
            "max_tokens": req.max_output_tokens,
        });
        if let Some(seed) = req.seed {
            body["seed"] = json!(seed);
        }
        let value = self.post(&self.config.chat_path, &body)?;
        let text = extract_path(&value, &self.config.reply_path)
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| ProviderError::MalformedResponse {
                message: format!("missing reply at {}", self.config.reply_path),
                raw: value.to_string(),
            })?;
        let usage = match (
            extract_path(&value, &self.config.input_tokens_path).and_then(Value::as_u64),
            extract_path(&value, &self.config.output_tokens_path).and_then(Value::as_u64),
        ) {
            (Some(input_tokens), Some(output_tokens)) => {
                Some(TokenUsage { input_tokens, output_tokens })
            }
            _ => None,
        };
        Ok(ChatReply { text, usage })
    }
}

impl EmbedBackend for HttpProvider {
    fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f32>>, ProviderError> {
        let body = json!({
            "model": self.config.embed_model,
            "input": texts,
        });
        let value = self.post(&self.config.embed_path, &body)?;
        let vectors = extract_vectors(&value, &self.config.embedding_path).ok_or_else(|| {
            ProviderError::MalformedResponse {
                message: format!("missing embeddings at {}", self.config.embedding_path),
                raw: value.to_string(),
            }
        })?;
        Ok(vectors)
    }

    fn model_id(&self) -> &str {
        &self.config.embed_model
    }
}

/// Walk a dot-path like `choices.0.message.content` into a JSON value.
fn extract_path<'v>(value: &'v Value, path: &str) -> Option<&'v Value> {
    let mut cur = value;
    for step in path.split('.') {
        cur = match cur {
            Value::Array(items) => items.get(step.parse::<usize>().ok()?)?,
            Value::Object(map) => map.get(step)?,
            _ => return None,
        };
    }
    Some(cur)
}

/// Resolve a path with one `*` wildcard over an array, e.g.
/// `data.*.embedding`, into one vector per array element.
fn extract_vectors(value: &Value, path: &str) -> Option<Vec<Vec<f32>>> {
    let (head, tail) = path.split_once(".*.")?;
    let array = extract_path(value, head)?.as_array()?;
    let mut out = Vec::with_capacity(array.len());
    for item in array {
        let vec = extract_path(item, tail)?.as_array()?;
        let mut values = Vec::with_capacity(vec.len());
        for v in vec {
            values.push(v.as_f64()? as f32);
        }
        out.push(values);
    }
    Some(out)
}
