//! The three generation agents: questioner, responder, polisher.

use crate::curate::Chunk;
use crate::error::ProviderError;
use crate::provider::{ChatRequest, Gateway, Message};
use crate::{Error, Result};

use super::prompts;
use super::{AgentConfig, Turn};

/// Ask the questioner for `(gold position, question)` over the presented
/// cluster documents. The reply must lead with a bracketed id of one of the
/// presented documents; malformed replies retry up to `max_parse_retries`
/// with a salted seed, an out-of-range id fails immediately.
///
/// The returned position is 0-based into `cluster_docs`.
pub fn ask(
    gateway: &Gateway,
    cfg: &AgentConfig,
    cluster_docs: &[&Chunk],
    history: &[Turn],
    seed: u64,
) -> Result<(usize, String)> {
    if cluster_docs.is_empty() {
        return Err(Error::Precondition("questioner needs a non-empty document cluster".into()));
    }
    let prompt = prompts::render_questioner(cluster_docs, history);
    let mut last_reply = String::new();
    for attempt in 0..=cfg.max_parse_retries {
        let req = ChatRequest {
            model_id: cfg.questioner_model.clone(),
            messages: vec![Message::user(prompt.clone())],
            temperature: cfg.questioner_temperature,
            max_output_tokens: 256,
            seed: Some(seed.wrapping_add(attempt as u64)),
            assume_cache_hit: !history.is_empty(),
        };
        let reply = gateway.chat(&req)?;
        match parse_tagged_question(&reply) {
            Some((id, question)) => {
                if id == 0 || id > cluster_docs.len() {
                    return Err(ProviderError::InvalidRequest(format!(
                        "questioner chose document id {id}, outside the presented range 1..={}",
                        cluster_docs.len()
                    ))
                    .into());
                }
                return Ok((id - 1, question));
            }
            None => last_reply = reply,
        }
    }
    Err(ProviderError::Unparseable { retries: cfg.max_parse_retries, last_reply }.into())
}

/// `[id] question` → `(id, question)`.
fn parse_tagged_question(reply: &str) -> Option<(usize, String)> {
    let trimmed = reply.trim();
    let rest = trimmed.strip_prefix('[')?;
    let close = rest.find(']')?;
    let id: usize = rest[..close].trim().parse().ok()?;
    let question = rest[close + 1..].trim();
    if question.is_empty() {
        return None;
    }
    Some((id, question.to_string()))
}

/// Ask the responder for an answer grounded in the gold documents; the
/// provider text is stored verbatim.
pub fn respond(
    gateway: &Gateway,
    cfg: &AgentConfig,
    gold_docs: &[&Chunk],
    question: &str,
    history: &[Turn],
    seed: u64,
) -> Result<String> {
    if gold_docs.is_empty() {
        return Err(Error::Precondition("responder needs at least one gold document".into()));
    }
    let req = ChatRequest {
        model_id: cfg.responder_model.clone(),
        messages: vec![Message::user(prompts::render_responder(gold_docs, question, history))],
        temperature: cfg.responder_temperature,
        max_output_tokens: 1024,
        seed: Some(seed),
        assume_cache_hit: !history.is_empty(),
    };
    gateway.chat(&req)
}

/// Polish a raw query into conversational form. Never invoked on turn 1;
/// provider failure falls back to the raw query so generation cannot abort
/// on style.
pub fn polish(
    gateway: &Gateway,
    cfg: &AgentConfig,
    history: &[Turn],
    last_query: &str,
    seed: u64,
) -> Result<String> {
    if history.is_empty() {
        return Err(Error::Precondition("polish requires at least one prior turn".into()));
    }
    let req = ChatRequest {
        model_id: cfg.polisher_model.clone(),
        messages: vec![Message::user(prompts::render_polisher(history, last_query))],
        temperature: cfg.polisher_temperature,
        max_output_tokens: 256,
        seed: Some(seed),
        assume_cache_hit: true,
    };
    match gateway.chat(&req) {
        Ok(reply) => {
            let polished = reply
                .trim()
                .strip_prefix("[Rewrite Query]:")
                .map(str::trim)
                .unwrap_or(reply.trim());
            if polished.is_empty() {
                Ok(last_query.to_string())
            } else {
                Ok(polished.to_string())
            }
        }
        Err(err) => {
            log::warn!("polisher failed ({err}); keeping raw query");
            Ok(last_query.to_string())
        }
    }
}
