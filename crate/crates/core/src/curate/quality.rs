//! Pluggable chunk quality scoring and the keep/drop filter.
//!
//! Two bundled scorers: a local heuristic (length, symbol ratio, stop-word
//! density, lexical diversity) and a remote classifier that asks a chat
//! model for the two scores. Scorer failures drop the chunk (fail-closed)
//! with a logged reason.

use regex::Regex;

use crate::provider::{ChatRequest, Gateway, Message};
use crate::textutil::{content_words, words};
use crate::{Error, Result};

use super::{Chunk, QualityScore};

/// Keep thresholds: fluency >= τ_f and educational >= τ_e.
#[derive(Debug, Clone, Copy)]
pub struct QualityThresholds {
    pub fluency: f64,
    pub educational: f64,
}

impl Default for QualityThresholds {
    fn default() -> Self {
        QualityThresholds { fluency: 0.5, educational: 1.5 }
    }
}

pub trait QualityScorer: Send + Sync {
    /// Raw (fluency, educational) scores in [0,1] × [0,5].
    fn score(&self, chunk: &Chunk) -> Result<(f64, f64)>;
}

/// Local heuristic scorer.
///
/// Fluency is the fraction of prose-like characters damped for very short
/// fragments; educational value grows with content-word mass and lexical
/// diversity. It is a stand-in for trained classifiers, not a reproduction
/// of them.
#[derive(Debug, Default, Clone, Copy)]
pub struct HeuristicScorer;

impl QualityScorer for HeuristicScorer {
    fn score(&self, chunk: &Chunk) -> Result<(f64, f64)> {
        let text = &chunk.text;
        let total_chars = text.chars().count().max(1);
        let prose_chars = text
            .chars()
            .filter(|c| {
                c.is_alphanumeric()
                    || c.is_whitespace()
                    || matches!(c, '.' | ',' | ';' | ':' | '\'' | '"' | '-' | '(' | ')' | '?' | '!')
            })
            .count();
        let prose_ratio = prose_chars as f64 / total_chars as f64;
        let ws = words(text);
        let length_factor = (total_chars as f64 / 80.0).min(1.0);
        let word_factor = (ws.len() as f64 / 12.0).min(1.0);
        let fluency = (prose_ratio * length_factor * word_factor).clamp(0.0, 1.0);

        let cw = content_words(text);
        let distinct: std::collections::HashSet<&String> = cw.iter().collect();
        let richness = if cw.is_empty() { 0.0 } else { distinct.len() as f64 / cw.len() as f64 };
        let mass = (cw.len() as f64 / 40.0).min(1.0);
        let educational = (5.0 * mass * (0.4 + 0.6 * richness)).clamp(0.0, 5.0);
        Ok((fluency, educational))
    }
}

/// Remote classifier: asks a chat model to score the chunk and parses
/// `Fluency:` / `Educational:` lines from the reply.
pub struct RemoteScorer<'a> {
    gateway: &'a Gateway,
    model_id: String,
}

impl<'a> RemoteScorer<'a> {
    pub fn new(gateway: &'a Gateway, model_id: impl Into<String>) -> Self {
        RemoteScorer { gateway, model_id: model_id.into() }
    }
}

const REMOTE_SCORER_PROMPT: &str = "Rate the following text for corpus curation.\n\
Reply with exactly two lines:\n\
Fluency: <real number between 0 and 1>\n\
Educational: <real number between 0 and 5>\n\n\
**Text:**\n{TEXT}\n";

impl QualityScorer for RemoteScorer<'_> {
    fn score(&self, chunk: &Chunk) -> Result<(f64, f64)> {
        let prompt = REMOTE_SCORER_PROMPT.replace("{TEXT}", &chunk.text);
        let req = ChatRequest::new(&self.model_id, vec![Message::user(prompt)]);
        let reply = self.gateway.chat(&req)?;
        parse_remote_scores(&reply).ok_or_else(|| {
            Error::Provider(crate::error::ProviderError::MalformedResponse {
                message: "scorer reply missing Fluency/Educational lines".into(),
                raw: reply,
            })
        })
    }
}

fn parse_remote_scores(reply: &str) -> Option<(f64, f64)> {
    let flu = Regex::new(r"(?i)fluency:\s*([0-9.]+)").unwrap();
    let edu = Regex::new(r"(?i)educational:\s*([0-9.]+)").unwrap();
    let f: f64 = flu.captures(reply)?.get(1)?.as_str().parse().ok()?;
    let e: f64 = edu.captures(reply)?.get(1)?.as_str().parse().ok()?;
    Some((f.clamp(0.0, 5.0).min(1.0), e.clamp(0.0, 5.0)))
}

/// Keep only chunks whose verdict is `keep`, annotated with their scores;
/// order preserved. Returns the kept chunks and the ids dropped (for either
/// a drop verdict or a scorer failure).
pub fn quality_filter(
    chunks: Vec<Chunk>,
    scorer: &dyn QualityScorer,
    thresholds: &QualityThresholds,
) -> (Vec<Chunk>, Vec<String>) {
    let scores: Vec<Result<(f64, f64)>> = crate::exec::map_slice(&chunks, |c| scorer.score(c));
    let mut kept = Vec::with_capacity(chunks.len());
    let mut dropped = Vec::new();
    for (mut chunk, outcome) in chunks.into_iter().zip(scores) {
        match outcome {
            Ok((fluency, educational)) => {
                let score = QualityScore::from_scores(fluency, educational, thresholds);
                if score.verdict == super::Verdict::Keep {
                    chunk.quality = Some(score);
                    kept.push(chunk);
                } else {
                    dropped.push(chunk.chunk_id);
                }
            }
            Err(err) => {
                log::warn!("quality scorer failed on {}: {err}; dropping chunk", chunk.chunk_id);
                dropped.push(chunk.chunk_id);
            }
        }
    }
    (kept, dropped)
}
