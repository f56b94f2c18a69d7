//! The four judge scoring operations.

use rand::seq::SliceRandom;

use crate::curate::Chunk;
use crate::provider::{ChatRequest, Gateway, Message};
use crate::retrieval::serialize_context;
use crate::rng::{fnv1a, substream};
use crate::{Error, Result};

use super::prompts;
use super::rubric::{parse_document_pick, parse_rating};
use super::{AuditInstance, JudgeScore, Metric};

/// The question as judges see it: bare on turn 1, in its serialized
/// conversational context otherwise.
fn question_in_context(inst: &AuditInstance) -> String {
    if inst.history.is_empty() {
        inst.query.clone()
    } else {
        serialize_context(&inst.history, &inst.query)
    }
}

fn chat_seed(inst: &AuditInstance, judge_model: &str, metric: &str) -> u64 {
    fnv1a(format!("{}#{}#{}#{}", inst.conv_id, inst.turn_index, judge_model, metric).as_bytes())
}

/// Send a rating prompt and parse a 1–5 value; `None` after retries means
/// the instance is unscored for this judge (excluded from means, counted).
fn score_rubric(
    gateway: &Gateway,
    judge_model: &str,
    inst: &AuditInstance,
    metric: Metric,
    prompt: String,
    retries: u32,
) -> Result<Option<JudgeScore>> {
    let base_seed = chat_seed(inst, judge_model, metric.as_str());
    let mut last_reply = String::new();
    for attempt in 0..=retries {
        let req = ChatRequest {
            model_id: judge_model.to_string(),
            messages: vec![Message::user(prompt.clone())],
            temperature: 0.0,
            max_output_tokens: 512,
            seed: Some(base_seed.wrapping_add(attempt as u64)),
            assume_cache_hit: false,
        };
        let reply = gateway.chat(&req)?;
        if let Some(value) = parse_rating(&reply) {
            return Ok(Some(JudgeScore {
                judge_model: judge_model.to_string(),
                metric,
                value,
                raw_reply: reply,
            }));
        }
        last_reply = reply;
    }
    log::warn!(
        "judge {judge_model} gave no parseable {} rating for {}#{} (last reply: {:.80})",
        metric.as_str(),
        inst.conv_id,
        inst.turn_index,
        last_reply
    );
    Ok(None)
}

/// Does the gold document actually answer the query?
pub fn score_query_evidence(
    gateway: &Gateway,
    judge_model: &str,
    inst: &AuditInstance,
    retries: u32,
) -> Result<Option<JudgeScore>> {
    let prompt = prompts::render_query_evidence(&inst.gold_doc.text, &question_in_context(inst));
    score_rubric(gateway, judge_model, inst, Metric::QueryEvidence, prompt, retries)
}

/// Is the answer grounded in the gold document?
pub fn score_faithfulness(
    gateway: &Gateway,
    judge_model: &str,
    inst: &AuditInstance,
    retries: u32,
) -> Result<Option<JudgeScore>> {
    let prompt = prompts::render_faithfulness(
        &inst.gold_doc.text,
        &question_in_context(inst),
        &inst.answer,
    );
    score_rubric(gateway, judge_model, inst, Metric::Faithfulness, prompt, retries)
}

/// Linguistic quality of the answer, independent of evidence.
pub fn score_answer_quality(
    gateway: &Gateway,
    judge_model: &str,
    inst: &AuditInstance,
    retries: u32,
) -> Result<Option<JudgeScore>> {
    let prompt = prompts::render_answer_quality(
        &inst.gold_doc.text,
        &question_in_context(inst),
        &inst.answer,
    );
    score_rubric(gateway, judge_model, inst, Metric::AnswerQuality, prompt, retries)
}

/// Outcome of one discriminability test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscriminabilityPick {
    pub judge_model: String,
    pub picked_id: String,
    pub gold_hit: bool,
}

/// Discriminability test: present the shuffled candidate pool and ask the
/// judge to pick the single best document. The shuffle is seeded per
/// `(instance, judge)`; the parsed position maps back through the shuffle,
/// so presentation order never changes which chunk was picked.
pub fn score_discriminability(
    gateway: &Gateway,
    judge_model: &str,
    inst: &AuditInstance,
    seed: u64,
    retries: u32,
) -> Result<Option<DiscriminabilityPick>> {
    if inst.candidate_pool.len() < 2 {
        return Err(Error::Precondition(format!(
            "discriminability needs a pool of >= 2 documents, got {}",
            inst.candidate_pool.len()
        )));
    }
    if !inst.candidate_pool.iter().any(|c| c.chunk_id == inst.gold_doc.chunk_id) {
        return Err(Error::Precondition("candidate pool does not contain the gold document".into()));
    }

    let mut order: Vec<usize> = (0..inst.candidate_pool.len()).collect();
    let mut rng = substream(
        seed,
        &["audit-shuffle", &inst.conv_id, &inst.turn_index.to_string(), judge_model],
    );
    order.shuffle(&mut rng);
    let shuffled: Vec<&Chunk> = order.iter().map(|&i| &inst.candidate_pool[i]).collect();
    let prompt = prompts::render_discriminability(&shuffled, &question_in_context(inst));

    let base_seed = chat_seed(inst, judge_model, "completeness");
    let mut last_reply = String::new();
    for attempt in 0..=retries {
        let req = ChatRequest {
            model_id: judge_model.to_string(),
            messages: vec![Message::user(prompt.clone())],
            temperature: 0.0,
            max_output_tokens: 512,
            seed: Some(base_seed.wrapping_add(attempt as u64)),
            assume_cache_hit: false,
        };
        let reply = gateway.chat(&req)?;
        match parse_document_pick(&reply) {
            Some(pos) if pos >= 1 && pos <= shuffled.len() => {
                let picked = shuffled[pos - 1];
                return Ok(Some(DiscriminabilityPick {
                    judge_model: judge_model.to_string(),
                    picked_id: picked.chunk_id.clone(),
                    gold_hit: picked.chunk_id == inst.gold_doc.chunk_id,
                }));
            }
            _ => last_reply = reply,
        }
    }
    log::warn!(
        "judge {judge_model} gave no parseable document pick for {}#{} (last reply: {:.80})",
        inst.conv_id,
        inst.turn_index,
        last_reply
    );
    Ok(None)
}
