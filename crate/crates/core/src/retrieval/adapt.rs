//! Adapters for external conversational-retrieval benchmark files.
//!
//! Three normalized JSONL schemas are supported (`qrecc`, `topiocqa`,
//! `doc2dial`; see docs/formats.md for field tables). Each adapter reads an
//! instance file plus a passage corpus file, serializes histories into the
//! frozen `User:`/`Agent:` context format, and remaps gold ids into the
//! local corpus store. Instances whose gold ids are missing from the corpus
//! are rejected with a reason rather than silently kept.

use std::path::Path;

use serde::Deserialize;

use crate::curate::Chunk;
use crate::store::read_jsonl;
use crate::{Error, Result};

use super::context::serialize_context_pairs;
use super::RetrievalInstance;

/// One passage of an external corpus.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExternalPassage {
    id: String,
    text: String,
}

/// QReCC-style instance: history as a flat list of alternating question /
/// answer strings.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct QreccRecord {
    conversation_no: u64,
    turn_no: usize,
    question: String,
    #[serde(default)]
    answer: Option<String>,
    #[serde(default)]
    context: Vec<String>,
    truth_passages: Vec<String>,
}

/// TopiOCQA-style instance: history as (question, answer) objects plus a
/// topic label.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TopiocqaRecord {
    conversation_no: u64,
    turn_no: usize,
    question: String,
    #[serde(default)]
    topic: Option<String>,
    #[serde(default)]
    history: Vec<QaPair>,
    gold_passages: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct QaPair {
    question: String,
    answer: String,
}

/// Doc2Dial-style instance: role-tagged utterance history and reference ids.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Doc2DialRecord {
    dial_id: String,
    turn_id: usize,
    utterance: String,
    #[serde(default)]
    history: Vec<RoleTurn>,
    references: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RoleTurn {
    role: String,
    text: String,
}

#[derive(Debug)]
pub struct AdaptedBenchmark {
    pub instances: Vec<RetrievalInstance>,
    pub corpus: Vec<Chunk>,
    /// Human-readable reasons for instances dropped during adaptation.
    pub rejected: Vec<String>,
}

/// Load and normalize an external benchmark.
pub fn adapt_external_benchmark(
    instances_path: &Path,
    corpus_path: &Path,
    format_id: &str,
) -> Result<AdaptedBenchmark> {
    let passages: Vec<ExternalPassage> = read_jsonl(corpus_path)?;
    let corpus: Vec<Chunk> = passages
        .into_iter()
        .map(|p| Chunk {
            chunk_id: p.id.clone(),
            char_len: p.text.chars().count(),
            text: p.text,
            source_id: p.id,
            offset: 0,
            quality: None,
        })
        .collect();
    let known: std::collections::HashSet<&str> =
        corpus.iter().map(|c| c.chunk_id.as_str()).collect();

    let raw: Vec<(String, usize, String, Vec<String>)> = match format_id {
        "qrecc" => read_jsonl::<QreccRecord>(instances_path)?
            .into_iter()
            .map(|r| {
                let mut history: Vec<(String, String)> = Vec::new();
                let mut pending: Option<String> = None;
                for item in r.context {
                    match pending.take() {
                        None => pending = Some(item),
                        Some(q) => history.push((q, item)),
                    }
                }
                let _ = r.answer;
                let context = serialize_context_pairs(&history, &r.question);
                (format!("qrecc-{}", r.conversation_no), r.turn_no, context, r.truth_passages)
            })
            .collect(),
        "topiocqa" => read_jsonl::<TopiocqaRecord>(instances_path)?
            .into_iter()
            .map(|r| {
                let history: Vec<(String, String)> =
                    r.history.into_iter().map(|p| (p.question, p.answer)).collect();
                let context = serialize_context_pairs(&history, &r.question);
                let _ = r.topic;
                (format!("topiocqa-{}", r.conversation_no), r.turn_no, context, r.gold_passages)
            })
            .collect(),
        "doc2dial" => read_jsonl::<Doc2DialRecord>(instances_path)?
            .into_iter()
            .map(|r| {
                // Collapse role-tagged history into (user, agent) pairs.
                let mut history: Vec<(String, String)> = Vec::new();
                let mut pending_user: Option<String> = None;
                for t in r.history {
                    if t.role.eq_ignore_ascii_case("user") {
                        pending_user = Some(t.text);
                    } else if let Some(q) = pending_user.take() {
                        history.push((q, t.text));
                    }
                }
                let context = serialize_context_pairs(&history, &r.utterance);
                (format!("doc2dial-{}", r.dial_id), r.turn_id, context, r.references)
            })
            .collect(),
        other => {
            return Err(Error::Config(format!(
                "unknown external benchmark format '{other}' (supported: qrecc, topiocqa, doc2dial)"
            )))
        }
    };

    let mut instances = Vec::with_capacity(raw.len());
    let mut rejected = Vec::new();
    for (conv_id, turn_index, context, gold_ids) in raw {
        if gold_ids.is_empty() {
            rejected.push(format!("{conv_id}#{turn_index}: empty gold set"));
            continue;
        }
        if let Some(missing) = gold_ids.iter().find(|g| !known.contains(g.as_str())) {
            rejected.push(format!("{conv_id}#{turn_index}: gold id '{missing}' not in corpus"));
            continue;
        }
        instances.push(RetrievalInstance {
            conv_id,
            turn_index,
            context,
            gold_ids,
            switch_kind: None,
        });
    }

    Ok(AdaptedBenchmark { instances, corpus, rejected })
}
