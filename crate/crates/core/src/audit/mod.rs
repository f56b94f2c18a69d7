//! Benchmark quality auditing with an LLM-judge ensemble.
//!
//! Four metrics per instance and judge: query-evidence alignment (does the
//! gold document answer the query — low scores indicate annotation noise),
//! evidence completeness via discriminability testing (can a judge pick the
//! gold out of retrieved hard negatives — frequent non-gold picks indicate
//! annotation sparsity), answer faithfulness, and answer quality. Scores
//! ensemble across judges per instance, then across instances.

mod aggregate;
mod judge;
mod pearson;
pub mod prompts;
mod pool;
pub mod rubric;

use serde::{Deserialize, Serialize};

use crate::curate::{Chunk, CorpusIndex};
use crate::dialogue::{Conversation, Turn};
use crate::provider::Gateway;
use crate::retrieval::EmbeddingIndex;
use crate::{exec, Error, Result};

pub use aggregate::{
    aggregate, completeness_value, AuditReport, AuditThresholds, FlagReason, FlaggedInstance,
    InstanceAudit,
};
pub use judge::{
    score_answer_quality, score_discriminability, score_faithfulness, score_query_evidence,
    DiscriminabilityPick,
};
pub use pearson::pearson;
pub use pool::build_candidate_pool;

/// The four audit metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    QueryEvidence,
    Completeness,
    Faithfulness,
    AnswerQuality,
}

impl Metric {
    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::QueryEvidence => "query_evidence",
            Metric::Completeness => "completeness",
            Metric::Faithfulness => "faithfulness",
            Metric::AnswerQuality => "answer_quality",
        }
    }
}

/// One turn prepared for auditing.
#[derive(Debug, Clone)]
pub struct AuditInstance {
    pub conv_id: String,
    pub turn_index: usize,
    pub query: String,
    pub answer: String,
    pub gold_doc: Chunk,
    /// Gold + retrieved hard negatives; filled by [`build_candidate_pool`].
    pub candidate_pool: Vec<Chunk>,
    pub history: Vec<Turn>,
}

/// One judge score for one instance and metric.
#[derive(Debug, Clone)]
pub struct JudgeScore {
    pub judge_model: String,
    pub metric: Metric,
    /// In [1, 5]; parsed from a rubric reply or mapped from the
    /// discriminability outcome.
    pub value: f64,
    pub raw_reply: String,
}

/// Flat per-score record, the audit JSONL artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditRecord {
    pub conv_id: String,
    pub turn_index: usize,
    pub metric: Metric,
    pub judge_model: String,
    pub value: f64,
}

/// Audit stage parameters.
#[derive(Debug, Clone)]
pub struct AuditParams {
    pub judges: Vec<String>,
    pub pool_size: usize,
    pub thresholds: AuditThresholds,
    pub max_parse_retries: u32,
}

impl Default for AuditParams {
    fn default() -> Self {
        AuditParams {
            judges: vec!["judge-a".into(), "judge-b".into()],
            pool_size: 5,
            thresholds: AuditThresholds::default(),
            max_parse_retries: 2,
        }
    }
}

#[derive(Debug)]
pub struct AuditOutcome {
    pub records: Vec<AuditRecord>,
    pub report: AuditReport,
}

/// Expand conversations into audit instances (one per turn, history
/// attached, gold document resolved against the corpus).
pub fn instances_from_conversations(
    conversations: &[Conversation],
    corpus: &CorpusIndex,
) -> Result<Vec<AuditInstance>> {
    let mut out = Vec::new();
    for conv in conversations {
        for (i, turn) in conv.turns.iter().enumerate() {
            let gold_id = turn.gold_ids.first().ok_or_else(|| {
                Error::Precondition(format!("turn {}#{} has no gold ids", conv.conv_id, turn.index))
            })?;
            let gold_doc = corpus
                .get(gold_id)
                .ok_or_else(|| {
                    Error::Precondition(format!(
                        "turn {}#{} gold id {gold_id} not in corpus",
                        conv.conv_id, turn.index
                    ))
                })?
                .clone();
            out.push(AuditInstance {
                conv_id: conv.conv_id.clone(),
                turn_index: turn.index,
                query: turn.query.clone(),
                answer: turn.answer.clone(),
                gold_doc,
                candidate_pool: Vec::new(),
                history: conv.turns[..i].to_vec(),
            });
        }
    }
    Ok(out)
}

/// Run the full audit: build pools, score every instance with every judge
/// on all four metrics (instances in parallel), and aggregate.
pub fn audit_conversations(
    conversations: &[Conversation],
    corpus: &CorpusIndex,
    params: &AuditParams,
    gateway: &Gateway,
    seed: u64,
) -> Result<AuditOutcome> {
    if params.judges.is_empty() {
        return Err(Error::Precondition("audit needs at least one judge".into()));
    }
    let bare = instances_from_conversations(conversations, corpus)?;
    let index = EmbeddingIndex::build(corpus, gateway)?;
    let instances: Vec<AuditInstance> = exec::try_map_slice(&bare, |inst| {
        build_candidate_pool(inst.clone(), corpus, &index, gateway, params.pool_size)
    })?;
    audit_instances(&instances, params, gateway, seed)
}

/// Score pre-built instances (pools already attached).
pub fn audit_instances(
    instances: &[AuditInstance],
    params: &AuditParams,
    gateway: &Gateway,
    seed: u64,
) -> Result<AuditOutcome> {
    let audited: Vec<InstanceAudit> = exec::try_map_slice(instances, |inst| {
        let mut scores = Vec::new();
        let mut picks = Vec::new();
        let mut unscored = 0usize;
        for judge in &params.judges {
            let retries = params.max_parse_retries;
            for outcome in [
                score_query_evidence(gateway, judge, inst, retries)?,
                score_faithfulness(gateway, judge, inst, retries)?,
                score_answer_quality(gateway, judge, inst, retries)?,
            ] {
                match outcome {
                    Some(score) => scores.push(score),
                    None => unscored += 1,
                }
            }
            match score_discriminability(gateway, judge, inst, seed, retries)? {
                Some(pick) => picks.push(pick),
                None => unscored += 1,
            }
        }
        Ok::<InstanceAudit, Error>(InstanceAudit {
            conv_id: inst.conv_id.clone(),
            turn_index: inst.turn_index,
            scores,
            picks,
            unscored,
        })
    })?;

    let mut records = Vec::new();
    for inst in &audited {
        for score in &inst.scores {
            records.push(AuditRecord {
                conv_id: inst.conv_id.clone(),
                turn_index: inst.turn_index,
                metric: score.metric,
                judge_model: score.judge_model.clone(),
                value: score.value,
            });
        }
        for pick in &inst.picks {
            records.push(AuditRecord {
                conv_id: inst.conv_id.clone(),
                turn_index: inst.turn_index,
                metric: Metric::Completeness,
                judge_model: pick.judge_model.clone(),
                value: completeness_value(if pick.gold_hit { 1.0 } else { 0.0 }),
            });
        }
    }

    let report = aggregate(&audited, &params.thresholds);
    Ok(AuditOutcome { records, report })
}
