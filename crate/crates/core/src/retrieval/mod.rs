//! Retriever evaluation harness: context serialization, brute-force cosine
//! retrieval, Recall@k / MRR@20 / NDCG@20, the raw-vs-rewritten query gap,
//! and adapters for external benchmark files.

mod adapt;
mod context;
mod index;
mod metrics;
mod rewrite;

use serde::{Deserialize, Serialize};

use crate::dialogue::{Conversation, SwitchKind};
use crate::{Error, Result};

pub use adapt::{adapt_external_benchmark, AdaptedBenchmark};
pub use context::{parse_context, serialize_context, serialize_context_pairs};
pub use index::{retrieve, retrieve_all, EmbeddingIndex};
pub use metrics::{
    instance_mrr, instance_ndcg, instance_recall, metrics_report, mrr_at_k, ndcg_at_k,
    recall_at_k, JudgedRun, MetricsReport, SwitchBreakdown, DEFAULT_K_SET,
};
pub use rewrite::{rewrite_all, rewrite_query};

/// One evaluation instance: serialized history + current query, and the
/// gold ids retrieval is judged against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetrievalInstance {
    pub conv_id: String,
    pub turn_index: usize,
    pub context: String,
    pub gold_ids: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub switch_kind: Option<SwitchKind>,
}

impl RetrievalInstance {
    pub fn validate(&self) -> Result<()> {
        if self.context.is_empty() {
            return Err(Error::Precondition(format!(
                "instance {}#{} has an empty context",
                self.conv_id, self.turn_index
            )));
        }
        if self.gold_ids.is_empty() {
            return Err(Error::Precondition(format!(
                "instance {}#{} has no gold ids",
                self.conv_id, self.turn_index
            )));
        }
        Ok(())
    }
}

/// One entry of a ranked list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankedEntry {
    pub chunk_id: String,
    pub score: f64,
}

/// Ranked retrieval output for one instance; scores non-increasing, ids
/// unique.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankedList {
    pub conv_id: String,
    pub turn_index: usize,
    pub ranked: Vec<RankedEntry>,
}

/// Expand conversations into one retrieval instance per turn, serializing
/// each turn's history prefix.
pub fn instances_from_conversations(conversations: &[Conversation]) -> Vec<RetrievalInstance> {
    let mut out = Vec::new();
    for conv in conversations {
        for (i, turn) in conv.turns.iter().enumerate() {
            out.push(RetrievalInstance {
                conv_id: conv.conv_id.clone(),
                turn_index: turn.index,
                context: serialize_context(&conv.turns[..i], &turn.query),
                gold_ids: turn.gold_ids.clone(),
                switch_kind: Some(turn.switch_kind),
            });
        }
    }
    out
}

/// Pair ranked runs with their instances' gold sets for the metric
/// functions. Runs and instances must align one-to-one.
pub fn judged_runs(instances: &[RetrievalInstance], runs: &[RankedList]) -> Result<Vec<JudgedRun>> {
    if instances.len() != runs.len() {
        return Err(Error::Precondition(format!(
            "instances ({}) and runs ({}) do not align",
            instances.len(),
            runs.len()
        )));
    }
    instances
        .iter()
        .zip(runs)
        .map(|(inst, run)| {
            if inst.conv_id != run.conv_id || inst.turn_index != run.turn_index {
                return Err(Error::Precondition(format!(
                    "run {}#{} does not match instance {}#{}",
                    run.conv_id, run.turn_index, inst.conv_id, inst.turn_index
                )));
            }
            Ok(JudgedRun {
                ranked_ids: run.ranked.iter().map(|e| e.chunk_id.clone()).collect(),
                gold: inst.gold_ids.iter().cloned().collect(),
                switch_kind: inst.switch_kind,
            })
        })
        .collect()
}
