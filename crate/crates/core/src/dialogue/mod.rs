//! Multi-turn conversation generation with the questioner / responder /
//! polisher agent trio.
//!
//! The questioner picks one gold document from the active cluster and asks a
//! question only that document answers; the responder answers strictly from
//! the gold document; the polisher rewrites later queries into
//! conversational form (coreference, ellipsis) while the raw query is kept
//! alongside. Hard topic switches swap in a random other cluster with the
//! configured probability.

mod agents;
mod generate;
pub mod prompts;
mod stats;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use agents::{ask, polish, respond};
pub use generate::{generate_batch, generate_conversation};
pub use stats::{corpus_stats, DialogueStats};

/// How a turn's topic relates to the previous turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SwitchKind {
    None,
    Soft,
    Hard,
}

/// One generated turn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Turn {
    /// 1-based turn number.
    pub index: usize,
    /// The query as benchmarked (polished for turns after the first).
    pub query: String,
    /// The questioner's original query, before the polisher.
    pub raw_query: String,
    pub answer: String,
    /// Gold document ids; the generator emits exactly one per turn.
    pub gold_ids: Vec<String>,
    /// Topic accounting key: the gold document's source id.
    pub topic_tag: String,
    pub switch_kind: SwitchKind,
}

/// A generated conversation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Conversation {
    pub conv_id: String,
    pub turns: Vec<Turn>,
    pub primary_cluster: String,
    /// Clusters drawn for hard switches, in turn order.
    pub hard_switch_clusters: Vec<String>,
}

/// Agent models, temperatures, and generation shape.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AgentConfig {
    pub questioner_model: String,
    pub responder_model: String,
    pub polisher_model: String,
    pub questioner_temperature: f64,
    pub responder_temperature: f64,
    pub polisher_temperature: f64,
    /// Probability that a turn after the first draws its context from a
    /// random other cluster.
    pub hard_switch_prob: f64,
    pub max_parse_retries: u32,
    /// Turns per conversation.
    pub turns: usize,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            questioner_model: "questioner".into(),
            responder_model: "responder".into(),
            polisher_model: "polisher".into(),
            questioner_temperature: 0.7,
            responder_temperature: 0.3,
            polisher_temperature: 0.7,
            hard_switch_prob: 0.25,
            max_parse_retries: 2,
            turns: 8,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.hard_switch_prob) {
            return Err(Error::Config(format!(
                "hard_switch_prob must be in [0,1], got {}",
                self.hard_switch_prob
            )));
        }
        if self.turns == 0 {
            return Err(Error::Config("turns must be positive".into()));
        }
        Ok(())
    }
}
