//! Corpus statistics over generated conversations.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::provider::approx_tokens;

use super::Conversation;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DialogueStats {
    pub conversations: usize,
    pub turns: usize,
    pub mean_tokens_per_question: f64,
    pub mean_tokens_per_answer: f64,
    pub mean_topics_per_conversation: f64,
    pub hard_switch_turns: usize,
    pub soft_switch_turns: usize,
}

/// Turn counts, token means, and topic diversity; zeroed for empty input.
pub fn corpus_stats(conversations: &[Conversation]) -> DialogueStats {
    let mut turns = 0usize;
    let mut q_tokens = 0u64;
    let mut a_tokens = 0u64;
    let mut topic_total = 0usize;
    let mut hard = 0usize;
    let mut soft = 0usize;
    for conv in conversations {
        turns += conv.turns.len();
        let mut topics: HashSet<&str> = HashSet::new();
        for turn in &conv.turns {
            q_tokens += approx_tokens(turn.query.len());
            a_tokens += approx_tokens(turn.answer.len());
            topics.insert(&turn.topic_tag);
            match turn.switch_kind {
                super::SwitchKind::Hard => hard += 1,
                super::SwitchKind::Soft => soft += 1,
                super::SwitchKind::None => {}
            }
        }
        topic_total += topics.len();
    }
    let div = |num: f64, den: usize| if den == 0 { 0.0 } else { num / den as f64 };
    DialogueStats {
        conversations: conversations.len(),
        turns,
        mean_tokens_per_question: div(q_tokens as f64, turns),
        mean_tokens_per_answer: div(a_tokens as f64, turns),
        mean_topics_per_conversation: div(topic_total as f64, conversations.len()),
        hard_switch_turns: hard,
        soft_switch_turns: soft,
    }
}
