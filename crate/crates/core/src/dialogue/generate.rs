//! Conversation generation from semantic clusters.
//!
//! Each turn draws a hard switch with the configured probability (never on
//! turn 1), asks the questioner for a gold document and question over the
//! active cluster, grounds the responder's answer in that document, and on
//! turns after the first runs the polisher over the raw query. Per-cluster
//! RNG substreams make a batch byte-reproducible for any worker count.

use rand::Rng;

use crate::cluster::SemanticCluster;
use crate::curate::{Chunk, CorpusIndex};
use crate::provider::Gateway;
use crate::rng::substream;
use crate::{exec, Error, Result};

use super::agents;
use super::{AgentConfig, Conversation, SwitchKind, Turn};

/// Generate one conversation anchored at `primary`.
///
/// Hard switches draw a uniformly random other cluster from `pool`; soft
/// switches arise when the questioner picks a different gold document than
/// the previous turn.
pub fn generate_conversation(
    primary: &SemanticCluster,
    pool: &[SemanticCluster],
    corpus: &CorpusIndex,
    cfg: &AgentConfig,
    gateway: &Gateway,
    seed: u64,
) -> Result<Conversation> {
    cfg.validate()?;
    if primary.member_ids.len() < 2 {
        return Err(Error::Precondition(format!(
            "primary cluster {} has fewer than 2 members",
            primary.cluster_id
        )));
    }
    let others: Vec<&SemanticCluster> =
        pool.iter().filter(|c| c.cluster_id != primary.cluster_id).collect();
    if cfg.hard_switch_prob > 0.0 && others.is_empty() {
        return Err(Error::Precondition(
            "hard switching needs at least one other cluster in the pool".into(),
        ));
    }

    let mut rng = substream(seed, &["generate", &primary.cluster_id]);
    let mut turns: Vec<Turn> = Vec::with_capacity(cfg.turns);
    let mut hard_switch_clusters = Vec::new();
    let mut prev_gold: Option<String> = None;

    for index in 1..=cfg.turns {
        let hard = index > 1 && rng.gen_bool(cfg.hard_switch_prob);
        let active = if hard {
            let pick = others[rng.gen_range(0..others.len())];
            hard_switch_clusters.push(pick.cluster_id.clone());
            pick
        } else {
            primary
        };
        let docs = resolve_members(active, corpus)?;

        let agent_seed: u64 = rng.gen();
        let (gold_pos, raw_query) = agents::ask(gateway, cfg, &docs, &turns, agent_seed)?;
        let gold = docs[gold_pos];
        let answer = agents::respond(gateway, cfg, &[gold], &raw_query, &turns, agent_seed)?;
        let query = if index == 1 {
            raw_query.clone()
        } else {
            agents::polish(gateway, cfg, &turns, &raw_query, agent_seed)?
        };

        let switch_kind = if hard {
            SwitchKind::Hard
        } else if index > 1 && prev_gold.as_deref() != Some(gold.chunk_id.as_str()) {
            SwitchKind::Soft
        } else {
            SwitchKind::None
        };
        prev_gold = Some(gold.chunk_id.clone());

        turns.push(Turn {
            index,
            query,
            raw_query,
            answer,
            gold_ids: vec![gold.chunk_id.clone()],
            topic_tag: gold.source_id.clone(),
            switch_kind,
        });
    }

    Ok(Conversation {
        conv_id: conv_id_for(primary),
        turns,
        primary_cluster: primary.cluster_id.clone(),
        hard_switch_clusters,
    })
}

fn conv_id_for(primary: &SemanticCluster) -> String {
    match primary.cluster_id.strip_prefix("cluster-") {
        Some(suffix) => format!("conv-{suffix}"),
        None => format!("conv-{}", primary.cluster_id),
    }
}

fn resolve_members<'c>(
    cluster: &SemanticCluster,
    corpus: &'c CorpusIndex,
) -> Result<Vec<&'c Chunk>> {
    cluster
        .member_ids
        .iter()
        .map(|id| {
            corpus.get(id).ok_or_else(|| {
                Error::Precondition(format!(
                    "cluster {} references unknown chunk {id}",
                    cluster.cluster_id
                ))
            })
        })
        .collect()
}

/// Generate one conversation per cluster, in parallel. Conversations that
/// abort (unrecoverable agent error) are discarded with a warning rather
/// than persisted half-built.
pub fn generate_batch(
    clusters: &[SemanticCluster],
    corpus: &CorpusIndex,
    cfg: &AgentConfig,
    gateway: &Gateway,
    seed: u64,
) -> Result<Vec<Conversation>> {
    let results = exec::map_slice(clusters, |primary| {
        generate_conversation(primary, clusters, corpus, cfg, gateway, seed)
    });
    let mut conversations = Vec::with_capacity(results.len());
    for (cluster, result) in clusters.iter().zip(results) {
        match result {
            Ok(conv) => conversations.push(conv),
            Err(err) => {
                log::warn!("discarding conversation for {}: {err}", cluster.cluster_id)
            }
        }
    }
    Ok(conversations)
}
