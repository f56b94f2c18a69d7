//! Ranking metrics: Recall@k, MRR@k, NDCG@k.
//!
//! Recall gives fractional credit `|gold ∩ top-k| / |gold|`, which reduces
//! to the binary definition for the generator's single-gold instances.
//! NDCG uses binary relevance with the instance's own ideal ranking as the
//! normalizer.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::dialogue::SwitchKind;

/// A ranked run paired with the instance's gold set, the unit the metric
/// functions consume.
#[derive(Debug, Clone)]
pub struct JudgedRun {
    pub ranked_ids: Vec<String>,
    pub gold: HashSet<String>,
    pub switch_kind: Option<SwitchKind>,
}

pub fn instance_recall(run: &JudgedRun, k: usize) -> f64 {
    if run.gold.is_empty() {
        return 0.0;
    }
    let hits = run.ranked_ids.iter().take(k).filter(|id| run.gold.contains(*id)).count();
    hits as f64 / run.gold.len() as f64
}

pub fn instance_mrr(run: &JudgedRun, k: usize) -> f64 {
    run.ranked_ids
        .iter()
        .take(k)
        .position(|id| run.gold.contains(id))
        .map(|pos| 1.0 / (pos as f64 + 1.0))
        .unwrap_or(0.0)
}

pub fn instance_ndcg(run: &JudgedRun, k: usize) -> f64 {
    let dcg: f64 = run
        .ranked_ids
        .iter()
        .take(k)
        .enumerate()
        .filter(|(_, id)| run.gold.contains(*id))
        .map(|(pos, _)| 1.0 / ((pos as f64 + 2.0).log2()))
        .sum();
    let ideal = run.gold.len().min(k);
    let idcg: f64 = (0..ideal).map(|pos| 1.0 / ((pos as f64 + 2.0).log2())).sum();
    if idcg == 0.0 {
        0.0
    } else {
        dcg / idcg
    }
}

pub fn recall_at_k(runs: &[JudgedRun], k: usize) -> f64 {
    mean(runs, |r| instance_recall(r, k))
}

pub fn mrr_at_k(runs: &[JudgedRun], k: usize) -> f64 {
    mean(runs, |r| instance_mrr(r, k))
}

pub fn ndcg_at_k(runs: &[JudgedRun], k: usize) -> f64 {
    mean(runs, |r| instance_ndcg(r, k))
}

fn mean(runs: &[JudgedRun], f: impl Fn(&JudgedRun) -> f64) -> f64 {
    if runs.is_empty() {
        return 0.0;
    }
    runs.iter().map(f).sum::<f64>() / runs.len() as f64
}

/// Aggregate metrics, all values in [0, 1] before presentation scaling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsReport {
    /// k → mean recall, over the extended k set.
    pub recall: std::collections::BTreeMap<usize, f64>,
    pub mrr_at_20: f64,
    pub ndcg_at_20: f64,
    pub instances: usize,
    /// Metrics split by the turn's topic-switch kind.
    pub per_switch_kind: std::collections::BTreeMap<String, SwitchBreakdown>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchBreakdown {
    pub instances: usize,
    pub recall_at_5: f64,
    pub recall_at_20: f64,
    pub mrr_at_20: f64,
    pub ndcg_at_20: f64,
}

/// The extended recall budget set.
pub const DEFAULT_K_SET: &[usize] = &[1, 5, 20, 100, 500, 1000];

pub fn metrics_report(runs: &[JudgedRun], k_set: &[usize]) -> MetricsReport {
    let recall = k_set.iter().map(|&k| (k, recall_at_k(runs, k))).collect();
    let mut per_switch_kind = std::collections::BTreeMap::new();
    for kind in [SwitchKind::None, SwitchKind::Soft, SwitchKind::Hard] {
        let subset: Vec<JudgedRun> =
            runs.iter().filter(|r| r.switch_kind == Some(kind)).cloned().collect();
        if subset.is_empty() {
            continue;
        }
        let label = match kind {
            SwitchKind::None => "none",
            SwitchKind::Soft => "soft",
            SwitchKind::Hard => "hard",
        };
        per_switch_kind.insert(
            label.to_string(),
            SwitchBreakdown {
                instances: subset.len(),
                recall_at_5: recall_at_k(&subset, 5),
                recall_at_20: recall_at_k(&subset, 20),
                mrr_at_20: mrr_at_k(&subset, 20),
                ndcg_at_20: ndcg_at_k(&subset, 20),
            },
        );
    }
    MetricsReport {
        recall,
        mrr_at_20: mrr_at_k(runs, 20),
        ndcg_at_20: ndcg_at_k(runs, 20),
        instances: runs.len(),
        per_switch_kind,
    }
}
