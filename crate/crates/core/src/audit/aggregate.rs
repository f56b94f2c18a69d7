//! Ensemble aggregation: judge means per instance, instance means per
//! metric, and noise/sparsity flags.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::judge::DiscriminabilityPick;
use super::{JudgeScore, Metric};

/// Everything the judges produced for one instance.
#[derive(Debug, Clone, Default)]
pub struct InstanceAudit {
    pub conv_id: String,
    pub turn_index: usize,
    /// Rubric scores across judges (query_evidence, faithfulness,
    /// answer_quality).
    pub scores: Vec<JudgeScore>,
    /// Discriminability outcomes across judges.
    pub picks: Vec<DiscriminabilityPick>,
    /// Count of judge calls that stayed unscored after retries.
    pub unscored: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct AuditThresholds {
    /// Instances whose ensemble query-evidence mean falls below this are
    /// flagged as annotation-noise suspects.
    pub tau_noise: f64,
    /// Instances whose gold-pick rate falls below this are flagged as
    /// annotation-sparsity suspects.
    pub tau_sparse: f64,
}

impl Default for AuditThresholds {
    fn default() -> Self {
        AuditThresholds { tau_noise: 3.0, tau_sparse: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlagReason {
    NoiseSuspect,
    SparsitySuspect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlaggedInstance {
    pub conv_id: String,
    pub turn_index: usize,
    pub reason: FlagReason,
}

/// Aggregate audit results, serialized as the summary JSON artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditReport {
    pub instances: usize,
    /// Metric name → ensemble mean in [1, 5] (mean over judges per
    /// instance, then over instances).
    pub metric_means: BTreeMap<String, f64>,
    pub flagged: Vec<FlaggedInstance>,
    /// Judge calls that produced no usable score.
    pub unscored_calls: usize,
}

impl AuditReport {
    pub fn mean(&self, metric: Metric) -> Option<f64> {
        self.metric_means.get(metric.as_str()).copied()
    }
}

/// Map a gold-hit rate onto the 1–5 scale shared by the rubric metrics.
pub fn completeness_value(hit_rate: f64) -> f64 {
    1.0 + 4.0 * hit_rate
}

pub fn aggregate(instances: &[InstanceAudit], thresholds: &AuditThresholds) -> AuditReport {
    let mut metric_means = BTreeMap::new();
    let mut flagged = Vec::new();

    for metric in [Metric::QueryEvidence, Metric::Faithfulness, Metric::AnswerQuality] {
        let mut instance_means = Vec::new();
        for inst in instances {
            let values: Vec<f64> = inst
                .scores
                .iter()
                .filter(|s| s.metric == metric)
                .map(|s| s.value)
                .collect();
            if !values.is_empty() {
                instance_means.push(values.iter().sum::<f64>() / values.len() as f64);
            }
        }
        if !instance_means.is_empty() {
            let mean = instance_means.iter().sum::<f64>() / instance_means.len() as f64;
            metric_means.insert(metric.as_str().to_string(), mean);
        }
    }

    let mut completeness_means = Vec::new();
    for inst in instances {
        if !inst.picks.is_empty() {
            let rate = inst.picks.iter().filter(|p| p.gold_hit).count() as f64
                / inst.picks.len() as f64;
            completeness_means.push(completeness_value(rate));
            if rate < thresholds.tau_sparse {
                flagged.push(FlaggedInstance {
                    conv_id: inst.conv_id.clone(),
                    turn_index: inst.turn_index,
                    reason: FlagReason::SparsitySuspect,
                });
            }
        }
        let qe: Vec<f64> = inst
            .scores
            .iter()
            .filter(|s| s.metric == Metric::QueryEvidence)
            .map(|s| s.value)
            .collect();
        if !qe.is_empty() && qe.iter().sum::<f64>() / (qe.len() as f64) < thresholds.tau_noise {
            flagged.push(FlaggedInstance {
                conv_id: inst.conv_id.clone(),
                turn_index: inst.turn_index,
                reason: FlagReason::NoiseSuspect,
            });
        }
    }
    if !completeness_means.is_empty() {
        let mean = completeness_means.iter().sum::<f64>() / completeness_means.len() as f64;
        metric_means.insert(Metric::Completeness.as_str().to_string(), mean);
    }

    AuditReport {
        instances: instances.len(),
        metric_means,
        flagged,
        unscored_calls: instances.iter().map(|i| i.unscored).sum(),
    }
}
