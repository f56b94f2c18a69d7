//! Report emission: one machine JSON document, a human-readable text
//! rendering, and CSV series for external plotting.
//!
//! Retrieval metrics are presented ×100 with two decimals (so 0.3016 prints
//! as 30.16); audit means stay on their native 1–5 scale.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::audit::{AuditReport, FlagReason};
use crate::dialogue::DialogueStats;

use super::manifest::RunManifest;
use super::stages::BenchReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDoc {
    pub run_id: String,
    /// Sections omitted because their inputs were missing.
    pub notices: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit: Option<AuditSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retrieval: Option<RetrievalSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dialogue: Option<DialogueStats>,
    pub provider_cost_usd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditSection {
    /// Metric → ensemble mean on the 1–5 scale, rounded to 2 decimals.
    pub metric_means: BTreeMap<String, f64>,
    pub noise_flags: usize,
    pub sparsity_flags: usize,
    pub instances: usize,
    pub unscored_calls: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetrievalSection {
    /// k → Recall@k ×100, 2 decimals.
    pub recall_pct: BTreeMap<usize, f64>,
    pub mrr_at_20_pct: f64,
    pub ndcg_at_20_pct: f64,
    pub instances: usize,
    /// Recall@20 − Recall@5, percentage points.
    pub recall_gap_5_to_20_pct: Option<f64>,
    /// Rewritten − raw Recall@5, percentage points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rewrite_gap_r5_pct: Option<f64>,
}

/// Fraction in [0,1] → percentage with 2 decimals.
pub fn pct(v: f64) -> f64 {
    (v * 10000.0).round() / 100.0
}

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

/// Assemble the report document from whatever stage artifacts exist.
pub fn emit_report(
    manifest: &RunManifest,
    audit: Option<&AuditReport>,
    bench: Option<&BenchReport>,
    dialogue: Option<&DialogueStats>,
) -> ReportDoc {
    let mut notices = Vec::new();

    let audit_section = match audit {
        Some(report) => Some(AuditSection {
            metric_means: report
                .metric_means
                .iter()
                .map(|(k, v)| (k.clone(), round2(*v)))
                .collect(),
            noise_flags: report
                .flagged
                .iter()
                .filter(|f| f.reason == FlagReason::NoiseSuspect)
                .count(),
            sparsity_flags: report
                .flagged
                .iter()
                .filter(|f| f.reason == FlagReason::SparsitySuspect)
                .count(),
            instances: report.instances,
            unscored_calls: report.unscored_calls,
        }),
        None => {
            notices.push("audit summary missing; audit section omitted".into());
            None
        }
    };

    let retrieval_section = match bench {
        Some(report) => {
            let recall_pct: BTreeMap<usize, f64> =
                report.raw.recall.iter().map(|(&k, &v)| (k, pct(v))).collect();
            let gap = match (recall_pct.get(&5), recall_pct.get(&20)) {
                (Some(r5), Some(r20)) => Some(round2(r20 - r5)),
                _ => None,
            };
            Some(RetrievalSection {
                mrr_at_20_pct: pct(report.raw.mrr_at_20),
                ndcg_at_20_pct: pct(report.raw.ndcg_at_20),
                instances: report.raw.instances,
                recall_gap_5_to_20_pct: gap,
                rewrite_gap_r5_pct: report.rewrite_gap_r5.map(pct),
                recall_pct,
            })
        }
        None => {
            notices.push("bench report missing; retrieval section omitted".into());
            None
        }
    };

    if dialogue.is_none() {
        notices.push("conversations missing; dialogue section omitted".into());
    }

    ReportDoc {
        run_id: manifest.run_id.clone(),
        notices,
        audit: audit_section,
        retrieval: retrieval_section,
        dialogue: dialogue.cloned(),
        provider_cost_usd: manifest.stages.values().map(|s| s.provider_cost_usd).sum(),
    }
}

/// Human-readable rendering of the report document.
pub fn render_text(doc: &ReportDoc) -> String {
    let mut out = String::new();
    out.push_str(&format!("benchmark report — {}\n", doc.run_id));
    out.push_str("=====================================\n");

    if let Some(dialogue) = &doc.dialogue {
        out.push_str(&format!(
            "dialogues: {} conversations, {} turns, {:.2} topics/conversation\n",
            dialogue.conversations, dialogue.turns, dialogue.mean_topics_per_conversation
        ));
        out.push_str(&format!(
            "tokens/question: {:.2}   tokens/answer: {:.2}\n",
            dialogue.mean_tokens_per_question, dialogue.mean_tokens_per_answer
        ));
    }

    if let Some(audit) = &doc.audit {
        let means = &audit.metric_means;
        let get = |k: &str| means.get(k).map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into());
        out.push_str(&format!(
            "audit means (1-5): completeness {} | query-evidence {} | faithfulness {} | answer-quality {}\n",
            get("completeness"),
            get("query_evidence"),
            get("faithfulness"),
            get("answer_quality"),
        ));
        out.push_str(&format!(
            "flags: {} noise suspects, {} sparsity suspects over {} instances ({} unscored calls)\n",
            audit.noise_flags, audit.sparsity_flags, audit.instances, audit.unscored_calls
        ));
    }

    if let Some(r) = &doc.retrieval {
        let fmt = |k: usize| r.recall_pct.get(&k).map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into());
        if r.recall_pct.contains_key(&5) && r.recall_pct.contains_key(&20) {
            out.push_str(&format!("retrieval R@5 / R@20: {} / {}\n", fmt(5), fmt(20)));
        }
        let all: Vec<String> =
            r.recall_pct.iter().map(|(k, v)| format!("R@{k} {v:.2}")).collect();
        out.push_str(&format!("recall curve: {}\n", all.join("  ")));
        out.push_str(&format!(
            "MRR@20 {:.2}   NDCG@20 {:.2}   ({} instances)\n",
            r.mrr_at_20_pct, r.ndcg_at_20_pct, r.instances
        ));
        if let Some(gap) = r.recall_gap_5_to_20_pct {
            out.push_str(&format!("R@5→R@20 gap: {gap:+.2}\n"));
        }
        if let Some(gap) = r.rewrite_gap_r5_pct {
            out.push_str(&format!("rewrite gap (R@5): {gap:+.2}\n"));
        }
    }

    out.push_str(&format!("provider cost: ${:.6}\n", doc.provider_cost_usd));
    for notice in &doc.notices {
        out.push_str(&format!("note: {notice}\n"));
    }
    out
}

/// CSV series (`series,k,value_pct`) for external plotting.
pub fn render_series_csv(bench: Option<&BenchReport>) -> String {
    let mut out = String::from("series,k,value_pct\n");
    if let Some(report) = bench {
        for (k, v) in &report.raw.recall {
            out.push_str(&format!("recall,{k},{:.2}\n", pct(*v)));
        }
        out.push_str(&format!("mrr,20,{:.2}\n", pct(report.raw.mrr_at_20)));
        out.push_str(&format!("ndcg,20,{:.2}\n", pct(report.raw.ndcg_at_20)));
        if let Some(rewritten) = &report.rewritten {
            for (k, v) in &rewritten.recall {
                out.push_str(&format!("recall_rewritten,{k},{:.2}\n", pct(*v)));
            }
        }
    }
    out
}
