//! Stage orchestration: curate → cluster → generate → audit → bench →
//! report, with content-addressed skip logic and atomic artifact writes.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::audit::{audit_conversations, AuditReport};
use crate::cluster::{cluster_chunks, SemanticCluster};
use crate::curate::{
    curate_corpus, Chunk, CorpusIndex, HeuristicScorer, QualityScorer, RawDocument, RemoteScorer,
};
use crate::dialogue::{corpus_stats, generate_batch, Conversation};
use crate::provider::{estimate_dialogue_cost, Gateway};
use crate::retrieval::{
    instances_from_conversations, judged_runs, metrics_report, retrieve_all, rewrite_all,
    EmbeddingIndex, MetricsReport, RankedList,
};
use crate::store;
use crate::{Error, Result};

use super::config::{RunConfig, ScorerKind};
use super::manifest::{digest_inputs, digest_outputs, RunManifest, StageEntry};
use super::report::{emit_report, render_series_csv, render_text};

/// Planning constants for the pre-flight cost estimate: the assumed token
/// footprint of one generated turn.
pub const EST_INPUT_TOKENS_PER_TURN: u64 = 3000;
pub const EST_OUTPUT_TOKENS_PER_TURN: u64 = 80;
/// Assumed footprint of one judge call during auditing.
pub const EST_AUDIT_INPUT_TOKENS: u64 = 1200;
pub const EST_AUDIT_OUTPUT_TOKENS: u64 = 120;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Curate,
    Cluster,
    Generate,
    Audit,
    Bench,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::Curate,
        Stage::Cluster,
        Stage::Generate,
        Stage::Audit,
        Stage::Bench,
        Stage::Report,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::Curate => "curate",
            Stage::Cluster => "cluster",
            Stage::Generate => "generate",
            Stage::Audit => "audit",
            Stage::Bench => "bench",
            Stage::Report => "report",
        }
    }

    pub fn from_str(s: &str) -> Result<Stage> {
        Stage::ALL
            .into_iter()
            .find(|stage| stage.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown stage '{s}'")))
    }
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Artifact layout under the run's output directory.
#[derive(Debug, Clone)]
pub struct StagePaths {
    pub chunks: PathBuf,
    pub clusters: PathBuf,
    pub conversations: PathBuf,
    pub audit_records: PathBuf,
    pub audit_summary: PathBuf,
    pub bench_runs: PathBuf,
    pub bench_report: PathBuf,
    pub report_json: PathBuf,
    pub report_txt: PathBuf,
    pub series_csv: PathBuf,
    pub manifest: PathBuf,
}

impl StagePaths {
    pub fn new(out_dir: &Path) -> Self {
        StagePaths {
            chunks: out_dir.join("chunks.jsonl"),
            clusters: out_dir.join("clusters.jsonl"),
            conversations: out_dir.join("conversations.jsonl"),
            audit_records: out_dir.join("audit").join("records.jsonl"),
            audit_summary: out_dir.join("audit").join("summary.json"),
            bench_runs: out_dir.join("bench").join("runs.jsonl"),
            bench_report: out_dir.join("bench").join("report.json"),
            report_json: out_dir.join("report").join("report.json"),
            report_txt: out_dir.join("report").join("report.txt"),
            series_csv: out_dir.join("report").join("series.csv"),
            manifest: out_dir.join("manifest.json"),
        }
    }
}

/// Retrieval evaluation artifact: the raw arm, and the rewrite arm when a
/// rewriter model is configured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchReport {
    pub raw: MetricsReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rewritten: Option<MetricsReport>,
    /// Rewritten minus raw Recall@5, both arms restricted to the instances
    /// the rewriter handled.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rewrite_gap_r5: Option<f64>,
    /// Instances the rewrite arm excluded after provider failures.
    pub rewrite_excluded: usize,
}

#[derive(Debug, Clone)]
pub struct StageOutcome {
    pub stage: Stage,
    pub skipped: bool,
    pub entry: StageEntry,
}

/// Run one stage: validate inputs, skip when the manifest proves the
/// outputs current, otherwise execute, write outputs atomically, and update
/// the manifest.
pub fn run_stage(stage: Stage, cfg: &RunConfig, force: bool) -> Result<StageOutcome> {
    let paths = StagePaths::new(&cfg.out_dir);
    let config_snapshot = serde_json::to_value(cfg)
        .map_err(|e| Error::Config(format!("config not serializable: {e}")))?;
    let mut manifest = RunManifest::load_or_new(&paths.manifest, config_snapshot);

    let (inputs, outputs, section) = stage_io(stage, cfg, &paths);
    for input in &inputs {
        if !input.exists() {
            return Err(Error::MissingInput(input.clone()));
        }
    }
    let input_refs: Vec<&Path> = inputs.iter().map(|p| p.as_path()).collect();
    let output_refs: Vec<&Path> = outputs.iter().map(|p| p.as_path()).collect();
    let input_digest = digest_inputs(&section, cfg.seed, &input_refs)?;

    if !force && manifest.stage_is_current(stage.as_str(), &input_digest, &output_refs) {
        log::info!("stage {stage} is current; skipping");
        return Ok(StageOutcome {
            stage,
            skipped: true,
            entry: manifest.stages[stage.as_str()].clone(),
        });
    }

    let started = Instant::now();
    let gateway = cfg.gateway()?;
    match stage {
        Stage::Curate => run_curate(cfg, &gateway, &paths)?,
        Stage::Cluster => run_cluster(cfg, &gateway, &paths)?,
        Stage::Generate => run_generate(cfg, &gateway, &paths)?,
        Stage::Audit => run_audit(cfg, &gateway, &paths)?,
        Stage::Bench => run_bench(cfg, &gateway, &paths)?,
        Stage::Report => run_report(cfg, &manifest, &paths)?,
    }

    let entry = StageEntry {
        input_digest,
        output_digest: digest_outputs(&output_refs)?,
        wall_time_ms: started.elapsed().as_millis() as u64,
        provider_cost_usd: gateway.ledger().total_cost().as_dollars(),
        provider_calls: gateway.ledger().call_count(),
    };
    manifest.record_stage(stage.as_str(), entry.clone());
    manifest.save(&paths.manifest)?;
    Ok(StageOutcome { stage, skipped: false, entry })
}

/// Run all six stages in order.
pub fn run_all(cfg: &RunConfig, force: bool) -> Result<Vec<StageOutcome>> {
    Stage::ALL.iter().map(|&stage| run_stage(stage, cfg, force)).collect()
}

/// The stage's input files, output files, and the config section that
/// participates in its input digest.
fn stage_io(
    stage: Stage,
    cfg: &RunConfig,
    paths: &StagePaths,
) -> (Vec<PathBuf>, Vec<PathBuf>, serde_json::Value) {
    fn section<A: Serialize, B: Serialize>(a: &A, b: &B) -> serde_json::Value {
        serde_json::json!([
            serde_json::to_value(a).unwrap_or_default(),
            serde_json::to_value(b).unwrap_or_default()
        ])
    }
    match stage {
        Stage::Curate => (
            vec![cfg.curate.input.clone()],
            vec![paths.chunks.clone()],
            section(&cfg.curate, &cfg.provider),
        ),
        Stage::Cluster => (
            vec![paths.chunks.clone()],
            vec![paths.clusters.clone()],
            section(&cfg.cluster, &cfg.provider),
        ),
        Stage::Generate => (
            vec![paths.clusters.clone(), paths.chunks.clone()],
            vec![paths.conversations.clone()],
            section(&cfg.generate, &cfg.provider),
        ),
        Stage::Audit => (
            vec![paths.conversations.clone(), paths.chunks.clone()],
            vec![paths.audit_records.clone(), paths.audit_summary.clone()],
            section(&cfg.audit, &cfg.provider),
        ),
        Stage::Bench => (
            vec![paths.conversations.clone(), paths.chunks.clone()],
            vec![paths.bench_runs.clone(), paths.bench_report.clone()],
            section(&cfg.bench, &cfg.provider),
        ),
        Stage::Report => {
            // Optional inputs participate in the digest only when present.
            let mut inputs = Vec::new();
            for p in [&paths.audit_summary, &paths.bench_report, &paths.conversations] {
                if p.exists() {
                    inputs.push((*p).clone());
                }
            }
            (
                inputs,
                vec![
                    paths.report_json.clone(),
                    paths.report_txt.clone(),
                    paths.series_csv.clone(),
                ],
                serde_json::json!({"report": true}),
            )
        }
    }
}

fn run_curate(cfg: &RunConfig, gateway: &Gateway, paths: &StagePaths) -> Result<()> {
    let docs: Vec<RawDocument> = store::read_jsonl(&cfg.curate.input)?;
    let params = cfg.curation_params();
    let remote;
    let heuristic = HeuristicScorer;
    let scorer: &dyn QualityScorer = match cfg.curate.scorer {
        ScorerKind::Heuristic => &heuristic,
        ScorerKind::Remote => {
            remote = RemoteScorer::new(gateway, &cfg.curate.scorer_model);
            &remote
        }
    };
    let outcome = curate_corpus(&docs, &params, scorer)?;
    log::info!(
        "curate: {} chunks kept, {} duplicates dropped, {} quality-dropped",
        outcome.chunks.len(),
        outcome.dropped_duplicates.len(),
        outcome.dropped_quality.len()
    );
    store::write_jsonl(&paths.chunks, &outcome.chunks)
}

fn run_cluster(cfg: &RunConfig, gateway: &Gateway, paths: &StagePaths) -> Result<()> {
    let chunks: Vec<Chunk> = store::read_jsonl(&paths.chunks)?;
    let clusters = cluster_chunks(&chunks, &cfg.cluster_params(), gateway, cfg.seed)?;
    log::info!("cluster: {} clusters from {} chunks", clusters.len(), chunks.len());
    store::write_jsonl(&paths.clusters, &clusters)
}

fn run_generate(cfg: &RunConfig, gateway: &Gateway, paths: &StagePaths) -> Result<()> {
    let clusters: Vec<SemanticCluster> = store::read_jsonl(&paths.clusters)?;
    enforce_budget(
        cfg,
        clusters.len() as u64,
        cfg.generate.turns as u32,
        EST_INPUT_TOKENS_PER_TURN,
        EST_OUTPUT_TOKENS_PER_TURN,
    )?;
    let chunks: Vec<Chunk> = store::read_jsonl(&paths.chunks)?;
    let corpus = CorpusIndex::from_chunks(chunks);
    let conversations = generate_batch(&clusters, &corpus, &cfg.generate, gateway, cfg.seed)?;
    log::info!("generate: {} conversations", conversations.len());
    store::write_jsonl(&paths.conversations, &conversations)
}

fn run_audit(cfg: &RunConfig, gateway: &Gateway, paths: &StagePaths) -> Result<()> {
    let conversations: Vec<Conversation> = store::read_jsonl(&paths.conversations)?;
    let turn_count: u64 = conversations.iter().map(|c| c.turns.len() as u64).sum();
    let judge_calls = turn_count * cfg.audit.judges.len() as u64 * 4;
    enforce_budget(cfg, judge_calls, 1, EST_AUDIT_INPUT_TOKENS, EST_AUDIT_OUTPUT_TOKENS)?;
    let chunks: Vec<Chunk> = store::read_jsonl(&paths.chunks)?;
    let corpus = CorpusIndex::from_chunks(chunks);
    let outcome =
        audit_conversations(&conversations, &corpus, &cfg.audit_params(), gateway, cfg.seed)?;
    store::write_jsonl(&paths.audit_records, &outcome.records)?;
    store::write_json(&paths.audit_summary, &outcome.report)
}

fn run_bench(cfg: &RunConfig, gateway: &Gateway, paths: &StagePaths) -> Result<()> {
    let conversations: Vec<Conversation> = store::read_jsonl(&paths.conversations)?;
    let chunks: Vec<Chunk> = store::read_jsonl(&paths.chunks)?;
    let corpus = CorpusIndex::from_chunks(chunks);
    let index = EmbeddingIndex::build(&corpus, gateway)?;
    let instances = instances_from_conversations(&conversations);
    let budget = cfg.bench.budget.min(corpus.len());

    let runs: Vec<RankedList> = retrieve_all(&instances, &index, gateway, budget)?;
    let raw_judged = judged_runs(&instances, &runs)?;
    let raw = metrics_report(&raw_judged, &cfg.bench.k_set);

    let (rewritten, gap, excluded) = if cfg.bench.rewrite_model.is_empty() {
        (None, None, 0)
    } else {
        let (kept, rewritten_instances) =
            rewrite_all(&instances, &cfg.bench.rewrite_model, gateway);
        let rewritten_runs = retrieve_all(&rewritten_instances, &index, gateway, budget)?;
        let rewritten_judged = judged_runs(&rewritten_instances, &rewritten_runs)?;
        let rewritten_metrics = metrics_report(&rewritten_judged, &cfg.bench.k_set);
        let raw_on_kept: Vec<_> = kept.iter().map(|&i| raw_judged[i].clone()).collect();
        let gap = crate::retrieval::recall_at_k(&rewritten_judged, 5)
            - crate::retrieval::recall_at_k(&raw_on_kept, 5);
        (Some(rewritten_metrics), Some(gap), instances.len() - kept.len())
    };

    store::write_jsonl(&paths.bench_runs, &runs)?;
    store::write_json(
        &paths.bench_report,
        &BenchReport { raw, rewritten, rewrite_gap_r5: gap, rewrite_excluded: excluded },
    )
}

fn run_report(_cfg: &RunConfig, manifest: &RunManifest, paths: &StagePaths) -> Result<()> {
    write_report_files(manifest, paths).map(|_| ())
}

/// Assemble and write report.json / report.txt / series.csv from whatever
/// stage artifacts exist under `paths`. Also used by the standalone
/// `report` subcommand against an existing run directory.
pub fn write_report_files(
    manifest: &RunManifest,
    paths: &StagePaths,
) -> Result<super::report::ReportDoc> {
    let audit: Option<AuditReport> = store::read_json(&paths.audit_summary).ok();
    let bench: Option<BenchReport> = store::read_json(&paths.bench_report).ok();
    let stats = store::read_jsonl::<Conversation>(&paths.conversations)
        .ok()
        .map(|convs| corpus_stats(&convs));
    let doc = emit_report(manifest, audit.as_ref(), bench.as_ref(), stats.as_ref());
    store::write_json(&paths.report_json, &doc)?;
    store::write_atomic(&paths.report_txt, render_text(&doc).as_bytes())?;
    store::write_atomic(&paths.series_csv, render_series_csv(bench.as_ref()).as_bytes())?;
    Ok(doc)
}

/// Refuse a provider-calling stage whose estimated cost exceeds the
/// configured ceiling, before any provider call happens.
fn enforce_budget(
    cfg: &RunConfig,
    units: u64,
    turns_per_unit: u32,
    input_tokens: u64,
    output_tokens: u64,
) -> Result<()> {
    let Some(ceiling) = cfg.cost_ceiling_usd else {
        return Ok(());
    };
    if units == 0 || turns_per_unit == 0 {
        return Ok(());
    }
    let per_unit =
        estimate_dialogue_cost(turns_per_unit, input_tokens, output_tokens, &cfg.pricing)?;
    let estimate = per_unit.as_dollars() * units as f64;
    if estimate > ceiling {
        return Err(Error::Budget { estimate, ceiling });
    }
    Ok(())
}
