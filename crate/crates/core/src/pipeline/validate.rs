//! Schema validation over persisted artifacts.

use std::path::Path;

use crate::{Error, Result};

/// The artifact schemas the `validate` subcommand understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemaKind {
    RawDocuments,
    Chunks,
    Clusters,
    Conversations,
    AuditRecords,
    AuditSummary,
    BenchRuns,
    BenchReport,
    Manifest,
    Report,
}

impl SchemaKind {
    pub const ALL: [SchemaKind; 10] = [
        SchemaKind::RawDocuments,
        SchemaKind::Chunks,
        SchemaKind::Clusters,
        SchemaKind::Conversations,
        SchemaKind::AuditRecords,
        SchemaKind::AuditSummary,
        SchemaKind::BenchRuns,
        SchemaKind::BenchReport,
        SchemaKind::Manifest,
        SchemaKind::Report,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SchemaKind::RawDocuments => "raw-documents",
            SchemaKind::Chunks => "chunks",
            SchemaKind::Clusters => "clusters",
            SchemaKind::Conversations => "conversations",
            SchemaKind::AuditRecords => "audit-records",
            SchemaKind::AuditSummary => "audit-summary",
            SchemaKind::BenchRuns => "bench-runs",
            SchemaKind::BenchReport => "bench-report",
            SchemaKind::Manifest => "manifest",
            SchemaKind::Report => "report",
        }
    }

    pub fn from_str(s: &str) -> Result<SchemaKind> {
        SchemaKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown schema kind '{s}'")))
    }
}

/// Validate one file against a schema; returns the record count.
pub fn validate_file(kind: SchemaKind, path: &Path) -> Result<usize> {
    use crate::store::{read_json, read_jsonl};
    match kind {
        SchemaKind::RawDocuments => {
            Ok(read_jsonl::<crate::curate::RawDocument>(path)?.len())
        }
        SchemaKind::Chunks => Ok(read_jsonl::<crate::curate::Chunk>(path)?.len()),
        SchemaKind::Clusters => Ok(read_jsonl::<crate::cluster::SemanticCluster>(path)?.len()),
        SchemaKind::Conversations => {
            let conversations = read_jsonl::<crate::dialogue::Conversation>(path)?;
            for conv in &conversations {
                for (i, turn) in conv.turns.iter().enumerate() {
                    if turn.index != i + 1 {
                        return Err(Error::schema(
                            path,
                            None,
                            format!("{}: turn indices not contiguous", conv.conv_id),
                        ));
                    }
                    if turn.gold_ids.is_empty() {
                        return Err(Error::schema(
                            path,
                            None,
                            format!("{} turn {}: empty gold set", conv.conv_id, turn.index),
                        ));
                    }
                }
            }
            Ok(conversations.len())
        }
        SchemaKind::AuditRecords => {
            let records = read_jsonl::<crate::audit::AuditRecord>(path)?;
            for r in &records {
                if !(1.0..=5.0).contains(&r.value) {
                    return Err(Error::schema(
                        path,
                        None,
                        format!("{}#{}: value {} outside [1,5]", r.conv_id, r.turn_index, r.value),
                    ));
                }
            }
            Ok(records.len())
        }
        SchemaKind::AuditSummary => {
            read_json::<crate::audit::AuditReport>(path)?;
            Ok(1)
        }
        SchemaKind::BenchRuns => {
            let runs = read_jsonl::<crate::retrieval::RankedList>(path)?;
            for run in &runs {
                let mut seen = std::collections::HashSet::new();
                for pair in run.ranked.windows(2) {
                    if pair[0].score < pair[1].score {
                        return Err(Error::schema(
                            path,
                            None,
                            format!("{}#{}: scores not non-increasing", run.conv_id, run.turn_index),
                        ));
                    }
                }
                for e in &run.ranked {
                    if !seen.insert(&e.chunk_id) {
                        return Err(Error::schema(
                            path,
                            None,
                            format!("{}#{}: duplicate id {}", run.conv_id, run.turn_index, e.chunk_id),
                        ));
                    }
                }
            }
            Ok(runs.len())
        }
        SchemaKind::BenchReport => {
            read_json::<super::stages::BenchReport>(path)?;
            Ok(1)
        }
        SchemaKind::Manifest => {
            read_json::<super::manifest::RunManifest>(path)?;
            Ok(1)
        }
        SchemaKind::Report => {
            read_json::<super::report::ReportDoc>(path)?;
            Ok(1)
        }
    }
}

/// Validate every artifact present in a run directory. Returns
/// `(schema name, count)` pairs for what was checked.
pub fn validate_run_dir(out_dir: &Path) -> Result<Vec<(String, usize)>> {
    let paths = super::stages::StagePaths::new(out_dir);
    let targets: [(SchemaKind, &Path); 9] = [
        (SchemaKind::Chunks, &paths.chunks),
        (SchemaKind::Clusters, &paths.clusters),
        (SchemaKind::Conversations, &paths.conversations),
        (SchemaKind::AuditRecords, &paths.audit_records),
        (SchemaKind::AuditSummary, &paths.audit_summary),
        (SchemaKind::BenchRuns, &paths.bench_runs),
        (SchemaKind::BenchReport, &paths.bench_report),
        (SchemaKind::Manifest, &paths.manifest),
        (SchemaKind::Report, &paths.report_json),
    ];
    let mut checked = Vec::new();
    for (kind, path) in targets {
        if path.exists() {
            let count = validate_file(kind, path)?;
            checked.push((kind.as_str().to_string(), count));
        }
    }
    Ok(checked)
}
