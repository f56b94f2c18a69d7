//! Pipeline orchestration: run config, content-hash manifest, stage
//! execution, schema validation, and report emission.

mod config;
mod manifest;
mod report;
mod stages;
mod validate;

pub use config::{
    AuditConfig, BenchConfig, ClusterConfig, CurateConfig, ProviderConfig, ProviderKind,
    RunConfig, ScorerKind,
};
pub use manifest::{digest_inputs, digest_outputs, RunManifest, StageEntry};
pub use report::{emit_report, pct, render_series_csv, render_text, ReportDoc};
pub use stages::{
    run_all, run_stage, write_report_files, BenchReport, Stage, StageOutcome, StagePaths,
};
pub use validate::{validate_file, validate_run_dir, SchemaKind};
