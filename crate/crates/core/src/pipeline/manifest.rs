//! Run manifest: per-stage content digests, timing, and provider cost.
//!
//! A stage whose input digest matches its manifest entry and whose outputs
//! still hash to the recorded digest is skipped on rerun, so an unchanged
//! pipeline makes zero provider calls.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::store;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    /// Stable id derived from the config snapshot (including the seed).
    pub run_id: String,
    pub config_digest: String,
    /// Full config snapshot for provenance.
    pub config: serde_json::Value,
    pub stages: BTreeMap<String, StageEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageEntry {
    /// Digest over the stage's config section, the seed, and its input
    /// files.
    pub input_digest: String,
    /// Digest over the stage's output files.
    pub output_digest: String,
    pub wall_time_ms: u64,
    pub provider_cost_usd: f64,
    pub provider_calls: usize,
}

impl RunManifest {
    pub fn new(config: serde_json::Value) -> Self {
        let config_digest = store::bytes_digest(config.to_string().as_bytes());
        // The run id identifies the configuration, not where it ran: path
        // fields are redacted so identical runs in different directories
        // share an id (and therefore byte-identical reports).
        let mut portable = config.clone();
        if let Some(map) = portable.as_object_mut() {
            map.remove("out_dir");
            if let Some(curate) = map.get_mut("curate").and_then(|c| c.as_object_mut()) {
                curate.remove("input");
            }
        }
        let run_digest = store::bytes_digest(portable.to_string().as_bytes());
        RunManifest {
            run_id: format!("run-{}", &run_digest[..12]),
            config_digest,
            config,
            stages: BTreeMap::new(),
        }
    }

    /// Load the manifest at `path` if it exists and matches this config;
    /// otherwise start fresh.
    pub fn load_or_new(path: &Path, config: serde_json::Value) -> Self {
        let fresh = RunManifest::new(config);
        match store::read_json::<RunManifest>(path) {
            Ok(existing) if existing.config_digest == fresh.config_digest => existing,
            _ => fresh,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        store::write_json(path, self)
    }

    /// True when the stage can be skipped: same inputs, outputs intact.
    pub fn stage_is_current(&self, stage: &str, input_digest: &str, outputs: &[&Path]) -> bool {
        let Some(entry) = self.stages.get(stage) else {
            return false;
        };
        if entry.input_digest != input_digest {
            return false;
        }
        match digest_outputs(outputs) {
            Ok(digest) => digest == entry.output_digest,
            Err(_) => false,
        }
    }

    pub fn record_stage(&mut self, stage: &str, entry: StageEntry) {
        self.stages.insert(stage.to_string(), entry);
    }
}

/// Combined digest over several output files, order-sensitive.
pub fn digest_outputs(outputs: &[&Path]) -> Result<String> {
    let mut combined = String::new();
    for path in outputs {
        combined.push_str(&store::file_digest(path)?);
        combined.push('\n');
    }
    Ok(store::bytes_digest(combined.as_bytes()))
}

/// Digest over a stage's effective inputs: its config section rendered as
/// JSON, the global seed, and the contents of each input file.
pub fn digest_inputs(
    config_section: &impl Serialize,
    seed: u64,
    input_files: &[&Path],
) -> Result<String> {
    let mut combined = serde_json::to_string(config_section).unwrap_or_default();
    combined.push_str(&format!("\nseed={seed}\n"));
    for path in input_files {
        combined.push_str(&store::file_digest(path)?);
        combined.push('\n');
    }
    Ok(store::bytes_digest(combined.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_round_trip_and_skip_logic() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("artifact.jsonl");
        std::fs::write(&out, b"{}\n").unwrap();

        let config = serde_json::json!({"seed": 1});
        let mut manifest = RunManifest::new(config.clone());
        let input_digest = digest_inputs(&config, 1, &[]).unwrap();
        let output_digest = digest_outputs(&[&out]).unwrap();
        manifest.record_stage(
            "curate",
            StageEntry {
                input_digest: input_digest.clone(),
                output_digest,
                wall_time_ms: 5,
                provider_cost_usd: 0.0,
                provider_calls: 0,
            },
        );
        let path = dir.path().join("manifest.json");
        manifest.save(&path).unwrap();

        let loaded = RunManifest::load_or_new(&path, config.clone());
        assert_eq!(loaded, manifest);
        assert!(loaded.stage_is_current("curate", &input_digest, &[&out]));

        // Output edited → stale.
        std::fs::write(&out, b"{\"changed\":true}\n").unwrap();
        assert!(!loaded.stage_is_current("curate", &input_digest, &[&out]));

        // Different config → fresh manifest.
        let other = RunManifest::load_or_new(&path, serde_json::json!({"seed": 2}));
        assert!(other.stages.is_empty());
    }

    #[test]
    fn input_digest_tracks_config_seed_and_files() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("in.jsonl");
        std::fs::write(&f, b"a\n").unwrap();
        let base = digest_inputs(&serde_json::json!({"k": 8}), 1, &[&f]).unwrap();
        assert_eq!(base, digest_inputs(&serde_json::json!({"k": 8}), 1, &[&f]).unwrap());
        assert_ne!(base, digest_inputs(&serde_json::json!({"k": 9}), 1, &[&f]).unwrap());
        assert_ne!(base, digest_inputs(&serde_json::json!({"k": 8}), 2, &[&f]).unwrap());
        std::fs::write(&f, b"b\n").unwrap();
        assert_ne!(base, digest_inputs(&serde_json::json!({"k": 8}), 1, &[&f]).unwrap());
    }
}
