//! Run configuration: one TOML file with environment-variable
//! interpolation, strict key checking, and documented defaults
//! (docs/config.md).

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::audit::{AuditParams, AuditThresholds};
use crate::cluster::ClusterParams;
use crate::curate::{ChunkingParams, CurationParams, DedupParams, MinHashParams, QualityThresholds};
use crate::dialogue::AgentConfig;
use crate::provider::http::{HttpProvider, HttpProviderConfig};
use crate::provider::mock::{HashEmbedder, SimulatedChat};
use crate::provider::{Gateway, PricingModel, RetryPolicy};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Global seed; all stage randomness derives from named substreams.
    pub seed: u64,
    /// Output directory for every stage artifact and the manifest.
    pub out_dir: PathBuf,
    /// Maximum in-flight provider requests.
    pub concurrency: usize,
    /// Refuse provider-calling stages whose estimated cost exceeds this.
    pub cost_ceiling_usd: Option<f64>,
    pub provider: ProviderConfig,
    pub pricing: PricingModel,
    pub curate: CurateConfig,
    pub cluster: ClusterConfig,
    pub generate: AgentConfig,
    pub audit: AuditConfig,
    pub bench: BenchConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            out_dir: PathBuf::from("runs/default"),
            concurrency: 8,
            cost_ceiling_usd: None,
            provider: ProviderConfig::default(),
            pricing: PricingModel::free(),
            curate: CurateConfig::default(),
            cluster: ClusterConfig::default(),
            generate: AgentConfig::default(),
            audit: AuditConfig::default(),
            bench: BenchConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProviderConfig {
    /// `mock` (deterministic offline simulator) or `http`.
    pub kind: ProviderKind,
    /// Embedding dimension of the mock hash embedder.
    pub embed_dim: usize,
    /// HTTP settings, required when kind = "http".
    pub http: Option<HttpProviderConfig>,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig { kind: ProviderKind::Mock, embed_dim: 256, http: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    Mock,
    Http,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CurateConfig {
    /// Raw-document JSONL input for the curate stage.
    pub input: PathBuf,
    pub max_chars: usize,
    pub shingle_k: usize,
    pub num_perm: usize,
    pub bands: usize,
    pub rows: usize,
    pub dedup_threshold: f64,
    pub dedup_seed: u64,
    /// `heuristic` or `remote`.
    pub scorer: ScorerKind,
    pub scorer_model: String,
    pub fluency_threshold: f64,
    pub educational_threshold: f64,
}

impl Default for CurateConfig {
    fn default() -> Self {
        let dedup = DedupParams::default();
        let quality = QualityThresholds::default();
        CurateConfig {
            input: PathBuf::from("corpus.jsonl"),
            max_chars: ChunkingParams::default().max_chars,
            shingle_k: dedup.minhash.shingle_k,
            num_perm: dedup.minhash.num_perm,
            bands: dedup.bands,
            rows: dedup.rows,
            dedup_threshold: dedup.jaccard_threshold,
            dedup_seed: dedup.minhash.seed,
            scorer: ScorerKind::Heuristic,
            scorer_model: "quality-scorer".into(),
            fluency_threshold: quality.fluency,
            educational_threshold: quality.educational,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScorerKind {
    Heuristic,
    Remote,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClusterConfig {
    pub k: usize,
    pub top_k: usize,
    pub ngram_n: usize,
    pub sim_threshold: f64,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        let p = ClusterParams::default();
        ClusterConfig { k: p.k, top_k: p.top_k, ngram_n: p.ngram_n, sim_threshold: p.sim_threshold }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AuditConfig {
    pub judges: Vec<String>,
    pub pool_size: usize,
    pub tau_noise: f64,
    pub tau_sparse: f64,
    pub max_parse_retries: u32,
}

impl Default for AuditConfig {
    fn default() -> Self {
        let p = AuditParams::default();
        AuditConfig {
            judges: p.judges,
            pool_size: p.pool_size,
            tau_noise: p.thresholds.tau_noise,
            tau_sparse: p.thresholds.tau_sparse,
            max_parse_retries: p.max_parse_retries,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchConfig {
    /// Retrieval budget (ranked list length).
    pub budget: usize,
    /// Recall@k budgets reported.
    pub k_set: Vec<usize>,
    /// Oracle query-rewrite model; empty disables the rewrite arm.
    pub rewrite_model: String,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            budget: 1000,
            k_set: crate::retrieval::DEFAULT_K_SET.to_vec(),
            rewrite_model: String::new(),
        }
    }
}

impl RunConfig {
    /// Load from a TOML file, interpolating `${ENV_VAR}` references.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let interpolated = interpolate_env(&raw)?;
        let cfg: RunConfig = toml::from_str(&interpolated)
            .map_err(|e| Error::Schema { path: path.into(), line: None, message: e.to_string() })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.pricing.validate()?;
        self.generate.validate()?;
        if self.concurrency == 0 {
            return Err(Error::Config("concurrency must be positive".into()));
        }
        if self.curate.bands * self.curate.rows != self.curate.num_perm {
            return Err(Error::Config(format!(
                "curate.bands*rows ({}*{}) must equal num_perm ({})",
                self.curate.bands, self.curate.rows, self.curate.num_perm
            )));
        }
        if self.provider.kind == ProviderKind::Http && self.provider.http.is_none() {
            return Err(Error::Config("provider.kind = \"http\" requires [provider.http]".into()));
        }
        if let Some(ceiling) = self.cost_ceiling_usd {
            if !(ceiling >= 0.0) {
                return Err(Error::Config("cost_ceiling_usd must be >= 0".into()));
            }
        }
        Ok(())
    }

    /// Build the provider gateway this config describes.
    pub fn gateway(&self) -> Result<Gateway> {
        match self.provider.kind {
            ProviderKind::Mock => Ok(Gateway::new(
                Arc::new(SimulatedChat::new()),
                Arc::new(HashEmbedder::new("mock-embedder", self.provider.embed_dim)),
                self.pricing,
                self.concurrency,
            )
            .with_retry(RetryPolicy::immediate(3))),
            ProviderKind::Http => {
                let http_cfg = self
                    .provider
                    .http
                    .clone()
                    .ok_or_else(|| Error::Config("missing [provider.http]".into()))?;
                let provider = Arc::new(HttpProvider::new(http_cfg)?);
                Ok(Gateway::new(provider.clone(), provider, self.pricing, self.concurrency))
            }
        }
    }

    pub fn curation_params(&self) -> CurationParams {
        CurationParams {
            chunking: ChunkingParams {
                max_chars: self.curate.max_chars,
                ..ChunkingParams::default()
            },
            dedup: DedupParams {
                minhash: MinHashParams {
                    shingle_k: self.curate.shingle_k,
                    num_perm: self.curate.num_perm,
                    seed: self.curate.dedup_seed,
                },
                jaccard_threshold: self.curate.dedup_threshold,
                bands: self.curate.bands,
                rows: self.curate.rows,
            },
            thresholds: QualityThresholds {
                fluency: self.curate.fluency_threshold,
                educational: self.curate.educational_threshold,
            },
        }
    }

    pub fn cluster_params(&self) -> ClusterParams {
        ClusterParams {
            k: self.cluster.k,
            top_k: self.cluster.top_k,
            ngram_n: self.cluster.ngram_n,
            sim_threshold: self.cluster.sim_threshold,
        }
    }

    pub fn audit_params(&self) -> AuditParams {
        AuditParams {
            judges: self.audit.judges.clone(),
            pool_size: self.audit.pool_size,
            thresholds: AuditThresholds {
                tau_noise: self.audit.tau_noise,
                tau_sparse: self.audit.tau_sparse,
            },
            max_parse_retries: self.audit.max_parse_retries,
        }
    }
}

/// Replace `${VAR}` with the environment value; unset variables are a
/// configuration error.
fn interpolate_env(raw: &str) -> Result<String> {
    let re = regex::Regex::new(r"\$\{([A-Za-z_][A-Za-z0-9_]*)\}").unwrap();
    let mut failure: Option<String> = None;
    let out = re.replace_all(raw, |caps: &regex::Captures<'_>| {
        let var = &caps[1];
        match std::env::var(var) {
            Ok(v) => v,
            Err(_) => {
                failure = Some(var.to_string());
                String::new()
            }
        }
    });
    match failure {
        Some(var) => Err(Error::Config(format!("environment variable {var} is not set"))),
        None => Ok(out.into_owned()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse_from_empty_config() {
        let cfg: RunConfig = toml::from_str("").unwrap();
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.curate.max_chars, 1024);
        assert_eq!(cfg.curate.num_perm, 256);
        assert_eq!(cfg.cluster.k, 8);
        assert_eq!(cfg.generate.turns, 8);
        assert_eq!(cfg.audit.pool_size, 5);
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = toml::from_str::<RunConfig>("definitely_not_a_key = 1");
        assert!(err.is_err());
        let err = toml::from_str::<RunConfig>("[curate]\nmystery = true");
        assert!(err.is_err());
    }

    #[test]
    fn env_interpolation() {
        std::env::set_var("CONVBENCH_TEST_SEED_VALUE", "1234");
        let cfg: RunConfig =
            toml::from_str(&interpolate_env("seed = ${CONVBENCH_TEST_SEED_VALUE}").unwrap())
                .unwrap();
        assert_eq!(cfg.seed, 1234);
        assert!(interpolate_env("x = \"${CONVBENCH_UNSET_VAR_XYZ}\"").is_err());
    }

    #[test]
    fn bad_band_geometry_rejected() {
        let cfg: RunConfig = toml::from_str("[curate]\nbands = 3\nrows = 5").unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn http_kind_requires_http_table() {
        let cfg: RunConfig = toml::from_str("[provider]\nkind = \"http\"").unwrap();
        assert!(cfg.validate().is_err());
    }
}
