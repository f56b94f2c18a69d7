//! Corpus curation: turn raw documents into a clean, deduplicated,
//! quality-filtered chunk corpus.
//!
//! The stage order is strip → recursive chunk → MinHash-LSH dedup →
//! quality filter. Dedup runs before quality filtering because signatures
//! are the cheaper signal.

mod chunk;
mod dedup;
mod minhash;
mod quality;
mod strip;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{exec, Result};

pub use chunk::{recursive_chunk, ChunkingParams, DEFAULT_MAX_CHARS, DEFAULT_SEPARATORS};
pub use dedup::{lsh_dedup, DedupOutcome, DedupParams, DroppedChunk};
pub use minhash::{estimate_jaccard, minhash_signature, MinHashParams, MinHashSignature};
pub use quality::{
    quality_filter, HeuristicScorer, QualityScorer, QualityThresholds, RemoteScorer,
};
pub use strip::strip_nontext;

/// A raw input document before curation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDocument {
    pub source_id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

/// A curated corpus document; the unit everything downstream retrieves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Chunk {
    /// Stable content address: hash of `(source_id, offset)`.
    pub chunk_id: String,
    pub text: String,
    /// Length in Unicode scalar values.
    pub char_len: usize,
    pub source_id: String,
    /// Char offset of this chunk's text within the source document.
    pub offset: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quality: Option<QualityScore>,
}

/// Scores from the pluggable quality scorer plus the keep/drop verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QualityScore {
    /// Fluency in [0, 1].
    pub fluency: f64,
    /// Educational value in [0, 5].
    pub educational: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Keep,
    Drop,
}

impl QualityScore {
    /// Verdict is keep iff both scores clear their thresholds.
    pub fn from_scores(fluency: f64, educational: f64, thresholds: &QualityThresholds) -> Self {
        let verdict = if fluency >= thresholds.fluency && educational >= thresholds.educational {
            Verdict::Keep
        } else {
            Verdict::Drop
        };
        QualityScore { fluency, educational, verdict }
    }
}

/// Everything the curation stage produced, including what it removed and why.
#[derive(Debug)]
pub struct CurationOutcome {
    pub chunks: Vec<Chunk>,
    pub dropped_duplicates: Vec<DroppedChunk>,
    pub dropped_quality: Vec<String>,
}

/// Chunk lookup by id, preserving corpus order. Downstream stages resolve
/// gold ids against this to keep referential integrity.
#[derive(Debug, Clone, Default)]
pub struct CorpusIndex {
    chunks: Vec<Chunk>,
    by_id: std::collections::HashMap<String, usize>,
}

impl CorpusIndex {
    pub fn from_chunks(chunks: Vec<Chunk>) -> Self {
        let by_id = chunks
            .iter()
            .enumerate()
            .map(|(i, c)| (c.chunk_id.clone(), i))
            .collect();
        CorpusIndex { chunks, by_id }
    }

    pub fn get(&self, chunk_id: &str) -> Option<&Chunk> {
        self.by_id.get(chunk_id).map(|&i| &self.chunks[i])
    }

    pub fn contains(&self, chunk_id: &str) -> bool {
        self.by_id.contains_key(chunk_id)
    }

    pub fn chunks(&self) -> &[Chunk] {
        &self.chunks
    }

    pub fn len(&self) -> usize {
        self.chunks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chunks.is_empty()
    }
}

/// Parameters for the full curation stage.
#[derive(Debug, Clone, Default)]
pub struct CurationParams {
    pub chunking: ChunkingParams,
    pub dedup: DedupParams,
    pub thresholds: QualityThresholds,
}

/// Run strip → chunk → dedup → quality over a raw corpus.
///
/// Per-document work is data-parallel; the LSH bucket merge is a single
/// sequential phase, so the output is identical for any worker count.
pub fn curate_corpus(
    docs: &[RawDocument],
    params: &CurationParams,
    scorer: &dyn QualityScorer,
) -> Result<CurationOutcome> {
    let chunked: Vec<Vec<Chunk>> = exec::try_map_slice(docs, |doc| {
        let clean = strip_nontext(doc);
        recursive_chunk(&clean.source_id, &clean.text, &params.chunking)
    })?;
    let all: Vec<Chunk> = chunked.into_iter().flatten().collect();

    let DedupOutcome { kept, dropped } = lsh_dedup(all, &params.dedup)?;
    let (chunks, dropped_quality) = quality_filter(kept, scorer, &params.thresholds);

    Ok(CurationOutcome { chunks, dropped_duplicates: dropped, dropped_quality })
}
