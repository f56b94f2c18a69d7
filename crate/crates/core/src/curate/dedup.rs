//! Near-duplicate removal via MinHash-LSH banding.
//!
//! Signatures are computed in parallel; buckets are merged in one sequential
//! phase so results do not depend on worker count. Within every LSH
//! candidate pair whose estimated Jaccard clears the threshold, the later
//! chunk (stable corpus order) is dropped and points at the earliest kept
//! chunk it duplicates.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::rng::fnv1a;
use crate::{exec, Error, Result};

use super::minhash::{estimate_jaccard, minhash_signature_lenient, MinHashParams};
use super::Chunk;

#[derive(Debug, Clone, Copy)]
pub struct DedupParams {
    pub minhash: MinHashParams,
    pub jaccard_threshold: f64,
    pub bands: usize,
    pub rows: usize,
}

impl Default for DedupParams {
    fn default() -> Self {
        DedupParams {
            minhash: MinHashParams::default(),
            jaccard_threshold: 0.9,
            bands: 32,
            rows: 8,
        }
    }
}

/// A dropped chunk and the kept chunk it duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedChunk {
    pub chunk_id: String,
    pub duplicate_of: String,
}

#[derive(Debug)]
pub struct DedupOutcome {
    pub kept: Vec<Chunk>,
    pub dropped: Vec<DroppedChunk>,
}

pub fn lsh_dedup(chunks: Vec<Chunk>, params: &DedupParams) -> Result<DedupOutcome> {
    if params.bands * params.rows != params.minhash.num_perm {
        return Err(Error::Precondition(format!(
            "bands*rows ({}*{}) must equal num_perm ({})",
            params.bands, params.rows, params.minhash.num_perm
        )));
    }
    if !(params.jaccard_threshold > 0.0 && params.jaccard_threshold < 1.0) {
        return Err(Error::Precondition("jaccard threshold must be in (0, 1)".into()));
    }
    if chunks.is_empty() {
        return Ok(DedupOutcome { kept: chunks, dropped: vec![] });
    }

    let signatures =
        exec::map_slice(&chunks, |c| minhash_signature_lenient(&c.text, &params.minhash));

    // Sequential merge phase: band buckets → earlier candidate lists.
    let mut earlier_candidates: Vec<HashSet<usize>> = vec![HashSet::new(); chunks.len()];
    for band in 0..params.bands {
        let start = band * params.rows;
        let end = start + params.rows;
        let mut buckets: HashMap<u64, Vec<usize>> = HashMap::new();
        for (idx, sig) in signatures.iter().enumerate() {
            let mut bytes = Vec::with_capacity(params.rows * 8 + 8);
            bytes.extend_from_slice(&(band as u64).to_le_bytes());
            for v in &sig.values[start..end] {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
            buckets.entry(fnv1a(&bytes)).or_default().push(idx);
        }
        for members in buckets.values() {
            for (pos, &later) in members.iter().enumerate().skip(1) {
                earlier_candidates[later].extend(&members[..pos]);
            }
        }
    }

    // Greedy scan in stable corpus order: a chunk is dropped when it
    // duplicates any earlier KEPT chunk, so no duplicate group ever loses
    // all of its members.
    let mut kept_mask = vec![true; chunks.len()];
    let mut dropped = Vec::new();
    for i in 0..chunks.len() {
        let mut candidates: Vec<usize> = earlier_candidates[i].iter().copied().collect();
        candidates.sort_unstable();
        for j in candidates {
            if !kept_mask[j] {
                continue;
            }
            let est = estimate_jaccard(&signatures[i], &signatures[j])?;
            if est >= params.jaccard_threshold {
                kept_mask[i] = false;
                dropped.push(DroppedChunk {
                    chunk_id: chunks[i].chunk_id.clone(),
                    duplicate_of: chunks[j].chunk_id.clone(),
                });
                break;
            }
        }
    }

    let kept = chunks
        .into_iter()
        .zip(&kept_mask)
        .filter_map(|(c, keep)| keep.then_some(c))
        .collect();
    Ok(DedupOutcome { kept, dropped })
}
