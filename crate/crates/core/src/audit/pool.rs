//! Candidate pool construction for discriminability testing.

use crate::curate::CorpusIndex;
use crate::provider::Gateway;
use crate::retrieval::{serialize_context, EmbeddingIndex};
use crate::{Error, Result};

use super::AuditInstance;

/// Attach a candidate pool of `pool_size` documents: the gold document plus
/// the most similar non-gold chunks by embedding similarity to the
/// serialized query context (retrieved hard negatives).
pub fn build_candidate_pool(
    mut inst: AuditInstance,
    corpus: &CorpusIndex,
    index: &EmbeddingIndex,
    gateway: &Gateway,
    pool_size: usize,
) -> Result<AuditInstance> {
    if pool_size < 2 {
        return Err(Error::Precondition("pool size must be at least 2".into()));
    }
    if corpus.len() < 2 {
        return Err(Error::Precondition(
            "cannot form hard negatives from a corpus of fewer than 2 documents".into(),
        ));
    }
    let context = serialize_context(&inst.history, &inst.query);
    // Over-fetch by one so dropping the gold still leaves enough negatives.
    let ranked = index.search_text(&context, pool_size + 1, gateway)?;
    let mut pool = vec![inst.gold_doc.clone()];
    for (chunk_id, _) in ranked {
        if pool.len() >= pool_size {
            break;
        }
        if chunk_id == inst.gold_doc.chunk_id {
            continue;
        }
        let chunk = corpus.get(&chunk_id).ok_or_else(|| {
            Error::Precondition(format!("retrieved chunk {chunk_id} missing from corpus"))
        })?;
        pool.push(chunk.clone());
    }
    if pool.len() < 2 {
        return Err(Error::Precondition("no hard negatives available for the pool".into()));
    }
    inst.candidate_pool = pool;
    Ok(inst)
}
