//! Brute-force cosine similarity index over the chunk corpus.
//!
//! Exact at desk scale and the reference any approximate index must match.
//! Score ties break by ascending chunk id so rankings are reproducible.

use crate::curate::CorpusIndex;
use crate::provider::{dot, Gateway};
use crate::{exec, Result};

use super::{RankedEntry, RankedList, RetrievalInstance};

pub struct EmbeddingIndex {
    ids: Vec<String>,
    vectors: Vec<Vec<f32>>,
}

impl EmbeddingIndex {
    /// Embed every corpus chunk through the gateway.
    pub fn build(corpus: &CorpusIndex, gateway: &Gateway) -> Result<Self> {
        let texts: Vec<String> = corpus.chunks().iter().map(|c| c.text.clone()).collect();
        let embeddings = gateway.embed(&texts)?;
        Ok(EmbeddingIndex {
            ids: corpus.chunks().iter().map(|c| c.chunk_id.clone()).collect(),
            vectors: embeddings.into_iter().map(|e| e.values).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Top-`budget` chunk ids by cosine similarity to `query_vector`,
    /// descending score, ties by chunk id.
    pub fn search_vector(&self, query_vector: &[f32], budget: usize) -> Vec<(String, f64)> {
        let mut scored: Vec<(usize, f64)> = (0..self.vectors.len())
            .map(|i| (i, dot(query_vector, &self.vectors[i])))
            .collect();
        scored.sort_by(|a, b| {
            b.1.total_cmp(&a.1).then_with(|| self.ids[a.0].cmp(&self.ids[b.0]))
        });
        scored
            .into_iter()
            .take(budget)
            .map(|(i, score)| (self.ids[i].clone(), score))
            .collect()
    }

    /// Embed `text` and search.
    pub fn search_text(
        &self,
        text: &str,
        budget: usize,
        gateway: &Gateway,
    ) -> Result<Vec<(String, f64)>> {
        let embedded = gateway.embed(std::slice::from_ref(&text.to_string()))?;
        Ok(self.search_vector(&embedded[0].values, budget))
    }
}

/// Retrieve the top-`budget` chunks for one instance's serialized context.
pub fn retrieve(
    instance: &RetrievalInstance,
    index: &EmbeddingIndex,
    gateway: &Gateway,
    budget: usize,
) -> Result<RankedList> {
    instance.validate()?;
    let ranked = index
        .search_text(&instance.context, budget, gateway)?
        .into_iter()
        .map(|(chunk_id, score)| RankedEntry { chunk_id, score })
        .collect();
    Ok(RankedList {
        conv_id: instance.conv_id.clone(),
        turn_index: instance.turn_index,
        ranked,
    })
}

/// Retrieve for every instance in parallel, preserving order.
pub fn retrieve_all(
    instances: &[RetrievalInstance],
    index: &EmbeddingIndex,
    gateway: &Gateway,
    budget: usize,
) -> Result<Vec<RankedList>> {
    exec::try_map_slice(instances, |inst| retrieve(inst, index, gateway, budget))
}
