//! Exact k-NN graph over chunk embeddings.
//!
//! Brute force by cosine distance: correct at desk scale, and the oracle
//! every approximate index would be measured against. Per-node neighbor
//! scans run in parallel; ties break by node index so the graph is
//! deterministic.

use crate::curate::Chunk;
use crate::provider::{dot, EmbeddingVector, Gateway};
use crate::{exec, Error, Result};

/// Node ids, per-node ascending neighbor lists, and the unit vectors the
/// distances came from (kept for dead-end scans during traversal).
#[derive(Debug, Clone)]
pub struct NeighborGraph {
    ids: Vec<String>,
    neighbors: Vec<Vec<(usize, f64)>>,
    vectors: Vec<Vec<f32>>,
}

impl NeighborGraph {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, node: usize) -> &str {
        &self.ids[node]
    }

    /// Neighbors of `node` as `(node_index, cosine_distance)`, ascending by
    /// distance.
    pub fn neighbors(&self, node: usize) -> &[(usize, f64)] {
        &self.neighbors[node]
    }

    /// Cosine distance between two nodes, recomputed from the stored unit
    /// vectors.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        1.0 - dot(&self.vectors[a], &self.vectors[b])
    }
}

/// Build the exact top-k neighbor graph for `chunks`.
pub fn build_knn_graph(chunks: &[Chunk], top_k: usize, gateway: &Gateway) -> Result<NeighborGraph> {
    if chunks.len() < 2 {
        return Err(Error::Precondition(format!(
            "k-NN graph needs at least 2 chunks, got {}",
            chunks.len()
        )));
    }
    if top_k == 0 {
        return Err(Error::Precondition("top_k must be positive".into()));
    }
    let embeddings = embed_chunks(chunks, gateway)?;
    let vectors: Vec<Vec<f32>> = embeddings.into_iter().map(|e| e.values).collect();
    let n = vectors.len();
    let k = top_k.min(n - 1);

    let neighbors = exec::map_range(n, |i| {
        let mut dists: Vec<(usize, f64)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (j, 1.0 - dot(&vectors[i], &vectors[j])))
            .collect();
        dists.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        dists.truncate(k);
        dists
    });

    Ok(NeighborGraph {
        ids: chunks.iter().map(|c| c.chunk_id.clone()).collect(),
        neighbors,
        vectors,
    })
}

/// Embed all chunk texts; if the batch fails, retry one-by-one so the error
/// names the chunk that broke.
fn embed_chunks(chunks: &[Chunk], gateway: &Gateway) -> Result<Vec<EmbeddingVector>> {
    let texts: Vec<String> = chunks.iter().map(|c| c.text.clone()).collect();
    match gateway.embed(&texts) {
        Ok(vectors) => Ok(vectors),
        Err(batch_err) => {
            for chunk in chunks {
                if let Err(err) = gateway.embed(std::slice::from_ref(&chunk.text)) {
                    return Err(Error::Precondition(format!(
                        "embedding failed for chunk {}: {err}",
                        chunk.chunk_id
                    )));
                }
            }
            Err(batch_err)
        }
    }
}
