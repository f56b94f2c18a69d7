//! Semantic clustering: embedding k-NN graph, greedy nearest-unvisited
//! traversal, and fixed-size segmentation of the resulting path.
//!
//! The traversal produces one continuous "semantic path" over the corpus;
//! consecutive windows of it become clusters, so every chunk lands in
//! exactly one cluster and adjacent members are semantically close.

mod knn;
mod segment;
mod traverse;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::curate::Chunk;
use crate::provider::Gateway;
use crate::Result;

pub use knn::{build_knn_graph, NeighborGraph};
pub use segment::{dedup_adjacent, segment_path};
pub use traverse::{greedy_traverse, greedy_traverse_from};

/// An ordered, fixed-size segment of the greedy traversal path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemanticCluster {
    pub cluster_id: String,
    /// Member chunk ids in traversal order.
    pub member_ids: Vec<String>,
    /// Position of this segment along the path, starting at 0.
    pub path_position: usize,
}

/// Stage parameters.
#[derive(Debug, Clone, Copy)]
pub struct ClusterParams {
    /// Cluster size (documents per generation context).
    pub k: usize,
    /// Neighbor list length in the k-NN graph.
    pub top_k: usize,
    /// Word n-gram order for adjacent-member dedup.
    pub ngram_n: usize,
    /// Jaccard threshold above which an adjacent member is dropped.
    pub sim_threshold: f64,
}

impl Default for ClusterParams {
    fn default() -> Self {
        ClusterParams { k: 8, top_k: 32, ngram_n: 5, sim_threshold: 0.8 }
    }
}

/// Full clustering stage: graph → traversal → segmentation → adjacent
/// dedup. Clusters that shrink below 2 members are discarded.
pub fn cluster_chunks(
    chunks: &[Chunk],
    params: &ClusterParams,
    gateway: &Gateway,
    seed: u64,
) -> Result<Vec<SemanticCluster>> {
    let graph = build_knn_graph(chunks, params.top_k, gateway)?;
    let path = greedy_traverse(&graph, seed);
    let clusters = segment_path(&path, params.k)?;
    let texts: HashMap<&str, &str> =
        chunks.iter().map(|c| (c.chunk_id.as_str(), c.text.as_str())).collect();
    Ok(clusters
        .into_iter()
        .map(|c| dedup_adjacent(c, |id| texts.get(id).copied().unwrap_or(""), params))
        .filter(|c| c.member_ids.len() >= 2)
        .collect())
}


#[cfg(test)]
mod tests {
    use super::testutil::*;
    use super::*;

    #[test]
    fn full_stage_covers_each_chunk_at_most_once() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let (chunks, gw) = line_corpus(&xs);
        let params = ClusterParams { k: 4, top_k: 6, ..Default::default() };
        let clusters = cluster_chunks(&chunks, &params, &gw, 9).unwrap();
        let mut seen = std::collections::HashSet::new();
        for c in &clusters {
            assert!(c.member_ids.len() >= 2 && c.member_ids.len() <= 4);
            for id in &c.member_ids {
                assert!(seen.insert(id.clone()), "chunk {id} appears in two clusters");
            }
        }
        assert!(seen.len() <= chunks.len());
    }
}
