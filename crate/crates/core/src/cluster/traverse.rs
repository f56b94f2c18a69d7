//! Greedy nearest-unvisited-neighbor traversal over the k-NN graph.
//!
//! Starting from a seeded-random node, each step moves to the nearest
//! unvisited node: first from the current node's neighbor list, and when
//! the whole list is visited, by an exact scan over the remaining nodes.
//! Because the neighbor list holds the k nearest nodes overall, the two
//! rules together always pick the globally nearest unvisited node, which is
//! what the brute-force oracle checks step for step. The walk itself is
//! inherently sequential and runs single-threaded.

use rand::Rng;

use crate::rng::substream;

use super::NeighborGraph;

/// Traverse from a seeded-random start node; visits every node exactly once.
pub fn greedy_traverse(graph: &NeighborGraph, seed: u64) -> Vec<String> {
    assert!(!graph.is_empty(), "traversal needs a non-empty graph");
    let start = substream(seed, &["traverse"]).gen_range(0..graph.len());
    greedy_traverse_from(graph, start)
}

/// Traverse from an explicit start node.
pub fn greedy_traverse_from(graph: &NeighborGraph, start: usize) -> Vec<String> {
    let n = graph.len();
    let mut visited = vec![false; n];
    let mut path = Vec::with_capacity(n);
    let mut current = start;
    visited[current] = true;
    path.push(current);

    while path.len() < n {
        let next = graph
            .neighbors(current)
            .iter()
            .find(|(j, _)| !visited[*j])
            .map(|(j, _)| *j)
            .unwrap_or_else(|| nearest_unvisited(graph, current, &visited));
        visited[next] = true;
        path.push(next);
        current = next;
    }

    path.into_iter().map(|i| graph.id(i).to_string()).collect()
}

/// Exact scan for the globally nearest unvisited node; ties break by index.
fn nearest_unvisited(graph: &NeighborGraph, from: usize, visited: &[bool]) -> usize {
    (0..graph.len())
        .filter(|&j| !visited[j])
        .map(|j| (graph.distance(from, j), j))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, j)| j)
        .expect("at least one unvisited node")
}
