//! Path segmentation and adjacent-member dedup.

use crate::{Error, Result};

use super::{ClusterParams, SemanticCluster};

/// Cut the traversal path into consecutive windows of `k`. The final window
/// may hold `path_len mod k` members and is dropped when that remainder is
/// smaller than 2.
pub fn segment_path(path: &[String], k: usize) -> Result<Vec<SemanticCluster>> {
    if k < 2 {
        return Err(Error::Precondition(format!("cluster size k must be >= 2, got {k}")));
    }
    Ok(path
        .chunks(k)
        .enumerate()
        .filter(|(_, members)| members.len() >= 2)
        .map(|(position, members)| SemanticCluster {
            cluster_id: format!("cluster-{position:05}"),
            member_ids: members.to_vec(),
            path_position: position,
        })
        .collect())
}

/// Remove the later of any adjacent members whose word n-gram Jaccard
/// similarity reaches the threshold. The caller discards clusters that
/// shrink below 2 members.
pub fn dedup_adjacent<'a>(
    cluster: SemanticCluster,
    text_of: impl Fn(&str) -> &'a str,
    params: &ClusterParams,
) -> SemanticCluster {
    let mut kept: Vec<String> = Vec::with_capacity(cluster.member_ids.len());
    for id in cluster.member_ids {
        let duplicate = kept.last().is_some_and(|prev| {
            crate::textutil::word_ngram_jaccard(text_of(prev), text_of(&id), params.ngram_n)
                >= params.sim_threshold
        });
        if !duplicate {
            kept.push(id);
        }
    }
    SemanticCluster { member_ids: kept, ..cluster }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn path(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("id-{i}")).collect()
    }

    #[test]
    fn exact_windows() {
        let clusters = segment_path(&path(16), 8).unwrap();
        assert_eq!(clusters.len(), 2);
        assert!(clusters.iter().all(|c| c.member_ids.len() == 8));
        assert_eq!(clusters[0].path_position, 0);
        assert_eq!(clusters[1].path_position, 1);
    }

    #[test]
    fn one_member_remainder_is_dropped() {
        let clusters = segment_path(&path(17), 8).unwrap();
        assert_eq!(clusters.len(), 2);
        assert_eq!(clusters.iter().map(|c| c.member_ids.len()).sum::<usize>(), 16);
    }

    #[test]
    fn two_member_remainder_survives() {
        let clusters = segment_path(&path(10), 4).unwrap();
        let sizes: Vec<usize> = clusters.iter().map(|c| c.member_ids.len()).collect();
        assert_eq!(sizes, vec![4, 4, 2]);
    }

    #[test]
    fn k_below_two_rejected() {
        assert!(segment_path(&path(4), 1).is_err());
    }

    fn run_dedup(texts: &[(&str, &str)], threshold: f64) -> Vec<String> {
        let map: HashMap<String, String> =
            texts.iter().map(|(id, t)| (id.to_string(), t.to_string())).collect();
        let cluster = SemanticCluster {
            cluster_id: "cluster-00000".into(),
            member_ids: texts.iter().map(|(id, _)| id.to_string()).collect(),
            path_position: 0,
        };
        let params = ClusterParams { sim_threshold: threshold, ..Default::default() };
        dedup_adjacent(cluster, |id| map.get(id).map(|s| s.as_str()).unwrap_or(""), &params)
            .member_ids
    }

    #[test]
    fn identical_adjacent_text_removes_later() {
        let t = "alpha beta gamma delta epsilon zeta eta theta";
        let kept = run_dedup(&[("a", t), ("b", t), ("c", "totally different words here now")], 0.8);
        assert_eq!(kept, vec!["a", "c"]);
    }

    #[test]
    fn disjoint_adjacent_text_unchanged() {
        let kept = run_dedup(
            &[
                ("a", "one two three four five six seven"),
                ("b", "eight nine ten eleven twelve thirteen"),
            ],
            0.8,
        );
        assert_eq!(kept, vec!["a", "b"]);
    }

    #[test]
    fn partial_overlap_against_oracle() {
        // Ten five-grams, six shared: the shared run "c1..c10" (6 windows)
        // out of 10 per text gives Jaccard 6/14 per the oracle below; build
        // the texts so the measured value crosses a 0.3 threshold but not 0.5.
        let shared = "c1 c2 c3 c4 c5 c6 c7 c8 c9 c10";
        let a = format!("a1 a2 a3 a4 {shared}");
        let b = format!("b1 b2 b3 b4 {shared}");
        let exact = crate::textutil::word_ngram_jaccard(&a, &b, 5);
        // Oracle by hand: each text has 10 5-grams; the 6 windows fully
        // inside the shared suffix coincide, so J = 6 / (10 + 10 - 6).
        assert!((exact - 6.0 / 14.0).abs() < 1e-12);

        let kept = run_dedup(&[("a", &a), ("b", &b)], 0.3);
        assert_eq!(kept, vec!["a"], "later member removed at threshold 0.3");
        let kept = run_dedup(&[("a", &a), ("b", &b)], 0.5);
        assert_eq!(kept, vec!["a", "b"], "kept at threshold 0.5");
    }
}
