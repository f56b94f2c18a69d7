//! MinHash signatures over character shingles.
//!
//! Each of the `num_perm` virtual permutations is a seeded splitmix64 mix of
//! the shingle's base hash; the signature keeps the minimum per permutation.
//! The fraction of matching positions between two signatures is an unbiased
//! estimate of the Jaccard similarity of the underlying shingle sets.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::rng::{fnv1a, splitmix64};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinHashSignature {
    pub num_perm: usize,
    pub values: Vec<u64>,
}

#[derive(Debug, Clone, Copy)]
pub struct MinHashParams {
    pub shingle_k: usize,
    pub num_perm: usize,
    pub seed: u64,
}

impl Default for MinHashParams {
    fn default() -> Self {
        MinHashParams { shingle_k: 5, num_perm: 256, seed: 0x5eed_cafe }
    }
}

/// Signature of `text` under `num_perm` seeded permutations of k-char
/// shingle hashes. Texts shorter than `shingle_k` chars are an error.
pub fn minhash_signature(text: &str, params: &MinHashParams) -> Result<MinHashSignature> {
    let chars: Vec<char> = text.chars().collect();
    if chars.len() < params.shingle_k {
        return Err(Error::Precondition(format!(
            "text of {} chars is shorter than shingle size {}",
            chars.len(),
            params.shingle_k
        )));
    }
    Ok(signature_of_shingles(&shingle_hashes(&chars, params.shingle_k), params))
}

/// Like [`minhash_signature`] but hashes the whole text as one shingle when
/// it is too short. Dedup uses this so tiny chunks still participate.
pub fn minhash_signature_lenient(text: &str, params: &MinHashParams) -> MinHashSignature {
    let chars: Vec<char> = text.chars().collect();
    let shingles = if chars.len() < params.shingle_k {
        let mut set = HashSet::new();
        set.insert(fnv1a(text.as_bytes()));
        set
    } else {
        shingle_hashes(&chars, params.shingle_k)
    };
    signature_of_shingles(&shingles, params)
}

fn shingle_hashes(chars: &[char], k: usize) -> HashSet<u64> {
    let mut buf = String::with_capacity(k * 4);
    chars
        .windows(k)
        .map(|w| {
            buf.clear();
            buf.extend(w.iter());
            fnv1a(buf.as_bytes())
        })
        .collect()
}

fn signature_of_shingles(shingles: &HashSet<u64>, params: &MinHashParams) -> MinHashSignature {
    let perm_seeds: Vec<u64> = (0..params.num_perm as u64)
        .map(|i| splitmix64(params.seed ^ i.wrapping_mul(0x9e3779b97f4a7c15)))
        .collect();
    let values = perm_seeds
        .iter()
        .map(|&s| shingles.iter().map(|&h| splitmix64(h ^ s)).min().unwrap_or(u64::MAX))
        .collect();
    MinHashSignature { num_perm: params.num_perm, values }
}

/// Estimated Jaccard similarity: fraction of matching signature positions.
pub fn estimate_jaccard(a: &MinHashSignature, b: &MinHashSignature) -> Result<f64> {
    if a.num_perm != b.num_perm {
        return Err(Error::Precondition(format!(
            "signatures disagree on num_perm: {} vs {}",
            a.num_perm, b.num_perm
        )));
    }
    let matches = a.values.iter().zip(&b.values).filter(|(x, y)| x == y).count();
    Ok(matches as f64 / a.num_perm as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(num_perm: usize) -> MinHashParams {
        MinHashParams { shingle_k: 5, num_perm, seed: 7 }
    }

    #[test]
    fn identical_texts_estimate_one() {
        let p = params(256);
        let a = minhash_signature("the cat sat on the mat", &p).unwrap();
        let b = minhash_signature("the cat sat on the mat", &p).unwrap();
        assert_eq!(a, b);
        assert_eq!(estimate_jaccard(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn short_text_is_error() {
        assert!(minhash_signature("abc", &params(64)).is_err());
    }

    /// Build a text whose shingle set is exactly the given tokens: each
    /// token is 5 chars and tokens are separated so no cross-token shingle
    /// repeats (every window is unique to its position unless tokens repeat).
    fn estimate_for_sets(a: &[&str], b: &[&str], num_perm: usize) -> (f64, f64) {
        // Work with explicit shingle hash sets to control Jaccard exactly.
        let ha: HashSet<u64> = a.iter().map(|s| fnv1a(s.as_bytes())).collect();
        let hb: HashSet<u64> = b.iter().map(|s| fnv1a(s.as_bytes())).collect();
        let inter = ha.intersection(&hb).count();
        let union = ha.union(&hb).count();
        let exact = inter as f64 / union as f64;
        let p = params(num_perm);
        let sa = signature_of_shingles(&ha, &p);
        let sb = signature_of_shingles(&hb, &p);
        (estimate_jaccard(&sa, &sb).unwrap(), exact)
    }

    #[test]
    fn half_overlapping_sets_estimate_near_exact() {
        // {a,b,c} vs {b,c,d}: exact Jaccard 0.5.
        let (est, exact) = estimate_for_sets(&["a", "b", "c"], &["b", "c", "d"], 256);
        assert_eq!(exact, 0.5);
        assert!((est - exact).abs() <= 0.1, "estimate {est} too far from {exact}");
    }

    #[test]
    fn disjoint_sets_estimate_near_zero() {
        let (est, exact) = estimate_for_sets(&["a", "b", "c"], &["x", "y", "z"], 256);
        assert_eq!(exact, 0.0);
        assert!(est <= 0.05, "estimate {est} should be near zero");
    }

    #[test]
    fn estimator_mean_absolute_error_bound() {
        // Over many random set pairs the mean |estimate - exact| stays under
        // 2/sqrt(num_perm).
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let p = params(256);
        let mut total_err = 0.0;
        let trials = 120;
        for _ in 0..trials {
            let universe: Vec<u64> = (0..60).map(|_| rng.gen()).collect();
            let ha: HashSet<u64> =
                universe.iter().filter(|_| rng.gen_bool(0.6)).copied().collect();
            let hb: HashSet<u64> =
                universe.iter().filter(|_| rng.gen_bool(0.6)).copied().collect();
            if ha.is_empty() || hb.is_empty() {
                continue;
            }
            let inter = ha.intersection(&hb).count();
            let union = ha.union(&hb).count();
            let exact = inter as f64 / union as f64;
            let sa = signature_of_shingles(&ha, &p);
            let sb = signature_of_shingles(&hb, &p);
            total_err += (estimate_jaccard(&sa, &sb).unwrap() - exact).abs();
        }
        let mae = total_err / trials as f64;
        assert!(mae <= 2.0 / (256f64).sqrt(), "mean abs error {mae} exceeds bound");
    }
}
