//! Small text helpers shared across stages: word extraction, stop words,
//! sentence splitting, and word n-gram Jaccard similarity.

use std::collections::HashSet;

const STOPWORDS: &[&str] = &[
    "a", "an", "and", "are", "as", "at", "be", "but", "by", "can", "did", "do", "for", "from",
    "had", "has", "have", "he", "her", "his", "how", "i", "if", "in", "into", "is", "it", "its",
    "me", "my", "no", "not", "of", "on", "or", "our", "she", "so", "that", "the", "their", "them",
    "then", "there", "these", "they", "this", "to", "was", "we", "were", "what", "when", "where",
    "which", "who", "will", "with", "you", "your", "about", "tell", "does", "been",
];

/// Lowercased alphanumeric word runs.
pub fn words(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            cur.extend(ch.to_lowercase());
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

pub fn is_stopword(word: &str) -> bool {
    STOPWORDS.contains(&word)
}

/// Words with stop words removed.
pub fn content_words(text: &str) -> Vec<String> {
    words(text).into_iter().filter(|w| !is_stopword(w)).collect()
}

pub fn word_set(text: &str) -> HashSet<String> {
    words(text).into_iter().collect()
}

pub fn content_word_set(text: &str) -> HashSet<String> {
    content_words(text).into_iter().collect()
}

/// Naive sentence split on `.`, `!`, `?` keeping the terminator.
pub fn sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        cur.push(ch);
        if matches!(ch, '.' | '!' | '?') {
            let s = cur.trim();
            if !s.is_empty() {
                out.push(s.to_string());
            }
            cur.clear();
        }
    }
    let tail = cur.trim();
    if !tail.is_empty() {
        out.push(tail.to_string());
    }
    out
}

/// Jaccard similarity of the two texts' word n-gram sets. Returns 1.0 when
/// both sets are empty (texts too short to form an n-gram are treated as
/// their whole word sequence).
pub fn word_ngram_jaccard(a: &str, b: &str, n: usize) -> f64 {
    let ga = word_ngrams(a, n);
    let gb = word_ngrams(b, n);
    if ga.is_empty() && gb.is_empty() {
        return 1.0;
    }
    let inter = ga.intersection(&gb).count();
    let union = ga.len() + gb.len() - inter;
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

pub fn word_ngrams(text: &str, n: usize) -> HashSet<String> {
    let ws = words(text);
    if ws.is_empty() {
        return HashSet::new();
    }
    if ws.len() < n {
        let mut set = HashSet::new();
        set.insert(ws.join(" "));
        return set;
    }
    ws.windows(n).map(|w| w.join(" ")).collect()
}
