//! Recursive character splitting with priority separators.
//!
//! Splitting tries separators in priority order (paragraph break, line
//! break, space, sentence punctuation, CJK punctuation, character
//! fallback). Over-long pieces recurse on the remaining separators;
//! adjacent small pieces merge back together, separator included, while the
//! merged run stays under the limit. Every emitted chunk is a contiguous,
//! whitespace-trimmed substring of the source at its recorded char offset.

use crate::store::stable_id;
use crate::{Error, Result};

use super::Chunk;

/// Priority-ordered separators; the empty string is the character-level
/// fallback and must stay last.
pub const DEFAULT_SEPARATORS: &[&str] = &[
    "\n\n", "\n", " ", ".", ",", "\u{200b}", "\u{ff0c}", "\u{3001}", "\u{ff0e}", "\u{3002}", "",
];

pub const DEFAULT_MAX_CHARS: usize = 1024;

#[derive(Debug, Clone)]
pub struct ChunkingParams {
    pub max_chars: usize,
    pub separators: Vec<String>,
}

impl Default for ChunkingParams {
    fn default() -> Self {
        ChunkingParams {
            max_chars: DEFAULT_MAX_CHARS,
            separators: DEFAULT_SEPARATORS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl ChunkingParams {
    pub fn with_max_chars(max_chars: usize) -> Self {
        ChunkingParams { max_chars, ..Default::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.max_chars == 0 {
            return Err(Error::Precondition("max_chars must be positive".into()));
        }
        match self.separators.last() {
            Some(last) if last.is_empty() => Ok(()),
            _ => Err(Error::Precondition(
                "separator list must end with the empty string fallback".into(),
            )),
        }
    }
}

/// Split `text` into chunks of at most `max_chars` Unicode scalar values.
/// Empty input yields an empty list. Chunk ids are stable hashes of
/// `(source_id, offset)`.
pub fn recursive_chunk(source_id: &str, text: &str, params: &ChunkingParams) -> Result<Vec<Chunk>> {
    params.validate()?;
    let chars: Vec<char> = text.chars().collect();
    let separators: Vec<Vec<char>> =
        params.separators.iter().map(|s| s.chars().collect()).collect();
    let mut pieces = Vec::new();
    split_range(&chars, 0, chars.len(), params.max_chars, &separators, 0, &mut pieces);
    Ok(pieces
        .into_iter()
        .map(|(offset, piece)| {
            let text: String = piece.iter().collect();
            Chunk {
                chunk_id: stable_id(&[source_id, &offset.to_string()]),
                char_len: piece.len(),
                text,
                source_id: source_id.to_string(),
                offset,
                quality: None,
            }
        })
        .collect())
}

fn split_range(
    chars: &[char],
    start: usize,
    end: usize,
    max: usize,
    separators: &[Vec<char>],
    sep_from: usize,
    out: &mut Vec<(usize, Vec<char>)>,
) {
    if start >= end {
        return;
    }
    if end - start <= max {
        emit(chars, start, end, out);
        return;
    }

    // First separator at or after `sep_from` that occurs in this range;
    // the empty fallback always matches.
    let (sep_idx, sep) = separators
        .iter()
        .enumerate()
        .skip(sep_from)
        .find(|(_, sep)| sep.is_empty() || contains(&chars[start..end], sep))
        .map(|(i, sep)| (i, sep.as_slice()))
        .unwrap_or((separators.len() - 1, &[]));

    if sep.is_empty() {
        let mut at = start;
        while at < end {
            let stop = (at + max).min(end);
            emit(chars, at, stop, out);
            at = stop;
        }
        return;
    }

    // Pieces between separator occurrences, merged greedily while the
    // contiguous span (separators included) fits in `max`.
    let mut run: Option<(usize, usize)> = None;
    let flush = |run: &mut Option<(usize, usize)>, out: &mut Vec<(usize, Vec<char>)>| {
        if let Some((s, e)) = run.take() {
            emit(chars, s, e, out);
        }
    };

    let mut piece_start = start;
    let mut cursor = start;
    loop {
        let at_end = cursor + sep.len() > end;
        let at_sep = !at_end && chars[cursor..cursor + sep.len()] == sep[..];
        if at_sep || cursor >= end {
            let piece_end = cursor.min(end);
            if piece_end > piece_start {
                if piece_end - piece_start > max {
                    flush(&mut run, out);
                    split_range(chars, piece_start, piece_end, max, separators, sep_idx + 1, out);
                } else {
                    match run {
                        Some((s, _)) if piece_end - s <= max => run = Some((s, piece_end)),
                        Some(_) => {
                            flush(&mut run, out);
                            run = Some((piece_start, piece_end));
                        }
                        None => run = Some((piece_start, piece_end)),
                    }
                }
            }
            if cursor >= end {
                break;
            }
            cursor += sep.len();
            piece_start = cursor;
        } else {
            cursor += 1;
        }
    }
    flush(&mut run, out);
}

/// Trim whitespace in char space and record the piece; empty or
/// whitespace-only pieces vanish.
fn emit(chars: &[char], start: usize, end: usize, out: &mut Vec<(usize, Vec<char>)>) {
    let mut s = start;
    let mut e = end;
    while s < e && chars[s].is_whitespace() {
        s += 1;
    }
    while e > s && chars[e - 1].is_whitespace() {
        e -= 1;
    }
    if s < e {
        out.push((s, chars[s..e].to_vec()));
    }
}

fn contains(haystack: &[char], needle: &[char]) -> bool {
    haystack.windows(needle.len()).any(|w| w == needle)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(chunks: &[Chunk]) -> Vec<&str> {
        chunks.iter().map(|c| c.text.as_str()).collect()
    }

    #[test]
    fn paragraph_break_split() {
        let params = ChunkingParams::with_max_chars(4);
        let chunks = recursive_chunk("s", "aa\n\nbb", &params).unwrap();
        assert_eq!(texts(&chunks), vec!["aa", "bb"]);
        assert_eq!(chunks[0].offset, 0);
        assert_eq!(chunks[1].offset, 4);
    }

    #[test]
    fn character_fallback() {
        let params = ChunkingParams {
            max_chars: 2,
            separators: vec![String::new()],
        };
        let chunks = recursive_chunk("s", "abcdef", &params).unwrap();
        assert_eq!(texts(&chunks), vec!["ab", "cd", "ef"]);
    }

    #[test]
    fn empty_input_is_empty_output() {
        let chunks = recursive_chunk("s", "", &ChunkingParams::default()).unwrap();
        assert!(chunks.is_empty());
    }

    #[test]
    fn zero_max_chars_rejected() {
        let err = recursive_chunk("s", "abc", &ChunkingParams::with_max_chars(0));
        assert!(err.is_err());
    }

    #[test]
    fn separator_list_must_end_with_fallback() {
        let params = ChunkingParams { max_chars: 10, separators: vec!["\n".into()] };
        assert!(recursive_chunk("s", "abc", &params).is_err());
    }

    #[test]
    fn small_pieces_merge_within_limit() {
        // "a.b.c" with limit 3: "a" and "b" merge across the consumed period,
        // "c" starts a new chunk.
        let params = ChunkingParams {
            max_chars: 3,
            separators: vec![".".into(), String::new()],
        };
        let chunks = recursive_chunk("s", "a.b.c", &params).unwrap();
        assert_eq!(texts(&chunks), vec!["a.b", "c"]);
    }

    #[test]
    fn chunking_is_idempotent() {
        let params = ChunkingParams::with_max_chars(24);
        let text = "The quick brown fox jumps over the lazy dog. It barked twice and then slept.";
        let first = recursive_chunk("s", text, &params).unwrap();
        for chunk in &first {
            let again = recursive_chunk("s2", &chunk.text, &params).unwrap();
            assert_eq!(again.len(), 1);
            assert_eq!(again[0].text, chunk.text);
        }
    }

    #[test]
    fn offsets_address_the_source() {
        let params = ChunkingParams::with_max_chars(16);
        let text = "Alpha beta gamma.\n\nDelta epsilon zeta eta theta iota kappa.\nShort.";
        let source: Vec<char> = text.chars().collect();
        let chunks = recursive_chunk("s", text, &params).unwrap();
        assert!(!chunks.is_empty());
        for chunk in &chunks {
            let slice: String =
                source[chunk.offset..chunk.offset + chunk.char_len].iter().collect();
            assert_eq!(slice, chunk.text);
            assert!(chunk.char_len <= 16);
            assert!(!chunk.text.trim().is_empty());
        }
        // Offsets strictly increase and chunks never overlap.
        for pair in chunks.windows(2) {
            assert!(pair[0].offset + pair[0].char_len <= pair[1].offset);
        }
    }

    #[test]
    fn unicode_lengths_are_scalar_values() {
        let params = ChunkingParams {
            max_chars: 3,
            separators: vec![String::new()],
        };
        let chunks = recursive_chunk("s", "日本語のテキスト", &params).unwrap();
        assert_eq!(texts(&chunks), vec!["日本語", "のテキ", "スト"]);
    }

    #[test]
    fn cjk_punctuation_separators() {
        let params = ChunkingParams {
            max_chars: 6,
            separators: vec!["\u{3002}".into(), String::new()],
        };
        let chunks = recursive_chunk("s", "一二三四五六。七八九", &params).unwrap();
        assert_eq!(texts(&chunks), vec!["一二三四五六", "七八九"]);
    }
}
