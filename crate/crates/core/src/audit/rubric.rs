//! Lenient parsing of judge replies.
//!
//! The prompts elicit free-form justifications, so the parsers accept
//! `Rating: N`, `**Rating:** N`, `**Rating:** N - label`, or a trailing bare
//! integer, and for discriminability the bracketed id after
//! `**Document ID:**` or the last bracketed integer anywhere.

use std::sync::OnceLock;

use regex::Regex;

fn rating_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)\*{0,2}rating\*{0,2}\s*:\*{0,2}\s*([1-5])\b").unwrap())
}

fn bracket_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\[\s*(\d{1,3})\s*\]").unwrap())
}

/// Extract a 1–5 rating from a judge reply.
pub fn parse_rating(reply: &str) -> Option<f64> {
    if let Some(caps) = rating_re().captures_iter(reply).last() {
        return caps.get(1)?.as_str().parse().ok();
    }
    // Trailing bare integer.
    let last_token = reply.trim_end().rsplit(|c: char| c.is_whitespace()).next()?;
    match last_token {
        "1" | "2" | "3" | "4" | "5" => last_token.parse().ok(),
        _ => None,
    }
}

/// Extract the picked document position from a discriminability reply:
/// first bracketed integer after the final `**Document ID:**` marker, else
/// the last bracketed integer in the reply.
pub fn parse_document_pick(reply: &str) -> Option<usize> {
    let tail = reply.rfind("**Document ID:**").map(|at| &reply[at..]).unwrap_or(reply);
    if let Some(caps) = bracket_re().captures(tail) {
        return caps.get(1)?.as_str().parse().ok();
    }
    bracket_re()
        .captures_iter(reply)
        .last()
        .and_then(|caps| caps.get(1))
        .and_then(|m| m.as_str().parse().ok())
}
