//! Rule-based removal of non-textual elements: markup tags, pipe/brace
//! table furniture, navigation boilerplate, and control characters.
//! Plain text passes through byte-identical.

use std::sync::OnceLock;

use regex::Regex;

use super::RawDocument;

const BOILERPLATE_EXACT: &[&str] = &[
    "Jump to navigation",
    "Jump to search",
    "Navigation menu",
    "From Wikipedia, the free encyclopedia",
    "Contents",
    "[edit]",
];

const BOILERPLATE_PREFIX: &[&str] = &["Retrieved from", "Categories:", "Category:"];

fn tag_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    // Tags proper (letter or slash after '<') and HTML comments; bare '<'
    // in prose is left alone.
    RE.get_or_init(|| Regex::new(r"</?[A-Za-z][^<>]*>|<!--.*?-->").unwrap())
}

fn is_table_line(trimmed: &str) -> bool {
    trimmed.starts_with("{|")
        || trimmed.starts_with("|}")
        || trimmed.starts_with("|-")
        || trimmed.starts_with('|')
        || trimmed.starts_with('!')
        || trimmed.matches('|').count() >= 2
        || (trimmed.starts_with('{') && trimmed.ends_with('}'))
}

fn is_boilerplate_line(trimmed: &str) -> bool {
    BOILERPLATE_EXACT.contains(&trimmed)
        || BOILERPLATE_PREFIX.iter().any(|p| trimmed.starts_with(p))
}

/// Strip markup and furniture from a raw document, preserving prose.
pub fn strip_nontext(raw: &RawDocument) -> RawDocument {
    let mut out = String::with_capacity(raw.text.len());
    for line in raw.text.split_inclusive('\n') {
        let content = line.strip_suffix('\n').unwrap_or(line);
        let trimmed = content.trim();
        if !trimmed.is_empty() && (is_table_line(trimmed) || is_boilerplate_line(trimmed)) {
            continue;
        }
        let without_tags = tag_re().replace_all(content, "");
        let cleaned: String = without_tags
            .chars()
            .filter(|c| !c.is_control() || *c == '\t')
            .map(|c| c)
            .collect::<String>()
            .replace("[edit]", "");
        out.push_str(&cleaned);
        if line.ends_with('\n') {
            out.push('\n');
        }
    }
    RawDocument { source_id: raw.source_id.clone(), text: out, metadata: raw.metadata.clone() }
}
