//! Conversational context serialization.
//!
//! The frozen byte format: each history turn contributes
//! `User: {q}\nAgent: {a}\n`, and the line `User: {query}` (no trailing
//! newline) closes the context. Lines inside a query or answer that do not
//! start with either prefix are continuations of the current field.

use crate::dialogue::Turn;
use crate::{Error, Result};

const USER: &str = "User: ";
const AGENT: &str = "Agent: ";

/// Serialize history plus the current query.
pub fn serialize_context(history: &[Turn], query: &str) -> String {
    let mut out = String::new();
    for turn in history {
        out.push_str(USER);
        out.push_str(&turn.query);
        out.push('\n');
        out.push_str(AGENT);
        out.push_str(&turn.answer);
        out.push('\n');
    }
    out.push_str(USER);
    out.push_str(query);
    out
}

/// Serialize from plain `(query, answer)` pairs, for adapters that do not
/// carry full [`Turn`] records.
pub fn serialize_context_pairs(history: &[(String, String)], query: &str) -> String {
    let mut out = String::new();
    for (q, a) in history {
        out.push_str(USER);
        out.push_str(q);
        out.push('\n');
        out.push_str(AGENT);
        out.push_str(a);
        out.push('\n');
    }
    out.push_str(USER);
    out.push_str(query);
    out
}

/// Inverse of [`serialize_context`]: `(history pairs, current query)`.
pub fn parse_context(context: &str) -> Result<(Vec<(String, String)>, String)> {
    #[derive(PartialEq)]
    enum Field {
        Query,
        Answer,
    }
    let mut history = Vec::new();
    let mut current_query: Option<String> = None;
    let mut current_answer: Option<String> = None;
    let mut field = Field::Query;

    let malformed = |msg: &str| Error::Precondition(format!("malformed context: {msg}"));

    for line in context.split('\n') {
        if let Some(q) = line.strip_prefix(USER) {
            if let (Some(pq), Some(pa)) = (current_query.take(), current_answer.take()) {
                history.push((pq, pa));
            }
            if current_query.is_some() {
                return Err(malformed("two consecutive user turns"));
            }
            current_query = Some(q.to_string());
            field = Field::Query;
        } else if let Some(a) = line.strip_prefix(AGENT) {
            if current_query.is_none() {
                return Err(malformed("agent line before any user line"));
            }
            if current_answer.is_some() {
                return Err(malformed("two consecutive agent turns"));
            }
            current_answer = Some(a.to_string());
            field = Field::Answer;
        } else {
            // Continuation of the current field.
            let target = match field {
                Field::Query => current_query.as_mut(),
                Field::Answer => current_answer.as_mut(),
            };
            match target {
                Some(buf) => {
                    buf.push('\n');
                    buf.push_str(line);
                }
                None => return Err(malformed("context does not start with a user line")),
            }
        }
    }

    match (current_query, current_answer) {
        (Some(q), None) => Ok((history, q)),
        (Some(_), Some(_)) => Err(malformed("context must end with the current user query")),
        _ => Err(malformed("empty context")),
    }
}
