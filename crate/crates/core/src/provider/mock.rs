//! Deterministic mock backends.
//!
//! [`MockChat`] serves canned or scripted replies for unit tests and can
//! inject transient/auth failures. [`HashEmbedder`] feature-hashes character
//! n-grams into a fixed dimension, which preserves enough lexical similarity
//! for clustering and retrieval tests. [`SimulatedChat`] recognizes the
//! pipeline's prompt templates and plays every agent and judge role with
//! pure-function replies, so the full pipeline runs offline and
//! byte-reproducibly.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::error::ProviderError;
use crate::rng::{fnv1a, splitmix64};
use crate::textutil::{content_word_set, content_words, sentences, word_set};

use super::{ChatBackend, ChatReply, ChatRequest, EmbedBackend};

// ---------------------------------------------------------------------------
// MockChat: canned replies and failure injection
// ---------------------------------------------------------------------------

/// Scriptable chat backend for tests.
///
/// Reply resolution order: exact match of the last user message against the
/// canned map, then the scripted queue, then the default reply.
pub struct MockChat {
    canned: HashMap<String, String>,
    state: Mutex<MockState>,
    default_reply: Option<String>,
    fail_first: u32,
    auth_failure: bool,
}

#[derive(Default)]
struct MockState {
    queue: Vec<String>,
    calls: u32,
}

impl MockChat {
    pub fn new() -> Self {
        MockChat {
            canned: HashMap::new(),
            state: Mutex::new(MockState::default()),
            default_reply: None,
            fail_first: 0,
            auth_failure: false,
        }
    }

    /// Reply with `reply` whenever the last user message equals `prompt`.
    pub fn with_reply(mut self, prompt: impl Into<String>, reply: impl Into<String>) -> Self {
        self.canned.insert(prompt.into(), reply.into());
        self
    }

    /// Queue replies returned in order for otherwise-unmatched requests.
    pub fn with_script(self, replies: &[&str]) -> Self {
        {
            let mut state = self.state.lock().unwrap();
            state.queue = replies.iter().rev().map(|s| s.to_string()).collect();
        }
        self
    }

    pub fn with_default_reply(mut self, reply: impl Into<String>) -> Self {
        self.default_reply = Some(reply.into());
        self
    }

    /// Fail the first `n` calls with a rate-limit error.
    pub fn failing_first(mut self, n: u32) -> Self {
        self.fail_first = n;
        self
    }

    /// Fail every call with an auth error.
    pub fn auth_failure(mut self) -> Self {
        self.auth_failure = true;
        self
    }

    pub fn calls(&self) -> u32 {
        self.state.lock().unwrap().calls
    }
}

impl Default for MockChat {
    fn default() -> Self {
        Self::new()
    }
}

impl ChatBackend for MockChat {
    fn complete(&self, req: &ChatRequest) -> Result<ChatReply, ProviderError> {
        if self.auth_failure {
            return Err(ProviderError::Auth("mock credential rejected".into()));
        }
        let mut state = self.state.lock().unwrap();
        state.calls += 1;
        if state.calls <= self.fail_first {
            return Err(ProviderError::RateLimited { retries: 0, message: "mock 429".into() });
        }
        let last_user = req
            .messages
            .iter()
            .rev()
            .find(|m| m.role == super::Role::User)
            .map(|m| m.text.as_str())
            .unwrap_or_default();
        if let Some(reply) = self.canned.get(last_user) {
            return Ok(ChatReply { text: reply.clone(), usage: None });
        }
        if let Some(reply) = state.queue.pop() {
            return Ok(ChatReply { text: reply, usage: None });
        }
        match &self.default_reply {
            Some(reply) => Ok(ChatReply { text: reply.clone(), usage: None }),
            None => Err(ProviderError::MalformedResponse {
                message: "no scripted reply for prompt".into(),
                raw: last_user.chars().take(120).collect(),
            }),
        }
    }
}

// ---------------------------------------------------------------------------
// HashEmbedder
// ---------------------------------------------------------------------------

/// Deterministic embedder: feature-hash character trigrams with a sign trick,
/// leaving normalization to the gateway.
pub struct HashEmbedder {
    model_id: String,
    dim: usize,
}

impl HashEmbedder {
    pub fn new(model_id: impl Into<String>, dim: usize) -> Self {
        HashEmbedder { model_id: model_id.into(), dim: dim.max(2) }
    }

    fn embed_one(&self, text: &str) -> Vec<f32> {
        let mut v = vec![0f32; self.dim];
        let lower = text.to_lowercase();
        let chars: Vec<char> = lower.chars().collect();
        let mut bump = |gram: &str| {
            let h = splitmix64(fnv1a(gram.as_bytes()));
            let idx = (h % self.dim as u64) as usize;
            let sign = if h & (1 << 63) != 0 { 1.0 } else { -1.0 };
            v[idx] += sign;
        };
        if chars.len() < 3 {
            bump(&lower);
        } else {
            for window in chars.windows(3) {
                bump(&window.iter().collect::<String>());
            }
        }
        if v.iter().all(|x| *x == 0.0) {
            // Signs cancelled exactly; fall back to a whole-text feature.
            let h = splitmix64(fnv1a(lower.as_bytes()));
            v[(h % self.dim as u64) as usize] = 1.0;
        }
        v
    }
}

impl EmbedBackend for HashEmbedder {
    fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f32>>, ProviderError> {
        Ok(crate::exec::map_slice(texts, |t| self.embed_one(t)))
    }

    fn model_id(&self) -> &str {
        &self.model_id
    }
}

/// Test embedder returning a preset raw vector per exact text.
pub struct FixedEmbedder {
    model_id: String,
    vectors: HashMap<String, Vec<f32>>,
}

impl FixedEmbedder {
    pub fn new(model_id: impl Into<String>, pairs: &[(&str, Vec<f32>)]) -> Self {
        FixedEmbedder {
            model_id: model_id.into(),
            vectors: pairs.iter().map(|(t, v)| (t.to_string(), v.clone())).collect(),
        }
    }
}

impl EmbedBackend for FixedEmbedder {
    fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f32>>, ProviderError> {
        texts
            .iter()
            .map(|t| {
                self.vectors.get(t).cloned().ok_or_else(|| ProviderError::MalformedResponse {
                    message: "no fixed vector for text".into(),
                    raw: t.chars().take(80).collect(),
                })
            })
            .collect()
    }

    fn model_id(&self) -> &str {
        &self.model_id
    }
}

// ---------------------------------------------------------------------------
// SimulatedChat: rule-based agent and judge roles
// ---------------------------------------------------------------------------

/// Template markers the simulator keys on. These match the prompt texts in
/// `dialogue::prompts` and `audit::prompts`.
mod markers {
    pub const QUESTIONER: &str = "Generate ONE natural-sounding question";
    pub const RESPONDER: &str = "think step-by-step and provide a detailed and complete answer";
    pub const POLISHER: &str = "rewrite the last user query";
    pub const REWRITER: &str = "rewrite the final user question so that it is fully self-contained";
    pub const JUDGE_ANSWERABLE: &str = "evaluating the answerability of a question";
    pub const JUDGE_PICK: &str = "determine which one document is the most probable source";
    pub const JUDGE_FAITHFUL: &str = "evaluating the faithfulness of a response";
    pub const JUDGE_QUALITY: &str = "evaluating the quality and correctness of a response";
    pub const REAL_INPUT: [&str; 3] =
        ["Now, it's your turn", "Here is the real user input:", "**Real input:**"];
}

/// Plays the questioner, responder, polisher, rewriter, and all four judge
/// roles by parsing the rendered prompt. Replies are pure functions of
/// `(request, seed)`.
///
/// The discriminability judge is the "keyword-overlap judge": it always picks
/// the candidate document with the greatest content-word overlap with the
/// question, breaking ties by presented order. Rating judges map overlap
/// fractions onto the 1-5 rubric.
pub struct SimulatedChat;

impl SimulatedChat {
    pub fn new() -> Self {
        SimulatedChat
    }
}

impl Default for SimulatedChat {
    fn default() -> Self {
        Self::new()
    }
}

impl ChatBackend for SimulatedChat {
    fn complete(&self, req: &ChatRequest) -> Result<ChatReply, ProviderError> {
        let prompt: String = req
            .messages
            .iter()
            .map(|m| m.text.as_str())
            .collect::<Vec<_>>()
            .join("\n");
        let text = simulate(&prompt, req.seed.unwrap_or(0));
        Ok(ChatReply { text, usage: None })
    }
}

fn simulate(prompt: &str, seed: u64) -> String {
    if prompt.contains(markers::QUESTIONER) {
        simulate_questioner(prompt, seed)
    } else if prompt.contains(markers::RESPONDER) {
        simulate_responder(prompt)
    } else if prompt.contains(markers::POLISHER) {
        simulate_polisher(prompt)
    } else if prompt.contains(markers::REWRITER) {
        simulate_rewriter(prompt)
    } else if prompt.contains(markers::JUDGE_PICK) {
        simulate_pick_judge(prompt)
    } else if prompt.contains(markers::JUDGE_ANSWERABLE) {
        let tail = real_input(prompt);
        let doc = section(tail, "Document");
        let question = final_user_question(&section(tail, "Question"));
        rating_reply(overlap_fraction(&question, &doc))
    } else if prompt.contains(markers::JUDGE_FAITHFUL) {
        let tail = real_input(prompt);
        let doc = section(tail, "Document");
        let response = section(tail, "Response");
        rating_reply(overlap_fraction(&response, &doc))
    } else if prompt.contains(markers::JUDGE_QUALITY) {
        let tail = real_input(prompt);
        let question = final_user_question(&section(tail, "Question"));
        let response = section(tail, "Response");
        rating_reply(overlap_fraction(&question, &response))
    } else {
        // Unrecognized template: echo a deterministic acknowledgement.
        format!("ack:{:016x}", splitmix64(fnv1a(prompt.as_bytes()) ^ seed))
    }
}

/// The portion of the prompt after the final "real input" divider, so the
/// worked examples inside judge templates are never parsed as input.
fn real_input(prompt: &str) -> &str {
    let mut tail = prompt;
    for marker in markers::REAL_INPUT {
        if let Some(pos) = tail.rfind(marker) {
            tail = &tail[pos + marker.len()..];
        }
    }
    tail
}

/// Extract the body of a `**Name:**` section, up to the next `**...:**`
/// header or end of text.
fn section(text: &str, name: &str) -> String {
    let header = format!("**{name}:**");
    let Some(start) = text.rfind(&header) else {
        return String::new();
    };
    let body = &text[start + header.len()..];
    let end = body.find("\n**").unwrap_or(body.len());
    body[..end].trim().to_string()
}

/// Parse "[id] text" document entries from a rendered documents section.
fn parse_documents(docs: &str) -> Vec<(usize, String)> {
    let mut out: Vec<(usize, String)> = Vec::new();
    for line in docs.lines() {
        let line = line.trim();
        if line == "---" || line.is_empty() {
            continue;
        }
        if let Some((id, rest)) = parse_bracket_id(line) {
            out.push((id, rest.to_string()));
        } else if let Some(last) = out.last_mut() {
            last.1.push(' ');
            last.1.push_str(line);
        }
    }
    out
}

pub(crate) fn parse_bracket_id(line: &str) -> Option<(usize, &str)> {
    let line = line.trim_start();
    let rest = line.strip_prefix('[')?;
    let close = rest.find(']')?;
    let id: usize = rest[..close].trim().parse().ok()?;
    Some((id, rest[close + 1..].trim_start()))
}

/// Fraction of the needle's content words found in the haystack.
fn overlap_fraction(needle: &str, haystack: &str) -> f64 {
    let n = content_word_set(needle);
    let h = word_set(haystack);
    if n.is_empty() {
        return 0.0;
    }
    n.intersection(&h).count() as f64 / n.len() as f64
}

fn rating_reply(fraction: f64) -> String {
    let rating = match fraction {
        f if f >= 0.8 => 5,
        f if f >= 0.6 => 4,
        f if f >= 0.4 => 3,
        f if f >= 0.2 => 2,
        _ => 1,
    };
    format!(
        "**Justification:**\nLexical support fraction {:.2} against the provided text.\n\n**Rating:** {}",
        fraction, rating
    )
}

fn simulate_questioner(prompt: &str, seed: u64) -> String {
    let tail = real_input(prompt);
    let docs = parse_documents(&section(tail, "Documents"));
    if docs.is_empty() {
        return "[1] What is this about?".into();
    }
    let pick = (splitmix64(fnv1a(tail.as_bytes()) ^ seed) % docs.len() as u64) as usize;
    let (id, text) = &docs[pick];

    // Prefer word-like terms unique to the chosen document so the question
    // is answerable by exactly one candidate.
    let mut other_words = std::collections::HashSet::new();
    for (j, (_, other)) in docs.iter().enumerate() {
        if j != pick {
            other_words.extend(content_words(other));
        }
    }
    let own = content_words(text);
    let wordlike = |w: &str| w.chars().any(|c| c.is_alphabetic());
    let mut keywords: Vec<&String> = own
        .iter()
        .filter(|w| wordlike(w) && !other_words.contains(*w))
        .collect();
    if keywords.len() < 2 {
        keywords = own.iter().filter(|w| !other_words.contains(*w)).collect();
    }
    if keywords.len() < 2 {
        keywords = own.iter().collect();
    }
    keywords.dedup();
    keywords.truncate(3);
    let subject = keywords.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(" ");
    format!("[{id}] What can you tell me about {subject}?")
}

fn simulate_responder(prompt: &str) -> String {
    let tail = real_input(prompt);
    let docs = parse_documents(&section(tail, "Documents"));
    let question = section(tail, "Question");
    let q_words = content_word_set(&question);
    let body = docs
        .first()
        .map(|(_, text)| {
            // Echo the two sentences that best cover the question's words,
            // in document order.
            let sents = sentences(text);
            let mut scored: Vec<(usize, i64)> = sents
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let overlap =
                        content_word_set(s).intersection(&q_words).count() as i64;
                    (i, overlap)
                })
                .collect();
            scored.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            let mut picked: Vec<usize> = scored.iter().take(2).map(|(i, _)| *i).collect();
            picked.sort_unstable();
            picked.iter().map(|&i| sents[i].clone()).collect::<Vec<_>>().join(" ")
        })
        .unwrap_or_default();
    if body.is_empty() {
        "There is no information available on that.".into()
    } else {
        body
    }
}

/// A question rendered in conversational context carries `User:`/`Agent:`
/// lines; an attentive judge keys on the final user line.
fn final_user_question(question_section: &str) -> String {
    question_section
        .lines()
        .rev()
        .find_map(|l| l.strip_prefix("User: "))
        .map(str::to_string)
        .unwrap_or_else(|| question_section.to_string())
}

fn simulate_polisher(prompt: &str) -> String {
    let tail = real_input(prompt);
    // The polisher prompt renders the dialogue then the raw query on the
    // final "[The last query that need to be rewrite]:" line.
    let last_line = tail.lines().rev().find(|l| !l.trim().is_empty()).unwrap_or("").trim();
    let raw = last_line
        .split_once("]: ")
        .map(|(_, q)| q)
        .unwrap_or(last_line)
        .trim()
        .to_string();
    let content = content_words(&raw);
    let tail_words: Vec<&String> = content.iter().rev().take(2).collect();
    let subject = tail_words.into_iter().rev().map(|s| s.as_str()).collect::<Vec<_>>().join(" ");
    if subject.is_empty() {
        raw
    } else {
        format!("And what about {subject}?")
    }
}

fn simulate_rewriter(prompt: &str) -> String {
    let tail = real_input(prompt);
    let conversation = section(tail, "Conversation");
    let question = section(tail, "Question");
    // Recover distinctive context terms from the most recent agent turn;
    // rare-looking tokens (digits, long words) anchor the topic better than
    // connective vocabulary.
    let last_answer = conversation
        .lines()
        .rev()
        .find(|l| l.starts_with("Agent: "))
        .map(|l| l.trim_start_matches("Agent: "))
        .unwrap_or("");
    let mut ranked: Vec<String> = content_words(last_answer)
        .into_iter()
        .filter(|w| w.chars().any(|c| c.is_alphabetic()))
        .collect();
    ranked.sort_by_key(|w| std::cmp::Reverse(w.len()));
    ranked.dedup();
    ranked.truncate(4);
    if ranked.is_empty() {
        question
    } else {
        format!("{} (regarding {})", question, ranked.join(" "))
    }
}

fn simulate_pick_judge(prompt: &str) -> String {
    let tail = real_input(prompt);
    let docs = parse_documents(&section(tail, "Documents"));
    let question = final_user_question(&section(tail, "Question"));
    let q_words = content_word_set(&question);
    let mut best = docs.first().map(|(id, _)| *id).unwrap_or(1);
    let mut best_overlap = -1i64;
    for (id, text) in &docs {
        let d_words = content_word_set(text);
        let overlap = q_words.intersection(&d_words).count() as i64;
        if overlap > best_overlap {
            best_overlap = overlap;
            best = *id;
        }
    }
    format!(
        "**Justification:**\nGreatest keyword overlap with the question.\n**Document ID:**\n[{best}]"
    )
}
