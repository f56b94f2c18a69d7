//! Prompt templates for the three generation agents.
//!
//! Placeholders are `{SEED}`, `{DOCUMENTS}`, `{QUESTION}`, `{MESSAGES}`, and
//! `{HISTORY}`. Documents render as `[id] text` entries separated by `---`
//! lines; ids are 1-based positions in the presented list.

use crate::curate::Chunk;

use super::Turn;

pub const QUESTIONER_TEMPLATE: &str = "\
You will be given multiple reference documents, each begins with [Document ID].
Generate ONE natural-sounding question that:
1. Can be directly answered by ONLY ONE specific document
2. Sounds like a human question (don't mention the document)
3. Starts with the corresponding [Document ID]

Format: [Document ID] Your question here

Here is an example:

{SEED}

Here is the real user input:

**Documents:**
{DOCUMENTS}
{HISTORY}";

/// Checked-in exemplar triple for the questioner's `{SEED}` slot.
pub const QUESTIONER_SEED_EXAMPLE: &str = "\
**Documents:**
[1] The Alhambra is a palace and fortress complex in Granada, Spain, begun in 1238 by Muhammad I Ibn al-Ahmar.
---
[2] The Great Barrier Reef, off the coast of Queensland, Australia, is the world's largest coral reef system, composed of over 2,900 individual reefs.
---
[3] Marie Curie conducted pioneering research on radioactivity and was the first person to win Nobel Prizes in two scientific fields.

[2] How many individual reefs make up the world's largest coral reef system?";

pub const RESPONDER_TEMPLATE: &str = "\
Based on the provided documents (and considering previous conversation, if applicable), \
think step-by-step and provide a detailed and complete answer to the user's question. \
Do not mention any document names or source information in your response. \
Answer directly; do not ask clarifying questions.
{HISTORY}
**Documents:**
{DOCUMENTS}

**Question:**
{QUESTION}
";

pub const POLISHER_TEMPLATE: &str = "\
You are an expert in natural language processing and conversational AI. Your task is to \
analyze the provided dialogue and rewrite the last user query into a version that sounds \
highly natural and conversational, as if it were part of a casual chat or small talk \
between humans.

**Specific Requirements for the Rewritten Query:**

1.  **Naturalness:** It should flow smoothly and sound like spontaneous human speech.
2.  **Incorporate Conversational Features:**
    *   **Coreference:** Use pronouns (e.g., \"it,\" \"they,\" \"that one\") or other \
referring expressions where appropriate, leveraging the context from the preceding \
dialogue turns.
    *   **Ellipsis:** Omit words or phrases that are easily understood from the context \
(e.g., \"What about Paris?\" instead of \"What is the weather forecast for Paris?\").
    *   Use common conversational fillers or phrasings if appropriate (e.g., \"How \
about...\", \"And...\", \"So,...\").
3.  **Meaning Preservation:** This is CRUCIAL. The rewritten query MUST retain the exact \
original intent and meaning of the original query. Do not add new information, change \
the core question, or introduce ambiguity that wasn't there. Ensure the rewritten query \
seeks the same information or performs the same function as the original.

**Example:**
[USER]: What's the weather like in London today?
[ASSISTANT]: Currently, it's partly cloudy in London with a high of 15\u{b0}C. There's a \
slight chance of rain later this afternoon.
[The last query that need to be rewrite]: What is the weather forecast for Paris for today?

[Rewrite Query]:
And how about Paris?

**Real input:**
{MESSAGES}
";

/// `[1] text` entries separated by `---` lines, ids 1-based.
pub fn render_documents(docs: &[&Chunk]) -> String {
    docs.iter()
        .enumerate()
        .map(|(i, c)| format!("[{}] {}", i + 1, c.text))
        .collect::<Vec<_>>()
        .join("\n---\n")
}

/// `User:`/`Agent:` lines for prior turns, or an empty string.
fn render_history(history: &[Turn]) -> String {
    if history.is_empty() {
        return String::new();
    }
    let mut out = String::from("\n**Conversation so far:**\n");
    for turn in history {
        out.push_str(&format!("User: {}\nAgent: {}\n", turn.query, turn.answer));
    }
    out
}

pub fn render_questioner(docs: &[&Chunk], history: &[Turn]) -> String {
    QUESTIONER_TEMPLATE
        .replace("{SEED}", QUESTIONER_SEED_EXAMPLE)
        .replace("{DOCUMENTS}", &render_documents(docs))
        .replace("{HISTORY}", &render_history(history))
}

pub fn render_responder(docs: &[&Chunk], question: &str, history: &[Turn]) -> String {
    RESPONDER_TEMPLATE
        .replace("{DOCUMENTS}", &render_documents(docs))
        .replace("{QUESTION}", question)
        .replace("{HISTORY}", &render_history(history))
}

pub fn render_polisher(history: &[Turn], last_query: &str) -> String {
    let mut messages = String::new();
    for turn in history {
        messages.push_str(&format!("[USER]: {}\n[ASSISTANT]: {}\n", turn.query, turn.answer));
    }
    messages.push_str(&format!("[The last query that need to be rewrite]: {last_query}"));
    POLISHER_TEMPLATE.replace("{MESSAGES}", &messages)
}
