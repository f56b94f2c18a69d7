//! Oracle query rewriting: resolve each context-dependent query into a
//! self-contained one and measure the retrieval gap between the raw and
//! rewritten arms.

use crate::provider::{ChatRequest, Gateway, Message};
use crate::rng::fnv1a;
use crate::{exec, Result};

use super::context::{parse_context, serialize_context_pairs};
use super::RetrievalInstance;

const REWRITE_TEMPLATE: &str = "\
You resolve conversational context for a retrieval system. Please rewrite the final user \
question so that it is fully self-contained: resolve every pronoun, coreference, and \
ellipsis using the conversation, without adding information that is not implied by it. \
Reply with the rewritten question only.

**Conversation:**
{CONVERSATION}

**Question:**
{QUESTION}
";

/// Rewrite one instance's query into self-contained form; the rewritten
/// text replaces the whole serialized context. First-turn instances (no
/// history) are returned unchanged.
pub fn rewrite_query(
    instance: &RetrievalInstance,
    rewriter_model: &str,
    gateway: &Gateway,
) -> Result<RetrievalInstance> {
    let (history, query) = parse_context(&instance.context)?;
    if history.is_empty() {
        return Ok(instance.clone());
    }
    let conversation = serialize_context_pairs(&history, &query);
    let prompt = REWRITE_TEMPLATE
        .replace("{CONVERSATION}", &conversation)
        .replace("{QUESTION}", &query);
    let seed = fnv1a(format!("{}#{}", instance.conv_id, instance.turn_index).as_bytes());
    let req = ChatRequest {
        model_id: rewriter_model.to_string(),
        messages: vec![Message::user(prompt)],
        temperature: 0.0,
        max_output_tokens: 256,
        seed: Some(seed),
        assume_cache_hit: false,
    };
    let rewritten = gateway.chat(&req)?;
    Ok(RetrievalInstance { context: rewritten.trim().to_string(), ..instance.clone() })
}

/// Rewrite every instance; provider failures exclude the instance from the
/// rewrite arm (logged), they do not abort the run. Returns `(kept original
/// indices, rewritten instances)`.
pub fn rewrite_all(
    instances: &[RetrievalInstance],
    rewriter_model: &str,
    gateway: &Gateway,
) -> (Vec<usize>, Vec<RetrievalInstance>) {
    let results = exec::map_slice(instances, |inst| rewrite_query(inst, rewriter_model, gateway));
    let mut kept = Vec::new();
    let mut rewritten = Vec::new();
    for (i, result) in results.into_iter().enumerate() {
        match result {
            Ok(inst) => {
                kept.push(i);
                rewritten.push(inst);
            }
            Err(err) => log::warn!(
                "rewrite failed for {}#{}: {err}; excluded from rewrite arm",
                instances[i].conv_id,
                instances[i].turn_index
            ),
        }
    }
    (kept, rewritten)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::provider::mock::{HashEmbedder, MockChat};
    use crate::provider::{PricingModel, RetryPolicy};
    use std::sync::Arc;

    fn instance(context: &str) -> RetrievalInstance {
        RetrievalInstance {
            conv_id: "c1".into(),
            turn_index: 2,
            context: context.into(),
            gold_ids: vec!["g".into()],
            switch_kind: None,
        }
    }

    #[test]
    fn mock_mapping_rewrites_pronoun_query() {
        // Canned reply plays the rewriter model.
        let chat = MockChat::new().with_default_reply("Who designed the Eiffel Tower?");
        let gw = crate::provider::Gateway::new(
            Arc::new(chat),
            Arc::new(HashEmbedder::new("e", 32)),
            PricingModel::free(),
            2,
        )
        .with_retry(RetryPolicy::immediate(0));
        let inst = instance(
            "User: Tell me about the Eiffel Tower\nAgent: It is a tower in Paris.\nUser: Who designed it?",
        );
        let out = rewrite_query(&inst, "rewriter", &gw).unwrap();
        assert_eq!(out.context, "Who designed the Eiffel Tower?");
        assert_eq!(out.gold_ids, inst.gold_ids);
    }

    #[test]
    fn first_turn_passes_through_unchanged() {
        let gw = crate::provider::Gateway::mock(32);
        let inst = instance("User: Who designed the Eiffel Tower?");
        let out = rewrite_query(&inst, "rewriter", &gw).unwrap();
        assert_eq!(out.context, inst.context);
    }

    #[test]
    fn failures_drop_out_of_the_rewrite_arm() {
        let chat = MockChat::new(); // no reply → malformed-response error
        let gw = crate::provider::Gateway::new(
            Arc::new(chat),
            Arc::new(HashEmbedder::new("e", 32)),
            PricingModel::free(),
            2,
        )
        .with_retry(RetryPolicy::immediate(0));
        let insts = vec![
            instance("User: first question"), // no history → unchanged, kept
            instance("User: q\nAgent: a\nUser: and it?"), // needs provider → fails
        ];
        let (kept, rewritten) = rewrite_all(&insts, "rewriter", &gw);
        assert_eq!(kept, vec![0]);
        assert_eq!(rewritten.len(), 1);
    }
}
