//! Corpus-in, benchmark-out toolkit for conversational retrieval.
//!
//! The pipeline turns a raw document corpus into a multi-turn conversational
//! retrieval benchmark and then measures both the benchmark and the retrievers
//! run against it:
//!
//! 1. [`curate`] — strip markup, recursively chunk, MinHash-LSH dedup, and
//!    quality-filter raw documents into a clean chunk corpus.
//! 2. [`cluster`] — embed the chunks, build an exact k-NN graph, walk it with
//!    a greedy nearest-unvisited-neighbor traversal, and segment the path
//!    into fixed-size semantic clusters.
//! 3. [`dialogue`] — generate annotated multi-turn conversations from the
//!    clusters with a questioner / responder / polisher agent trio, including
//!    soft and hard topic switches.
//! 4. [`audit`] — score benchmark quality with a four-metric LLM-judge
//!    ensemble (query-evidence alignment, evidence completeness via
//!    discriminability testing, answer faithfulness, answer quality).
//! 5. [`retrieval`] — serialize conversational contexts, retrieve over the
//!    corpus, and report Recall@k / MRR@20 / NDCG@20 plus the
//!    raw-vs-rewritten query gap.
//!
//! [`provider`] gives uniform access to chat/embedding services (with
//! deterministic mocks for offline runs) and [`pipeline`] ties the stages
//! together behind a run config, content-hash manifest, and report emitter.
//!
//! Hot loops (signatures, pairwise distances, per-instance retrieval and
//! judging) are data-parallel via rayon when the default `parallel` feature
//! is on, and fall back to sequential iterators without it. Outputs are
//! byte-identical either way.

pub mod audit;
pub mod cluster;
pub mod curate;
pub mod dialogue;
mod error;
pub mod exec;
pub mod pipeline;
pub mod provider;
pub mod retrieval;
pub mod rng;
pub mod store;
pub mod textutil;

pub use error::{Error, Result};
