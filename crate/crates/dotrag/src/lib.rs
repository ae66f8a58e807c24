//! Reasoning-as-retrieval over knowledge graphs.
//!
//! This crate retrieves evidence for a question by *searching* a typed
//! entity–relation graph rather than ranking text chunks: it grounds the
//! question to anchor nodes, carves out an independent workspace around
//! each anchor set (a constrained h-hop subgraph with its own local vector
//! store and LLM-generated acceptance rules), iteratively discovers
//! loopless relational paths inside each workspace, and aggregates the
//! accepted paths with their supporting source chunks into a final answer.
//!
//! The crate also ships the surrounding tooling: corpus preparation that
//! turns relational triples into a fully textualized, embedded index, and
//! an evaluation harness for node-level retrieval metrics and pairwise
//! answer judging.
//!
//! Everything runs offline under deterministic mock providers (see
//! [`provider::mock`]), which is how the test suite and the examples in the
//! guide operate. The narrative guide lives in `book/`; its code snippets
//! compile and run as doc-tests of this crate.

pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod graph;
pub mod pathfind;
pub mod pipeline;
pub mod provider;
pub mod trace;
pub mod vector;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use graph::{load_index, parse_index, Entity, GraphIndex, Relation, Schema, Subgraph};
pub use pathfind::{is_prefix, yen_paths, PathStatus, RelPath};
pub use pipeline::{run_query, AnswerBundle, QueryOutcome};
pub use provider::{ChatModel, Embedder, ProviderPair};
pub use vector::{cosine, Embedding, ScoredHit, VectorStore};

// The guide's code samples double as doc-tests so the book can never drift
// from the library.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(graph_index, "../../../book/src/graph-index.md");
    chapter!(vector_search, "../../../book/src/vector-search.md");
    chapter!(providers, "../../../book/src/providers.md");
    chapter!(path_discovery, "../../../book/src/path-discovery.md");
    chapter!(query_pipeline, "../../../book/src/query-pipeline.md");
    chapter!(corpus_preparation, "../../../book/src/corpus-preparation.md");
    chapter!(evaluation, "../../../book/src/evaluation.md");
}
