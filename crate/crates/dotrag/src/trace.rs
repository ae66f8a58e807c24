//! Append-only event log for one query run.
//!
//! Every retrieval, pruning, and judgment decision lands here, detailed
//! enough to reconstruct the run. Events serialize as newline-delimited
//! JSON for the CLI's `--trace` flag.

use serde::{Deserialize, Serialize};

use crate::provider::response::Verdict;

/// Where a search query came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuerySource {
    Initial,
    Followup,
    Fallback,
}

/// One candidate path considered during per-round pruning.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PruneEntry {
    pub nodes: Vec<String>,
    pub destination: String,
    pub destination_score: f32,
}

/// One pipeline event.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    QueryStart {
        query: String,
    },
    ConceptsExtracted {
        low: Vec<String>,
        high: Vec<String>,
        mode: String,
        /// True when extraction returned nothing and the whole query became
        /// a single high-level concept.
        whole_query_fallback: bool,
    },
    ConceptGrounded {
        concept: String,
        level: String,
        anchors: Vec<String>,
    },
    DotStart {
        dot_id: usize,
        concept: String,
        anchors: Vec<String>,
    },
    RulesGenerated {
        dot_id: usize,
        intermediate_rule: String,
        terminal_rule: String,
        allowed_types: Vec<String>,
        dropped_labels: Vec<String>,
    },
    SubgraphBuilt {
        dot_id: usize,
        entity_count: usize,
        relation_count: usize,
    },
    SearchQuery {
        dot_id: usize,
        iteration: usize,
        query: String,
        source: QuerySource,
    },
    Retrieval {
        dot_id: usize,
        iteration: usize,
        hits: Vec<(String, f32)>,
    },
    Prune {
        dot_id: usize,
        iteration: usize,
        kept: Vec<PruneEntry>,
        dropped: Vec<PruneEntry>,
    },
    Judgment {
        dot_id: usize,
        iteration: usize,
        nodes: Vec<String>,
        destination: String,
        verdict: Verdict,
    },
    PrefixFiltered {
        dot_id: usize,
        iteration: usize,
        removed: Vec<Vec<String>>,
    },
    Followups {
        dot_id: usize,
        iteration: usize,
        proposed: Vec<String>,
        accepted: Vec<String>,
    },
    Fallback {
        dot_id: usize,
        iteration: usize,
        query: String,
    },
    DotEnd {
        dot_id: usize,
        accepted_paths: usize,
        iterations: usize,
        truncated: bool,
    },
    ChunksRanked {
        scored: Vec<(String, f32)>,
        kept: usize,
    },
    Warning {
        message: String,
    },
}

/// Serializes events as newline-delimited JSON.
pub fn to_ndjson(events: &[TraceEvent]) -> String {
    let mut out = String::new();
    for event in events {
        out.push_str(&serde_json::to_string(event).expect("trace events serialize"));
        out.push('\n');
    }
    out
}

/// Parses a newline-delimited JSON trace.
pub fn from_ndjson(text: &str) -> crate::error::Result<Vec<TraceEvent>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Into::into))
        .collect()
}
