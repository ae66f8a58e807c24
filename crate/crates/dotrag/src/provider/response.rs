//! Structured response shapes, one per [`Stage`](crate::provider::Stage).

use serde::{Deserialize, Serialize};

/// Path judgment verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Irrelevant,
    Partial,
    Complete,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Irrelevant => "irrelevant",
            Verdict::Partial => "partial",
            Verdict::Complete => "complete",
        }
    }
}

/// Whether the extractor routed the query to named entities only, or also
/// to corpus-level themes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoutingMode {
    LowOnly,
    LowAndHigh,
}

/// One extracted concept: the query span and a short interpretation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptOut {
    pub span: String,
    #[serde(default)]
    pub gloss: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConceptExtraction {
    #[serde(default)]
    pub low: Vec<ConceptOut>,
    #[serde(default)]
    pub high: Vec<ConceptOut>,
    pub mode: RoutingMode,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeuristicGeneration {
    pub intermediate_rule: String,
    pub terminal_rule: String,
    #[serde(default)]
    pub allowed_types: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathJudgment {
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FollowupQueries {
    #[serde(default)]
    pub queries: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FinalAnswer {
    pub answer: String,
}

/// Which position won one judged dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    A,
    B,
    Tie,
}

/// Head-to-head judgment across the five dimensions. `A` always refers to
/// the first-presented answer; the caller maps positions back to systems.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JudgePairwise {
    pub comprehensiveness: Winner,
    pub logicality: Winner,
    pub relevance: Winner,
    pub coherence: Winner,
    pub overall: Winner,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TextualizeChunk {
    pub text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntitySummary {
    pub entity_type: String,
    pub description: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationDescribe {
    #[serde(default)]
    pub descriptions: Vec<String>,
}

/// Confirmed merge groups within one candidate duplicate cluster.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MergeConfirm {
    #[serde(default)]
    pub groups: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelabelDecision {
    pub id: String,
    pub label: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TypeRelabel {
    #[serde(default)]
    pub decisions: Vec<RelabelDecision>,
}
