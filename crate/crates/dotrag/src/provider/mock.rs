//! Deterministic offline providers.
//!
//! [`ScriptedMock`] answers chat requests from an ordered rule list with
//! per-stage defaults, so a fixture can pin every decision the pipeline
//! makes. [`MockEmbedder`] maps text to a unit vector through a seeded
//! token-hash bag: identical text embeds identically, and texts sharing
//! tokens land closer than unrelated texts.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::provider::parse::to_fenced_block;
use crate::provider::{ChatModel, Embedder, LlmRequest, Stage};
use crate::vector::Embedding;

/// One scripted rule: applies when the stage matches and every `contains`
/// substring appears in the prompt. First matching rule wins.
#[derive(Debug, Clone, Deserialize)]
pub struct MockRule {
    pub stage: Stage,
    #[serde(default)]
    pub contains: Vec<String>,
    /// Structured response, rendered into the fenced block format.
    #[serde(default)]
    pub response: Option<Value>,
    /// Verbatim raw text instead; lets fixtures exercise parse failures.
    #[serde(default)]
    pub raw: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
struct ScriptFile {
    #[serde(default)]
    defaults: BTreeMap<Stage, Value>,
    #[serde(default)]
    rules: Vec<MockRule>,
}

/// A fully deterministic scripted chat model.
#[derive(Debug, Clone)]
pub struct ScriptedMock {
    rules: Vec<MockRule>,
    defaults: BTreeMap<Stage, Value>,
}

fn builtin_default(stage: Stage) -> Value {
    match stage {
        Stage::ConceptExtraction => {
            serde_json::json!({"low": [], "high": [], "mode": "low_and_high"})
        }
        Stage::HeuristicGeneration => serde_json::json!({
            "intermediate_rule": "Evidence connecting the anchors to entities related to the question.",
            "terminal_rule": "An entity that directly satisfies the question.",
            "allowed_types": [],
        }),
        Stage::PathJudgment => serde_json::json!({"verdict": "irrelevant"}),
        Stage::FollowupQueries => serde_json::json!({"queries": []}),
        Stage::FinalAnswer => serde_json::json!({"answer": "No answer available."}),
        Stage::JudgePairwise => serde_json::json!({
            "comprehensiveness": "tie",
            "logicality": "tie",
            "relevance": "tie",
            "coherence": "tie",
            "overall": "tie",
        }),
        Stage::TextualizeChunk => serde_json::json!({"text": ""}),
        Stage::EntitySummary => serde_json::json!({
            "entity_type": "unsure",
            "description": "No grounded description was produced.",
        }),
        Stage::RelationDescribe => serde_json::json!({"descriptions": []}),
        Stage::MergeConfirm => serde_json::json!({"groups": []}),
        Stage::TypeRelabel => serde_json::json!({"decisions": []}),
    }
}

impl ScriptedMock {
    /// A mock with no rules: every stage answers its built-in default.
    pub fn empty() -> Self {
        ScriptedMock {
            rules: Vec::new(),
            defaults: BTreeMap::new(),
        }
    }

    pub fn new(rules: Vec<MockRule>, defaults: BTreeMap<Stage, Value>) -> Self {
        ScriptedMock { rules, defaults }
    }

    pub fn from_script_str(text: &str) -> Result<Self> {
        let script: ScriptFile = serde_json::from_str(text)?;
        Ok(ScriptedMock {
            rules: script.rules,
            defaults: script.defaults,
        })
    }

    pub fn from_script_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::Config {
            field: "mock_script".into(),
            message: format!("cannot read '{}': {e}", path.as_ref().display()),
        })?;
        Self::from_script_str(&text)
    }

    /// Every stage has a default: the script's if provided, else built-in.
    fn default_for(&self, stage: Stage) -> Value {
        self.defaults
            .get(&stage)
            .cloned()
            .unwrap_or_else(|| builtin_default(stage))
    }
}

impl ChatModel for ScriptedMock {
    fn complete(&self, request: &LlmRequest) -> Result<String> {
        for rule in &self.rules {
            if rule.stage != request.stage {
                continue;
            }
            if !rule.contains.iter().all(|s| request.prompt.contains(s)) {
                continue;
            }
            if let Some(raw) = &rule.raw {
                return Ok(raw.clone());
            }
            if let Some(response) = &rule.response {
                return Ok(to_fenced_block(response));
            }
        }
        Ok(to_fenced_block(&self.default_for(request.stage)))
    }
}

/// Deterministic token-hash embedder: tokenize on non-alphanumerics,
/// lowercase, hash each token with the seed into one of `dim` buckets with
/// a ±1 sign, sum, normalize.
#[derive(Debug, Clone, Copy)]
pub struct MockEmbedder {
    dim: usize,
    seed: u64,
}

impl MockEmbedder {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim > 0, "embedding dimension must be positive");
        MockEmbedder { dim, seed }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// FNV-1a, stable across platforms and releases.
fn fnv1a64(seed: u64, bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for b in seed.to_le_bytes().iter().chain(bytes) {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

impl Embedder for MockEmbedder {
    fn embed(&self, text: &str) -> Result<Embedding> {
        if text.trim().is_empty() {
            return Err(Error::vector("cannot embed empty text"));
        }
        let lowered = text.to_lowercase();
        let mut acc = vec![0.0f64; self.dim];
        for token in lowered.split(|c: char| !c.is_alphanumeric()) {
            if token.is_empty() {
                continue;
            }
            let h = fnv1a64(self.seed, token.as_bytes());
            let bucket = (h % self.dim as u64) as usize;
            let sign = if (h >> 33) & 1 == 0 { 1.0 } else { -1.0 };
            acc[bucket] += sign;
        }
        if acc.iter().all(|v| *v == 0.0) {
            // Tokens cancelled out (or there were none): fall back to a
            // single bucket from the whole text so the output stays unit.
            let h = fnv1a64(self.seed.wrapping_add(1), lowered.as_bytes());
            acc[(h % self.dim as u64) as usize] = 1.0;
        }
        let norm = acc.iter().map(|v| v * v).sum::<f64>().sqrt();
        Embedding::new(acc.iter().map(|v| (v / norm) as f32).collect())
    }
}
