//! Uniform contracts for the chat model and the embedder.
//!
//! Every pipeline stage goes through [`ChatModel::complete`] with a
//! [`Stage`]-tagged request; the stage decides which structured response
//! shape is parsed out of the raw text. The deterministic mocks in
//! [`mock`] make the whole pipeline runnable and testable offline; the
//! [`live`] backend speaks OpenAI-compatible HTTP.

pub mod live;
pub mod mock;
pub mod parse;
pub mod prompt;
pub mod response;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::Embedding;

/// The pipeline stage a request belongs to. The stage determines which
/// structured response parser applies and which mock rules match.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    ConceptExtraction,
    HeuristicGeneration,
    PathJudgment,
    FollowupQueries,
    FinalAnswer,
    JudgePairwise,
    TextualizeChunk,
    EntitySummary,
    RelationDescribe,
    MergeConfirm,
    TypeRelabel,
}

impl Stage {
    pub const ALL: [Stage; 11] = [
        Stage::ConceptExtraction,
        Stage::HeuristicGeneration,
        Stage::PathJudgment,
        Stage::FollowupQueries,
        Stage::FinalAnswer,
        Stage::JudgePairwise,
        Stage::TextualizeChunk,
        Stage::EntitySummary,
        Stage::RelationDescribe,
        Stage::MergeConfirm,
        Stage::TypeRelabel,
    ];
}

/// One chat request: the stage plus the fully rendered prompt.
#[derive(Debug, Clone)]
pub struct LlmRequest {
    pub stage: Stage,
    pub prompt: String,
}

impl LlmRequest {
    pub fn new(stage: Stage, prompt: impl Into<String>) -> Self {
        let prompt = prompt.into();
        debug_assert!(!prompt.is_empty(), "prompts are never empty");
        LlmRequest { stage, prompt }
    }
}

/// A chat completion backend. Returns the raw response text; structured
/// parsing happens in [`complete_parsed`].
pub trait ChatModel: Send + Sync {
    fn complete(&self, request: &LlmRequest) -> Result<String>;
}

/// A text embedding backend. Outputs are unit-norm.
pub trait Embedder: Send + Sync {
    fn embed(&self, text: &str) -> Result<Embedding>;
}

/// The LLM and embedder shared by all pipeline stages, plus the response
/// parse policy.
#[derive(Clone)]
pub struct ProviderPair {
    pub llm: Arc<dyn ChatModel>,
    pub embedder: Arc<dyn Embedder>,
    /// Maximum number of raw responses examined per structured call before
    /// surfacing a parse failure.
    pub parse_attempts: u32,
}

impl ProviderPair {
    pub fn new(llm: Arc<dyn ChatModel>, embedder: Arc<dyn Embedder>) -> Self {
        ProviderPair {
            llm,
            embedder,
            parse_attempts: 2,
        }
    }

    pub fn with_parse_attempts(mut self, attempts: u32) -> Self {
        self.parse_attempts = attempts.max(1);
        self
    }

    /// Issues the request and parses the stage's structured shape, retrying
    /// on parse failure up to the configured attempt bound. The raw text of
    /// the last response is retained alongside the parsed value.
    pub fn complete_parsed<T: serde::de::DeserializeOwned>(
        &self,
        request: &LlmRequest,
    ) -> Result<Parsed<T>> {
        let attempts = self.parse_attempts.max(1);
        let mut last_raw = String::new();
        let mut last_message = String::new();
        for _ in 0..attempts {
            let raw = self.llm.complete(request)?;
            match parse::parse_structured::<T>(&raw) {
                Ok(value) => return Ok(Parsed { value, raw }),
                Err(message) => {
                    last_raw = raw;
                    last_message = message;
                }
            }
        }
        Err(Error::ResponseParse {
            attempts,
            message: last_message,
            raw: last_raw,
        })
    }

    pub fn embed(&self, text: &str) -> Result<Embedding> {
        if text.trim().is_empty() {
            return Err(Error::vector("cannot embed empty text"));
        }
        self.embedder.embed(text)
    }
}

/// A parsed structured response with its raw text retained for logging.
#[derive(Debug, Clone)]
pub struct Parsed<T> {
    pub value: T,
    pub raw: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::provider::mock::{MockEmbedder, ScriptedMock};
    use crate::provider::response::PathJudgment;
    use crate::vector::cosine;

    #[test]
    fn mock_embed_is_deterministic() {
        let pair = ProviderPair::new(
            Arc::new(ScriptedMock::empty()),
            Arc::new(MockEmbedder::new(64, 42)),
        );
        let a = pair.embed("x").unwrap();
        let b = pair.embed("x").unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn mock_embed_is_unit_norm() {
        let embedder = MockEmbedder::new(48, 7);
        for text in ["a", "red car", "some longer sentence with words"] {
            let v = embedder.embed(text).unwrap();
            assert!((v.norm() - 1.0).abs() < 1e-6, "norm for {text:?}");
        }
    }

    #[test]
    fn token_overlap_raises_similarity() {
        let embedder = MockEmbedder::new(64, 42);
        let base = embedder.embed("red car").unwrap();
        let near = embedder.embed("red car fast").unwrap();
        let far = embedder.embed("quantum soup").unwrap();
        assert!(cosine(&base, &near) > cosine(&base, &far));
    }

    #[test]
    fn empty_text_rejected() {
        let pair = ProviderPair::new(
            Arc::new(ScriptedMock::empty()),
            Arc::new(MockEmbedder::new(64, 42)),
        );
        assert!(pair.embed("   ").is_err());
    }

    #[test]
    fn parse_failure_surfaces_raw_text_after_bound() {
        let mock = ScriptedMock::from_script_str(
            r#"{"rules": [{"stage": "path_judgment", "contains": ["x"], "raw": "no fenced block here"}]}"#,
        )
        .unwrap();
        let pair = ProviderPair::new(Arc::new(mock), Arc::new(MockEmbedder::new(8, 1)));
        let err = pair
            .complete_parsed::<PathJudgment>(&LlmRequest::new(Stage::PathJudgment, "judge x"))
            .unwrap_err();
        match err {
            Error::ResponseParse { attempts, raw, .. } => {
                assert_eq!(attempts, 2);
                assert!(raw.contains("no fenced block here"));
            }
            other => panic!("unexpected error {other}"),
        }
    }
}
