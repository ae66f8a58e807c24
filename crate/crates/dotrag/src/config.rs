//! Run configuration.
//!
//! Sources are layered: built-in defaults, then a JSON config file of flat
//! dotted keys (`{"retrieval.tau": 0.4}`), then command-line flags. The API
//! key is environment-only so it can never land in a committed config file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::provider::live::{LiveProvider, LiveSettings};
use crate::provider::mock::{MockEmbedder, ScriptedMock};
use crate::provider::ProviderPair;

/// Environment variable names for the live backend.
pub const ENV_API_BASE: &str = "DOTRAG_API_BASE";
pub const ENV_API_KEY: &str = "DOTRAG_API_KEY";
pub const ENV_CHAT_MODEL: &str = "DOTRAG_CHAT_MODEL";
pub const ENV_EMBED_MODEL: &str = "DOTRAG_EMBED_MODEL";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProviderMode {
    Mock,
    Live,
}

/// Provider selection and transport settings.
#[derive(Debug, Clone)]
pub struct ProviderConfig {
    pub mode: ProviderMode,
    /// Rule script for the mock chat model; an absent script answers every
    /// stage with its default.
    pub mock_script: Option<PathBuf>,
    pub mock_embed_dim: usize,
    pub base_url: String,
    pub chat_model: String,
    pub embed_model: String,
    /// Maximum concurrent live requests.
    pub in_flight: usize,
    /// Raw responses examined per structured call before a parse failure
    /// surfaces.
    pub parse_attempts: u32,
    pub timeout_secs: u64,
}

/// Retrieval-stage parameters.
#[derive(Debug, Clone)]
pub struct RetrievalParams {
    /// Similarity threshold grounding low-level concepts.
    pub tau: f32,
    /// Top-k for grounding high-level concepts.
    pub k_high: usize,
    /// Cap on each low-level concept's anchor set.
    pub anchor_cap: usize,
    /// Hop limit for workspace expansion.
    pub h_max: usize,
    /// Search iteration limit per workspace.
    pub t_max: usize,
    /// Candidate destinations retrieved per iteration.
    pub candidates: usize,
    /// Paths requested per (anchor, destination) pair.
    pub paths_per_pair: usize,
    /// Per-round cap on judged paths.
    pub path_cap: usize,
    /// Chunks forwarded to answer generation.
    pub n_chunks: usize,
    /// Character budget per chunk in the final prompt.
    pub chunk_char_budget: usize,
}

impl Default for RetrievalParams {
    fn default() -> Self {
        RetrievalParams {
            tau: 0.5,
            k_high: 10,
            anchor_cap: 10,
            h_max: 3,
            t_max: 3,
            candidates: 5,
            paths_per_pair: 3,
            path_cap: 20,
            n_chunks: 8,
            chunk_char_budget: 2000,
        }
    }
}

/// The full resolved configuration for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub provider: ProviderConfig,
    pub retrieval: RetrievalParams,
    pub index_path: Option<PathBuf>,
    pub ground_truth_path: Option<PathBuf>,
    pub prompts_dir: Option<PathBuf>,
    /// Seed for the mock embedder.
    pub seed: u64,
    /// Worker cap for workspace search and evaluation.
    pub parallel: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            provider: ProviderConfig {
                mode: ProviderMode::Mock,
                mock_script: None,
                mock_embed_dim: 64,
                base_url: "https://api.openai.com/v1".into(),
                chat_model: "gpt-4o-mini".into(),
                embed_model: "text-embedding-3-small".into(),
                in_flight: 4,
                parse_attempts: 2,
                timeout_secs: 60,
            },
            retrieval: RetrievalParams::default(),
            index_path: None,
            ground_truth_path: None,
            prompts_dir: None,
            seed: 42,
            parallel: 1,
        }
    }
}

impl RunConfig {
    /// Loads a flat-dotted-key JSON config file over the defaults.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| {
            Error::config("config", format!("cannot read '{}': {e}", path.as_ref().display()))
        })?;
        let mut config = RunConfig::default();
        config.apply_json_str(&text)?;
        Ok(config)
    }

    /// Applies a JSON object of flat dotted keys on top of this config.
    pub fn apply_json_str(&mut self, text: &str) -> Result<()> {
        let map: BTreeMap<String, Value> = serde_json::from_str(text)
            .map_err(|e| Error::config("config", format!("not a JSON object: {e}")))?;
        for (key, value) in map {
            self.apply_key(&key, &value)?;
        }
        Ok(())
    }

    fn apply_key(&mut self, key: &str, value: &Value) -> Result<()> {
        let str_of = |v: &Value| -> Result<String> {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::config(key, "expected a string"))
        };
        let usize_of = |v: &Value| -> Result<usize> {
            v.as_u64()
                .map(|n| n as usize)
                .ok_or_else(|| Error::config(key, "expected a non-negative integer"))
        };
        match key {
            "provider.mode" => {
                self.provider.mode = match str_of(value)?.as_str() {
                    "mock" => ProviderMode::Mock,
                    "live" => ProviderMode::Live,
                    other => {
                        return Err(Error::config(key, format!("unknown mode '{other}'")))
                    }
                }
            }
            "provider.mock_script" => self.provider.mock_script = Some(str_of(value)?.into()),
            "provider.mock_embed_dim" => self.provider.mock_embed_dim = usize_of(value)?,
            "provider.base_url" => self.provider.base_url = str_of(value)?,
            "provider.chat_model" => self.provider.chat_model = str_of(value)?,
            "provider.embed_model" => self.provider.embed_model = str_of(value)?,
            "provider.in_flight" => self.provider.in_flight = usize_of(value)?,
            "provider.parse_attempts" => self.provider.parse_attempts = usize_of(value)? as u32,
            "provider.timeout_secs" => self.provider.timeout_secs = usize_of(value)? as u64,
            "retrieval.tau" => {
                self.retrieval.tau = value
                    .as_f64()
                    .ok_or_else(|| Error::config(key, "expected a number"))?
                    as f32
            }
            "retrieval.k_high" => self.retrieval.k_high = usize_of(value)?,
            "retrieval.anchor_cap" => self.retrieval.anchor_cap = usize_of(value)?,
            "retrieval.h_max" => self.retrieval.h_max = usize_of(value)?,
            "retrieval.t_max" => self.retrieval.t_max = usize_of(value)?,
            "retrieval.candidates" => self.retrieval.candidates = usize_of(value)?,
            "retrieval.paths_per_pair" => self.retrieval.paths_per_pair = usize_of(value)?,
            "retrieval.path_cap" => self.retrieval.path_cap = usize_of(value)?,
            "retrieval.n_chunks" => self.retrieval.n_chunks = usize_of(value)?,
            "retrieval.chunk_char_budget" => {
                self.retrieval.chunk_char_budget = usize_of(value)?
            }
            "paths.index" => self.index_path = Some(str_of(value)?.into()),
            "paths.ground_truth" => self.ground_truth_path = Some(str_of(value)?.into()),
            "paths.prompts_dir" => self.prompts_dir = Some(str_of(value)?.into()),
            "seed" => {
                self.seed = value
                    .as_u64()
                    .ok_or_else(|| Error::config(key, "expected a non-negative integer"))?
            }
            "parallel" => self.parallel = usize_of(value)?,
            other => return Err(Error::config(other, "unknown config key")),
        }
        Ok(())
    }

    /// Overlays live-backend settings from the environment.
    pub fn apply_env(&mut self) {
        if let Ok(v) = std::env::var(ENV_API_BASE) {
            self.provider.base_url = v;
        }
        if let Ok(v) = std::env::var(ENV_CHAT_MODEL) {
            self.provider.chat_model = v;
        }
        if let Ok(v) = std::env::var(ENV_EMBED_MODEL) {
            self.provider.embed_model = v;
        }
    }

    /// Validates every numeric range. Field names appear in the errors.
    pub fn validate(&self) -> Result<()> {
        let r = &self.retrieval;
        if !(r.tau > 0.0 && r.tau <= 1.0) {
            return Err(Error::config("retrieval.tau", "must be in (0, 1]"));
        }
        for (name, v) in [
            ("retrieval.k_high", r.k_high),
            ("retrieval.anchor_cap", r.anchor_cap),
            ("retrieval.h_max", r.h_max),
            ("retrieval.t_max", r.t_max),
            ("retrieval.candidates", r.candidates),
            ("retrieval.paths_per_pair", r.paths_per_pair),
            ("retrieval.path_cap", r.path_cap),
            ("retrieval.n_chunks", r.n_chunks),
            ("retrieval.chunk_char_budget", r.chunk_char_budget),
            ("provider.mock_embed_dim", self.provider.mock_embed_dim),
            ("provider.in_flight", self.provider.in_flight),
            ("parallel", self.parallel),
        ] {
            if v == 0 {
                return Err(Error::config(name, "must be at least 1"));
            }
        }
        if self.provider.parse_attempts == 0 {
            return Err(Error::config("provider.parse_attempts", "must be at least 1"));
        }
        if self.provider.mode == ProviderMode::Live && self.provider.mock_script.is_some() {
            return Err(Error::config(
                "provider.mock_script",
                "a mock script makes no sense with provider.mode = live",
            ));
        }
        Ok(())
    }

    /// Builds the provider pair this config describes. For the live mode the
    /// API key comes from the environment only.
    pub fn build_providers(&self) -> Result<ProviderPair> {
        self.validate()?;
        let pair = match self.provider.mode {
            ProviderMode::Mock => {
                let llm = match &self.provider.mock_script {
                    Some(path) => ScriptedMock::from_script_file(path)?,
                    None => ScriptedMock::empty(),
                };
                let embedder = MockEmbedder::new(self.provider.mock_embed_dim, self.seed);
                ProviderPair::new(Arc::new(llm), Arc::new(embedder))
            }
            ProviderMode::Live => {
                let api_key = std::env::var(ENV_API_KEY).map_err(|_| {
                    Error::config(
                        "provider",
                        format!("live mode requires the {ENV_API_KEY} environment variable"),
                    )
                })?;
                let live = Arc::new(LiveProvider::new(LiveSettings {
                    base_url: self.provider.base_url.clone(),
                    api_key,
                    chat_model: self.provider.chat_model.clone(),
                    embed_model: self.provider.embed_model.clone(),
                    in_flight: self.provider.in_flight,
                    timeout_secs: self.provider.timeout_secs,
                })?);
                ProviderPair::new(live.clone(), live)
            }
        };
        Ok(pair.with_parse_attempts(self.provider.parse_attempts))
    }

    /// Effective settings as printable key=value lines. Secrets never enter
    /// the config, so nothing needs redacting beyond noting the key source.
    pub fn describe(&self) -> Vec<(String, String)> {
        let opt = |p: &Option<PathBuf>| {
            p.as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| "(unset)".into())
        };
        vec![
            (
                "provider.mode".into(),
                match self.provider.mode {
                    ProviderMode::Mock => "mock".into(),
                    ProviderMode::Live => "live".into(),
                },
            ),
            ("provider.mock_script".into(), opt(&self.provider.mock_script)),
            (
                "provider.mock_embed_dim".into(),
                self.provider.mock_embed_dim.to_string(),
            ),
            ("provider.base_url".into(), self.provider.base_url.clone()),
            ("provider.chat_model".into(), self.provider.chat_model.clone()),
            ("provider.embed_model".into(), self.provider.embed_model.clone()),
            ("provider.api_key".into(), format!("(from ${ENV_API_KEY})")),
            ("provider.in_flight".into(), self.provider.in_flight.to_string()),
            (
                "provider.parse_attempts".into(),
                self.provider.parse_attempts.to_string(),
            ),
            ("retrieval.tau".into(), self.retrieval.tau.to_string()),
            ("retrieval.k_high".into(), self.retrieval.k_high.to_string()),
            ("retrieval.anchor_cap".into(), self.retrieval.anchor_cap.to_string()),
            ("retrieval.h_max".into(), self.retrieval.h_max.to_string()),
            ("retrieval.t_max".into(), self.retrieval.t_max.to_string()),
            ("retrieval.candidates".into(), self.retrieval.candidates.to_string()),
            (
                "retrieval.paths_per_pair".into(),
                self.retrieval.paths_per_pair.to_string(),
            ),
            ("retrieval.path_cap".into(), self.retrieval.path_cap.to_string()),
            ("retrieval.n_chunks".into(), self.retrieval.n_chunks.to_string()),
            (
                "retrieval.chunk_char_budget".into(),
                self.retrieval.chunk_char_budget.to_string(),
            ),
            ("paths.index".into(), opt(&self.index_path)),
            ("paths.ground_truth".into(), opt(&self.ground_truth_path)),
            ("paths.prompts_dir".into(), opt(&self.prompts_dir)),
            ("seed".into(), self.seed.to_string()),
            ("parallel".into(), self.parallel.to_string()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_defaults() {
        let c = RunConfig::default();
        assert_eq!(c.retrieval.tau, 0.5);
        assert_eq!(c.retrieval.k_high, 10);
        assert_eq!(c.retrieval.anchor_cap, 10);
        assert_eq!(c.retrieval.h_max, 3);
        assert_eq!(c.retrieval.t_max, 3);
        assert_eq!(c.retrieval.candidates, 5);
        assert_eq!(c.retrieval.paths_per_pair, 3);
        assert_eq!(c.retrieval.path_cap, 20);
        assert_eq!(c.retrieval.n_chunks, 8);
        assert_eq!(c.provider.parse_attempts, 2);
        assert_eq!(c.seed, 42);
        c.validate().unwrap();
    }

    #[test]
    fn file_overrides_defaults() {
        let mut c = RunConfig::default();
        c.apply_json_str(r#"{"retrieval.tau": 0.25, "retrieval.h_max": 2, "seed": 7}"#)
            .unwrap();
        assert_eq!(c.retrieval.tau, 0.25);
        assert_eq!(c.retrieval.h_max, 2);
        assert_eq!(c.seed, 7);
    }

    #[test]
    fn unknown_key_rejected() {
        let mut c = RunConfig::default();
        let err = c.apply_json_str(r#"{"retrieval.typo": 1}"#).unwrap_err();
        assert!(err.to_string().contains("retrieval.typo"));
    }

    #[test]
    fn tau_above_one_rejected() {
        let mut c = RunConfig::default();
        c.retrieval.tau = 1.0 + 1e-6;
        let err = c.validate().unwrap_err();
        assert!(err.to_string().contains("retrieval.tau"));
        c.retrieval.tau = 1.0;
        c.validate().unwrap();
    }

    #[test]
    fn zero_hops_rejected() {
        let mut c = RunConfig::default();
        c.retrieval.h_max = 0;
        let err = c.validate().unwrap_err();
        assert!(err.to_string().contains("h_max"));
    }

    #[test]
    fn mock_providers_build_without_env() {
        let c = RunConfig::default();
        let pair = c.build_providers().unwrap();
        assert_eq!(pair.parse_attempts, 2);
    }
}
