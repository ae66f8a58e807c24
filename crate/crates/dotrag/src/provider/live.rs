//! Live OpenAI-compatible HTTP backend for chat completions and embeddings.
//!
//! The base URL, model names, and API key come from configuration and the
//! environment (the key is env-only). A configurable in-flight cap bounds
//! concurrent requests across all worker threads.

use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::Deserialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::provider::{ChatModel, Embedder, LlmRequest};
use crate::vector::Embedding;

/// Counting semaphore bounding in-flight HTTP requests.
#[derive(Debug)]
struct InflightGate {
    slots: Mutex<usize>,
    freed: Condvar,
}

impl InflightGate {
    fn new(cap: usize) -> Self {
        InflightGate {
            slots: Mutex::new(cap.max(1)),
            freed: Condvar::new(),
        }
    }

    fn acquire(&self) -> InflightPermit<'_> {
        let mut slots = self.slots.lock().expect("gate lock");
        while *slots == 0 {
            slots = self.freed.wait(slots).expect("gate wait");
        }
        *slots -= 1;
        InflightPermit { gate: self }
    }
}

struct InflightPermit<'a> {
    gate: &'a InflightGate,
}

impl Drop for InflightPermit<'_> {
    fn drop(&mut self) {
        let mut slots = self.gate.slots.lock().expect("gate lock");
        *slots += 1;
        self.gate.freed.notify_one();
    }
}

/// Connection settings for the live backend.
#[derive(Debug, Clone)]
pub struct LiveSettings {
    pub base_url: String,
    pub api_key: String,
    pub chat_model: String,
    pub embed_model: String,
    pub in_flight: usize,
    pub timeout_secs: u64,
}

/// HTTP client for `/chat/completions` and `/embeddings`.
pub struct LiveProvider {
    settings: LiveSettings,
    client: reqwest::blocking::Client,
    gate: InflightGate,
}

impl LiveProvider {
    pub fn new(settings: LiveSettings) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(settings.timeout_secs.max(1)))
            .build()
            .map_err(|e| Error::Transport {
                message: format!("cannot build http client: {e}"),
            })?;
        let gate = InflightGate::new(settings.in_flight);
        Ok(LiveProvider {
            settings,
            client,
            gate,
        })
    }

    fn url(&self, endpoint: &str) -> String {
        format!("{}/{endpoint}", self.settings.base_url.trim_end_matches('/'))
    }

    fn post(&self, endpoint: &str, body: serde_json::Value) -> Result<serde_json::Value> {
        let _permit = self.gate.acquire();
        let response = self
            .client
            .post(self.url(endpoint))
            .bearer_auth(&self.settings.api_key)
            .json(&body)
            .send()
            .map_err(|e| Error::Transport {
                message: format!("POST {endpoint}: {e}"),
            })?;
        let status = response.status();
        let text = response.text().map_err(|e| Error::Transport {
            message: format!("POST {endpoint}: reading body: {e}"),
        })?;
        if !status.is_success() {
            return Err(Error::Transport {
                message: format!("POST {endpoint}: status {status}: {text}"),
            });
        }
        serde_json::from_str(&text).map_err(|e| Error::Transport {
            message: format!("POST {endpoint}: invalid json: {e}"),
        })
    }
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

#[derive(Deserialize)]
struct ChatMessage {
    content: String,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct EmbeddingDatum {
    embedding: Vec<f32>,
}

#[derive(Deserialize)]
struct EmbeddingResponse {
    data: Vec<EmbeddingDatum>,
}

impl ChatModel for LiveProvider {
    fn complete(&self, request: &LlmRequest) -> Result<String> {
        let body = json!({
            "model": self.settings.chat_model,
            "messages": [{"role": "user", "content": request.prompt}],
        });
        let value = self.post("chat/completions", body)?;
        let parsed: ChatResponse = serde_json::from_value(value).map_err(|e| Error::Transport {
            message: format!("chat/completions: unexpected shape: {e}"),
        })?;
        parsed
            .choices
            .into_iter()
            .next()
            .map(|c| c.message.content)
            .ok_or_else(|| Error::Transport {
                message: "chat/completions: empty choices".into(),
            })
    }
}

impl Embedder for LiveProvider {
    fn embed(&self, text: &str) -> Result<Embedding> {
        if text.trim().is_empty() {
            return Err(Error::vector("cannot embed empty text"));
        }
        let body = json!({
            "model": self.settings.embed_model,
            "input": text,
        });
        let value = self.post("embeddings", body)?;
        let parsed: EmbeddingResponse =
            serde_json::from_value(value).map_err(|e| Error::Transport {
                message: format!("embeddings: unexpected shape: {e}"),
            })?;
        let datum = parsed.data.into_iter().next().ok_or_else(|| Error::Transport {
            message: "embeddings: empty data".into(),
        })?;
        Embedding::new(datum.embedding)
    }
}
