//! Language-model backends: a chat-completion HTTP client and a
//! deterministic mock.

use std::collections::HashMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::prompts::{Message, PromptBundle, PromptKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerationParams {
    pub model: String,
    pub temperature: f64,
    /// Upper bound on response length, in characters; longer replies are cut.
    pub max_output: usize,
    pub timeout_secs: u64,
}

impl Default for GenerationParams {
    fn default() -> Self {
        GenerationParams { model: "gpt-4-turbo".into(), temperature: 0.0, max_output: 2048, timeout_secs: 60 }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BackendError {
    #[error("request timed out")]
    Timeout,
    #[error("transport error: {0}")]
    Transport(String),
    #[error("HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("malformed response: {0}")]
    Malformed(String),
    #[error("environment variable {0} is not set")]
    MissingKey(String),
    #[error("backend unavailable")]
    Unavailable,
    #[error("{0}")]
    Config(String),
}

impl BackendError {
    fn is_retryable(&self) -> bool {
        match self {
            BackendError::Timeout | BackendError::Transport(_) => true,
            BackendError::Status { status, .. } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}

pub trait LlmBackend: Send + Sync {
    fn complete(&self, prompt: &PromptBundle, params: &GenerationParams) -> Result<String, BackendError>;
}

/// Cuts `text` to at most `max_chars` characters.
pub fn truncate_chars(text: &str, max_chars: usize) -> &str {
    match text.char_indices().nth(max_chars) {
        Some((i, _)) => &text[..i],
        None => text,
    }
}

/// Hex SHA-256 over the role-tagged messages.
pub fn prompt_digest(prompt: &PromptBundle) -> String {
    let mut hasher = Sha256::new();
    for m in &prompt.messages {
        hasher.update(serde_json::to_vec(m).expect("message serializes"));
        hasher.update([0u8]);
    }
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MockMode {
    #[default]
    Normal,
    AlwaysFail,
}

/// Replays canned responses keyed by [`prompt_digest`]. Prompts without a
/// canned answer get a reply derived from the digest: plan prompts end in
/// "Therefore, Plan k is selected." for some listed k, belief prompts get a
/// short fixed report.
#[derive(Debug, Default)]
pub struct MockBackend {
    canned: HashMap<String, String>,
    default_plan_reply: Option<String>,
    mode: MockMode,
    calls: AtomicUsize,
}

impl MockBackend {
    pub fn new() -> MockBackend {
        MockBackend::default()
    }

    pub fn failing() -> MockBackend {
        MockBackend { mode: MockMode::AlwaysFail, ..MockBackend::default() }
    }

    /// Loads a JSON object of `digest -> response`.
    pub fn from_file(path: &Path) -> Result<MockBackend, BackendError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| BackendError::Config(format!("{}: {e}", path.display())))?;
        let canned: HashMap<String, String> =
            serde_json::from_str(&text).map_err(|e| BackendError::Config(format!("{}: {e}", path.display())))?;
        Ok(MockBackend { canned, ..MockBackend::default() })
    }

    pub fn insert(&mut self, prompt: &PromptBundle, response: impl Into<String>) {
        self.canned.insert(prompt_digest(prompt), response.into());
    }

    /// Every plan prompt without a canned answer gets `reply`.
    pub fn with_plan_reply(mut self, reply: impl Into<String>) -> MockBackend {
        self.default_plan_reply = Some(reply.into());
        self
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn reset_calls(&self) {
        self.calls.store(0, Ordering::SeqCst);
    }
}

impl LlmBackend for MockBackend {
    fn complete(&self, prompt: &PromptBundle, _params: &GenerationParams) -> Result<String, BackendError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        if self.mode == MockMode::AlwaysFail {
            return Err(BackendError::Unavailable);
        }
        let digest = prompt_digest(prompt);
        if let Some(reply) = self.canned.get(&digest) {
            return Ok(reply.clone());
        }
        let seed = u64::from_str_radix(&digest[..16], 16).expect("hex digest");
        Ok(match prompt.kind {
            PromptKind::PlanEval { actions } => match &self.default_plan_reply {
                Some(reply) => reply.clone(),
                None => format!("Therefore, Plan {} is selected.", seed % actions.max(1) as u64),
            },
            PromptKind::Belief => format!("Belief report {}: the other players hold mixed hands.", &digest[..8]),
            PromptKind::SecondOrderBelief => {
                format!("Second-order report {}: the opponents cannot tell my strength.", &digest[..8])
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HttpConfig {
    /// Endpoint root; `/chat/completions` is appended.
    pub base_url: String,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    pub max_retries: u32,
    pub backoff_ms: u64,
    /// Minimum spacing between requests, shared by every caller.
    pub min_interval_ms: u64,
}

impl Default for HttpConfig {
    fn default() -> Self {
        HttpConfig {
            base_url: "https://api.openai.com/v1".into(),
            api_key_env: "OPENAI_API_KEY".into(),
            max_retries: 3,
            backoff_ms: 500,
            min_interval_ms: 0,
        }
    }
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: &'a [Message],
    temperature: f64,
    max_tokens: usize,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

#[derive(Deserialize)]
struct ChatMessage {
    content: Option<String>,
}

/// Blocking chat-completion client. Shareable across threads; requests are
/// spaced by `min_interval_ms` through an internal lock.
pub struct HttpBackend {
    config: HttpConfig,
    api_key: String,
    client: reqwest::blocking::Client,
    last_request: Mutex<Option<Instant>>,
}

impl HttpBackend {
    /// Reads the API key from the configured environment variable.
    pub fn new(config: HttpConfig) -> Result<HttpBackend, BackendError> {
        let api_key =
            std::env::var(&config.api_key_env).map_err(|_| BackendError::MissingKey(config.api_key_env.clone()))?;
        HttpBackend::with_key(config, api_key)
    }

    pub fn with_key(config: HttpConfig, api_key: String) -> Result<HttpBackend, BackendError> {
        let client = reqwest::blocking::Client::builder().build().map_err(|e| BackendError::Config(e.to_string()))?;
        Ok(HttpBackend { config, api_key, client, last_request: Mutex::new(None) })
    }

    fn throttle(&self) {
        let interval = Duration::from_millis(self.config.min_interval_ms);
        let mut last = self.last_request.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(prev) = *last {
            let elapsed = prev.elapsed();
            if elapsed < interval {
                std::thread::sleep(interval - elapsed);
            }
        }
        *last = Some(Instant::now());
    }

    fn attempt(&self, prompt: &PromptBundle, params: &GenerationParams) -> Result<String, BackendError> {
        self.throttle();
        let url = format!("{}/chat/completions", self.config.base_url.trim_end_matches('/'));
        let body = ChatRequest {
            model: &params.model,
            messages: &prompt.messages,
            temperature: params.temperature,
            max_tokens: params.max_output,
        };
        let response = self
            .client
            .post(url)
            .bearer_auth(&self.api_key)
            .timeout(Duration::from_secs(params.timeout_secs))
            .json(&body)
            .send()
            .map_err(|e| if e.is_timeout() { BackendError::Timeout } else { BackendError::Transport(e.to_string()) })?;
        let status = response.status();
        if !status.is_success() {
            let body = response.text().unwrap_or_default();
            return Err(BackendError::Status { status: status.as_u16(), body });
        }
        let parsed: ChatResponse = response.json().map_err(|e| BackendError::Malformed(e.to_string()))?;
        parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| BackendError::Malformed("no choices[0].message.content".into()))
    }
}

impl LlmBackend for HttpBackend {
    fn complete(&self, prompt: &PromptBundle, params: &GenerationParams) -> Result<String, BackendError> {
        let mut attempt = 0;
        loop {
            match self.attempt(prompt, params) {
                Ok(text) => return Ok(text),
                Err(e) if e.is_retryable() && attempt < self.config.max_retries => {
                    attempt += 1;
                    std::thread::sleep(Duration::from_millis(self.config.backoff_ms << (attempt - 1).min(6)));
                }
                Err(e) => return Err(e),
            }
        }
    }
}
