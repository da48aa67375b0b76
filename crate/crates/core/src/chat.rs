//! Chat-completion contract shared by every backend.
//!
//! The pipeline talks to models exclusively through [`ChatClient`]. Requests
//! always carry temperature 0.0; responses are sanitized of reasoning tags,
//! code fences, and enclosing emphasis before any downstream parsing.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::model::ModelSpec;

/// Default output budget. Pipeline outputs are short (a five-sentence
/// paragraph, a bullet list, a JSON array, or a single name).
pub const DEFAULT_MAX_OUTPUT_TOKENS: u32 = 1024;

/// A single prompt dispatched to one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChatRequest {
    pub model_id: String,
    pub prompt_text: String,
    /// Always 0.0; [`ChatRequest::validate`] rejects anything else.
    pub temperature: f64,
    pub max_output_tokens: u32,
    /// Free-form tag (phase + character + model) for logs and manifests.
    /// Not part of the cache key.
    pub request_tag: String,
}

impl ChatRequest {
    pub fn new(
        model_id: impl Into<String>,
        prompt_text: impl Into<String>,
        request_tag: impl Into<String>,
    ) -> Self {
        Self {
            model_id: model_id.into(),
            prompt_text: prompt_text.into(),
            temperature: 0.0,
            max_output_tokens: DEFAULT_MAX_OUTPUT_TOKENS,
            request_tag: request_tag.into(),
        }
    }

    pub fn validate(&self) -> Result<(), ChatError> {
        if self.temperature != 0.0 {
            return Err(ChatError::InvalidRequest(format!(
                "temperature must be exactly 0.0, got {}",
                self.temperature
            )));
        }
        if self.max_output_tokens == 0 {
            return Err(ChatError::InvalidRequest(
                "max_output_tokens must be positive".to_string(),
            ));
        }
        if self.model_id.is_empty() {
            return Err(ChatError::InvalidRequest("model_id is empty".to_string()));
        }
        Ok(())
    }
}

/// Outcome of one completion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompletionResult {
    pub raw_text: String,
    /// `sanitize(raw_text)`; cached entries return the recorded value
    /// byte-identically.
    pub clean_text: String,
    pub model_id: String,
    pub cache_hit: bool,
    pub latency_ms: u64,
}

impl CompletionResult {
    /// Build a fresh result, deriving `clean_text` from the raw response.
    pub fn new(
        model_id: impl Into<String>,
        raw_text: impl Into<String>,
        cache_hit: bool,
        latency_ms: u64,
    ) -> Self {
        let raw_text = raw_text.into();
        let clean_text = sanitize(&raw_text);
        Self {
            raw_text,
            clean_text,
            model_id: model_id.into(),
            cache_hit,
            latency_ms,
        }
    }

    /// Rehydrate a recorded entry without re-deriving `clean_text`, so that
    /// replayed responses are returned exactly as persisted.
    pub fn from_recorded(
        model_id: impl Into<String>,
        raw_text: impl Into<String>,
        clean_text: impl Into<String>,
    ) -> Self {
        Self {
            raw_text: raw_text.into(),
            clean_text: clean_text.into(),
            model_id: model_id.into(),
            cache_hit: true,
            latency_ms: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChatError {
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("environment variable '{env}' is not set (required for model '{model_id}')")]
    MissingCredential { model_id: String, env: String },
    #[error("transport failure after {attempts} attempts: {message}")]
    Transport { attempts: u32, message: String },
    #[error("replay miss for model '{model_id}' (cache key {key}); refusing to touch the network")]
    ReplayMiss { model_id: String, key: String },
    #[error("backend error: {0}")]
    Backend(String),
}

/// Anything that can answer a [`ChatRequest`]: the HTTP gateway, a replay
/// cache, or a test double.
pub trait ChatClient {
    fn complete(&self, spec: &ModelSpec, request: &ChatRequest) -> Result<CompletionResult, ChatError>;
}

/// Closures `Fn(&ModelSpec, &ChatRequest) -> Result<String, ChatError>` act
/// as clients; the returned text is treated as the raw response.
impl<F> ChatClient for F
where
    F: Fn(&ModelSpec, &ChatRequest) -> Result<String, ChatError>,
{
    fn complete(&self, spec: &ModelSpec, request: &ChatRequest) -> Result<CompletionResult, ChatError> {
        request.validate()?;
        let raw = self(spec, request)?;
        Ok(CompletionResult::new(request.model_id.clone(), raw, false, 0))
    }
}

/// Stable content key for one completion: a SHA-256 over the model id and
/// prompt text. Independent of `request_tag`, token budgets, and timestamps.
pub fn cache_key(request: &ChatRequest) -> String {
    let mut hasher = Sha256::new();
    hasher.update(request.model_id.as_bytes());
    hasher.update([0u8]);
    hasher.update(request.prompt_text.as_bytes());
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        let _ = write!(out, "{byte:02x}");
    }
    out
}

/// Remove formatting artifacts some models wrap around their answer:
/// `<think>…</think>` spans, one enclosing code fence, and enclosing
/// bold/emphasis markers. Interior text is preserved verbatim.
///
/// Applied to a fixpoint, so the function is idempotent on every input.
pub fn sanitize(raw: &str) -> String {
    let mut current = raw.to_string();
    loop {
        let next = sanitize_pass(&current);
        if next == current {
            return current;
        }
        current = next;
    }
}

fn sanitize_pass(text: &str) -> String {
    let without_think = remove_think_spans(text);
    let trimmed = without_think.trim();
    let unfenced = strip_enclosing_fence(trimmed);
    let trimmed = unfenced.trim();
    strip_enclosing_emphasis(trimmed).trim().to_string()
}

/// Drop every complete `<think>…</think>` span, including multiline ones.
/// An unmatched opening tag is left untouched.
fn remove_think_spans(text: &str) -> String {
    const OPEN: &str = "<think>";
    const CLOSE: &str = "</think>";
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    loop {
        match rest.find(OPEN) {
            Some(start) => match rest[start + OPEN.len()..].find(CLOSE) {
                Some(end) => {
                    out.push_str(&rest[..start]);
                    rest = &rest[start + OPEN.len() + end + CLOSE.len()..];
                }
                None => {
                    out.push_str(rest);
                    return out;
                }
            },
            None => {
                out.push_str(rest);
                return out;
            }
        }
    }
}

/// Strip one enclosing triple-backtick fence (with or without a language
/// tag). Text that is not a complete fenced block is returned unchanged.
fn strip_enclosing_fence(text: &str) -> String {
    if !text.starts_with("```") {
        return text.to_string();
    }
    let Some(first_newline) = text.find('\n') else {
        return text.to_string();
    };
    let body = text[first_newline + 1..].trim_end();
    match body.strip_suffix("```") {
        Some(inner) => inner.trim_end_matches(['\n', '\r']).to_string(),
        None => text.to_string(),
    }
}

/// Strip one matched pair of surrounding emphasis markers.
fn strip_enclosing_emphasis(text: &str) -> String {
    for marker in ["***", "**", "*", "___", "__", "_"] {
        if text.len() >= 2 * marker.len()
            && text.starts_with(marker)
            && text.ends_with(marker)
        {
            return text[marker.len()..text.len() - marker.len()].to_string();
        }
    }
    text.to_string()
}

/// Report invariant-breaking inputs for `complete` before any dispatch.
pub fn check_dispatch_preconditions(
    spec: &ModelSpec,
    request: &ChatRequest,
) -> Result<(), ChatError> {
    request.validate()?;
    if spec.model_id != request.model_id {
        return Err(ChatError::InvalidRequest(format!(
            "request model_id '{}' does not match spec model_id '{}'",
            request.model_id, spec.model_id
        )));
    }
    Ok(())
}

/// Render a list of already-validated strings as `- ` bullets, one per line.
pub fn bullet_block(items: &[String]) -> String {
    let lines: Vec<String> = items.iter().map(|item| format!("- {item}")).collect();
    lines.join("\n")
}
