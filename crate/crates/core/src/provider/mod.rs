//! Pluggable source of adversarial proposals.
//!
//! A [`Provider`] answers typed [`ProviderRequest`]s with [`ProviderResponse`]s
//! whose content has been parsed under the request kind's schema. Two
//! implementations exist: [`ScriptedProvider`] replays a recorded transcript
//! deterministically, and [`RemoteProvider`] talks to a chat-completion
//! endpoint. [`RecordingProvider`] wraps either one and captures the exchange
//! as a transcript that the scripted provider can replay.

mod prompts;
mod remote;
mod schema;
mod scripted;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

pub use prompts::{render_messages, ChatMessage};
pub use remote::{RemoteProvider, RemoteProviderConfig, RequestLimiter, TOKEN_ENV};
pub use schema::{
    parse_response, AnalysisStep, CheckerCase, HashSpecCandidate, ProposedInput, ValidatorCase, MAX_LITERAL_INPUT,
};
pub use scripted::ScriptedProvider;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RequestKind {
    ValidatorProbe,
    ValidatorFix,
    CheckerProbe,
    CheckerFix,
    CodeAnalysis,
    HackGenerator,
    HashSpecExtract,
    CrossVerify,
}

impl RequestKind {
    pub const ALL: [RequestKind; 8] = [
        RequestKind::ValidatorProbe,
        RequestKind::ValidatorFix,
        RequestKind::CheckerProbe,
        RequestKind::CheckerFix,
        RequestKind::CodeAnalysis,
        RequestKind::HackGenerator,
        RequestKind::HashSpecExtract,
        RequestKind::CrossVerify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RequestKind::ValidatorProbe => "VALIDATOR_PROBE",
            RequestKind::ValidatorFix => "VALIDATOR_FIX",
            RequestKind::CheckerProbe => "CHECKER_PROBE",
            RequestKind::CheckerFix => "CHECKER_FIX",
            RequestKind::CodeAnalysis => "CODE_ANALYSIS",
            RequestKind::HackGenerator => "HACK_GENERATOR",
            RequestKind::HashSpecExtract => "HASH_SPEC_EXTRACT",
            RequestKind::CrossVerify => "CROSS_VERIFY",
        }
    }

    /// Payload fields that must be present and non-empty.
    pub fn required_fields(self) -> &'static [&'static str] {
        match self {
            RequestKind::ValidatorProbe => &["statement", "validator_source"],
            RequestKind::ValidatorFix => &["statement", "validator_source", "failures"],
            RequestKind::CheckerProbe => &["statement", "checker_source"],
            RequestKind::CheckerFix => &["statement", "checker_source", "failures"],
            RequestKind::CodeAnalysis => &["statement", "target_source"],
            RequestKind::HackGenerator => &["statement", "target_source"],
            RequestKind::HashSpecExtract => &["target_source"],
            RequestKind::CrossVerify => &["statement", "test_input", "reasoning"],
        }
    }
}

impl fmt::Display for RequestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProviderRequest {
    pub kind: RequestKind,
    pub payload: BTreeMap<String, String>,
}

impl ProviderRequest {
    pub fn new(kind: RequestKind) -> Self {
        ProviderRequest { kind, payload: BTreeMap::new() }
    }

    pub fn with(mut self, field: &str, value: impl Into<String>) -> Self {
        self.payload.insert(field.to_string(), value.into());
        self
    }

    pub fn field(&self, name: &str) -> Option<&str> {
        self.payload.get(name).map(String::as_str)
    }

    pub fn validate(&self) -> Result<(), ProviderError> {
        for field in self.kind.required_fields() {
            if self.field(field).is_none_or(|v| v.trim().is_empty()) {
                return Err(ProviderError::InvalidRequest(format!("{} requires non-empty `{field}`", self.kind)));
            }
        }
        Ok(())
    }
}

/// Kind-matched structured content of a response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ResponseContent {
    ValidatorProbe { cases: Vec<ValidatorCase> },
    ValidatorFix { source: String },
    CheckerProbe { cases: Vec<CheckerCase> },
    CheckerFix { source: String },
    CodeAnalysis { step: AnalysisStep },
    HackGenerator { input: ProposedInput },
    HashSpecExtract { candidates: Vec<HashSpecCandidate> },
    CrossVerify { approved: bool, reason: String },
}

impl ResponseContent {
    pub fn kind(&self) -> RequestKind {
        match self {
            ResponseContent::ValidatorProbe { .. } => RequestKind::ValidatorProbe,
            ResponseContent::ValidatorFix { .. } => RequestKind::ValidatorFix,
            ResponseContent::CheckerProbe { .. } => RequestKind::CheckerProbe,
            ResponseContent::CheckerFix { .. } => RequestKind::CheckerFix,
            ResponseContent::CodeAnalysis { .. } => RequestKind::CodeAnalysis,
            ResponseContent::HackGenerator { .. } => RequestKind::HackGenerator,
            ResponseContent::HashSpecExtract { .. } => RequestKind::HashSpecExtract,
            ResponseContent::CrossVerify { .. } => RequestKind::CrossVerify,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProviderResponse {
    pub content: ResponseContent,
    /// Original response text, kept for audit.
    pub raw: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProviderError {
    #[error("TRANSCRIPT_EXHAUSTED at call {call}")]
    TranscriptExhausted { call: usize },
    #[error("KIND_MISMATCH at call {call}: requested {requested}, transcript has {recorded}")]
    KindMismatch { call: usize, requested: RequestKind, recorded: RequestKind },
    #[error("MALFORMED_RESPONSE for {kind}: {reason}")]
    MalformedResponse { kind: RequestKind, reason: String, raw: String },
    #[error("TRANSPORT_ERROR: {0}")]
    Transport(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("transcript error: {0}")]
    Transcript(String),
}

impl ProviderError {
    pub fn code(&self) -> &'static str {
        match self {
            ProviderError::TranscriptExhausted { .. } => "TRANSCRIPT_EXHAUSTED",
            ProviderError::KindMismatch { .. } => "KIND_MISMATCH",
            ProviderError::MalformedResponse { .. } => "MALFORMED_RESPONSE",
            ProviderError::Transport(_) => "TRANSPORT_ERROR",
            ProviderError::InvalidRequest(_) => "INVALID_REQUEST",
            ProviderError::Transcript(_) => "TRANSCRIPT_ERROR",
        }
    }
}

/// A single-consumer provider session.
pub trait Provider: Send {
    fn respond(&mut self, req: &ProviderRequest) -> Result<ProviderResponse, ProviderError>;
}

impl<P: Provider + ?Sized> Provider for Box<P> {
    fn respond(&mut self, req: &ProviderRequest) -> Result<ProviderResponse, ProviderError> {
        (**self).respond(req)
    }
}

impl<P: Provider + ?Sized> Provider for &mut P {
    fn respond(&mut self, req: &ProviderRequest) -> Result<ProviderResponse, ProviderError> {
        (**self).respond(req)
    }
}

/// A provider handle that can be cloned, so that one transcript serves
/// several roles (e.g. the main and cross-verification providers).
#[derive(Clone)]
pub struct SharedProvider(Arc<Mutex<Box<dyn Provider>>>);

impl SharedProvider {
    pub fn new(inner: impl Provider + 'static) -> Self {
        SharedProvider(Arc::new(Mutex::new(Box::new(inner))))
    }
}

impl Provider for SharedProvider {
    fn respond(&mut self, req: &ProviderRequest) -> Result<ProviderResponse, ProviderError> {
        self.0.lock().expect("provider lock").respond(req)
    }
}

/// One recorded exchange.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub kind: RequestKind,
    #[serde(default)]
    pub request: serde_json::Value,
    /// Raw response text. Hand-written transcripts may give a JSON value,
    /// which is replayed as its compact serialization.
    pub response: serde_json::Value,
    #[serde(default)]
    pub timestamp: String,
}

impl TranscriptEntry {
    pub fn raw_response(&self) -> String {
        match &self.response {
            serde_json::Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }
}

pub fn load_transcript(path: impl AsRef<Path>) -> Result<Vec<TranscriptEntry>, ProviderError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| ProviderError::Transcript(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| ProviderError::Transcript(format!("{}: {e}", path.display())))
}

pub fn save_transcript(entries: &[TranscriptEntry], path: impl AsRef<Path>) -> std::io::Result<()> {
    let path = path.as_ref();
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let text = serde_json::to_string_pretty(entries).map_err(std::io::Error::other)?;
    std::fs::write(path, text + "\n")
}

/// Wraps a provider and logs every exchange that produced response text.
pub struct RecordingProvider<P> {
    inner: P,
    entries: Vec<TranscriptEntry>,
}

impl<P: Provider> RecordingProvider<P> {
    pub fn new(inner: P) -> Self {
        RecordingProvider { inner, entries: Vec::new() }
    }

    pub fn transcript(&self) -> &[TranscriptEntry] {
        &self.entries
    }

    pub fn into_parts(self) -> (P, Vec<TranscriptEntry>) {
        (self.inner, self.entries)
    }

    pub fn record_transcript(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        save_transcript(&self.entries, path)
    }
}

impl<P: Provider> Provider for RecordingProvider<P> {
    fn respond(&mut self, req: &ProviderRequest) -> Result<ProviderResponse, ProviderError> {
        let result = self.inner.respond(req);
        let raw = match &result {
            Ok(resp) => Some(resp.raw.clone()),
            Err(ProviderError::MalformedResponse { raw, .. }) => Some(raw.clone()),
            Err(_) => None,
        };
        if let Some(raw) = raw {
            self.entries.push(TranscriptEntry {
                kind: req.kind,
                request: serde_json::to_value(&req.payload).unwrap_or_default(),
                response: serde_json::Value::String(raw),
                timestamp: crate::util::timestamp_now(),
            });
        }
        result
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn request_requires_kind_fields() {
        let req = ProviderRequest::new(RequestKind::CheckerProbe).with("statement", "s");
        assert!(matches!(req.validate(), Err(ProviderError::InvalidRequest(_))));
        let req = req.with("checker_source", "int main(){}");
        assert!(req.validate().is_ok());
        let blank = ProviderRequest::new(RequestKind::HashSpecExtract).with("target_source", "  ");
        assert!(blank.validate().is_err());
    }

    #[test]
    fn kind_names_round_trip_through_serde() {
        for kind in RequestKind::ALL {
            let json = serde_json::to_string(&kind).unwrap();
            assert_eq!(json, format!("\"{}\"", kind.name()));
            assert_eq!(serde_json::from_str::<RequestKind>(&json).unwrap(), kind);
        }
    }

    #[test]
    fn recording_skips_transport_failures() {
        struct Failing;
        impl Provider for Failing {
            fn respond(&mut self, _: &ProviderRequest) -> Result<ProviderResponse, ProviderError> {
                Err(ProviderError::Transport("down".into()))
            }
        }
        let mut rec = RecordingProvider::new(Failing);
        let req = ProviderRequest::new(RequestKind::HashSpecExtract).with("target_source", "x");
        assert!(rec.respond(&req).is_err());
        assert!(rec.transcript().is_empty());
    }
}
