use std::path::Path;

use super::{
    load_transcript, parse_response, Provider, ProviderError, ProviderRequest, ProviderResponse, TranscriptEntry,
};

/// Replays a transcript in order. Each call consumes the next entry, which must
/// have the requested kind.
#[derive(Debug, Clone)]
pub struct ScriptedProvider {
    entries: Vec<TranscriptEntry>,
    next: usize,
}

impl ScriptedProvider {
    pub fn new(entries: Vec<TranscriptEntry>) -> Self {
        ScriptedProvider { entries, next: 0 }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ProviderError> {
        load_transcript(path).map(Self::new)
    }

    /// Entries not yet consumed.
    pub fn remaining(&self) -> usize {
        self.entries.len() - self.next
    }
}

impl Provider for ScriptedProvider {
    fn respond(&mut self, req: &ProviderRequest) -> Result<ProviderResponse, ProviderError> {
        req.validate()?;
        let call = self.next + 1;
        let entry = self.entries.get(self.next).ok_or(ProviderError::TranscriptExhausted { call })?;
        if entry.kind != req.kind {
            return Err(ProviderError::KindMismatch { call, requested: req.kind, recorded: entry.kind });
        }
        self.next += 1;
        parse_response(req.kind, &entry.raw_response())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::provider::{RequestKind, ResponseContent};
    use serde_json::json;

    fn entry(kind: RequestKind, response: serde_json::Value) -> TranscriptEntry {
        TranscriptEntry { kind, request: json!({}), response, timestamp: String::new() }
    }

    fn probe_request() -> ProviderRequest {
        ProviderRequest::new(RequestKind::ValidatorProbe).with("statement", "s").with("validator_source", "v")
    }

    #[test]
    fn replays_in_order_then_exhausts() {
        let bundle = json!({"test_cases": [{"test_input": "1", "expected_validity": "valid"}]});
        let mut p = ScriptedProvider::new(vec![entry(RequestKind::ValidatorProbe, bundle)]);
        let resp = p.respond(&probe_request()).unwrap();
        assert!(matches!(resp.content, ResponseContent::ValidatorProbe { .. }));
        assert_eq!(p.respond(&probe_request()), Err(ProviderError::TranscriptExhausted { call: 2 }));
    }

    #[test]
    fn kind_mismatch_does_not_consume() {
        let mut p = ScriptedProvider::new(vec![entry(RequestKind::ValidatorProbe, json!({"test_cases": []}))]);
        let fix = ProviderRequest::new(RequestKind::CheckerFix)
            .with("statement", "s")
            .with("checker_source", "c")
            .with("failures", "f");
        assert_eq!(
            p.respond(&fix),
            Err(ProviderError::KindMismatch {
                call: 1,
                requested: RequestKind::CheckerFix,
                recorded: RequestKind::ValidatorProbe
            })
        );
        assert_eq!(p.remaining(), 1);
    }

    #[test]
    fn string_responses_are_raw_text() {
        let raw = "```json\n{\"verdict\": \"reject\", \"reason\": \"no\"}\n```";
        let mut p = ScriptedProvider::new(vec![entry(RequestKind::CrossVerify, json!(raw))]);
        let req = ProviderRequest::new(RequestKind::CrossVerify)
            .with("statement", "s")
            .with("test_input", "1")
            .with("reasoning", "r");
        let resp = p.respond(&req).unwrap();
        assert_eq!(resp.raw, raw);
    }
}
