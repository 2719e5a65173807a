//! Record a provider session to a transcript and replay it offline.

use hackforge::provider::{
    Provider, ProviderRequest, RecordingProvider, RequestKind, ScriptedProvider, TranscriptEntry,
};
use serde_json::json;

fn main() {
    let live = ScriptedProvider::new(vec![TranscriptEntry {
        kind: RequestKind::HackGenerator,
        request: json!({}),
        response: json!({"test_input": "1\n36\n"}),
        timestamp: String::new(),
    }]);
    let req = ProviderRequest::new(RequestKind::HackGenerator)
        .with("statement", "split n into four distinct terms")
        .with("target_source", "int main(){}")
        .with("hack_plan", "small n just above 30");
    let mut rec = RecordingProvider::new(live);
    let first = rec.respond(&req).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("session.json");
    rec.record_transcript(&path).unwrap();
    let mut replay = ScriptedProvider::from_file(&path).unwrap();
    let again = replay.respond(&req).unwrap();
    println!("recorded {:?}", first.content);
    println!("replayed identically: {}", first == again);
}
