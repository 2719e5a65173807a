#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;

use hackforge::model::{load_package, ProblemPackage};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn package(name: &str) -> ProblemPackage {
    load_package(fixtures().join("packages").join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn fixture_text(rel: &str) -> String {
    fs::read_to_string(fixtures().join(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

pub fn program(name: &str) -> String {
    fixture_text(&format!("programs/{name}"))
}
pub mod oracles;

pub fn scripted(name: &str) -> hackforge::provider::ScriptedProvider {
    hackforge::provider::ScriptedProvider::from_file(fixtures().join("transcripts").join(name)).unwrap()
}
