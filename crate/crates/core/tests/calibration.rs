mod common;

use common::{package, scripted};
use hackforge::calibration::{
    classify_checker_probe, classify_validator_probe, persist, refine_checker, refine_validator, regression_check,
    CalibrationConfig, CalibrationError, CheckerProbe, Flaw, Probe, Termination, ValidatorProbe,
};
use hackforge::judge::{run_checker, run_validator, CheckerResult, CheckerTool};
use hackforge::model::{CheckerSpec, ToolSource};
use hackforge::provider::{RequestKind, ScriptedProvider, SharedProvider, TranscriptEntry};
use hackforge::sandbox::Sandbox;
use serde_json::json;

fn compile(src: &ToolSource) -> hackforge::CompiledArtifact {
    Sandbox::shared().compile(&src.source, &src.toolchain_id).unwrap()
}

#[test]
fn memory_arrays_validator_learns_zero_exponent() {
    let sb = Sandbox::shared();
    let pkg = package("memory-arrays");
    let mut provider = scripted("memory-arrays.calibrate.json");
    let (refined, log) = refine_validator(sb, &pkg, &mut provider, &CalibrationConfig::default()).unwrap();
    assert_eq!(log.terminated_by, Termination::CleanStreak);
    assert_eq!(log.iterations.len(), 4);
    assert_eq!(log.iterations[0].report.as_ref().unwrap().flaw, Flaw::FalseNegative);
    let art = compile(&refined);
    assert!(run_validator(sb, &art, b"1 1\n1\n0\n").unwrap().is_valid());
    assert!(!run_validator(sb, &art, b"1 1\n1\n30\n").unwrap().is_valid());
    assert!(regression_check(sb, &pkg, &refined, &log).unwrap().is_empty());
    assert_ne!(log.final_tool_hash, log.iterations[0].tool_hash);
}

#[test]
fn party_validator_learns_edge_cap() {
    let sb = Sandbox::shared();
    let pkg = package("party");
    let mut provider = scripted("party.calibrate.json");
    let (refined, log) = refine_validator(sb, &pkg, &mut provider, &CalibrationConfig::default()).unwrap();
    assert_eq!(log.terminated_by, Termination::CleanStreak);
    assert!(log.iterations.len() <= 10);
    let first = log.iterations[0].report.as_ref().unwrap();
    assert_eq!(first.flaw, Flaw::FalsePositive);
    let Some(Probe::Validator(probe)) = &log.iterations[0].probe else { panic!("validator probe expected") };
    let big = probe.x_invalid.clone().unwrap();
    assert!(!run_validator(sb, &compile(&refined), &big).unwrap().is_valid());
    assert!(run_validator(sb, &compile(pkg.validator.as_ref().unwrap()), &big).unwrap().is_valid());
}

#[test]
fn phone_number_checker_rejects_whitespace_after_refinement() {
    let sb = Sandbox::shared();
    let pkg = package("phone-number");
    let shared = SharedProvider::new(scripted("phone-number.calibrate.json"));
    let (mut main, mut judge) = (shared.clone(), shared);
    let (refined, log) = refine_checker(sb, &pkg, &mut main, &mut judge, &CalibrationConfig::default()).unwrap();
    assert_eq!(log.terminated_by, Termination::CleanStreak);
    assert_eq!(log.iterations.len(), 4);
    assert_eq!(log.iterations[0].report.as_ref().unwrap().flaw, Flaw::FalsePositive);
    let tool = CheckerTool::Custom(compile(&refined));
    let input = b"6\n549871\n";
    let jury = b"54-98-71\n";
    assert!(matches!(run_checker(sb, &tool, input, b"54-98- 71\n", jury).unwrap(), CheckerResult::Rejected { .. }));
    assert_eq!(run_checker(sb, &tool, input, b"549-871\n", jury).unwrap(), CheckerResult::Accepted);
    assert!(log.notes.iter().any(|n| n.contains("standard solution")));
}

#[test]
fn cross_verify_rejection_consumes_iteration_without_classifying() {
    let sb = Sandbox::shared();
    let pkg = package("phone-number");
    let probe = json!({"test_cases": [{"test_input": "2\n42\n", "wrong_output": "4-2", "reasoning": "one group"}]});
    let entry = |kind, response| TranscriptEntry { kind, request: json!({}), response, timestamp: String::new() };
    let mut main = ScriptedProvider::new(vec![entry(RequestKind::CheckerProbe, probe)]);
    let mut judge = ScriptedProvider::new(vec![entry(RequestKind::CrossVerify, json!({"verdict": "reject", "reason": "unsure"}))]);
    let (_, log) = refine_checker(sb, &pkg, &mut main, &mut judge, &CalibrationConfig::default()).unwrap();
    assert_eq!(log.terminated_by, Termination::ProviderExhausted);
    assert_eq!(log.iterations.len(), 1);
    assert!(log.iterations[0].report.is_none());
}

#[test]
fn token_diff_and_frozen_tools() {
    let sb = Sandbox::shared();
    let pkg = package("memory-arrays");
    let mut p = ScriptedProvider::new(vec![]);
    let mut j = ScriptedProvider::new(vec![]);
    assert!(matches!(
        refine_checker(sb, &pkg, &mut p, &mut j, &CalibrationConfig::default()),
        Err(CalibrationError::NotApplicable(_))
    ));
    let mut frozen = pkg.clone();
    frozen.frozen.validator = true;
    let (tool, log) = refine_validator(sb, &frozen, &mut p, &CalibrationConfig::default()).unwrap();
    assert_eq!(&tool, frozen.validator.as_ref().unwrap());
    assert!(log.iterations.is_empty());
}

#[test]
fn exhausted_provider_stops_early() {
    let sb = Sandbox::shared();
    let pkg = package("memory-arrays");
    let mut p = ScriptedProvider::new(vec![]);
    let (tool, log) = refine_validator(sb, &pkg, &mut p, &CalibrationConfig::default()).unwrap();
    assert_eq!(log.terminated_by, Termination::ProviderExhausted);
    assert_eq!(&tool, pkg.validator.as_ref().unwrap());
}

#[test]
fn iteration_cap_bounds_the_loop() {
    let sb = Sandbox::shared();
    let pkg = package("memory-arrays");
    let mut provider = scripted("memory-arrays.calibrate.json");
    let cfg = CalibrationConfig { max_iter: 2, ..CalibrationConfig::default() };
    let (_, log) = refine_validator(sb, &pkg, &mut provider, &cfg).unwrap();
    assert_eq!(log.terminated_by, Termination::IterationCap);
    assert_eq!(log.iterations.len(), 2);
}

#[test]
fn probe_classification_order() {
    let sb = Sandbox::shared();
    let pkg = package("memory-arrays");
    let wrong = compile(pkg.validator.as_ref().unwrap());
    // Both halves misjudged: false positive is reported first.
    let probe = ValidatorProbe { x_valid: Some(b"1 1\n1\n0\n".to_vec()), x_invalid: Some(b"1 1\n1\n1\n1\n".to_vec()), rationale: String::new() };
    let probe_fp = ValidatorProbe { x_invalid: Some(b"1 1\n1\n5\n".to_vec()), ..probe.clone() };
    assert_eq!(classify_validator_probe(sb, &wrong, &probe).unwrap().flaw, Flaw::FalseNegative);
    let lenient = ValidatorProbe { x_valid: Some(b"1 1\n1\n0\n".to_vec()), x_invalid: Some(b"1 1\n1\n1\n".to_vec()), rationale: String::new() };
    assert_eq!(classify_validator_probe(sb, &wrong, &lenient).unwrap().flaw, Flaw::FalsePositive);
    assert_eq!(classify_validator_probe(sb, &wrong, &probe_fp).unwrap().flaw, Flaw::FalsePositive);

    let phone = package("phone-number");
    let CheckerSpec::Custom(src) = &phone.checker else { panic!() };
    let weak = CheckerTool::Custom(compile(src));
    let probe = CheckerProbe { x_cand: b"6\n549871\n".to_vec(), y_wrong: Some(b"54-98- 71".to_vec()), y_true: Some(b"549-871".to_vec()), reasoning: "r".into() };
    assert_eq!(classify_checker_probe(sb, &weak, &probe, b"54-98-71\n").unwrap().flaw, Flaw::FalsePositive);
}

#[test]
fn logs_persist_next_to_package() {
    let sb = Sandbox::shared();
    let pkg = package("memory-arrays");
    let mut provider = scripted("memory-arrays.calibrate.json");
    let (refined, log) = refine_validator(sb, &pkg, &mut provider, &CalibrationConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    persist(dir.path(), &refined, &log).unwrap();
    let saved = std::fs::read_to_string(dir.path().join("calibration/refined_validator.cpp")).unwrap();
    assert_eq!(saved, refined.source);
    let text = std::fs::read_to_string(dir.path().join("calibration/validator.log.json")).unwrap();
    let back: hackforge::calibration::CalibrationLog = serde_json::from_str(&text).unwrap();
    assert_eq!(back, log);
}
