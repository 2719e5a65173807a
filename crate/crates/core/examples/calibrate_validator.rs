//! Replay a recorded calibration dialogue and show the refined validator at work.

use hackforge::calibration::{refine_validator, CalibrationConfig};
use hackforge::judge::run_validator;
use hackforge::model::load_package;
use hackforge::provider::ScriptedProvider;
use hackforge::sandbox::Sandbox;

const ROOT: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

fn main() {
    let sb = Sandbox::shared();
    let pkg = load_package(format!("{ROOT}/packages/memory-arrays")).unwrap();
    let mut provider = ScriptedProvider::from_file(format!("{ROOT}/transcripts/memory-arrays.calibrate.json")).unwrap();
    let (refined, log) = refine_validator(sb, &pkg, &mut provider, &CalibrationConfig::default()).unwrap();
    for it in &log.iterations {
        let flaw = it.report.as_ref().map(|r| format!("{:?}", r.flaw)).unwrap_or_else(|| "-".into());
        println!("iteration {}: {flaw}", it.index);
    }
    println!("terminated by {:?}", log.terminated_by);
    let art = sb.compile(&refined.source, &refined.toolchain_id).unwrap();
    let verdict = run_validator(sb, &art, b"1 1\n1\n0\n").unwrap();
    println!("zero exponent now valid: {}", verdict.is_valid());
}
