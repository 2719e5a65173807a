//! Checker hardening with one transcript serving both the main and the
//! cross-verification roles.

use hackforge::calibration::{refine_checker, CalibrationConfig};
use hackforge::judge::{run_checker, CheckerTool};
use hackforge::model::load_package;
use hackforge::provider::{ScriptedProvider, SharedProvider};
use hackforge::sandbox::Sandbox;

const ROOT: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

fn main() {
    let sb = Sandbox::shared();
    let pkg = load_package(format!("{ROOT}/packages/phone-number")).unwrap();
    let script = ScriptedProvider::from_file(format!("{ROOT}/transcripts/phone-number.calibrate.json")).unwrap();
    let shared = SharedProvider::new(script);
    let (refined, log) =
        refine_checker(sb, &pkg, &mut shared.clone(), &mut shared.clone(), &CalibrationConfig::default()).unwrap();
    println!("{:?} after {} iterations", log.terminated_by, log.iterations.len());
    let tool = CheckerTool::Custom(sb.compile(&refined.source, &refined.toolchain_id).unwrap());
    for out in ["54-98- 71", "549-871", "54-98-71"] {
        let r = run_checker(sb, &tool, b"6\n549871\n", out.as_bytes(), b"54-98-71\n").unwrap();
        println!("{out:>10} -> {r:?}");
    }
}
