//! Suite quality before and after dropping invalid tests (the masking effect).

use hackforge::genforge::augment_suite;
use hackforge::judge::Judge;
use hackforge::metrics::{compute_classification, compute_vpr, LabeledOutcome};
use hackforge::model::{load_package, TestCase};
use hackforge::sandbox::Sandbox;

fn main() {
    let sb = Sandbox::shared();
    let pkg = load_package(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/packages/masking")).unwrap();
    let judge = Judge::new(sb, &pkg);
    let validator = judge.validator_artifact().unwrap().unwrap();
    let report = |label: &str, suite: &[TestCase]| {
        let outcomes: Vec<LabeledOutcome> = pkg
            .submissions
            .iter()
            .map(|s| LabeledOutcome {
                submission_id: s.id.clone(),
                ground_truth: s.ground_truth.unwrap(),
                new_verdict: judge.judge_submission(s, suite).verdict,
            })
            .collect();
        let (tpr, tnr, _) = compute_classification(&outcomes);
        let vpr = compute_vpr(sb, suite, &validator).unwrap();
        println!("{label:<9} TPR {tpr}  TNR {tnr}  VPR {}", vpr.to_decimal(2));
    };
    report("original", &pkg.local_suite);
    let (filtered, _) = augment_suite(&judge, &[], true).unwrap();
    report("filtered", &filtered.local_suite);
}
