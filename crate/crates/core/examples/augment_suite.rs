//! Turn successful stress hacks into new tests and re-judge.

use hackforge::genforge::{augment_suite, cross_apply, stress_campaign, CampaignConfig};
use hackforge::judge::Judge;
use hackforge::model::load_package;
use hackforge::sandbox::Sandbox;

fn main() {
    let sb = Sandbox::shared();
    let pkg = load_package(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/packages/array-max")).unwrap();
    let judge = Judge::new(sb, &pkg);
    let (gen, _) = pkg.stress_generator.clone().unwrap();
    let target = pkg.submission("off_by_one").unwrap();
    let wins: Vec<_> = stress_campaign(&judge, target, &gen, &CampaignConfig::default())
        .unwrap()
        .into_iter()
        .filter(|a| a.success)
        .collect();
    let cases: Vec<_> = wins.iter().map(|a| a.input.clone()).collect();
    for (i, row) in cross_apply(&judge, &cases, &pkg.submissions).iter().enumerate() {
        let broken: Vec<&str> = row.iter().flatten().filter(|a| a.success).map(|a| a.target_id.as_str()).collect();
        println!("hack {i} breaks {broken:?}");
    }
    let (augmented, report) = augment_suite(&judge, &wins, true).unwrap();
    println!("added {}, dropped {}", report.added, report.dropped.len());
    let suite = augmented.augmented_suite.as_deref().unwrap();
    for s in &pkg.submissions {
        println!("{:<12} {}", s.id, judge.judge_submission(s, suite).verdict);
    }
}
