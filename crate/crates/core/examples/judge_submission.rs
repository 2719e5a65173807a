//! Judge every submission of a fixture package on its local suite.

use hackforge::judge::Judge;
use hackforge::model::load_package;
use hackforge::sandbox::Sandbox;

fn main() {
    let dir = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/packages/array-max").into());
    let pkg = load_package(&dir).expect("package loads");
    let judge = Judge::new(Sandbox::shared(), &pkg);
    for s in &pkg.submissions {
        let outcome = judge.judge_submission(s, &pkg.local_suite);
        println!("{:<12} {}", s.id, outcome.verdict);
    }
    let targets = judge.identify_targets().expect("labels present");
    println!("targets: {:?}", targets.iter().map(|t| &t.id).collect::<Vec<_>>());
}
