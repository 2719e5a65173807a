//! Complexity calculators and a scripted code-analysis session.

use hackforge::analyst::{binomial, binomial_exceeds_bound, build_hack_plan, harmonic_operation_count};
use hackforge::model::load_package;
use hackforge::provider::ScriptedProvider;
use hackforge::sandbox::Sandbox;
use num_bigint::BigUint;

const ROOT: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

fn main() {
    for n in [10u64, 1_000, 1_000_000] {
        println!("sum floor({n}/i) = {}", harmonic_operation_count(n));
    }
    let bound = BigUint::from(i64::MAX as u64);
    println!("C(62, 31) = {} exceeds 2^63-1: {}", binomial(62, 31), binomial_exceeds_bound(62, 31, &bound));

    let sb = Sandbox::shared();
    let pkg = load_package(format!("{ROOT}/packages/captain-flint")).unwrap();
    let target = pkg.submission("cf1388a").unwrap();
    let mut provider = ScriptedProvider::from_file(format!("{ROOT}/transcripts/captain-flint.hack.json")).unwrap();
    let plan = build_hack_plan(sb, &pkg, target, None, &[], &mut provider, vec![]).unwrap();
    println!("plan: {:?} via {:?}, parameters {:?}", plan.target_verdict, plan.strategy, plan.parameters);
}
