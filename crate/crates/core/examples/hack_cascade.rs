//! The full cascade on three packages: provider-guided, stress and anti-hash wins.

use hackforge::analyst::build_hack_plan;
use hackforge::antihash::{detect_hash_spec, looks_like_hashing, AntihashConfig};
use hackforge::genforge::{cascade_hack, CampaignConfig};
use hackforge::judge::Judge;
use hackforge::model::load_package;
use hackforge::provider::ScriptedProvider;
use hackforge::sandbox::Sandbox;

const ROOT: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

fn main() {
    let sb = Sandbox::shared();
    for (name, target, transcript) in [
        ("captain-flint", "cf1388a", "captain-flint.hack.json"),
        ("quadratic-set", "heuristic", "quadratic-set.hack.json"),
        ("distinct-strings", "poly_hash", "distinct-strings.hack.json"),
    ] {
        let pkg = load_package(format!("{ROOT}/packages/{name}")).unwrap();
        let judge = Judge::new(sb, &pkg);
        let target = pkg.submission(target).unwrap();
        let mut provider = ScriptedProvider::from_file(format!("{ROOT}/transcripts/{transcript}")).unwrap();
        let specs = if looks_like_hashing(&target.source) {
            detect_hash_spec(sb, &target.source, Some(&mut provider)).map(|(s, _)| s).unwrap_or_default()
        } else {
            Vec::new()
        };
        let plan = build_hack_plan(sb, &pkg, target, None, &[], &mut provider, specs).ok();
        let r = cascade_hack(&judge, target, &mut provider, plan.as_ref(), &CampaignConfig::default(), &AntihashConfig::default())
            .unwrap();
        let input = r.winning_attempt().map(|a| String::from_utf8_lossy(&a.input.input).into_owned()).unwrap_or_default();
        println!("{name}/{}: {:?} stage, {} turn(s), input {:?}", target.id, r.winning_stage, r.turns_used, input);
    }
}
