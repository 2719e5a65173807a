//! Random stress testing until a target submission breaks.

use hackforge::genforge::{stress_campaign, CampaignConfig};
use hackforge::judge::Judge;
use hackforge::model::load_package;
use hackforge::sandbox::Sandbox;

fn main() {
    let pkg = load_package(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/packages/array-max")).unwrap();
    let judge = Judge::new(Sandbox::shared(), &pkg);
    let (gen, _) = pkg.stress_generator.clone().unwrap();
    for s in &pkg.submissions {
        let attempts = stress_campaign(&judge, s, &gen, &CampaignConfig::default()).unwrap();
        match attempts.last().filter(|a| a.success) {
            Some(a) => println!(
                "{}: broken after {} seeds by {:?}",
                s.id,
                attempts.len(),
                String::from_utf8_lossy(&a.input.input)
            ),
            None => println!("{}: survived {} seeds", s.id, attempts.len()),
        }
    }
}
