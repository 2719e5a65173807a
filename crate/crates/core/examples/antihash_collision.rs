//! Colliding strings for single, double and 2^64 rolling hashes.

use hackforge::antihash::{eval_rolling_hash, find_collision, AntihashConfig, RollingHashSpec};

fn main() {
    let specs = [
        RollingHashSpec::single(10, 97).unwrap(),
        RollingHashSpec::new(vec![131, 137], vec![1_000_000_007, 1_000_000_009]).unwrap(),
        RollingHashSpec::single(131, 1u128 << 64).unwrap(),
    ];
    for spec in &specs {
        let pair = find_collision(spec, &AntihashConfig::default()).unwrap();
        println!("moduli {:?}", spec.moduli);
        println!("  {} -> {:?}", pair.a, eval_rolling_hash(&pair.a, spec).unwrap());
        println!("  {} -> {:?}", pair.b, eval_rolling_hash(&pair.b, spec).unwrap());
    }
}
