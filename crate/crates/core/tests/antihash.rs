mod common;

use common::oracles::{determinant, is_lll_reduced, is_verified_collision, reference_hash};
use common::fixture_text;
use hackforge::antihash::{
    birthday_collision, birthday_pool, birthday_pool_size, build_lattice, detect_hash_spec, eval_rolling_hash,
    extract_collision, find_collision, lll_reduce, lll_reduce_rows, reconstruct, spec_from_json, AntihashConfig,
    AntihashError, Orientation, RollingHashSpec, MAX_MODULUS,
};
use hackforge::provider::{ScriptedProvider, TranscriptEntry, RequestKind};
use hackforge::sandbox::Sandbox;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use serde_json::json;
use sha2::{Digest, Sha256};

fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

#[test]
fn identity_basis_is_already_reduced() {
    let id = big(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
    let mut rows = id.clone();
    lll_reduce_rows(&mut rows, 99, 100);
    assert_eq!(rows, id);
}

#[test]
fn two_by_two_reduction_finds_short_vector() {
    let mut rows = big(&[&[1, 1], &[0, 2]]);
    lll_reduce_rows(&mut rows, 99, 100);
    let norm2: BigInt = rows[0].iter().map(|x| x * x).sum();
    assert!(norm2 <= BigInt::from(2));
    // Shortest nonzero vector by exhaustive search over small coefficients.
    let mut shortest = i64::MAX;
    for a in -5i64..=5 {
        for b in -5i64..=5 {
            if (a, b) != (0, 0) {
                let v = [a, a + 2 * b];
                shortest = shortest.min(v[0] * v[0] + v[1] * v[1]);
            }
        }
    }
    assert_eq!(norm2, BigInt::from(shortest));
    assert!(is_lll_reduced(&rows, 99, 100));
}

#[test]
fn small_appendix_style_basis_yields_difference_vector() {
    let spec = RollingHashSpec::single(10, 97).unwrap();
    let basis = build_lattice(&spec, 4, &(BigInt::one() << 20));
    let reduced = lll_reduce(&basis, (99, 100));
    assert!(is_lll_reduced(&reduced.rows, 99, 100));
    assert_eq!(determinant(&reduced.rows).abs(), determinant(&basis.rows).abs());
    let found = reduced.rows.iter().any(|row| {
        row[0].is_zero()
            && row[1..].iter().any(|x| !x.is_zero())
            && row[1..].iter().all(|x| x.abs() <= BigInt::from(25))
            && {
                let s: BigInt = row[1..].iter().enumerate().map(|(j, d)| d * BigInt::from(10).pow(j as u32)).sum();
                (s % BigInt::from(97)).is_zero()
            }
    });
    assert!(found, "no (0, d) row in {:?}", reduced.rows);
    let pair = extract_collision(&reduced, &spec).unwrap();
    assert!(is_verified_collision(&pair.a, &pair.b, &spec));
}

#[test]
fn lattice_determinant_is_product_of_moduli() {
    let spec = RollingHashSpec::new(vec![31, 37], vec![1_000_000_007, 998_244_353]).unwrap();
    let basis = build_lattice(&spec, 1, &BigInt::one());
    assert_eq!(determinant(&basis.rows).abs(), BigInt::from(1_000_000_007u64) * BigInt::from(998_244_353u64));
    let lambda = BigInt::from(1000);
    let basis = build_lattice(&spec, 3, &lambda);
    assert_eq!(determinant(&basis.rows).abs(), &lambda * &lambda * BigInt::from(1_000_000_007u64) * BigInt::from(998_244_353u64));
}

#[test]
fn wraparound_single_hash_collides() {
    let spec = RollingHashSpec::single(131, MAX_MODULUS).unwrap();
    let pair = find_collision(&spec, &AntihashConfig::default()).unwrap();
    assert!(pair.a.len() <= 64);
    assert!(is_verified_collision(&pair.a, &pair.b, &spec));
}

#[test]
fn double_hash_collides() {
    let spec = RollingHashSpec::new(vec![131, 137], vec![1_000_000_007, 1_000_000_009]).unwrap();
    let pair = find_collision(&spec, &AntihashConfig::default()).unwrap();
    assert!(is_verified_collision(&pair.a, &pair.b, &spec));
}

#[test]
fn horner_orientation_collides() {
    let spec = RollingHashSpec::single(131, 998_244_353).unwrap().with_orientation(Orientation::Horner);
    let pair = find_collision(&spec, &AntihashConfig::default()).unwrap();
    assert!(is_verified_collision(&pair.a, &pair.b, &spec));
}

#[test]
fn single_character_charset_is_unreachable() {
    let spec = RollingHashSpec::single(31, 97).unwrap().with_charset('a', 'a');
    assert!(matches!(find_collision(&spec, &AntihashConfig::default()), Err(AntihashError::CollisionUnreachable(_))));
}

#[test]
fn birthday_fallback_covers_tiny_lattice_budget() {
    let spec = RollingHashSpec::single(31, 1_000_003).unwrap();
    let cfg = AntihashConfig { l0: Some(2), l_max: 2, ..AntihashConfig::default() };
    let pair = find_collision(&spec, &cfg).unwrap();
    assert_eq!(pair.a.len(), 16, "pair came from the birthday search");
    assert!(is_verified_collision(&pair.a, &pair.b, &spec));
}

#[test]
fn birthday_pool_sizes() {
    assert_eq!(birthday_pool_size(365), 23);
    let analytic = 1.0 - (-(23.0 * 22.0) / (2.0 * 365.0f64)).exp();
    assert!((analytic - 0.5).abs() < 0.01);
    let n = birthday_pool_size(1u128 << 32);
    assert!((75_000..80_000).contains(&n), "{n}");
}

fn uniform_hasher(m: u64) -> impl Fn(&str) -> u64 {
    move |s: &str| {
        let d = Sha256::digest(s.as_bytes());
        u64::from_le_bytes(d[..8].try_into().unwrap()) % m
    }
}

#[test]
fn birthday_succeeds_at_three_root_m() {
    let m = 1_000_000u64;
    let hasher = uniform_hasher(m);
    let budget = 3 * 1000;
    let hits = (0..20)
        .filter(|&seed| {
            birthday_collision(&hasher, m as u128, Some(budget), ('a', 'z'), 16, seed)
                .is_some_and(|(a, b)| a != b && hasher(&a) == hasher(&b))
        })
        .count();
    assert!(hits >= 19, "{hits}/20");
}

#[test]
fn birthday_pool_respects_budget() {
    let hasher = |s: &str| s.len();
    assert!(birthday_pool(&hasher, 1, ('a', 'z'), 16, 0).is_none());
}

#[test]
fn detects_constants_in_fixture_sources() {
    let sb = Sandbox::shared();
    let (found, _) = detect_hash_spec(sb, &fixture_text("packages/distinct-strings/submissions/poly_hash.cpp"), None).unwrap();
    assert_eq!((found[0].spec.bases.clone(), found[0].spec.moduli.clone()), (vec![131], vec![998_244_353]));
    assert!(found[0].verified);
    let (found, _) = detect_hash_spec(sb, &fixture_text("packages/distinct-strings/submissions/ull_hash.cpp"), None).unwrap();
    assert_eq!(found[0].spec.moduli, vec![MAX_MODULUS]);
    assert!(found[0].verified);
    let plain = fixture_text("programs/echo.cpp");
    assert_eq!(detect_hash_spec(sb, &plain, None), Err(AntihashError::NoSpecFound));
}

#[test]
fn provider_candidate_contradicted_by_source_is_dropped() {
    let sb = Sandbox::shared();
    let src = fixture_text("packages/distinct-strings/submissions/poly_hash.cpp");
    let response = json!({"hash_parameters": [
        {"base": 131, "modulus": 998244353, "charset": "a-z", "mapping": "c - 'a'", "orientation": "horner"},
        {"base": 137, "modulus": 1000000007, "charset": "a-z"}
    ], "input_template": "2\n{a}\n{b}\n"});
    let entry = TranscriptEntry { kind: RequestKind::HashSpecExtract, request: json!({}), response, timestamp: String::new() };
    let mut provider = ScriptedProvider::new(vec![entry]);
    let (found, notes) = detect_hash_spec(sb, &src, Some(&mut provider)).unwrap();
    // Offset 0 disagrees with the source, which adds 1; the scan supplies the right one.
    assert!(notes.iter().any(|n| n.contains("disagrees")), "{notes:?}");
    let verified: Vec<_> = found.iter().filter(|d| d.verified).collect();
    assert_eq!(verified.len(), 1);
    assert_eq!(verified[0].spec.mapping_offset, 1);
    let unverified = found.iter().find(|d| d.spec.bases == vec![137]).unwrap();
    assert!(!unverified.verified);
    assert_eq!(unverified.input_template.as_deref(), Some("2\n{a}\n{b}\n"));
}

#[test]
fn spec_file_round_trip() {
    let v = json!({"bases": [10], "moduli": [97], "charset": ["a", "z"], "offset": 1});
    let spec = spec_from_json(&v).unwrap();
    let pair = find_collision(&spec, &AntihashConfig::default()).unwrap();
    assert!(is_verified_collision(&pair.a, &pair.b, &spec));
}

fn arb_spec() -> impl Strategy<Value = RollingHashSpec> {
    (1usize..=2, any::<u64>(), any::<u64>()).prop_map(|(n, seed_q, seed_p)| {
        let moduli: Vec<u128> = (0..n).map(|i| 1000 + u128::from(seed_p.rotate_left(i as u32 * 7) % 1_000_000)).collect();
        let bases: Vec<u128> = moduli.iter().enumerate().map(|(i, &p)| 2 + u128::from(seed_q.rotate_left(i as u32 * 11)) % (p - 2)).collect();
        RollingHashSpec::new(bases, moduli).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn eval_matches_independent_evaluator(s in "[a-z]{0,40}", spec in arb_spec(), horner in any::<bool>()) {
        let spec = if horner { spec.with_orientation(Orientation::Horner) } else { spec };
        let got: Vec<BigInt> = eval_rolling_hash(&s, &spec).unwrap().into_iter().map(BigInt::from).collect();
        prop_assert_eq!(got, reference_hash(&s, &spec));
    }

    #[test]
    fn lattice_rows_satisfy_membership(spec in arb_spec(), l in 1usize..8, coeffs in proptest::collection::vec(-3i64..=3, 10)) {
        let basis = build_lattice(&spec, l, &BigInt::one());
        let dim = basis.dimension();
        let mut v = vec![BigInt::zero(); dim];
        for (row, c) in basis.rows.iter().zip(coeffs.iter().cycle()) {
            for (x, y) in v.iter_mut().zip(row) {
                *x += y * BigInt::from(*c);
            }
        }
        let n = spec.n();
        for i in 0..n {
            let q = BigInt::from(spec.bases[i]);
            let p = BigInt::from(spec.moduli[i]);
            let s: BigInt = v[n..].iter().enumerate().map(|(j, d)| d * q.pow(j as u32)).sum();
            prop_assert!(((s - &v[i]) % &p).is_zero());
        }
    }

    #[test]
    fn lll_preserves_determinant_and_reduces(rows in proptest::collection::vec(proptest::collection::vec(-20i64..=20, 4), 4)) {
        let rows: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let det = determinant(&rows);
        prop_assume!(!det.is_zero());
        let mut reduced = rows.clone();
        lll_reduce_rows(&mut reduced, 99, 100);
        prop_assert_eq!(determinant(&reduced).abs(), det.abs());
        prop_assert!(is_lll_reduced(&reduced, 99, 100));
    }

    #[test]
    fn reconstruction_law(d in proptest::collection::vec(-25i64..=25, 1..20)) {
        let (a, b) = reconstruct(&d, 'a');
        let diff: Vec<i64> = a.chars().zip(b.chars()).map(|(x, y)| x as i64 - y as i64).collect();
        prop_assert_eq!(&diff, &d);
        prop_assert_eq!(a == b, d.iter().all(|&x| x == 0));
    }

    #[test]
    fn found_collisions_are_sound(spec in arb_spec()) {
        let pair = find_collision(&spec, &AntihashConfig::default()).unwrap();
        prop_assert!(is_verified_collision(&pair.a, &pair.b, &spec));
    }
}
