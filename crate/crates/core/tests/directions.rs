use std::f64::consts::TAU;

use dmax_core::directions::nearest_direction;
use dmax_core::{DirectionKind, DirectionSet};
use proptest::prelude::*;

#[test]
fn equispaced_nearest_is_the_rounded_angle() {
    let n = 24;
    let set = DirectionSet::make(DirectionKind::Equispaced, n, 0).unwrap();
    for k in 0..200 {
        let theta = TAU * (k as f64 + 0.3) / 200.0;
        let (w, d) = nearest_direction([theta.cos(), theta.sin()], &set);
        let j = (theta / TAU * n as f64).round() as usize % n;
        let expect = TAU * j as f64 / n as f64;
        assert!((w[0] - expect.cos()).abs() < 1e-12 && (w[1] - expect.sin()).abs() < 1e-12);
        assert!((d - 2.0 * ((theta - TAU * (theta / TAU * n as f64).round() / n as f64) / 2.0).sin().abs()).abs() < 1e-12);
    }
}

#[test]
fn json_files_round_trip_and_reject_non_unit_vectors() {
    let set = DirectionSet::make(DirectionKind::Lacunary, 9, 0).unwrap();
    assert_eq!(DirectionSet::from_json(&set.to_json().unwrap()).unwrap(), set);
    let mut doc: serde_json::Value = serde_json::from_str(&set.to_json().unwrap()).unwrap();
    doc["vectors"][0] = serde_json::json!([1.5, 0.0]);
    assert!(DirectionSet::from_json(&doc.to_string()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_sets_depend_only_on_the_seed(seed in any::<u64>(), n in 1usize..300) {
        let a = DirectionSet::make(DirectionKind::Random, n, seed).unwrap();
        let b = DirectionSet::make(DirectionKind::Random, n, seed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.len(), n);
        prop_assert!(a.vectors().iter().all(|v| (v[0].hypot(v[1]) - 1.0).abs() < 1e-12));
        prop_assert!(a.angles().iter().all(|t| (0.0..TAU).contains(t)));
    }
}
