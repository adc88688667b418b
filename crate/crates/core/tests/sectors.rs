use std::f64::consts::TAU;

use dmax_core::sectors::{
    cluster_decompose, direction_stability_check, kappa_classes, make_sectors, sector_projection,
    smoothed_sector, split_by_grid, TURN,
};
use dmax_core::spectral::fourier_mode;
use dmax_core::{DirectionKind, DirectionSet, GridFunction, SmoothWindow};
use proptest::prelude::*;

fn unit_at(turns: f64) -> [f64; 2] {
    [(TAU * turns).cos(), (TAU * turns).sin()]
}

/// Annulus `2^{n−1} < |ζ| ≤ 2^n` and angular slot `⌊angle·2^n⌋` from floating-point polar coordinates.
fn expected_sector(xi: i64, eta: i64) -> (u32, u64) {
    let r = (xi as f64).hypot(eta as f64);
    let n = r.log2().ceil() as u32;
    let turns = (eta as f64).atan2(xi as f64).rem_euclid(TAU) / TAU;
    (n, (turns * (1u64 << n) as f64).floor() as u64)
}

#[test]
fn modes_land_in_exactly_the_polar_sector() {
    let level = 6;
    for (xi, eta) in [(3, 1), (-5, 2), (7, -11), (-13, -4), (2, 17), (-20, 9), (25, -6)] {
        let (n, index) = expected_sector(xi, eta);
        let e = fourier_mode(level, 1.0, xi, eta).unwrap();
        for s in make_sectors(n).unwrap() {
            let p = sector_projection(&e, &s).unwrap();
            let target = if s.index == index { &e } else { &p };
            assert!(p.sub(target).max_abs() < 1e-12, "({xi}, {eta}) sector {}", s.index);
            if s.index != index {
                assert!(p.max_abs() < 1e-12);
            }
        }
    }
}

#[test]
fn smoothing_vanishes_off_the_assigned_arcs() {
    let (level, n) = (8, 6);
    let f = GridFunction::random_real(level, 1.0, 12).unwrap();
    let window = SmoothWindow::default();
    for s in make_sectors(n).unwrap().iter().step_by(13) {
        let (lo, len) = (s.b.lo(), s.b.length());
        let inside = |a: i64| (a - lo).rem_euclid(TURN) < len || (a - lo - TURN / 2).rem_euclid(TURN) < len;
        let mut off = 0;
        for k in 0..64 {
            let a = k * (TURN / 64) + 7;
            if !inside(a) {
                off += 1;
                let g = smoothed_sector(&f, s, unit_at(a as f64 / TURN as f64), &window).unwrap();
                assert!(g.max_abs() < 1e-12 * f.max_abs());
            }
        }
        assert!(off >= 16);
        let centre = s.rotated_tenfold().center() as f64 / TURN as f64;
        let live = smoothed_sector(&f, s, unit_at(centre), &window).unwrap();
        assert!(live.max_abs() > 1e-6);
    }
}

#[test]
fn stability_of_identical_directions_is_zero() {
    let f = GridFunction::random_real(8, 1.0, 1).unwrap();
    let window = SmoothWindow::default();
    let s = &make_sectors(6).unwrap()[9];
    let v = unit_at(s.rotated_tenfold().center() as f64 / TURN as f64);
    let r = direction_stability_check(&f, s, v, v, &window).unwrap();
    assert_eq!(r.ratio, 0.0);
    assert_eq!(r.sup_difference, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn clusters_partition_each_class_and_stay_disjoint(seed in 0u64..10_000, count in 4usize..200, n in 5u32..10) {
        let set = DirectionSet::make(DirectionKind::Random, count, seed).unwrap();
        let sectors = make_sectors(n).unwrap();
        for (&kappa, members) in &kappa_classes(&sectors, &set) {
            for part in split_by_grid(&sectors, members) {
                if part.is_empty() {
                    continue;
                }
                let cs = cluster_decompose(&sectors, &part, kappa).unwrap();
                prop_assert!(cs.across_disjoint(&sectors));
                let mut seen: Vec<usize> = cs.clusters.iter().flat_map(|c| c.members.iter().copied()).collect();
                seen.sort_unstable();
                let mut want = part.clone();
                want.sort_unstable();
                prop_assert_eq!(seen, want);
            }
        }
    }
}
