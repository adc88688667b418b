use dmax_core::norm_lab::{
    exact_diagonal_norm, fit_proportional, growth_curve, lemma3_split, lower_bound_row, power_iteration_norm,
    FamilySpec, LowerBoundConfig, MaximalOperator,
};
use dmax_core::{Complex64, GridFunction, Symbol1D};
use proptest::prelude::*;

#[test]
fn exact_proportional_data_fits_without_residual() {
    let x = [1.0, 2.0, 3.5, 5.0];
    let y: Vec<f64> = x.iter().map(|a| 2.5 * a).collect();
    let fit = fit_proportional(&x, &y);
    assert!((fit.c - 2.5).abs() < 1e-14);
    assert!(fit.rms_relative < 1e-14 && fit.max_relative < 1e-14 && !fit.degenerate);
    assert!(fit_proportional(&[1.0], &[2.0]).degenerate);
}

#[test]
fn power_iteration_finds_the_largest_symbol_value() {
    let v = [0.8, 0.6];
    for seed in 0..3 {
        let m = Symbol1D::piecewise_random(seed, 3, 0.75);
        let exact = exact_diagonal_norm(&m, v, 6, 1.0).unwrap();
        let power = power_iteration_norm(&m, v, 6, 1.0, seed).unwrap();
        assert!(power.converged);
        assert!((exact.value - power.value).abs() < 1e-6);
    }
}

#[test]
fn single_scale_growth_respects_the_union_bound() {
    let mut family = FamilySpec::new(6, 4.0);
    family.greedy_rounds = 1;
    let (curve, _) = growth_curve(&MaximalOperator::Kakeya0, &[1, 2, 4, 8], &family, 2).unwrap();
    assert!(curve.nondecreasing());
    for row in &curve.rows {
        // ‖sup_v |A_v f|‖² ≤ Σ_v ‖A_v f‖² ≤ 4N‖f‖² since each average has norm ≤ 2.
        assert!(row.estimate > 0.0 && row.estimate <= 2.0 * (row.n as f64).sqrt() + 1e-9);
    }
}

#[test]
fn lower_bound_row_is_consistent() {
    let cfg = LowerBoundConfig { radii_per_octave: 4, angles: 64, ..LowerBoundConfig::default() };
    let row = lower_bound_row(64, &cfg).unwrap();
    assert!(row.f_norm > 0.0 && row.tf_norm > 0.0);
    assert!((row.ratio - row.tf_norm / row.f_norm).abs() < 1e-12 * row.ratio);
    assert!(row.pointwise_violations <= row.valid_radii);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn least_squares_residual_is_orthogonal(y in prop::collection::vec(0.1..10.0f64, 2..12)) {
        let x: Vec<f64> = (1..=y.len()).map(|k| (k as f64).ln() + 1.0).collect();
        let fit = fit_proportional(&x, &y);
        let normal: f64 = x.iter().zip(&y).map(|(a, b)| a * (b - fit.c * a)).sum();
        prop_assert!(normal.abs() < 1e-9);
        let sse: f64 = x.iter().zip(&y).map(|(a, b)| (b - fit.c * a).powi(2)).sum();
        let syy: f64 = y.iter().map(|b| b * b).sum();
        prop_assert!((fit.rms_relative - (sse / syy).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn splits_follow_magnitude_bands(seed in 0u64..10_000, lambda in 0.05..2.0f64, n in 1.1..16.0f64, p in 2.5..8.0f64) {
        let f = GridFunction::random_real(4, 1.0, seed).unwrap().map(|z| z * z.re.abs() * 4.0);
        let split = lemma3_split(&f, lambda, n, p).unwrap();
        prop_assert!(split.verify(&f));
        prop_assert!((split.q - p / (p - 2.0)).abs() < 1e-12);
        let (hi, lo) = (n * lambda, n.powf(-p / (p - 2.0)) * lambda);
        for (k, z) in f.values().iter().enumerate() {
            let r = z.norm();
            let band = if r > hi { 0 } else if r > lo { 1 } else { 2 };
            let parts = [&split.f1, &split.f2, &split.f3];
            prop_assert_eq!(parts[band].values()[k], *z);
            for (b, part) in parts.iter().enumerate() {
                if b != band {
                    prop_assert_eq!(part.values()[k], Complex64::default());
                }
            }
        }
    }
}
