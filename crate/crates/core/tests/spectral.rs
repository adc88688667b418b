use std::f64::consts::TAU;

use dmax_core::spectral::grid::signed_frequency;
use dmax_core::spectral::{
    apply_directional_multiplier, diagonal_norm, forward_spectrum, fourier_mode, inverse_spectrum,
};
use dmax_core::{Complex64, GridFunction, Symbol1D};
use proptest::prelude::*;

/// Direct `O(n⁴)` transform with the normalisation `c(ξ, η) = mean(f · e^{−2πi(ξx+ηy)/side})`.
fn naive_coefficient(f: &GridFunction, xi: i64, eta: i64) -> Complex64 {
    let n = f.size();
    let mut sum = Complex64::default();
    for i in 0..n {
        for j in 0..n {
            let phase = -TAU * (xi * i as i64 + eta * j as i64) as f64 / n as f64;
            sum += f.get(i, j) * Complex64::from_polar(1.0, phase);
        }
    }
    sum / (n * n) as f64
}

#[test]
fn spectrum_matches_direct_transform() {
    let f = GridFunction::random_real(3, 2.0, 4).unwrap();
    let s = forward_spectrum(&f);
    for a in 0..8 {
        for b in 0..8 {
            let (xi, eta) = (signed_frequency(a, 8), signed_frequency(b, 8));
            assert!((s.coefficient(xi, eta) - naive_coefficient(&f, xi, eta)).norm() < 1e-13);
        }
    }
}

#[test]
fn modes_are_eigenfunctions_of_directional_multipliers() {
    let side = 3.0;
    let v = [0.6, -0.8];
    let m = Symbol1D::imaginary_power(0.7);
    for (xi, eta) in [(1, 0), (3, -5), (-7, 2), (0, 4)] {
        let e = fourier_mode(5, side, xi, eta).unwrap();
        let out = apply_directional_multiplier(&e, &m, v).unwrap();
        let expect = e.scale(m.eval((v[0] * xi as f64 + v[1] * eta as f64) / side));
        assert!(out.sub(&expect).max_abs() < 1e-10);
    }
}

#[test]
fn diagonal_norm_is_largest_symbol_value_on_lattice() {
    let (level, side) = (5u32, 2.0);
    let v = [0.28, 0.96];
    let m = Symbol1D::piecewise_random(9, 4, 0.5);
    let n = 1usize << level;
    let mut brute = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let (xi, eta) = (signed_frequency(a, n) as f64, signed_frequency(b, n) as f64);
            brute = brute.max(m.eval((v[0] * xi + v[1] * eta) / side).norm());
        }
    }
    assert!((diagonal_norm(level, side, &m, v) - brute).abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn unimodular_symbols_keep_energy_off_the_null_line(seed in 0u64..1000, angle in 0.0..1.0f64) {
        let f = GridFunction::random_real(5, 1.0, seed).unwrap();
        let v = [(TAU * angle).cos(), (TAU * angle).sin()];
        let g = apply_directional_multiplier(&f, &Symbol1D::imaginary_power(1.3), v).unwrap();
        let s = forward_spectrum(&f);
        let mut kept = 0.0;
        for a in 0..32 {
            for b in 0..32 {
                let (xi, eta) = (signed_frequency(a, 32), signed_frequency(b, 32));
                if v[0] * xi as f64 + v[1] * eta as f64 != 0.0 {
                    kept += s.coefficient(xi, eta).norm_sqr();
                }
            }
        }
        prop_assert!((g.norm_l2().powi(2) - kept).abs() < 1e-9);
    }

    #[test]
    fn transform_is_linear_and_invertible(a in 0u64..500, b in 0u64..500, t in -3.0..3.0f64) {
        let f = GridFunction::random_real(4, 1.5, a).unwrap();
        let g = GridFunction::random_real(4, 1.5, b).unwrap();
        let h = f.add(&g.scale(Complex64::new(t, 0.0)));
        let back = inverse_spectrum(&forward_spectrum(&h));
        prop_assert!(back.sub(&h).max_abs() < 1e-12);
        let lhs = forward_spectrum(&h).coefficient(1, -2);
        let rhs = forward_spectrum(&f).coefficient(1, -2) + forward_spectrum(&g).coefficient(1, -2) * t;
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }
}
