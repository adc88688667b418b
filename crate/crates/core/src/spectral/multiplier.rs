use num_complex::Complex64;
use serde::Serialize;

use super::grid::{forward_spectrum, inverse_spectrum, GridFunction, Spectrum};
use super::lp::LpFamily;
use super::symbol::Symbol1D;
use super::window::SmoothWindow;
use crate::error::{DmaxError, Result};

pub const UNIT_TOLERANCE: f64 = 1e-12;

pub fn check_unit(v: [f64; 2]) -> Result<()> {
    if ((v[0] * v[0] + v[1] * v[1]).sqrt() - 1.0).abs() > UNIT_TOLERANCE {
        return Err(DmaxError::NonUnitVector(v[0], v[1]));
    }
    Ok(())
}

/// Multiplies an existing spectrum by `m(v·(ξ, η)/side)` and inverts.
pub fn apply_to_spectrum(s: &Spectrum, m: &Symbol1D, v: [f64; 2]) -> GridFunction {
    let side = s.side();
    inverse_spectrum(&s.multiplied(|xi, eta| m.eval((v[0] * xi as f64 + v[1] * eta as f64) / side)))
}

/// `T_v f`: the one-dimensional multiplier `m` applied along the unit vector `v`.
pub fn apply_directional_multiplier(
    f: &GridFunction,
    m: &Symbol1D,
    v: [f64; 2],
) -> Result<GridFunction> {
    check_unit(v)?;
    Ok(apply_to_spectrum(&forward_spectrum(f), m, v))
}

/// Largest `|m(v·(ξ, η)/side)|` over the lattice: the exact `2 → 2` norm of
/// the diagonal operator `T_v`.
pub fn diagonal_norm(level: u32, side: f64, m: &Symbol1D, v: [f64; 2]) -> f64 {
    let n = 1i64 << level;
    let mut best = 0.0f64;
    for xi in -n / 2..n / 2 {
        for eta in -n / 2..n / 2 {
            best = best.max(m.eval((v[0] * xi as f64 + v[1] * eta as f64) / side).norm());
        }
    }
    best
}

/// Outcome of fitting `|K_v(x)| ≤ c (1 + ‖x‖)^{−3}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelDecay {
    /// Smallest admissible `c` on the lattice.
    pub constant: f64,
    /// Slope of the log-log fit of the radial envelope over the tail.
    pub tail_exponent: f64,
}

/// Level and side for [`kernel_decay_check`]: the kernel must decay well
/// inside the torus, and the band must contain the support `|ζ| ≤ 2` of the
/// low-pass bump.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelGrid {
    pub level: u32,
    pub side: f64,
}

impl Default for KernelGrid {
    fn default() -> Self {
        Self { level: 8, side: 32.0 }
    }
}

/// Builds `K_v = (χ(ζ) ψ̂(v·ζ))ˇ` with the low-pass bump `χ` of the family and
/// measures its polynomial decay.
pub fn kernel_decay_check(
    v: [f64; 2],
    lp: &LpFamily,
    window: &SmoothWindow,
    grid: KernelGrid,
) -> Result<KernelDecay> {
    check_unit(v)?;
    window.validate()?;
    let side = grid.side;
    let multiplier = Spectrum::from_fn(grid.level, side, |xi, eta| {
        let (a, b) = (xi as f64 / side, eta as f64 / side);
        Complex64::new(lp.low_pass(a.hypot(b)) * window.eval(v[0] * a + v[1] * b), 0.0)
    })?;
    // Continuum normalisation: K(x) = ∫ m(ζ) e^{2πiζ·x} dζ ≈ side^{−2} Σ m e^{…}.
    let kernel = inverse_spectrum(&multiplier);
    let n = kernel.size();
    let h = kernel.spacing();
    let density = 1.0 / (side * side);

    let mut constant = 0.0f64;
    let bins = 24usize;
    let r_lo = 2.0;
    let r_hi = side / 2.0;
    let mut envelope = vec![0.0f64; bins];
    for i in 0..n {
        for j in 0..n {
            let x = crate::spectral::grid::signed_frequency(i, n) as f64 * h;
            let y = crate::spectral::grid::signed_frequency(j, n) as f64 * h;
            let r = x.hypot(y);
            let value = kernel.get(i, j).norm() * density;
            constant = constant.max(value * (1.0 + r).powi(3));
            if r >= r_lo && r < r_hi {
                let b = ((r / r_lo).ln() / (r_hi / r_lo).ln() * bins as f64) as usize;
                envelope[b.min(bins - 1)] = envelope[b.min(bins - 1)].max(value);
            }
        }
    }
    let peak = envelope.iter().copied().fold(0.0, f64::max);
    let points: Vec<(f64, f64)> = envelope
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 1e-11 * peak.max(f64::MIN_POSITIVE))
        .map(|(b, &e)| {
            let r = r_lo * (r_hi / r_lo).powf((b as f64 + 0.5) / bins as f64);
            (r.ln(), e.ln())
        })
        .collect();
    let tail_exponent = if points.len() >= 3 { least_squares_slope(&points) } else { f64::NEG_INFINITY };
    Ok(KernelDecay { constant, tail_exponent })
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::fourier_mode;
    use crate::spectral::lp::make_lp_family;

    #[test]
    fn identity_symbol_is_identity() {
        let f = GridFunction::from_fn(4, 1.0, |x, y| Complex64::new(x * x - y, x * y)).unwrap();
        let g = apply_directional_multiplier(&f, &Symbol1D::identity(), [0.6, 0.8]).unwrap();
        assert!(g.sub(&f).max_abs() < 1e-12);
    }

    #[test]
    fn single_mode_scales_by_symbol() {
        let m = Symbol1D::new("t^2", false, |t| Complex64::new(t * t, 0.0));
        let f = fourier_mode(5, 1.0, 3, 4).unwrap();
        let g = apply_directional_multiplier(&f, &m, [0.6, 0.8]).unwrap();
        // v·(3, 4) = 5.
        assert!(g.sub(&f.scale(Complex64::new(25.0, 0.0))).max_abs() < 1e-10);
    }

    #[test]
    fn sgn_on_cosine_gives_i_sine() {
        // cos(2πx) = (e^{2πix} + e^{−2πix})/2; sgn multiplies the modes by ±1,
        // leaving (e^{2πix} − e^{−2πix})/2 = i sin(2πx).
        let f = GridFunction::from_fn(5, 1.0, |x, _| {
            Complex64::new((2.0 * std::f64::consts::PI * x).cos(), 0.0)
        })
        .unwrap();
        let g = apply_directional_multiplier(&f, &Symbol1D::sgn(), [1.0, 0.0]).unwrap();
        let want = GridFunction::from_fn(5, 1.0, |x, _| {
            Complex64::new(0.0, (2.0 * std::f64::consts::PI * x).sin())
        })
        .unwrap();
        assert!(g.sub(&want).max_abs() < 1e-12);
    }

    #[test]
    fn rejects_non_unit_direction() {
        let f = GridFunction::zeros(3, 1.0).unwrap();
        assert!(matches!(
            apply_directional_multiplier(&f, &Symbol1D::sgn(), [1.0, 0.1]),
            Err(DmaxError::NonUnitVector(..))
        ));
    }

    #[test]
    fn kernel_decays_like_inverse_cube_or_faster() {
        let lp = make_lp_family().unwrap();
        let w = SmoothWindow::default();
        let a = kernel_decay_check([1.0, 0.0], &lp, &w, KernelGrid::default()).unwrap();
        let b = kernel_decay_check([0.0, 1.0], &lp, &w, KernelGrid::default()).unwrap();
        assert!(a.constant.is_finite() && a.constant > 0.0);
        assert!(a.tail_exponent <= -3.0 + 0.3, "{a:?}");
        assert!((a.constant / b.constant - 1.0).abs() < 0.25, "{a:?} {b:?}");
    }
}
