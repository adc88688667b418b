use num_complex::Complex64;

use super::grid::{forward_spectrum, inverse_spectrum, GridFunction};
use crate::error::{DmaxError, Result};

/// `C^∞` transition from 0 (for `u ≤ 0`) to 1 (for `u ≥ 1`).
pub fn smooth_step(u: f64) -> f64 {
    fn h(u: f64) -> f64 {
        if u <= 0.0 {
            0.0
        } else {
            (-1.0 / u).exp()
        }
    }
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let a = h(u);
        a / (a + h(1.0 - u))
    }
}

/// Radial low-pass bump: 1 on `ρ ≤ 1`, 0 on `ρ ≥ 2`.
pub fn low_pass(rho: f64) -> f64 {
    smooth_step(2.0 - rho)
}

/// Bessel function of the first kind through the power series; accurate for
/// the moderate arguments used by the annular symbol below.
fn bessel_j(order: u32, x: f64) -> f64 {
    if x.abs() > 12.0 {
        return libm::jn(order as i32, x);
    }
    let half = x / 2.0;
    let mut term = half.powi(order as i32) / (1..=order).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..200 {
        term *= -half * half / (k as f64 * (k + order) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Radius of the support of the profile whose Fourier transform is `β`.
const BETA_SUPPORT: f64 = 0.25;
/// Exponent `k` in the profile `(1 − |x|²/δ²)_+^k`.
const BETA_POWER: u32 = 4;
/// `|β|` must stay above this floor wherever `ψ` is supported.
pub const BETA_FLOOR: f64 = 1e-3;

/// Fourier transform of `(1 − |x|²)_+^k` in the plane, normalised to 1 at 0.
fn bump_transform(rho: f64) -> f64 {
    let k = BETA_POWER;
    let z = 2.0 * std::f64::consts::PI * rho;
    if z < 1e-6 {
        return 1.0;
    }
    // Γ(k+1) π^{−k} ρ^{−k−1} J_{k+1}(2πρ), divided by its value π/(k+1) at 0.
    let gamma: f64 = (1..=k).map(f64::from).product();
    let raw = gamma * std::f64::consts::PI.powi(-(k as i32)) * rho.powi(-(k as i32) - 1)
        * bessel_j(k + 1, z);
    raw * (k + 1) as f64 / std::f64::consts::PI
}

/// The Littlewood–Paley triple `(φ, β, ψ)` as radial profiles of the physical
/// frequency `ρ = |(ξ, η)|/side`.
///
/// * `φ(ρ) = χ(ρ) − χ(2ρ)` with `χ` the low-pass bump, so `Σ_k φ(2^{−k}ρ)`
///   telescopes to one for `ρ ≠ 0`.
/// * `β` is the transform of `−Δa` for a bump `a` supported in `|x| ≤ 1/4`;
///   its inverse transform is compactly supported with mean zero.
/// * `ψ = χ̃/β²` where `χ̃ = 1` on `[1/2, 2]` and vanishes off `(1/4, 4)`.
#[derive(Clone, Debug)]
pub struct LpFamily {
    beta_floor_observed: f64,
}

impl LpFamily {
    pub fn phi(&self, rho: f64) -> f64 {
        low_pass(rho) - low_pass(2.0 * rho)
    }

    /// `χ` itself: `1_B ≤ χ ≤ 1_{2B}`.
    pub fn low_pass(&self, rho: f64) -> f64 {
        low_pass(rho)
    }

    pub fn beta(&self, rho: f64) -> f64 {
        let z = 2.0 * std::f64::consts::PI * BETA_SUPPORT * rho;
        z * z * bump_transform(BETA_SUPPORT * rho)
    }

    /// Cut-off that is one on `supp φ` and lives where `|β| ≥ BETA_FLOOR`.
    pub fn psi_cutoff(&self, rho: f64) -> f64 {
        low_pass(rho / 2.0) * (1.0 - low_pass(4.0 * rho))
    }

    pub fn psi(&self, rho: f64) -> f64 {
        let c = self.psi_cutoff(rho);
        if c == 0.0 {
            0.0
        } else {
            let b = self.beta(rho);
            c / (b * b)
        }
    }

    /// Smallest `|β|` seen on `[1/4, 4]` while the family was built.
    pub fn beta_floor_observed(&self) -> f64 {
        self.beta_floor_observed
    }

    /// Scales `k` with `φ(2^{−k}ρ) ≠ 0` for some nonzero lattice frequency.
    pub fn active_scales(&self, f: &GridFunction) -> std::ops::RangeInclusive<i32> {
        let side = f.side();
        let rho_min = 1.0 / side;
        let rho_max = std::f64::consts::SQRT_2 * (f.size() / 2) as f64 / side;
        // φ(2^{−k}ρ) ≠ 0 needs 2^{k−1} < ρ < 2^{k+1}.
        let lo = (rho_min.log2() - 1.0).floor() as i32;
        let hi = (rho_max.log2() + 1.0).ceil() as i32;
        lo..=hi
    }
}

/// Builds the family and checks, by dense sampling, that `β` does not vanish
/// on the annulus `1/4 ≤ ρ ≤ 4`.
pub fn make_lp_family() -> Result<LpFamily> {
    let probe = LpFamily { beta_floor_observed: 0.0 };
    let samples = 20_000;
    let mut floor = f64::INFINITY;
    for s in 0..=samples {
        let rho = 0.25 * 16f64.powf(s as f64 / samples as f64);
        let b = probe.beta(rho).abs();
        if !(b >= BETA_FLOOR) {
            return Err(DmaxError::Construction(format!(
                "|β({rho})| = {b} below floor {BETA_FLOOR}"
            )));
        }
        floor = floor.min(b);
    }
    if probe.beta(0.0) != 0.0 {
        return Err(DmaxError::Construction("β(0) must vanish".into()));
    }
    Ok(LpFamily { beta_floor_observed: floor })
}

/// `S_k f`: coefficient at physical radius `ρ` scaled by `φ(2^{−k}ρ)`.
pub fn scale_projection(f: &GridFunction, k: i32, lp: &LpFamily) -> GridFunction {
    let side = f.side();
    let scale = 2f64.powi(-k);
    let s = forward_spectrum(f).multiplied_real(|xi, eta| {
        lp.phi(scale * (xi as f64).hypot(eta as f64) / side)
    });
    inverse_spectrum(&s)
}

/// `P_m f`: zeroes coefficients with `|(ξ, η)|/side > 2^m`.
pub fn ball_projection(f: &GridFunction, m: i32) -> GridFunction {
    let side = f.side();
    let radius = 2f64.powi(m);
    let s = forward_spectrum(f)
        .multiplied_real(|xi, eta| ((xi as f64).hypot(eta as f64) / side <= radius) as u8 as f64);
    inverse_spectrum(&s)
}

/// `sup_m |P_m f|` over every distinct projection on the lattice.
pub fn ball_projection_maximal(f: &GridFunction) -> Vec<f64> {
    let side = f.side();
    let rho_max = std::f64::consts::SQRT_2 * (f.size() / 2) as f64 / side;
    let lo = (1.0 / side).log2().floor() as i32 - 1;
    let hi = rho_max.log2().ceil() as i32;
    let spectrum = forward_spectrum(f);
    let mut out = vec![0.0f64; f.values().len()];
    for m in lo..=hi {
        let radius = 2f64.powi(m);
        let proj = inverse_spectrum(&spectrum.multiplied(|xi, eta| {
            if (xi as f64).hypot(eta as f64) / side <= radius {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::default()
            }
        }));
        for (o, z) in out.iter_mut().zip(proj.values()) {
            *o = o.max(z.norm());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_support_and_partition() {
        let lp = make_lp_family().unwrap();
        assert_eq!(lp.phi(0.4), 0.0);
        assert_eq!(lp.phi(2.1), 0.0);
        assert_eq!(lp.phi(0.5), 0.0);
        assert_eq!(lp.phi(2.0), 0.0);
        // Direct summation at sample points.
        for rho in [1.37, 1e-3, 0.77, 5.0, 123.4] {
            let s: f64 = (-40..=40).map(|k| lp.phi(2f64.powi(-k) * rho)).sum();
            assert!((s - 1.0).abs() < 1e-8, "rho={rho} sum={s}");
        }
    }

    #[test]
    fn psi_inverts_beta_squared_on_support() {
        let lp = make_lp_family().unwrap();
        assert_eq!(lp.beta(0.0), 0.0);
        for s in 0..100 {
            let rho = 0.5 + 1.5 * s as f64 / 99.0;
            let v = lp.psi(rho) * lp.beta(rho).powi(2);
            assert!((v - 1.0).abs() < 1e-8, "rho={rho} v={v}");
        }
        assert!(lp.beta_floor_observed() >= BETA_FLOOR);
        assert_eq!(lp.psi(0.2), 0.0);
        assert_eq!(lp.psi(4.5), 0.0);
    }

    #[test]
    fn bessel_series_matches_libm() {
        for x in [0.1, 1.0, 3.3, 6.2, 11.9] {
            for n in [0, 1, 5] {
                assert!((bessel_j(n, x) - libm::jn(n as i32, x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn low_pass_sandwich() {
        assert_eq!(low_pass(1.0), 1.0);
        assert_eq!(low_pass(2.0), 0.0);
        assert!(low_pass(1.5) > 0.0 && low_pass(1.5) < 1.0);
    }
}
