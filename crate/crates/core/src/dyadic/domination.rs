use serde::Serialize;

use super::martingale::{expectation_values, square_function_values};
use crate::directions::DirectionSet;
use crate::error::{invalid, Result};
use crate::maximal::{directional_sup_batch, dyadic_maximal_values, m2_values};
use crate::spectral::multiplier::check_unit;
use crate::spectral::{forward_spectrum, inverse_spectrum, GridFunction, LpFamily, Spectrum, Symbol1D};

/// Largest pointwise ratio between two sides of an estimate, over samples
/// where the right-hand side is not negligible.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioReport {
    pub max_ratio: f64,
    /// Samples that entered the maximum.
    pub samples: usize,
}

fn max_ratio(lhs: &[f64], rhs: &[f64], floor: f64) -> RatioReport {
    let mut report = RatioReport { max_ratio: 0.0, samples: 0 };
    for (l, r) in lhs.iter().zip(rhs) {
        if *r > floor {
            report.samples += 1;
            report.max_ratio = report.max_ratio.max(l / r);
        }
    }
    report
}

fn phi_band(s: &Spectrum, k: i32, lp: &LpFamily) -> Spectrum {
    let side = s.side();
    let scale = 2f64.powi(-k);
    s.multiplied_real(|xi, eta| lp.phi(scale * (xi as f64).hypot(eta as f64) / side))
}

/// Accumulates `Σ_k |M₂(M g_k)|²` and returns its square root.
fn sum_m2m(level: u32, pieces: impl Iterator<Item = Vec<f64>>) -> Vec<f64> {
    let mut acc: Vec<f64> = Vec::new();
    for g in pieces {
        let outer = m2_values(&dyadic_maximal_values(&g, level), level);
        if acc.is_empty() {
            acc = vec![0.0; outer.len()];
        }
        for (a, o) in acc.iter_mut().zip(&outer) {
            *a += o * o;
        }
    }
    acc.into_iter().map(f64::sqrt).collect()
}

/// `(Σ_k |M₂(M(T S_k f))|²)^{1/2}` over the scales `k` active on the lattice,
/// with `T` the multiplier `m(v·ζ/side)`.
pub fn lemma_rhs(f: &GridFunction, m: &Symbol1D, v: [f64; 2], lp: &LpFamily) -> Vec<f64> {
    let spectrum = forward_spectrum(f);
    let side = f.side();
    let pieces = lp.active_scales(f).map(|k| {
        let band = phi_band(&spectrum, k, lp)
            .multiplied(|xi, eta| m.eval((v[0] * xi as f64 + v[1] * eta as f64) / side));
        inverse_spectrum(&band).abs()
    });
    sum_m2m(f.level(), pieces)
}

fn apply(f: &GridFunction, m: &Symbol1D, v: [f64; 2]) -> GridFunction {
    crate::spectral::multiplier::apply_to_spectrum(&forward_spectrum(f), m, v)
}

/// Fitted `c₃`: the largest ratio `Δ(Tf) / (Σ_k |M₂(M(T_k f))|²)^{1/2}`.
pub fn domination_check(
    f: &GridFunction,
    m: &Symbol1D,
    v: [f64; 2],
    lp: &LpFamily,
) -> Result<RatioReport> {
    check_unit(v)?;
    let lhs = square_function_values(&apply(f, m, v));
    let rhs = lemma_rhs(f, m, v, lp);
    Ok(max_ratio(&lhs, &rhs, 1e-12 * f.norm_l2()))
}

/// `|E₀(Tf)| / (Σ_k |M₂(M(T_k f))|²)^{1/2}` with `T` the symbol `base`
/// zeroed on `|t| < 2^{2N′}`. `E₀` averages over unit squares, so `side` must
/// be a power of two not exceeding the lattice size.
pub fn e0_smallness_check(
    f: &GridFunction,
    base: &Symbol1D,
    n_prime: u32,
    v: [f64; 2],
    lp: &LpFamily,
) -> Result<RatioReport> {
    check_unit(v)?;
    let log_side = f.side().log2();
    if log_side.fract() != 0.0 || log_side < 0.0 || log_side > f.level() as f64 {
        return Err(invalid("unit-square expectation needs side = 2^s with 0 ≤ s ≤ L"));
    }
    let cutoff = 4f64.powi(n_prime as i32);
    let nyquist = (f.size() / 2) as f64 / f.side();
    if cutoff >= nyquist {
        return Err(invalid(format!(
            "cutoff {cutoff} is beyond the lattice band {nyquist}; the operator vanishes"
        )));
    }
    let m = Symbol1D::high_pass(base, cutoff);
    let tf = apply(f, &m, v);
    let lhs: Vec<f64> =
        expectation_values(&tf, log_side as u32).iter().map(|z| z.norm()).collect();
    let rhs = lemma_rhs(f, &m, v, lp);
    Ok(max_ratio(&lhs, &rhs, 1e-12 * f.norm_l2()))
}

/// `G(f) = c₃ (Σ_k |M₂(M(A_k f))|²)^{1/2}` with `A_k f = sup_{v∈S} |T_v(S_k f)|`.
pub fn g_function(
    f: &GridFunction,
    set: &DirectionSet,
    m: &Symbol1D,
    lp: &LpFamily,
    c3: f64,
) -> Vec<f64> {
    let spectrum = forward_spectrum(f);
    let pieces = lp.active_scales(f).map(|k| {
        let sk = inverse_spectrum(&phi_band(&spectrum, k, lp));
        directional_sup_batch(std::slice::from_ref(&sk), set, m).pop().unwrap().values().to_vec()
    });
    sum_m2m(f.level(), pieces).into_iter().map(|g| c3 * g).collect()
}
