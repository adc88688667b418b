use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::spectral::GridFunction;

/// Distribution function `ν_f(α) = |{|f| > α}|` sampled at ascending thresholds.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerCake {
    pub thresholds: Vec<f64>,
    pub measures: Vec<f64>,
}

impl LayerCake {
    /// Trapezoid value of `2∫_a^b α ν_f(α) dα` over the sampled thresholds
    /// lying in `[a, b]`.
    pub fn energy_between(&self, a: f64, b: f64) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .thresholds
            .iter()
            .zip(&self.measures)
            .filter(|(t, _)| **t >= a && **t <= b)
            .map(|(t, m)| (*t, *m))
            .collect();
        pts.windows(2)
            .map(|w| (w[1].0 - w[0].0) * (w[0].0 * w[0].1 + w[1].0 * w[1].1))
            .sum()
    }
}

pub fn layer_cake(f: &GridFunction, thresholds: &[f64]) -> Result<LayerCake> {
    if thresholds.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("layer-cake thresholds must be strictly ascending"));
    }
    let mut mags: Vec<f64> = f.values().iter().map(|z| z.norm()).collect();
    mags.sort_by(f64::total_cmp);
    let area = f.cell_area();
    let measures = thresholds
        .iter()
        .map(|&a| (mags.len() - mags.partition_point(|&m| m <= a)) as f64 * area)
        .collect();
    Ok(LayerCake { thresholds: thresholds.to_vec(), measures })
}

/// `f = f₁ + f₂ + f₃` split at `|f| = Nλ` and `|f| = N^{−q}λ`, `q = p/(p − 2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitTriple {
    pub f1: GridFunction,
    pub f2: GridFunction,
    pub f3: GridFunction,
    pub lambda: f64,
    pub n: f64,
    pub q: f64,
}

impl SplitTriple {
    pub fn upper(&self) -> f64 {
        self.n * self.lambda
    }

    pub fn lower(&self) -> f64 {
        self.n.powf(-self.q) * self.lambda
    }

    /// Exact reconstruction, disjoint supports and the three magnitude bands.
    pub fn verify(&self, f: &GridFunction) -> bool {
        let (hi, lo) = (self.upper(), self.lower());
        let zero = Complex64::default();
        f.values().iter().enumerate().all(|(k, &z)| {
            let parts = [self.f1.values()[k], self.f2.values()[k], self.f3.values()[k]];
            let live = parts.iter().filter(|p| **p != zero).count();
            let sum = parts[0] + parts[1] + parts[2];
            sum == z
                && live <= 1
                && (parts[0] == zero || parts[0].norm() > hi)
                && (parts[1] == zero || (parts[1].norm() > lo && parts[1].norm() <= hi))
                && parts[2].norm() <= lo
        })
    }
}

pub fn lemma3_split(f: &GridFunction, lambda: f64, n: f64, p: f64) -> Result<SplitTriple> {
    if !(p > 2.0) {
        return Err(invalid(format!("exponent p = {p} must exceed 2")));
    }
    if !(lambda > 0.0 && n >= 1.0) {
        return Err(invalid("λ must be positive and N ≥ 1"));
    }
    let q = p / (p - 2.0);
    let hi = n * lambda;
    let lo = n.powf(-q) * lambda;
    let zero = Complex64::default();
    let band = |keep: &dyn Fn(f64) -> bool| f.map(|z| if keep(z.norm()) { z } else { zero });
    Ok(SplitTriple {
        f1: band(&|m| m > hi),
        f2: band(&|m| m > lo && m <= hi),
        f3: band(&|m| m <= lo),
        lambda,
        n,
        q,
    })
}

/// Both sides of `‖f₂‖² = a²ν(a) − b²ν(b) + 2∫_a^b αν(α) dα` with `a = N^{−q}λ`,
/// `b = Nλ`; the integral by trapezoid on `samples` log-spaced thresholds
/// refined at every jump of `ν`.
pub fn middle_energy(f: &GridFunction, split: &SplitTriple, samples: usize) -> Result<(f64, f64)> {
    let (a, b) = (split.lower(), split.upper());
    let mut thresholds: Vec<f64> =
        (0..samples).map(|k| a * (b / a).powf(k as f64 / (samples - 1).max(1) as f64)).collect();
    thresholds.extend(f.values().iter().map(|z| z.norm()).filter(|&m| m > a && m < b));
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    let cake = layer_cake(f, &thresholds)?;
    let nu = |t: f64| cake.measures[cake.thresholds.partition_point(|&x| x < t)];
    let rhs = a * a * nu(a) - b * b * nu(b) + cake.energy_between(a, b);
    Ok((split.f2.norm_l2().powi(2), rhs))
}
