use num_complex::Complex64;
use rand::seq::SliceRandom;
use serde::Serialize;

use super::martingale::{expectation_values, martingale_maximal_values, square_function_values};
use crate::error::{invalid, Result};
use crate::spectral::GridFunction;

/// The companion constant held fixed while fitting `c₁`.
pub const C2_FIXED: f64 = 100.0;
/// Grid step of the `c₁` search.
pub const C1_STEP: f64 = 0.01;
/// Largest `c₁` reported when no profiled point constrains the fit.
const C1_CAP: f64 = 100.0;

/// Measures of `{|f − E₀f| > 2λ, Δ(f) < ελ}` and `{sup_k |E_k f| > ελ}` over a
/// `λ × ε` grid, with the fitted constants of the exponential bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CwwProfile {
    pub lambda_grid: Vec<f64>,
    pub epsilon_grid: Vec<f64>,
    /// Row-major over `(λ, ε)`.
    pub lhs_measures: Vec<f64>,
    pub rhs_measures: Vec<f64>,
    pub fitted_c1: f64,
    pub fitted_c2: f64,
    /// Points with `rhs = 0 < lhs`.
    pub violations: usize,
}

impl CwwProfile {
    fn index(&self, a: usize, b: usize) -> usize {
        a * self.epsilon_grid.len() + b
    }

    pub fn bound(&self, a: usize, b: usize) -> f64 {
        let eps = self.epsilon_grid[b];
        self.fitted_c2 * (-self.fitted_c1 / (eps * eps)).exp() * self.rhs_measures[self.index(a, b)]
    }

    /// Whether `lhs ≤ c₂ e^{−c₁/ε²} rhs` holds at every profiled point.
    pub fn holds(&self) -> bool {
        (0..self.lambda_grid.len()).all(|a| {
            (0..self.epsilon_grid.len())
                .all(|b| self.lhs_measures[self.index(a, b)] <= self.bound(a, b))
        })
    }

    pub fn write_csv(&self, w: impl std::io::Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["lambda", "epsilon", "lhs_measure", "rhs_measure", "bound_value"])
            .map_err(csv_error)?;
        for (a, lambda) in self.lambda_grid.iter().enumerate() {
            for (b, eps) in self.epsilon_grid.iter().enumerate() {
                let k = self.index(a, b);
                out.write_record(&[
                    lambda.to_string(),
                    eps.to_string(),
                    self.lhs_measures[k].to_string(),
                    self.rhs_measures[k].to_string(),
                    self.bound(a, b).to_string(),
                ])
                .map_err(csv_error)?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> crate::DmaxError {
    crate::DmaxError::Format(e.to_string())
}

/// Largest `c₁ ∈ {0.01·j}` with `lhs ≤ c₂ e^{−c₁/ε²} rhs` at every point.
fn fit_c1(eps: &[f64], lhs: &[f64], rhs: &[f64]) -> f64 {
    let fits = |c1: f64| {
        lhs.iter().zip(rhs).enumerate().all(|(k, (&l, &r))| {
            let e = eps[k % eps.len()];
            l <= C2_FIXED * (-c1 / (e * e)).exp() * r
        })
    };
    // Analytic upper estimate, then walk down the grid to the first fit.
    let mut bound = C1_CAP;
    for (k, (&l, &r)) in lhs.iter().zip(rhs).enumerate() {
        if l > 0.0 && r > 0.0 {
            let e = eps[k % eps.len()];
            bound = bound.min(e * e * (C2_FIXED * r / l).ln());
        }
    }
    let mut j = (bound / C1_STEP).floor().max(0.0) as i64 + 1;
    while j >= 0 {
        let c1 = j as f64 * C1_STEP;
        if c1 <= C1_CAP && fits(c1) {
            return c1;
        }
        j -= 1;
    }
    0.0
}

pub fn cww_profile(f: &GridFunction, lambdas: &[f64], epsilons: &[f64]) -> Result<CwwProfile> {
    if lambdas.is_empty() || epsilons.is_empty() {
        return Err(invalid("CWW profile needs nonempty λ and ε grids"));
    }
    if epsilons.iter().any(|&e| !(e > 0.0 && e < 1.0)) || lambdas.iter().any(|&l| !(l > 0.0)) {
        return Err(invalid("λ must be positive and ε in (0, 1)"));
    }
    let e0 = expectation_values(f, 0);
    let osc: Vec<f64> = f.values().iter().zip(&e0).map(|(a, b)| (a - b).norm()).collect();
    let square = square_function_values(f);
    let sup = martingale_maximal_values(f);
    let area = f.cell_area();
    let mut lhs = Vec::with_capacity(lambdas.len() * epsilons.len());
    let mut rhs = Vec::with_capacity(lhs.capacity());
    let mut violations = 0;
    for &lambda in lambdas {
        for &eps in epsilons {
            let l = osc
                .iter()
                .zip(&square)
                .filter(|(o, s)| **o > 2.0 * lambda && **s < eps * lambda)
                .count() as f64
                * area;
            let r = sup.iter().filter(|s| **s > eps * lambda).count() as f64 * area;
            if r == 0.0 && l > 0.0 {
                violations += 1;
            }
            lhs.push(l);
            rhs.push(r);
        }
    }
    let fitted_c1 = fit_c1(epsilons, &lhs, &rhs);
    Ok(CwwProfile {
        lambda_grid: lambdas.to_vec(),
        epsilon_grid: epsilons.to_vec(),
        lhs_measures: lhs,
        rhs_measures: rhs,
        fitted_c1,
        fitted_c2: C2_FIXED,
        violations,
    })
}

/// A dyadic martingale whose differences take the values ±1: on each square
/// of every generation, two of the four children get `+1` and two get `−1`,
/// in a seeded random arrangement.
pub fn random_dyadic_martingale(level: u32, side: f64, seed: u64) -> GridFunction {
    let mut rng = crate::rng::seeded(seed);
    let n = 1usize << level;
    let mut values = vec![0.0f64; n * n];
    for k in 0..level {
        // Children at generation k+1 have 2^{L−k−1} samples per side.
        let child = 1usize << (level - k - 1);
        for ib in (0..n).step_by(2 * child) {
            for jb in (0..n).step_by(2 * child) {
                let mut signs = [1.0, 1.0, -1.0, -1.0];
                signs.shuffle(&mut rng);
                for (q, s) in signs.iter().enumerate() {
                    let (i0, j0) = (ib + (q / 2) * child, jb + (q % 2) * child);
                    for i in i0..i0 + child {
                        for v in &mut values[i * n + j0..][..child] {
                            *v += s;
                        }
                    }
                }
            }
        }
    }
    GridFunction::new(level, side, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
        .expect("finite values on a valid lattice")
}
