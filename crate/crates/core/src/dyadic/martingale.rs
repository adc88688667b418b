use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::spectral::GridFunction;

/// Replaces every aligned `b × b` block by its mean.
pub(crate) fn block_mean(values: &[Complex64], n: usize, b: usize) -> Vec<Complex64> {
    if b == 1 {
        return values.to_vec();
    }
    let mut out = vec![Complex64::default(); n * n];
    let area = (b * b) as f64;
    for ib in (0..n).step_by(b) {
        for jb in (0..n).step_by(b) {
            let mut sum = Complex64::default();
            for i in ib..ib + b {
                sum += values[i * n + jb..][..b].iter().sum::<Complex64>();
            }
            let mean = sum / area;
            for i in ib..ib + b {
                out[i * n + jb..][..b].fill(mean);
            }
        }
    }
    out
}

fn check_depth(f: &GridFunction, j: u32) -> Result<()> {
    if j > f.level() {
        return Err(invalid(format!("depth {j} exceeds level {}", f.level())));
    }
    Ok(())
}

pub(crate) fn expectation_values(f: &GridFunction, j: u32) -> Vec<Complex64> {
    block_mean(f.values(), f.size(), 1 << (f.level() - j))
}

/// `E_j f`: averages over the dyadic squares of side `side·2^{−j}`.
pub fn conditional_expectation(f: &GridFunction, j: u32) -> Result<GridFunction> {
    check_depth(f, j)?;
    Ok(GridFunction::from_parts(f.level(), f.side(), expectation_values(f, j)))
}

/// `Δ_k f = E_{k+1} f − E_k f` for `0 ≤ k < L`.
pub fn martingale_difference(f: &GridFunction, k: u32) -> Result<GridFunction> {
    if k >= f.level() {
        return Err(invalid(format!("difference index {k} must be below level {}", f.level())));
    }
    let fine = expectation_values(f, k + 1);
    let coarse = expectation_values(f, k);
    let values = fine.iter().zip(&coarse).map(|(a, b)| a - b).collect();
    Ok(GridFunction::from_parts(f.level(), f.side(), values))
}

/// All expectations `E_0 f, …, E_L f`.
fn expectations(f: &GridFunction) -> Vec<Vec<Complex64>> {
    (0..=f.level()).map(|j| expectation_values(f, j)).collect()
}

pub(crate) fn square_function_values(f: &GridFunction) -> Vec<f64> {
    let e = expectations(f);
    let mut acc = vec![0.0f64; f.values().len()];
    for w in e.windows(2) {
        for ((a, fine), coarse) in acc.iter_mut().zip(&w[1]).zip(&w[0]) {
            *a += (fine - coarse).norm_sqr();
        }
    }
    acc.into_iter().map(f64::sqrt).collect()
}

/// `Δ(f) = (Σ_{0≤k<L} |Δ_k f|²)^{1/2}`.
pub fn square_function(f: &GridFunction) -> GridFunction {
    GridFunction::from_real(f.level(), f.side(), &square_function_values(f))
        .expect("same lattice as the input")
}

pub(crate) fn martingale_maximal_values(f: &GridFunction) -> Vec<f64> {
    let mut best = vec![0.0f64; f.values().len()];
    for e in expectations(f) {
        for (b, z) in best.iter_mut().zip(&e) {
            *b = b.max(z.norm());
        }
    }
    best
}

/// `sup_{0≤k≤L} |E_k f|`.
pub fn martingale_maximal(f: &GridFunction) -> GridFunction {
    GridFunction::from_real(f.level(), f.side(), &martingale_maximal_values(f))
        .expect("same lattice as the input")
}

/// `f = E_0 f + Σ_{k<L} Δ_k f`.
#[derive(Clone, Debug)]
pub struct MartingaleDecomposition {
    pub base: GridFunction,
    pub differences: Vec<GridFunction>,
    pub level: u32,
}

impl MartingaleDecomposition {
    pub fn new(f: &GridFunction) -> Self {
        let e = expectations(f);
        let grid = |v: Vec<Complex64>| GridFunction::from_parts(f.level(), f.side(), v);
        let differences = e
            .windows(2)
            .map(|w| grid(w[1].iter().zip(&w[0]).map(|(a, b)| a - b).collect()))
            .collect();
        Self { base: grid(e[0].clone()), differences, level: f.level() }
    }

    pub fn reconstruct(&self) -> GridFunction {
        self.differences.iter().fold(self.base.clone(), |acc, d| acc.add(d))
    }
}
