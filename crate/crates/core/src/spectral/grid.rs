use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{DmaxError, Result};

pub const MIN_LEVEL: u32 = 3;
pub const MAX_LEVEL: u32 = 13;

/// Complex samples on the periodic lattice `2^L × 2^L` covering `[0, side)²`.
///
/// Sample `(i, j)` sits at `(i·side/2^L, j·side/2^L)` and is stored at
/// `values[i * 2^L + j]`: `i` is the x index, `j` the y index.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    level: u32,
    side: f64,
    values: Vec<Complex64>,
}

fn check_shape(level: u32, side: f64) -> Result<usize> {
    if !(MIN_LEVEL..=MAX_LEVEL).contains(&level) {
        return Err(DmaxError::InvalidGrid(format!(
            "level {level} outside {MIN_LEVEL}..={MAX_LEVEL}"
        )));
    }
    if !(side.is_finite() && side > 0.0) {
        return Err(DmaxError::InvalidGrid(format!("side {side} must be positive")));
    }
    Ok(1usize << level)
}

impl GridFunction {
    pub fn new(level: u32, side: f64, values: Vec<Complex64>) -> Result<Self> {
        let n = check_shape(level, side)?;
        if values.len() != n * n {
            return Err(DmaxError::InvalidGrid(format!(
                "expected {} samples, got {}",
                n * n,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(DmaxError::NonFinite(bad));
        }
        Ok(Self { level, side, values })
    }

    pub fn from_real(level: u32, side: f64, values: &[f64]) -> Result<Self> {
        Self::new(level, side, values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(level: u32, side: f64) -> Result<Self> {
        let n = check_shape(level, side)?;
        Ok(Self { level, side, values: vec![Complex64::default(); n * n] })
    }

    /// Samples `f(x, y)` at the lattice points.
    pub fn from_fn(level: u32, side: f64, f: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        let n = check_shape(level, side)?;
        let h = side / n as f64;
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                values.push(f(i as f64 * h, j as f64 * h));
            }
        }
        Self::new(level, side, values)
    }

    /// Seeded real noise, i.i.d. uniform on `[−1, 1)`.
    pub fn random_real(level: u32, side: f64, seed: u64) -> Result<Self> {
        use rand::Rng;
        let n = check_shape(level, side)?;
        let mut rng = crate::rng::seeded(seed);
        let values = (0..n * n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).collect();
        Ok(Self { level, side, values })
    }

    /// Internal constructor for values produced by our own transforms.
    pub(crate) fn from_parts(level: u32, side: f64, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), 1usize << (2 * level));
        Self { level, side, values }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    /// Number of samples per axis, `2^L`.
    pub fn size(&self) -> usize {
        1usize << self.level
    }

    pub fn spacing(&self) -> f64 {
        self.side / self.size() as f64
    }

    /// Area of one lattice cell.
    pub fn cell_area(&self) -> f64 {
        self.spacing() * self.spacing()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.size() + j]
    }

    /// Periodic lookup with wrapped signed indices.
    pub fn get_wrapped(&self, i: i64, j: i64) -> Complex64 {
        let n = self.size() as i64;
        self.values[(i.rem_euclid(n) * n + j.rem_euclid(n)) as usize]
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.level == other.level && self.side == other.side
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::from_parts(self.level, self.side, self.values.iter().map(|&z| f(z)).collect())
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert!(self.same_shape(other), "grid shapes differ");
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self::from_parts(self.level, self.side, values)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|z| z * c)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `L²` norm on the torus, `(Σ |f|² · cell_area)^{1/2}`.
    pub fn norm_l2(&self) -> f64 {
        (self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.cell_area()).sqrt()
    }

    /// `⟨f, g⟩ = Σ f·conj(g) · cell_area`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert!(self.same_shape(other), "grid shapes differ");
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        s * self.cell_area()
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }
}

/// `L²` norm of real samples with the same cell weighting as [`GridFunction::norm_l2`].
pub fn real_norm_l2(values: &[f64], cell_area: f64) -> f64 {
    (values.iter().map(|x| x * x).sum::<f64>() * cell_area).sqrt()
}

/// Fourier coefficients indexed by integer frequencies `(ξ, η) ∈ [−2^{L−1}, 2^{L−1})²`,
/// normalised so that `e^{2πi(ξx+ηy)/side}` has coefficient one.
///
/// Storage uses FFT order: frequency `ξ` lives at row `ξ mod 2^L`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    level: u32,
    side: f64,
    coefficients: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(level: u32, side: f64, coefficients: Vec<Complex64>) -> Result<Self> {
        let n = check_shape(level, side)?;
        if coefficients.len() != n * n {
            return Err(DmaxError::InvalidGrid(format!(
                "expected {} coefficients, got {}",
                n * n,
                coefficients.len()
            )));
        }
        if let Some(bad) =
            coefficients.iter().position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(DmaxError::NonFinite(bad));
        }
        Ok(Self { level, side, coefficients })
    }

    pub fn zeros(level: u32, side: f64) -> Result<Self> {
        let n = check_shape(level, side)?;
        Ok(Self { level, side, coefficients: vec![Complex64::default(); n * n] })
    }

    /// Coefficients given as a function of the signed frequencies.
    pub fn from_fn(level: u32, side: f64, c: impl Fn(i64, i64) -> Complex64) -> Result<Self> {
        let n = check_shape(level, side)?;
        let mut coefficients = Vec::with_capacity(n * n);
        for a in 0..n {
            let xi = signed_frequency(a, n);
            for b in 0..n {
                coefficients.push(c(xi, signed_frequency(b, n)));
            }
        }
        Self::new(level, side, coefficients)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn size(&self) -> usize {
        1usize << self.level
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    fn slot(&self, xi: i64, eta: i64) -> usize {
        let n = self.size() as i64;
        let half = n / 2;
        assert!(
            (-half..half).contains(&xi) && (-half..half).contains(&eta),
            "frequency ({xi}, {eta}) outside the lattice band"
        );
        (xi.rem_euclid(n) * n + eta.rem_euclid(n)) as usize
    }

    pub fn coefficient(&self, xi: i64, eta: i64) -> Complex64 {
        self.coefficients[self.slot(xi, eta)]
    }

    pub fn set_coefficient(&mut self, xi: i64, eta: i64, value: Complex64) {
        let k = self.slot(xi, eta);
        self.coefficients[k] = value;
    }

    /// `(Σ |c|²)^{1/2} · side`, equal to the `L²` norm of the inverse transform.
    pub fn norm_l2(&self) -> f64 {
        self.coefficients.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() * self.side
    }

    /// Multiplies every coefficient by `m(ξ, η)` where `(ξ, η)` are the signed
    /// integer frequencies.
    pub fn multiplied(&self, m: impl Fn(i64, i64) -> Complex64) -> Self {
        let n = self.size();
        let mut out = self.coefficients.clone();
        for (a, row) in out.chunks_mut(n).enumerate() {
            let xi = signed_frequency(a, n);
            for (b, c) in row.iter_mut().enumerate() {
                *c *= m(xi, signed_frequency(b, n));
            }
        }
        Self { level: self.level, side: self.side, coefficients: out }
    }

    /// Like [`Self::multiplied`] with a real multiplier, skipping exact zeros.
    pub fn multiplied_real(&self, m: impl Fn(i64, i64) -> f64) -> Self {
        self.multiplied(|a, b| Complex64::new(m(a, b), 0.0))
    }
}

/// Signed frequency for FFT slot `k` of an `n`-point transform.
pub fn signed_frequency(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Radius `|(ξ, η)| / side` of every lattice frequency, in FFT order.
pub fn physical_radii(level: u32, side: f64) -> Vec<f64> {
    let n = 1usize << level;
    let mut out = Vec::with_capacity(n * n);
    for a in 0..n {
        let xi = signed_frequency(a, n) as f64;
        for b in 0..n {
            let eta = signed_frequency(b, n) as f64;
            out.push(xi.hypot(eta) / side);
        }
    }
    out
}

struct Plan {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plan(n: usize) -> Arc<Plan> {
    static PLANS: OnceLock<Mutex<HashMap<usize, Arc<Plan>>>> = OnceLock::new();
    let mut plans = PLANS.get_or_init(Default::default).lock().expect("fft plan cache poisoned");
    plans
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plan {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

fn transpose(data: &[Complex64], out: &mut [Complex64], n: usize) {
    const BLOCK: usize = 32;
    for ib in (0..n).step_by(BLOCK) {
        for jb in (0..n).step_by(BLOCK) {
            for i in ib..(ib + BLOCK).min(n) {
                for j in jb..(jb + BLOCK).min(n) {
                    out[j * n + i] = data[i * n + j];
                }
            }
        }
    }
}

/// Unnormalised in-place 2-D transform (`inverse` selects the `e^{+2πi}` sign).
pub(crate) fn fft2_in_place(data: &mut [Complex64], n: usize, inverse: bool) {
    let plan = plan(n);
    let fft = if inverse { &plan.inverse } else { &plan.forward };
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let mut buffer = vec![Complex64::default(); n * n];
    fft.process_with_scratch(data, &mut scratch);
    transpose(data, &mut buffer, n);
    fft.process_with_scratch(&mut buffer, &mut scratch);
    transpose(&buffer, data, n);
}

pub fn forward_spectrum(f: &GridFunction) -> Spectrum {
    let n = f.size();
    let mut data = f.values.clone();
    fft2_in_place(&mut data, n, false);
    let norm = 1.0 / (n * n) as f64;
    for z in &mut data {
        *z *= norm;
    }
    Spectrum { level: f.level, side: f.side, coefficients: data }
}

pub fn inverse_spectrum(s: &Spectrum) -> GridFunction {
    let n = s.size();
    let mut data = s.coefficients.clone();
    fft2_in_place(&mut data, n, true);
    GridFunction::from_parts(s.level, s.side, data)
}

/// Single Fourier mode `e^{2πi(ξx+ηy)/side}` sampled on the lattice.
pub fn fourier_mode(level: u32, side: f64, xi: i64, eta: i64) -> Result<GridFunction> {
    let n = check_shape(level, side)?;
    let mut values = Vec::with_capacity(n * n);
    for i in 0..n as i64 {
        for j in 0..n as i64 {
            let phase = ((xi * i + eta * j).rem_euclid(n as i64)) as f64 / n as f64;
            values.push(Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase));
        }
    }
    Ok(GridFunction::from_parts(level, side, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_has_only_dc() {
        let f = GridFunction::from_fn(4, 1.0, |_, _| Complex64::new(1.0, 0.0)).unwrap();
        let s = forward_spectrum(&f);
        assert!((s.coefficient(0, 0) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        let rest: f64 = s.coefficients().iter().skip(1).map(|z| z.norm()).sum();
        assert!(rest < 1e-12);
    }

    #[test]
    fn single_mode_lands_on_its_frequency() {
        let f = fourier_mode(5, 1.0, 3, 4).unwrap();
        let s = forward_spectrum(&f);
        for xi in -16..16 {
            for eta in -16..16 {
                let expect = if (xi, eta) == (3, 4) { 1.0 } else { 0.0 };
                assert!((s.coefficient(xi, eta).norm() - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unit_coefficient_inverts_to_exponential() {
        let mut s = Spectrum::zeros(4, 1.0).unwrap();
        s.set_coefficient(1, 0, Complex64::new(1.0, 0.0));
        let f = inverse_spectrum(&s);
        let h = f.spacing();
        for i in 0..16 {
            for j in 0..16 {
                let want = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * i as f64 * h);
                assert!((f.get(i, j) - want).norm() < 1e-13);
            }
        }
        assert_eq!(inverse_spectrum(&Spectrum::zeros(4, 2.0).unwrap()).max_abs(), 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(GridFunction::zeros(2, 1.0).is_err());
        assert!(GridFunction::zeros(4, 0.0).is_err());
        let mut v = vec![Complex64::default(); 256];
        v[17] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(GridFunction::new(4, 1.0, v), Err(DmaxError::NonFinite(17))));
        assert!(GridFunction::new(4, 1.0, vec![Complex64::default(); 10]).is_err());
    }
}
