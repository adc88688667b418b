use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::MaximalOutput;
use crate::directions::DirectionSet;
use crate::error::{invalid, Result};
use crate::spectral::grid::fft2_in_place;
use crate::spectral::multiplier::check_unit;
use crate::spectral::{forward_spectrum, GridFunction, SmoothWindow};

/// Stencils with at most this many taps are applied by direct summation.
const DIRECT_LIMIT: usize = 24;

/// Trapezoid nodes on `[−ε, ε]` with step at most half the grid spacing.
fn trapezoid_nodes(half_length: f64, spacing: f64) -> (usize, f64) {
    let m = ((4.0 * half_length / spacing) - 1e-9).ceil().max(1.0) as usize;
    (m, 2.0 * half_length / m as f64)
}

/// Bilinear interpolation weights for a point offset `(px, py)` in cell units.
fn bilinear(px: f64, py: f64) -> [(i64, i64, f64); 4] {
    let (i0, j0) = (px.floor(), py.floor());
    let (a, b) = (px - i0, py - j0);
    let (i0, j0) = (i0 as i64, j0 as i64);
    [
        (i0, j0, (1.0 - a) * (1.0 - b)),
        (i0 + 1, j0, a * (1.0 - b)),
        (i0, j0 + 1, (1.0 - a) * b),
        (i0 + 1, j0 + 1, a * b),
    ]
}

/// Line integral `∫_{|t|<ε} f(x + tv) dt` as a fixed linear combination of
/// periodically shifted lattice values.
#[derive(Clone, Debug, PartialEq)]
pub struct LineStencil {
    n: usize,
    taps: Vec<(usize, usize, f64)>,
}

impl LineStencil {
    pub fn segment(n: usize, spacing: f64, v: [f64; 2], half_length: f64, normalize: bool) -> Self {
        let (m, step) = trapezoid_nodes(half_length, spacing);
        let scale = if normalize { 1.0 / (2.0 * half_length) } else { 1.0 };
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        let ni = n as i64;
        for k in 0..=m {
            let t = -half_length + k as f64 * step;
            let w = if k == 0 || k == m { 0.5 * step } else { step } * scale;
            for (di, dj, b) in bilinear(t * v[0] / spacing, t * v[1] / spacing) {
                if b != 0.0 {
                    let key = (di.rem_euclid(ni) as usize, dj.rem_euclid(ni) as usize);
                    *merged.entry(key).or_insert(0.0) += w * b;
                }
            }
        }
        Self { n, taps: merged.into_iter().map(|((i, j), w)| (i, j, w)).collect() }
    }

    /// Wrapped offsets and weights.
    pub fn taps(&self) -> &[(usize, usize, f64)] {
        &self.taps
    }

    pub fn total_weight(&self) -> f64 {
        self.taps.iter().map(|t| t.2).sum()
    }

    fn apply_direct(&self, values: &[Complex64], out: &mut [Complex64]) {
        let n = self.n;
        out.iter_mut().for_each(|z| *z = Complex64::default());
        for &(di, dj, w) in &self.taps {
            for i in 0..n {
                let src = &values[((i + di) % n) * n..][..n];
                let dst = &mut out[i * n..][..n];
                let split = n - dj;
                for (d, s) in dst[..split].iter_mut().zip(&src[dj..]) {
                    *d += s * w;
                }
                for (d, s) in dst[split..].iter_mut().zip(&src[..dj]) {
                    *d += s * w;
                }
            }
        }
    }

    /// Fourier multiplier of the stencil on the lattice, FFT order.
    fn multiplier(&self) -> Vec<Complex64> {
        let n = self.n;
        let mut kernel = vec![Complex64::default(); n * n];
        for &(di, dj, w) in &self.taps {
            kernel[di * n + dj] += w;
        }
        fft2_in_place(&mut kernel, n, true);
        kernel
    }
}

/// Pointwise line integral at lattice point `(i, j)` with the same trapezoid
/// and bilinear rule, evaluated directly.
pub fn line_integral_at(
    f: &GridFunction,
    i: usize,
    j: usize,
    v: [f64; 2],
    half_length: f64,
    normalize: bool,
) -> Complex64 {
    let h = f.spacing();
    let (m, step) = trapezoid_nodes(half_length, h);
    let mut total = Complex64::default();
    for k in 0..=m {
        let t = -half_length + k as f64 * step;
        let w = if k == 0 || k == m { 0.5 * step } else { step };
        let value: Complex64 = bilinear(t * v[0] / h, t * v[1] / h)
            .iter()
            .map(|&(di, dj, b)| f.get_wrapped(i as i64 + di, j as i64 + dj) * b)
            .sum();
        total += value * w;
    }
    if normalize {
        total / (2.0 * half_length)
    } else {
        total
    }
}

/// Inputs prepared for repeated stencil application. Real inputs are packed
/// in pairs as `f_{2k} + i f_{2k+1}`; the stencils are real, so the real and
/// imaginary parts of each result separate again.
struct Packed {
    count: usize,
    real: bool,
    values: Vec<Vec<Complex64>>,
    spectra: Vec<Vec<Complex64>>,
}

impl Packed {
    fn new(inputs: &[GridFunction], need_spectra: bool) -> Self {
        let real = inputs.iter().all(|f| f.values().iter().all(|z| z.im == 0.0));
        let values: Vec<Vec<Complex64>> = if real {
            inputs
                .chunks(2)
                .map(|pair| match pair {
                    [a, b] => a
                        .values()
                        .iter()
                        .zip(b.values())
                        .map(|(x, y)| Complex64::new(x.re, y.re))
                        .collect(),
                    [a] => a.values().to_vec(),
                    _ => unreachable!(),
                })
                .collect()
        } else {
            inputs.iter().map(|f| f.values().to_vec()).collect()
        };
        let spectra = if need_spectra {
            let n2 = values[0].len() as f64;
            values
                .iter()
                .map(|v| {
                    let n = (v.len() as f64).sqrt() as usize;
                    let mut s = v.clone();
                    fft2_in_place(&mut s, n, false);
                    s.iter_mut().for_each(|z| *z /= n2);
                    s
                })
                .collect()
        } else {
            Vec::new()
        };
        Self { count: inputs.len(), real, values, spectra }
    }

    fn absorb(&self, p: usize, result: &[Complex64], outputs: &mut [MaximalOutput], direction: u32) {
        if self.real {
            outputs[2 * p].absorb(result.iter().map(|z| z.re.abs()), direction);
            if 2 * p + 1 < self.count {
                outputs[2 * p + 1].absorb(result.iter().map(|z| z.im.abs()), direction);
            }
        } else {
            outputs[p].absorb(result.iter().map(|z| z.norm()), direction);
        }
    }
}

fn canonical(v: [f64; 2]) -> [f64; 2] {
    if v[1] > 0.0 || (v[1] == 0.0 && v[0] > 0.0) {
        v
    } else {
        [-v[0], -v[1]]
    }
}

/// Groups direction indices whose vectors are antipodal: symmetric segments
/// give them identical line integrals. Each group is represented by the
/// canonical form of its smallest-index member.
fn antipodal_groups(set: &DirectionSet) -> Vec<([f64; 2], Vec<u32>)> {
    let mut groups: Vec<([f64; 2], Vec<u32>)> = Vec::new();
    for (k, &v) in set.vectors().iter().enumerate() {
        let c = canonical(v);
        match groups.iter_mut().find(|g| (g.0[0] - c[0]).hypot(g.0[1] - c[1]) < 1e-12) {
            Some(g) => g.1.push(k as u32),
            None => groups.push((c, vec![k as u32])),
        }
    }
    groups
}

fn check_inputs(inputs: &[GridFunction]) -> Result<()> {
    let first = inputs.first().ok_or_else(|| invalid("no input functions"))?;
    if inputs.iter().any(|f| !f.same_shape(first)) {
        return Err(invalid("input functions differ in shape"));
    }
    Ok(())
}

/// Sup over directions and half-lengths of `|∫_{|t|<ε} f(x + tv) dt|`, divided
/// by `2ε` when `normalize` is set, for a batch of inputs.
pub fn kakeya_batch(
    inputs: &[GridFunction],
    set: &DirectionSet,
    half_lengths: &[f64],
    normalize: bool,
) -> Result<Vec<MaximalOutput>> {
    check_inputs(inputs)?;
    if half_lengths.is_empty() {
        return Err(invalid("empty epsilon list"));
    }
    if half_lengths.iter().any(|&e| !(e.is_finite() && e > 0.0)) {
        return Err(invalid("segment half-lengths must be positive"));
    }
    let (level, side, n, h) =
        (inputs[0].level(), inputs[0].side(), inputs[0].size(), inputs[0].spacing());
    let groups = antipodal_groups(set);
    let stencil = |v: [f64; 2], eps: f64| LineStencil::segment(n, h, v, eps, normalize);
    let need_spectra = groups
        .iter()
        .any(|g| half_lengths.iter().any(|&e| stencil(g.0, e).taps.len() > DIRECT_LIMIT));
    let packed = Packed::new(inputs, need_spectra);
    let empty = || vec![MaximalOutput::empty(level, side); inputs.len()];
    let outputs = groups
        .par_iter()
        .fold(empty, |mut acc, (v, members)| {
            let mut result = vec![Complex64::default(); n * n];
            for &eps in half_lengths {
                let st = stencil(*v, eps);
                let kernel = (st.taps.len() > DIRECT_LIMIT).then(|| st.multiplier());
                for p in 0..packed.values.len() {
                    match &kernel {
                        Some(k) => {
                            for ((r, s), m) in result.iter_mut().zip(&packed.spectra[p]).zip(k) {
                                *r = s * m;
                            }
                            fft2_in_place(&mut result, n, true);
                        }
                        None => st.apply_direct(&packed.values[p], &mut result),
                    }
                    packed.absorb(p, &result, &mut acc, members[0]);
                }
            }
            acc
        })
        .reduce(empty, |a, b| a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect());
    Ok(outputs)
}

fn check_dyadic(epsilons: &[f64], spacing: f64, side: f64) -> Result<()> {
    if epsilons.is_empty() {
        return Err(invalid("empty epsilon list"));
    }
    for &e in epsilons {
        if !(e > 0.0 && e.log2().fract() == 0.0) {
            return Err(invalid(format!("epsilon {e} is not a power of two")));
        }
        if e < spacing * (1.0 - 1e-12) || e > side / 2.0 {
            return Err(invalid(format!("epsilon {e} outside [{spacing}, {}]", side / 2.0)));
        }
    }
    Ok(())
}

/// Every power of two in `[spacing, side/2]`.
pub fn dyadic_epsilons(level: u32, side: f64) -> Vec<f64> {
    let spacing = side / (1u64 << level) as f64;
    let lo = (spacing.log2() - 1e-12).ceil() as i32;
    let hi = ((side / 2.0).log2() + 1e-12).floor() as i32;
    (lo..=hi).map(|k| 2f64.powi(k)).collect()
}

/// `M_N^* f`: sup over `v ∈ S` and dyadic `ε` of `|(2ε)^{−1} ∫_{|t|<ε} f(x + tv) dt|`.
pub fn kakeya_max(f: &GridFunction, set: &DirectionSet, epsilons: &[f64]) -> Result<MaximalOutput> {
    check_dyadic(epsilons, f.spacing(), f.side())?;
    Ok(kakeya_batch(std::slice::from_ref(f), set, epsilons, true)?.pop().unwrap())
}

/// `M_N^0 f`: sup over `v ∈ S` of `|∫_{|t|<1} f(x + tv) dt|`.
pub fn kakeya_single_scale(f: &GridFunction, set: &DirectionSet) -> Result<MaximalOutput> {
    if f.side() < 4.0 {
        return Err(invalid("single-scale Kakeya needs side ≥ 4"));
    }
    Ok(kakeya_batch(std::slice::from_ref(f), set, &[1.0], false)?.pop().unwrap())
}

/// `M₀F`: sup over `v ∈ S` of `|∫ F(x + tv) ψ(t) dt|`, computed spectrally as
/// the multiplier `ψ̂(v·(ξ, η)/side)`.
pub fn smooth_single_scale(
    f: &GridFunction,
    set: &DirectionSet,
    window: &SmoothWindow,
) -> Result<MaximalOutput> {
    Ok(smooth_single_scale_batch(std::slice::from_ref(f), set, window)?.pop().unwrap())
}

pub fn smooth_single_scale_batch(
    inputs: &[GridFunction],
    set: &DirectionSet,
    window: &SmoothWindow,
) -> Result<Vec<MaximalOutput>> {
    check_inputs(inputs)?;
    window.validate()?;
    for &v in set.vectors() {
        check_unit(v)?;
    }
    let (level, side) = (inputs[0].level(), inputs[0].side());
    let spectra: Vec<_> = inputs.iter().map(forward_spectrum).collect();
    let empty = || vec![MaximalOutput::empty(level, side); inputs.len()];
    Ok(set
        .vectors()
        .par_iter()
        .enumerate()
        .fold(empty, |mut acc, (k, &v)| {
            for (out, s) in acc.iter_mut().zip(&spectra) {
                let g = crate::spectral::inverse_spectrum(&s.multiplied_real(|xi, eta| {
                    window.eval((v[0] * xi as f64 + v[1] * eta as f64) / side)
                }));
                out.absorb(g.values().iter().map(|z| z.norm()), k as u32);
            }
            acc
        })
        .reduce(empty, |a, b| a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect()))
}
