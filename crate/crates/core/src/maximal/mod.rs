//! Maximal operators: the directional singular-integral maximal function,
//! Kakeya maximal functions (multi-scale, single-scale and the smooth model),
//! the planar Hilbert maximal function, and the dyadic maximal functions.

mod directional;
mod dyadic_max;
mod hilbert;
mod kakeya;

pub use directional::{directional_sup, directional_sup_batch};
pub use dyadic_max::{
    dyadic_maximal_values, hardy_littlewood, m2, m2_values, strong_maximal, strong_maximal_values,
};
pub use hilbert::{
    hilbert_max, pv_line_integral, Annulus, BoxIndicator, FnPlane, PlaneFunction, PvQuadrature,
    PvSup,
};
pub use kakeya::{
    dyadic_epsilons, kakeya_batch, kakeya_max, kakeya_single_scale, line_integral_at, smooth_single_scale,
    smooth_single_scale_batch, LineStencil,
};

use crate::error::Result;
use crate::spectral::io::{self, Header};
use crate::spectral::GridFunction;

/// Pointwise supremum of magnitudes together with the index of the direction
/// that attained it (smallest index on ties).
#[derive(Clone, Debug, PartialEq)]
pub struct MaximalOutput {
    level: u32,
    side: f64,
    values: Vec<f64>,
    argmax: Vec<u32>,
}

impl MaximalOutput {
    pub(crate) fn empty(level: u32, side: f64) -> Self {
        let n = 1usize << (2 * level);
        Self { level, side, values: vec![0.0; n], argmax: vec![0; n] }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn argmax(&self) -> &[u32] {
        &self.argmax
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * (1usize << self.level) + j]
    }

    pub fn norm_l2(&self) -> f64 {
        let h = self.side / (1usize << self.level) as f64;
        crate::spectral::grid::real_norm_l2(&self.values, h * h)
    }

    pub fn to_grid(&self) -> GridFunction {
        GridFunction::from_real(self.level, self.side, &self.values)
            .expect("maximal output has the lattice shape")
    }

    /// Folds one direction's magnitudes into the running supremum.
    pub(crate) fn absorb(&mut self, magnitudes: impl Iterator<Item = f64>, direction: u32) {
        for ((v, a), m) in self.values.iter_mut().zip(self.argmax.iter_mut()).zip(magnitudes) {
            if m > *v || (m == *v && direction < *a) {
                *v = m;
                *a = direction;
            }
        }
    }

    /// Order-independent merge of two partial suprema.
    pub(crate) fn merge(mut self, other: Self) -> Self {
        for k in 0..self.values.len() {
            let (v, a) = (other.values[k], other.argmax[k]);
            if v > self.values[k] || (v == self.values[k] && a < self.argmax[k]) {
                self.values[k] = v;
                self.argmax[k] = a;
            }
        }
        self
    }

    pub fn write_dmax(&self, w: &mut impl std::io::Write) -> Result<()> {
        io::write_real_with_index(w, Header { level: self.level, side: self.side }, &self.values, &self.argmax)
    }

    pub fn read_dmax(r: &mut impl std::io::Read) -> Result<Self> {
        let (h, values, argmax) = io::read_real_with_index(r)?;
        Ok(Self { level: h.level, side: h.side, values, argmax })
    }
}
