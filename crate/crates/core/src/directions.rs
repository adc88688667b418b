//! Direction sets `Σ_N` of unit vectors in the plane.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, DmaxError, Result};
use crate::spectral::multiplier::check_unit;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionKind {
    Equispaced,
    Random,
    Lacunary,
    Explicit,
}

impl std::str::FromStr for DirectionKind {
    type Err = DmaxError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equispaced" => Ok(Self::Equispaced),
            "random" => Ok(Self::Random),
            "lacunary" => Ok(Self::Lacunary),
            "explicit" => Ok(Self::Explicit),
            _ => Err(invalid(format!("unknown direction kind {s}"))),
        }
    }
}

/// Full-circle unit vectors; `v` and `−v` are distinct members.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionSet {
    kind: DirectionKind,
    n: usize,
    seed: u64,
    vectors: Vec<[f64; 2]>,
}

fn from_angle(theta: f64) -> [f64; 2] {
    let (s, c) = theta.sin_cos();
    [c, s]
}

impl DirectionSet {
    /// Equispaced angles `2πj/N`, seeded uniform angles, or lacunary angles `2^{−j}`.
    pub fn make(kind: DirectionKind, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("a direction set needs N ≥ 1"));
        }
        let vectors = match kind {
            DirectionKind::Equispaced => {
                (0..n).map(|j| from_angle(TAU * j as f64 / n as f64)).collect()
            }
            DirectionKind::Random => {
                let mut rng = crate::rng::seeded(seed);
                (0..n).map(|_| from_angle(rng.gen_range(0.0..TAU))).collect()
            }
            DirectionKind::Lacunary => (1..=n).map(|j| from_angle(2f64.powi(-(j as i32)))).collect(),
            DirectionKind::Explicit => {
                return Err(invalid("explicit direction sets are built with from_vectors"))
            }
        };
        let set = Self { kind, n, seed, vectors };
        set.validate()?;
        Ok(set)
    }

    pub fn from_vectors(vectors: Vec<[f64; 2]>) -> Result<Self> {
        let set = Self { kind: DirectionKind::Explicit, n: vectors.len(), seed: 0, vectors };
        set.validate()?;
        Ok(set)
    }

    pub fn from_angles(angles: &[f64]) -> Result<Self> {
        Self::from_vectors(angles.iter().map(|&t| from_angle(t)).collect())
    }

    pub fn validate(&self) -> Result<()> {
        if self.vectors.is_empty() || self.n != self.vectors.len() {
            return Err(invalid("direction set must be nonempty and match its count"));
        }
        for &v in &self.vectors {
            check_unit(v)?;
        }
        let mut sorted: Vec<(f64, f64)> = self.vectors.iter().map(|v| (v[0], v[1])).collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("direction set contains repeated vectors"));
        }
        Ok(())
    }

    pub fn kind(&self) -> DirectionKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[[f64; 2]] {
        &self.vectors
    }

    pub fn get(&self, k: usize) -> [f64; 2] {
        self.vectors[k]
    }

    /// Angles in `[0, 2π)`.
    pub fn angles(&self) -> Vec<f64> {
        self.vectors.iter().map(|v| v[1].atan2(v[0]).rem_euclid(TAU)).collect()
    }

    /// Nearest member in Euclidean distance; ties go to the smallest index.
    pub fn nearest(&self, v: [f64; 2]) -> (usize, f64) {
        let mut best = (0usize, f64::INFINITY);
        for (k, w) in self.vectors.iter().enumerate() {
            let d = (v[0] - w[0]).hypot(v[1] - w[1]);
            if d < best.1 {
                best = (k, d);
            }
        }
        best
    }

    /// Indices of the `k` members closest to `v`, nearest first (index order on ties).
    pub fn nearest_k(&self, v: [f64; 2], k: usize) -> Vec<usize> {
        let mut order: Vec<(f64, usize)> = self
            .vectors
            .iter()
            .enumerate()
            .map(|(i, w)| ((v[0] - w[0]).hypot(v[1] - w[1]), i))
            .collect();
        order.sort_by(|a, b| a.partial_cmp(b).unwrap());
        order.into_iter().take(k).map(|(_, i)| i).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let set: Self = serde_json::from_str(text)?;
        set.validate()?;
        Ok(set)
    }
}

/// `nearest_direction(v, S)`: the closest member of `S` and its distance.
pub fn nearest_direction(v: [f64; 2], set: &DirectionSet) -> ([f64; 2], f64) {
    let (k, d) = set.nearest(v);
    (set.get(k), d)
}
