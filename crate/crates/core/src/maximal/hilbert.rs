use rayon::prelude::*;

use crate::directions::DirectionSet;
use crate::error::{invalid, Result};
use crate::quadrature::{integrate_piecewise, Integral, Tolerance};
use crate::spectral::multiplier::check_unit;

/// A real function on the plane supported in the closed ball of radius
/// `support_radius()` about the origin.
pub trait PlaneFunction: Sync {
    fn eval(&self, x: f64, y: f64) -> f64;

    fn support_radius(&self) -> f64;

    /// Smallest geometric length of the function; the principal-value cutoff
    /// must stay below it.
    fn feature_scale(&self) -> f64 {
        self.support_radius()
    }

    /// Parameters `t` at which `t ↦ f(p + tv)` fails to be smooth.
    fn line_breakpoints(&self, _p: [f64; 2], _v: [f64; 2]) -> Vec<f64> {
        Vec::new()
    }
}

/// Indicator of the closed rectangle `[x0, x1] × [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxIndicator {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl PlaneFunction for BoxIndicator {
    fn eval(&self, x: f64, y: f64) -> f64 {
        ((self.x0..=self.x1).contains(&x) && (self.y0..=self.y1).contains(&y)) as u8 as f64
    }

    fn support_radius(&self) -> f64 {
        [(self.x0, self.y0), (self.x0, self.y1), (self.x1, self.y0), (self.x1, self.y1)]
            .iter()
            .map(|(x, y)| x.hypot(*y))
            .fold(0.0, f64::max)
    }

    fn feature_scale(&self) -> f64 {
        (self.x1 - self.x0).min(self.y1 - self.y0)
    }

    fn line_breakpoints(&self, p: [f64; 2], v: [f64; 2]) -> Vec<f64> {
        let mut out = Vec::new();
        for (pc, vc, edges) in [(p[0], v[0], [self.x0, self.x1]), (p[1], v[1], [self.y0, self.y1])] {
            if vc != 0.0 {
                out.extend(edges.iter().map(|e| (e - pc) / vc));
            }
        }
        out
    }
}

/// Radial power `‖x‖^{−power}` restricted to the annulus `inner ≤ ‖x‖ ≤ outer`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Annulus {
    pub inner: f64,
    pub outer: f64,
    pub power: f64,
}

impl Annulus {
    pub fn radial(&self, r: f64) -> f64 {
        if (self.inner..=self.outer).contains(&r) {
            r.powf(-self.power)
        } else {
            0.0
        }
    }
}

impl PlaneFunction for Annulus {
    fn eval(&self, x: f64, y: f64) -> f64 {
        self.radial(x.hypot(y))
    }

    fn support_radius(&self) -> f64 {
        self.outer
    }

    fn feature_scale(&self) -> f64 {
        self.inner.min(self.outer - self.inner)
    }

    fn line_breakpoints(&self, p: [f64; 2], v: [f64; 2]) -> Vec<f64> {
        // |p + tv|² = r²  ⟺  t² + 2t(p·v) + |p|² − r² = 0.
        let b = p[0] * v[0] + p[1] * v[1];
        let c0 = p[0] * p[0] + p[1] * p[1];
        let mut out = Vec::new();
        for r in [self.inner, self.outer] {
            let disc = b * b - (c0 - r * r);
            if disc >= 0.0 {
                let s = disc.sqrt();
                out.extend([-b - s, -b + s]);
            }
        }
        out
    }
}

/// A closure-backed plane function.
pub struct FnPlane<F> {
    pub f: F,
    pub radius: f64,
    pub feature: f64,
}

impl<F: Fn(f64, f64) -> f64 + Sync> PlaneFunction for FnPlane<F> {
    fn eval(&self, x: f64, y: f64) -> f64 {
        (self.f)(x, y)
    }

    fn support_radius(&self) -> f64 {
        self.radius
    }

    fn feature_scale(&self) -> f64 {
        self.feature
    }
}

/// Principal-value quadrature: `|t| < cutoff` is excluded, the rest is
/// integrated adaptively.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PvQuadrature {
    pub cutoff: f64,
    pub tolerance: Tolerance,
}

impl Default for PvQuadrature {
    fn default() -> Self {
        Self { cutoff: 1e-9, tolerance: Tolerance::default() }
    }
}

impl PvQuadrature {
    pub fn check(&self, f: &impl PlaneFunction) -> Result<()> {
        if !(self.cutoff > 0.0 && self.cutoff < f.feature_scale()) {
            return Err(invalid(format!(
                "principal-value cutoff {} must lie in (0, {})",
                self.cutoff,
                f.feature_scale()
            )));
        }
        Ok(())
    }
}

/// `∫_{cutoff ≤ |t| ≤ T} f(p + tv) dt/t`, written as `∫ (f(p + tv) − f(p − tv))/t`
/// over `[cutoff, T]` with `T = ‖p‖ + support radius`.
pub fn pv_line_integral(f: &impl PlaneFunction, p: [f64; 2], v: [f64; 2], q: &PvQuadrature) -> Integral {
    let reach = p[0].hypot(p[1]) + f.support_radius();
    if reach <= q.cutoff {
        return Integral { value: 0.0, error: 0.0, converged: true };
    }
    let breaks: Vec<f64> = f.line_breakpoints(p, v).into_iter().map(f64::abs).collect();
    let g = |t: f64| {
        (f.eval(p[0] + t * v[0], p[1] + t * v[1]) - f.eval(p[0] - t * v[0], p[1] - t * v[1])) / t
    };
    integrate_piecewise(g, q.cutoff, reach, &breaks, q.tolerance)
}

/// `H_N^* f` at one point: sup of `|p.v.|` over the direction set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PvSup {
    pub value: f64,
    pub argmax: u32,
    pub converged: bool,
}

/// `H_N^* f(p) = sup_{v ∈ S} |p.v. ∫ f(p + tv) dt/t|` at each evaluation point.
pub fn hilbert_max(
    f: &impl PlaneFunction,
    set: &DirectionSet,
    points: &[[f64; 2]],
    q: &PvQuadrature,
) -> Result<Vec<PvSup>> {
    q.check(f)?;
    for &v in set.vectors() {
        check_unit(v)?;
    }
    Ok(points
        .par_iter()
        .map(|&p| {
            let mut best = PvSup { value: 0.0, argmax: 0, converged: true };
            for (k, &v) in set.vectors().iter().enumerate() {
                let r = pv_line_integral(f, p, v, q);
                best.converged &= r.converged;
                if r.value.abs() > best.value {
                    best.value = r.value.abs();
                    best.argmax = k as u32;
                }
            }
            best
        })
        .collect())
}
