use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;

use crate::directions::{DirectionKind, DirectionSet};
use crate::error::{invalid, Result};
use crate::maximal::{pv_line_integral, Annulus, PvQuadrature};

/// `f(x) = ‖x‖^{−1} 1_{r0 ≤ ‖x‖ ≤ N/c0}` with its exact `L²` norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extremal {
    pub annulus: Annulus,
    pub norm: f64,
}

impl Extremal {
    pub fn inner(&self) -> f64 {
        self.annulus.inner
    }

    pub fn outer(&self) -> f64 {
        self.annulus.outer
    }

    pub fn eval_radial(&self, r: f64) -> f64 {
        self.annulus.radial(r)
    }

    /// `|p.v.|` along the radius through a point at distance `ρ`:
    /// `ρ^{−1} |ln((R² − ρ²)/R²) − ln((ρ² − r0²)/r0²)|`.
    pub fn radial_closed_form(&self, rho: f64) -> f64 {
        let (r0, big) = (self.inner(), self.outer());
        (((big * big - rho * rho) / (big * big)).ln() - ((rho * rho - r0 * r0) / (r0 * r0)).ln()).abs() / rho
    }
}

/// `‖f‖₂ = √(2π ln(R/r0))` with `R = N/c0`.
pub fn extremal_function(n: f64, r0: f64, c0: f64) -> Result<Extremal> {
    if !(r0 > 0.0 && c0 > 0.0 && n > 0.0) {
        return Err(invalid("extremal function needs positive N, r0 and c0"));
    }
    let outer = n / c0;
    if !(outer > r0) {
        return Err(invalid(format!("empty annulus: N/c0 = {outer} does not exceed r0 = {r0}")));
    }
    Ok(Extremal {
        annulus: Annulus { inner: r0, outer, power: 1.0 },
        norm: (TAU * (outer / r0).ln()).sqrt(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LowerBoundConfig {
    pub n_list: Vec<usize>,
    pub r0: f64,
    pub c0: f64,
    /// Log-spaced radii per octave.
    pub radii_per_octave: usize,
    /// Angles over the full circle; at least four are taken per symmetry cell.
    pub angles: usize,
    /// Directions of `Σ_N` closest to the radius (up to sign) entering the sup.
    pub window: usize,
    /// Directions whose line passes within `grazing·r0` of the origin also enter.
    pub grazing: f64,
    pub quadrature: PvQuadrature,
}

impl Default for LowerBoundConfig {
    fn default() -> Self {
        Self {
            n_list: (6..=12).map(|k| 1usize << k).collect(),
            r0: 1.0,
            c0: 4.0,
            radii_per_octave: 64,
            angles: 512,
            window: 8,
            grazing: 3.0,
            quadrature: PvQuadrature::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBoundRow {
    pub n: usize,
    pub r0: f64,
    pub c0: f64,
    pub f_norm: f64,
    /// `‖H_N^* f‖₂` restricted to the support annulus.
    pub tf_norm: f64,
    pub ratio: f64,
    /// Radii of `[c0 r0, N/c0]` where `H_N^* f < ln ρ/(4ρ)` at some sampled angle.
    pub pointwise_violations: usize,
    pub valid_radii: usize,
    /// Every line integral met the quadrature tolerance.
    pub converged: bool,
}

/// Sup of `|p.v. ∫ f(p + tv) dt/t|` over the members of `set` whose line
/// through `p` passes within `grazing·r0` of the origin, together with the
/// `window` members closest to `±p/‖p‖`. The maximising line grazes the
/// inner circle or runs along the radius, so both families are covered.
fn windowed_sup(
    f: &Extremal,
    set: &DirectionSet,
    p: [f64; 2],
    window: usize,
    grazing: f64,
    q: &PvQuadrature,
) -> (f64, bool) {
    let rho = p[0].hypot(p[1]);
    let u = [p[0] / rho, p[1] / rho];
    let reach = grazing * f.inner();
    let mut order: Vec<(f64, usize)> = set
        .vectors()
        .iter()
        .enumerate()
        .map(|(k, w)| {
            let d = (u[0] - w[0]).hypot(u[1] - w[1]).min((u[0] + w[0]).hypot(u[1] + w[1]));
            (d, k)
        })
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut best = 0.0f64;
    let mut converged = true;
    for (rank, &(_, k)) in order.iter().enumerate() {
        let v = set.get(k);
        let distance = (p[0] * v[1] - p[1] * v[0]).abs();
        if rank >= window && distance > reach {
            continue;
        }
        let r = pv_line_integral(&f.annulus, p, v, q);
        converged &= r.converged;
        best = best.max(r.value.abs());
    }
    (best, converged)
}

/// One row of the optimality experiment for `N` equispaced directions.
pub fn lower_bound_row(n: usize, cfg: &LowerBoundConfig) -> Result<LowerBoundRow> {
    let f = extremal_function(n as f64, cfg.r0, cfg.c0)?;
    cfg.quadrature.check(&f.annulus)?;
    let set = DirectionSet::make(DirectionKind::Equispaced, n, 0)?;
    let (r0, big) = (f.inner(), f.outer());
    let span = (big / r0).ln();
    let radii = ((cfg.radii_per_octave as f64 * span / 2f64.ln()).ceil() as usize).max(1);
    let du = span / radii as f64;
    // The set is invariant under rotation by 2π/N, so one angular cell suffices.
    let per_cell = (cfg.angles / n).max(4);
    let cell = TAU / n as f64;
    let samples: Vec<(usize, usize)> =
        (0..radii).flat_map(|k| (0..per_cell).map(move |j| (k, j))).collect();
    let values: Vec<(f64, bool)> = samples
        .par_iter()
        .map(|&(k, j)| {
            let rho = r0 * ((k as f64 + 0.5) * du).exp();
            let theta = cell * j as f64 / per_cell as f64;
            windowed_sup(
                &f,
                &set,
                [rho * theta.cos(), rho * theta.sin()],
                cfg.window,
                cfg.grazing,
                &cfg.quadrature,
            )
        })
        .collect();
    let mut energy = 0.0;
    let mut violations = 0;
    let mut valid = 0;
    let mut converged = true;
    for k in 0..radii {
        let rho = r0 * ((k as f64 + 0.5) * du).exp();
        let row = &values[k * per_cell..(k + 1) * per_cell];
        let mean_sq = row.iter().map(|v| v.0 * v.0).sum::<f64>() / per_cell as f64;
        // Midpoint rule in u = ln ρ: dA = ρ² du dθ.
        energy += TAU * mean_sq * rho * rho * du;
        converged &= row.iter().all(|v| v.1);
        if rho >= cfg.c0 * r0 && rho <= big {
            valid += 1;
            let bound = rho.ln() / (4.0 * rho);
            if row.iter().any(|v| v.0 < bound) {
                violations += 1;
            }
        }
    }
    let tf_norm = energy.sqrt();
    Ok(LowerBoundRow {
        n,
        r0: cfg.r0,
        c0: cfg.c0,
        f_norm: f.norm,
        tf_norm,
        ratio: tf_norm / f.norm,
        pointwise_violations: violations,
        valid_radii: valid,
        converged,
    })
}

pub fn lower_bound_experiment(cfg: &LowerBoundConfig) -> Result<Vec<LowerBoundRow>> {
    cfg.n_list.iter().map(|&n| lower_bound_row(n, cfg)).collect()
}

/// Least-squares `y ≈ c·x` through the origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProportionalFit {
    pub c: f64,
    /// `(Σ (y − c x)² / Σ y²)^{1/2}`.
    pub rms_relative: f64,
    /// `max |y − c x| / |y|`.
    pub max_relative: f64,
    /// Fewer than two points.
    pub degenerate: bool,
}

pub fn fit_proportional(x: &[f64], y: &[f64]) -> ProportionalFit {
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let c = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let syy: f64 = y.iter().map(|b| b * b).sum();
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - c * a).powi(2)).sum();
    let max_relative = x
        .iter()
        .zip(y)
        .filter(|(_, b)| **b != 0.0)
        .map(|(a, b)| ((b - c * a) / b).abs())
        .fold(0.0, f64::max);
    ProportionalFit {
        c,
        rms_relative: if syy > 0.0 { (sse / syy).sqrt() } else { 0.0 },
        max_relative,
        degenerate: x.len() < 2,
    }
}

/// Ratio column against `c·ln N`.
pub fn fit_log(rows: &[LowerBoundRow]) -> ProportionalFit {
    let x: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    fit_proportional(&x, &y)
}

pub fn write_lower_bound_csv(rows: &[LowerBoundRow], w: impl std::io::Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let err = |e: csv::Error| crate::DmaxError::Format(e.to_string());
    out.write_record(["N", "r0", "c0", "f_norm", "Tf_norm", "ratio", "pointwise_violations"])
        .map_err(err)?;
    for r in rows {
        out.write_record(&[
            r.n.to_string(),
            r.r0.to_string(),
            r.c0.to_string(),
            r.f_norm.to_string(),
            r.tf_norm.to_string(),
            r.ratio.to_string(),
            r.pointwise_violations.to_string(),
        ])
        .map_err(err)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maximal::{hilbert_max, PlaneFunction};

    #[test]
    fn extremal_values_and_norm() {
        let f = extremal_function(1e4, 1.0, 100.0).unwrap();
        assert!((f.norm.powi(2) - TAU * 100f64.ln()).abs() < 1e-12);
        assert_eq!(f.eval_radial(2.0), 0.5);
        assert_eq!(f.annulus.eval(1e4, 0.0), 0.0);
        assert!(extremal_function(50.0, 1.0, 100.0).is_err());
    }

    #[test]
    fn norm_matches_polar_quadrature() {
        let f = extremal_function(400.0, 1.0, 4.0).unwrap();
        let r = crate::quadrature::integrate(
            |r| TAU * r * f.eval_radial(r).powi(2),
            1.0,
            100.0,
            Default::default(),
        );
        assert!((r.value.sqrt() - f.norm).abs() < 1e-8);
    }

    #[test]
    fn single_direction_closed_form() {
        let f = extremal_function(1e5, 1.0, 100.0).unwrap();
        let set = DirectionSet::from_vectors(vec![[1.0, 0.0]]).unwrap();
        let got = hilbert_max(&f.annulus, &set, &[[200.0, 0.0]], &PvQuadrature::default()).unwrap();
        let exact = f.radial_closed_form(200.0);
        assert!(((got[0].value - exact) / exact).abs() < 1e-3);
    }

    #[test]
    fn window_attains_the_full_sup() {
        let q = PvQuadrature::default();
        for n in [64usize, 512] {
            let f = extremal_function(n as f64, 1.0, 4.0).unwrap();
            let set = DirectionSet::make(DirectionKind::Equispaced, n, 0).unwrap();
            let cell = TAU / n as f64;
            let big = f.outer();
            let points: Vec<[f64; 2]> = (0..40)
                .map(|k| (big - 1e-3).powf(k as f64 / 39.0).max(1.0 + 1e-3))
                .flat_map(|r| [0.0, 0.3, 0.7].map(|t: f64| [r * (t * cell).cos(), r * (t * cell).sin()]))
                .collect();
            let full = hilbert_max(&f.annulus, &set, &points, &q).unwrap();
            for (p, full) in points.iter().zip(&full) {
                let (w, _) = windowed_sup(&f, &set, *p, 8, 3.0, &q);
                assert!((w - full.value).abs() <= 1e-12 * full.value, "{p:?}: {w} vs {}", full.value);
            }
        }
    }

    #[test]
    fn pointwise_bound_on_a_small_case() {
        let cfg = LowerBoundConfig { n_list: vec![64], radii_per_octave: 16, ..Default::default() };
        let rows = lower_bound_experiment(&cfg).unwrap();
        let r = &rows[0];
        assert!(r.converged);
        assert!(r.valid_radii > 0);
        assert_eq!(r.pointwise_violations, 0);
        assert!(r.ratio > 1.0);
    }

    #[test]
    fn proportional_fit() {
        let fit = fit_proportional(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]);
        assert!((fit.c - 2.0).abs() < 1e-15 && fit.max_relative < 1e-15);
        assert!(fit_proportional(&[1.0], &[3.0]).degenerate);
    }
}
