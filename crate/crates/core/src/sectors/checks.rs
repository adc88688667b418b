use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use super::clusters::{direction_turns, Cluster};
use super::grids::TURN;
use super::system::{check_band, classify, Sector};
use crate::directions::DirectionSet;
use crate::error::{invalid, Result};
use crate::maximal::strong_maximal_values;
use crate::spectral::lp::ball_projection;
use crate::spectral::multiplier::check_unit;
use crate::spectral::{forward_spectrum, inverse_spectrum, GridFunction, SmoothWindow, Spectrum};

/// A direction outside the admissible arc of a sector whose window does not
/// vanish on the sector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SelectionWitness {
    pub sector: u64,
    pub direction: usize,
    pub xi: i64,
    pub eta: i64,
    pub window_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelectionReport {
    pub n: u32,
    /// Whether directions in `B(ω) + 1/2` were also treated as admissible.
    pub antipodal_admissible: bool,
    /// `(ω, v)` pairs with `v` outside the admissible arc.
    pub pairs_checked: usize,
    pub violations: usize,
    pub witness: Option<SelectionWitness>,
}

impl SelectionReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Lattice frequencies of annulus `n`, grouped by sector index.
fn annulus_points(level: u32, side: f64, n: u32) -> Vec<Vec<(i64, i64)>> {
    let half = 1i64 << (level - 1);
    let mut out = vec![Vec::new(); 1usize << n];
    for xi in -half..half {
        for eta in -half..half {
            if let Some((m, k)) = classify(xi, eta, side) {
                if m == n {
                    out[k as usize].push((xi, eta));
                }
            }
        }
    }
    out
}

/// Spectral form of the selection property: `F̃_ω(·, v) ≡ 0` for every `F`
/// exactly when `ψ̂(v·ζ/side)` vanishes at every lattice frequency of `ω`.
/// With `antipodal_admissible` the directions of `B(ω) + 1/2` are exempt.
pub fn selection_check(
    level: u32,
    side: f64,
    sectors: &[Sector],
    set: &DirectionSet,
    window: &SmoothWindow,
    antipodal_admissible: bool,
) -> Result<SelectionReport> {
    window.validate()?;
    let n = match sectors.first() {
        Some(s) => s.n,
        None => return Err(invalid("selection check needs at least one sector")),
    };
    if sectors.iter().any(|s| s.n != n) {
        return Err(invalid("selection check takes the sectors of one annulus"));
    }
    let probe = GridFunction::zeros(level, side)?;
    check_band(&probe, n)?;
    let points = annulus_points(level, side, n);
    let turns = direction_turns(set);
    let vectors = set.vectors();
    let per_sector: Vec<(usize, usize, Option<SelectionWitness>)> = sectors
        .par_iter()
        .map(|s| {
            let mut pairs = 0;
            let mut bad = 0;
            let mut witness = None;
            for (d, (&a, v)) in turns.iter().zip(vectors).enumerate() {
                let admissible = s.b_contains(a)
                    || (antipodal_admissible && s.b_contains((a + TURN / 2) % TURN));
                if admissible {
                    continue;
                }
                pairs += 1;
                let hit = points[s.index as usize].iter().find_map(|&(xi, eta)| {
                    let w = window.eval((v[0] * xi as f64 + v[1] * eta as f64) / side);
                    (w != 0.0).then_some((xi, eta, w))
                });
                if let Some((xi, eta, w)) = hit {
                    bad += 1;
                    witness.get_or_insert(SelectionWitness {
                        sector: s.index,
                        direction: d,
                        xi,
                        eta,
                        window_value: w,
                    });
                }
            }
            (pairs, bad, witness)
        })
        .collect();
    let mut report = SelectionReport {
        n,
        antipodal_admissible,
        pairs_checked: 0,
        violations: 0,
        witness: None,
    };
    for (pairs, bad, witness) in per_sector {
        report.pairs_checked += pairs;
        report.violations += bad;
        if report.witness.is_none() {
            report.witness = witness;
        }
    }
    Ok(report)
}

/// `F̂_ω(ζ) ψ̂(v·ζ/side)` summed over the sectors selected by `active`.
fn windowed(
    spectrum: &Spectrum,
    active: impl Fn(u32, u64) -> bool,
    v: [f64; 2],
    window: &SmoothWindow,
) -> GridFunction {
    let side = spectrum.side();
    inverse_spectrum(&spectrum.multiplied_real(|xi, eta| match classify(xi, eta, side) {
        Some((n, k)) if active(n, k) => window.eval((v[0] * xi as f64 + v[1] * eta as f64) / side),
        _ => 0.0,
    }))
}

/// `F̃_ω(·, v)`: `F_ω` averaged along `v` against `ψ`.
pub fn smoothed_sector(
    f: &GridFunction,
    sector: &Sector,
    v: [f64; 2],
    window: &SmoothWindow,
) -> Result<GridFunction> {
    check_unit(v)?;
    check_band(f, sector.n)?;
    let s = forward_spectrum(f);
    Ok(windowed(&s, |n, k| n == sector.n && k == sector.index, v, window))
}

/// `M*F`: the strong maximal function of `|F|`.
pub fn star_maximal(f: &GridFunction) -> Vec<f64> {
    strong_maximal_values(&f.abs(), f.level())
}

fn angle_of(v: [f64; 2]) -> i64 {
    super::grids::to_turn_units(v[1].atan2(v[0]) / std::f64::consts::TAU)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    /// `max |F̃_ω(v) − F̃_ω(v′)| / (2^n ‖v − v′‖ M*F)`.
    pub ratio: f64,
    /// `max |F̃_ω(v) − F̃_ω(v′)|`.
    pub sup_difference: f64,
    pub samples: usize,
}

pub fn direction_stability_check(
    f: &GridFunction,
    sector: &Sector,
    v: [f64; 2],
    v_prime: [f64; 2],
    window: &SmoothWindow,
) -> Result<StabilityReport> {
    check_unit(v)?;
    check_unit(v_prime)?;
    window.validate()?;
    for u in [v, v_prime] {
        if !sector.b_contains(angle_of(u)) {
            return Err(invalid(format!("direction ({}, {}) is outside B(ω)", u[0], u[1])));
        }
    }
    let a = smoothed_sector(f, sector, v, window)?;
    let b = smoothed_sector(f, sector, v_prime, window)?;
    let diff = a.sub(&b).abs();
    let sup_difference = diff.iter().fold(0.0f64, |m, &d| m.max(d));
    let dist = (v[0] - v_prime[0]).hypot(v[1] - v_prime[1]);
    let star = star_maximal(f);
    let floor = 1e-12 * star.iter().fold(0.0f64, |m, &s| m.max(s));
    let scale = 2f64.powi(sector.n as i32) * dist;
    let mut report = StabilityReport { ratio: 0.0, sup_difference, samples: 0 };
    if scale == 0.0 {
        return Ok(report);
    }
    for (d, s) in diff.iter().zip(&star) {
        if *s > floor {
            report.samples += 1;
            report.ratio = report.ratio.max(d / (scale * s));
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClusterOperatorReport {
    /// `max |sup_v |Σ_{ω∈C} F̃_ω(v)| − sup_v |P_{m(v)} G|| / M*F`, with `G` the
    /// field frozen at `t(C)`.
    pub constant: f64,
    /// `max_v max |Σ_{ω∈C} F̃_ω(v) − P_{m(v)} G| / M*F`.
    pub per_direction_constant: f64,
    /// Directions of `S` lying in some `B(ω)` of the cluster.
    pub directions_used: usize,
    pub samples: usize,
}

/// Compares `sup_v |Σ_{ω∈C, v∈B(ω)} F̃_ω(v)|` with the frozen field
/// `G = Σ_{ω∈C} F̃_ω(t(C))` cut at `m(v)`, the largest annulus index among the
/// sectors of `C` whose `B` holds `v`.
pub fn cluster_operator_check(
    f: &GridFunction,
    sectors: &[Sector],
    cluster: &Cluster,
    set: &DirectionSet,
    window: &SmoothWindow,
) -> Result<ClusterOperatorReport> {
    window.validate()?;
    for &m in &cluster.members {
        check_band(f, sectors[m].n)?;
    }
    let members: BTreeSet<(u32, u64)> =
        cluster.members.iter().map(|&m| (sectors[m].n, sectors[m].index)).collect();
    let spectrum = forward_spectrum(f);
    let frozen = windowed(&spectrum, |n, k| members.contains(&(n, k)), cluster.t_direction(), window);
    let turns = direction_turns(set);
    let jobs: Vec<(usize, BTreeSet<(u32, u64)>, u32)> = turns
        .iter()
        .enumerate()
        .filter_map(|(d, &a)| {
            let active: BTreeSet<(u32, u64)> = cluster
                .members
                .iter()
                .filter(|&&m| sectors[m].b_contains(a))
                .map(|&m| (sectors[m].n, sectors[m].index))
                .collect();
            let m = active.iter().map(|p| p.0).max()?;
            Some((d, active, m))
        })
        .collect();
    let levels: BTreeSet<u32> = jobs.iter().map(|j| j.2).collect();
    let cuts: Vec<(u32, Vec<f64>)> =
        levels.iter().map(|&m| (m, ball_projection(&frozen, m as i32).abs())).collect();
    let len = f.values().len();
    let identity = || (vec![0.0f64; len], vec![0.0f64; len], vec![0.0f64; len]);
    let (lhs, rhs, per_v) = jobs
        .par_iter()
        .fold(identity, |(mut lhs, mut rhs, mut per_v), (d, active, m)| {
            let v = set.vectors()[*d];
            let here = windowed(&spectrum, |n, k| active.contains(&(n, k)), v, window);
            let cut = &cuts.iter().find(|c| c.0 == *m).unwrap().1;
            let proj = ball_projection(&frozen, *m as i32);
            for i in 0..len {
                let z = here.values()[i];
                lhs[i] = lhs[i].max(z.norm());
                rhs[i] = rhs[i].max(cut[i]);
                per_v[i] = per_v[i].max((z - proj.values()[i]).norm());
            }
            (lhs, rhs, per_v)
        })
        .reduce(identity, |a, b| {
            let zip = |x: Vec<f64>, y: Vec<f64>| x.iter().zip(&y).map(|(p, q)| p.max(*q)).collect();
            (zip(a.0, b.0), zip(a.1, b.1), zip(a.2, b.2))
        });
    let star = star_maximal(f);
    let floor = 1e-12 * star.iter().fold(0.0f64, |m, &s| m.max(s));
    let mut report = ClusterOperatorReport {
        constant: 0.0,
        per_direction_constant: 0.0,
        directions_used: jobs.len(),
        samples: 0,
    };
    for i in 0..len {
        if star[i] > floor {
            report.samples += 1;
            report.constant = report.constant.max((lhs[i] - rhs[i]).abs() / star[i]);
            report.per_direction_constant = report.per_direction_constant.max(per_v[i] / star[i]);
        }
    }
    Ok(report)
}
