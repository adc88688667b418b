use std::f64::consts::TAU;

use serde::Serialize;

use super::grids::{best_cover, make_circle_grids, rational, to_turn_units, Arc, GridInterval, TURN};
use crate::error::{invalid, Result};
use crate::spectral::lp::smooth_step;
use crate::spectral::{forward_spectrum, inverse_spectrum, GridFunction};

/// Largest annulus index with exact turn arithmetic for its sectors.
pub const MAX_SCALE: u32 = 24;

/// Sector `k` of `Ω_n`: physical radii `(2^{n−1}, 2^n]` and angles
/// `[k 2^{−n}, (k + 1) 2^{−n})` turns.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sector {
    pub n: u32,
    pub index: u64,
    /// Assigned `B(ω)`; the whole circle when `flagged`.
    pub b: GridInterval,
    /// `|10A(ω)| > 1/3`: the covering lemma does not apply.
    pub flagged: bool,
}

impl Sector {
    pub fn aperture(&self) -> i64 {
        TURN >> self.n
    }

    pub fn angle_lo(&self) -> i64 {
        self.index as i64 * self.aperture()
    }

    pub fn angle_hi(&self) -> i64 {
        self.angle_lo() + self.aperture()
    }

    /// `A(ω)` as a closed arc.
    pub fn a_arc(&self) -> Arc {
        Arc::new(self.angle_lo(), self.aperture())
    }

    /// `10A(ω) + π/2`.
    pub fn rotated_tenfold(&self) -> Arc {
        let a = self.a_arc();
        Arc::centered(a.center() + TURN / 4, 10 * self.aperture())
    }

    /// Bisector `d(ω)`.
    pub fn bisector(&self) -> [f64; 2] {
        let t = TAU * (self.angle_lo() as f64 + 0.5 * self.aperture() as f64) / TURN as f64;
        [t.cos(), t.sin()]
    }

    pub fn contains(&self, xi: i64, eta: i64, side: f64) -> bool {
        classify(xi, eta, side) == Some((self.n, self.index))
    }

    /// Whether a physical frequency lies in the enlarged sector `ω̃`: radii
    /// `[2^{n−2}, 2^{n+1}]` and twice the aperture about the same bisector.
    pub fn enlarged_contains(&self, zeta: [f64; 2]) -> bool {
        let r = zeta[0].hypot(zeta[1]);
        let lo = 2f64.powi(self.n as i32 - 2);
        let hi = 2f64.powi(self.n as i32 + 1);
        (lo..=hi).contains(&r) && self.angular_offset(zeta).abs() <= self.aperture() as f64 / TURN as f64
    }

    /// Signed angle from the bisector in turns, in `[−1/2, 1/2)`.
    fn angular_offset(&self, zeta: [f64; 2]) -> f64 {
        let a = zeta[1].atan2(zeta[0]) / TAU;
        let mid = (self.angle_lo() as f64 + 0.5 * self.aperture() as f64) / TURN as f64;
        (a - mid + 0.5).rem_euclid(1.0) - 0.5
    }

    /// Smooth bump `θ_ω` at a physical frequency: 1 on `ω`, 0 off `ω̃`.
    pub fn bump(&self, zeta: [f64; 2]) -> f64 {
        let r = zeta[0].hypot(zeta[1]);
        if r == 0.0 {
            return 0.0;
        }
        let l = r.log2();
        let n = self.n as f64;
        let radial = smooth_step(l - (n - 2.0)) * smooth_step((n + 1.0) - l);
        let half = 0.5 * self.aperture() as f64 / TURN as f64;
        let angular = smooth_step((2.0 * half - self.angular_offset(zeta).abs()) / half);
        radial * angular
    }

    /// Whether a direction (in turn units) lies in `B(ω)`.
    pub fn b_contains(&self, angle: i64) -> bool {
        self.b.contains_point(angle)
    }
}

/// Exact angle in turn units for axis and diagonal lattice points, rounded
/// otherwise (such points never sit on a sector boundary).
pub fn lattice_angle(xi: i64, eta: i64) -> i64 {
    let eighth = TURN / 8;
    let exact = match (xi.signum(), eta.signum()) {
        (1, 0) => Some(0),
        (0, 1) => Some(2 * eighth),
        (-1, 0) => Some(4 * eighth),
        (0, -1) => Some(6 * eighth),
        _ if xi.abs() == eta.abs() => Some(match (xi > 0, eta > 0) {
            (true, true) => eighth,
            (false, true) => 3 * eighth,
            (false, false) => 5 * eighth,
            (true, false) => 7 * eighth,
        }),
        _ => None,
    };
    exact.unwrap_or_else(|| to_turn_units((eta as f64).atan2(xi as f64) / TAU))
}

/// Annulus and sector index of a lattice frequency: `n ≥ 1` with
/// `2^{n−1} < |ζ|/side ≤ 2^n`, angle index `⌈a 2^n⌉ − 1` (boundary rays go to
/// the lower sector; angle 0 to sector 0). `None` inside the unit ball.
pub fn classify(xi: i64, eta: i64, side: f64) -> Option<(u32, u64)> {
    let r2 = (xi * xi + eta * eta) as f64;
    let s2 = side * side;
    if r2 <= s2 {
        return None;
    }
    // 4^{n−1} s² < r² ≤ 4^n s².
    let mut n = ((r2 / s2).log2() / 2.0).ceil().max(1.0) as u32;
    while r2 > 4f64.powi(n as i32) * s2 {
        n += 1;
    }
    while n > 1 && r2 <= 4f64.powi(n as i32 - 1) * s2 {
        n -= 1;
    }
    let a = lattice_angle(xi, eta);
    let ap = if n <= MAX_SCALE { TURN >> n } else { return None };
    let index = if a == 0 { 0 } else { ((a + ap - 1) / ap - 1) as u64 };
    Some((n, index))
}

/// `Ω_n`: `2^n` congruent sectors with `B(ω)` the shortest grid interval
/// containing `10A(ω) + π/2` (ties: grid order). When `|10A(ω)| > 1/3` the
/// whole circle is used and the sector is flagged.
pub fn make_sectors(n: u32) -> Result<Vec<Sector>> {
    if n == 0 || n > MAX_SCALE {
        return Err(invalid(format!("sector scale {n} outside 1..={MAX_SCALE}")));
    }
    let grids = make_circle_grids()?;
    let count = 1u64 << n;
    Ok((0..count)
        .map(|index| {
            let mut s = Sector { n, index, b: GridInterval { grid: 0, level: 0, k: 0 }, flagged: false };
            let target = s.rotated_tenfold();
            if target.length * 3 > TURN {
                s.flagged = true;
            } else {
                s.b = best_cover(&grids, &target);
            }
            s
        })
        .collect())
}

/// `F_ω`: Fourier coefficients outside `ω` zeroed.
pub fn sector_projection(f: &GridFunction, sector: &Sector) -> Result<GridFunction> {
    check_band(f, sector.n)?;
    let side = f.side();
    let s = forward_spectrum(f)
        .multiplied_real(|xi, eta| sector.contains(xi, eta, side) as u8 as f64);
    Ok(inverse_spectrum(&s))
}

/// `F_n`: the restriction to the annulus `2^{n−1} < |ζ| ≤ 2^n`; `n = 0` is the unit ball.
pub fn annulus_projection(f: &GridFunction, n: u32) -> GridFunction {
    let side = f.side();
    let s = forward_spectrum(f).multiplied_real(|xi, eta| {
        let here = classify(xi, eta, side).map(|c| c.0).unwrap_or(0);
        (here == n) as u8 as f64
    });
    inverse_spectrum(&s)
}

pub(crate) fn check_band(f: &GridFunction, n: u32) -> Result<()> {
    let nyquist = (f.size() / 2) as f64 / f.side();
    if 2f64.powi(n as i32) > nyquist {
        return Err(invalid(format!("sector scale 2^{n} beyond the lattice band {nyquist}")));
    }
    Ok(())
}

#[derive(Serialize)]
struct SectorRecord {
    n: u32,
    index: u64,
    angle_lo_turns: String,
    angle_hi_turns: String,
    grid_id: u8,
    b_lo: String,
    b_hi: String,
    flagged: bool,
}

/// JSON export: per sector its angles, grid and `B(ω)` as exact fractions of a turn.
pub fn sectors_to_json(sectors: &[Sector]) -> Result<String> {
    let records: Vec<SectorRecord> = sectors
        .iter()
        .map(|s| {
            let lo = if s.b.level == 0 { 0 } else { s.b.lo() };
            SectorRecord {
                n: s.n,
                index: s.index,
                angle_lo_turns: rational(s.angle_lo()),
                angle_hi_turns: rational(s.angle_hi()),
                grid_id: s.b.grid,
                b_lo: rational(lo),
                b_hi: rational(lo + s.b.length()),
                flagged: s.flagged,
            }
        })
        .collect();
    Ok(serde_json::to_string_pretty(&records)?)
}
