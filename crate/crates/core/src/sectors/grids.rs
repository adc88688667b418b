use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{DmaxError, Result};

/// Angles are exact integers in units of `1/TURN` of a full turn.
pub const TURN: i64 = 3 << 32;

/// Finest level representable exactly.
pub const MAX_LEVEL: u32 = 32;

/// A closed arc `[start, start + length]` in turn units, `0 ≤ length ≤ TURN`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Arc {
    pub start: i64,
    pub length: i64,
}

impl Arc {
    pub fn new(start: i64, length: i64) -> Self {
        Self { start: start.rem_euclid(TURN), length: length.clamp(0, TURN) }
    }

    pub fn centered(center: i64, length: i64) -> Self {
        Self::new(center - length / 2, length)
    }

    pub fn center(&self) -> i64 {
        (self.start + self.length / 2).rem_euclid(TURN)
    }

    pub fn shifted(&self, by: i64) -> Self {
        Self::new(self.start + by, self.length)
    }
}

/// A shifted dyadic circle interval `[2^{−j}(k + (−1)^j s), 2^{−j}(k + 1 + (−1)^j s))`
/// with `s = grid/3`. At level 0 it is the whole circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GridInterval {
    pub grid: u8,
    pub level: u32,
    pub k: i64,
}

fn offset(grid: u8, level: u32) -> i64 {
    let o = grid as i64 * (1i64 << (MAX_LEVEL - level));
    if level.is_multiple_of(2) {
        o
    } else {
        -o
    }
}

impl GridInterval {
    pub fn length(&self) -> i64 {
        TURN >> self.level
    }

    /// Left endpoint in `[0, TURN)`.
    pub fn lo(&self) -> i64 {
        (self.k * self.length() + offset(self.grid, self.level)).rem_euclid(TURN)
    }

    pub fn center(&self) -> i64 {
        (self.lo() + self.length() / 2).rem_euclid(TURN)
    }

    /// The interval of `grid` at `level` whose half-open span holds `angle`.
    pub fn containing(grid: u8, level: u32, angle: i64) -> Self {
        let len = TURN >> level;
        let k = (angle - offset(grid, level)).div_euclid(len).rem_euclid(1i64 << level);
        Self { grid, level, k }
    }

    /// Half-open membership.
    pub fn contains_point(&self, angle: i64) -> bool {
        self.level == 0 || (angle - self.lo()).rem_euclid(TURN) < self.length()
    }

    /// Closed containment of an arc in the closure of the interval.
    pub fn contains_arc(&self, arc: &Arc) -> bool {
        self.level == 0 || (arc.start - self.lo()).rem_euclid(TURN) + arc.length <= self.length()
    }

    /// Whether the half-open spans share a point.
    pub fn intersects(&self, other: &Self) -> bool {
        if self.level == 0 || other.level == 0 {
            return true;
        }
        let a = (other.lo() - self.lo()).rem_euclid(TURN);
        let b = (self.lo() - other.lo()).rem_euclid(TURN);
        a < self.length() || b < other.length()
    }

    /// Whether the half-open span of `other` lies inside that of `self`.
    pub fn contains_interval(&self, other: &Self) -> bool {
        self.level == 0
            || (other.level > 0
                && (other.lo() - self.lo()).rem_euclid(TURN) + other.length() <= self.length())
    }

    pub fn parent(&self) -> Option<Self> {
        (self.level > 0).then(|| Self::containing(self.grid, self.level - 1, self.lo()))
    }
}

/// One of the three shifted dyadic grids on the circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CircleGrid {
    pub id: u8,
}

impl CircleGrid {
    /// The shift `s ∈ {0, 1/3, 2/3}` as a fraction of a turn.
    pub fn shift(&self) -> f64 {
        self.id as f64 / 3.0
    }

    pub fn intervals(&self, level: u32) -> impl Iterator<Item = GridInterval> + '_ {
        (0..1i64 << level).map(move |k| GridInterval { grid: self.id, level, k })
    }

    /// Shortest interval of this grid containing the closed arc.
    pub fn smallest_containing(&self, arc: &Arc) -> GridInterval {
        let mut level = if arc.length == 0 {
            MAX_LEVEL
        } else {
            // Finest level whose length is at least the arc length.
            (0..=MAX_LEVEL).rev().find(|&j| TURN >> j >= arc.length).unwrap_or(0)
        };
        loop {
            let iv = GridInterval::containing(self.id, level, arc.start);
            if iv.contains_arc(arc) {
                return iv;
            }
            level -= 1;
        }
    }
}

/// Parent-chain form of the grid property: each interval of level `j + 1`
/// lies inside the level-`j` interval holding its left endpoint, for every
/// level up to `max_level`.
pub fn verify_nesting(grid: &CircleGrid, max_level: u32) -> Result<()> {
    for level in 1..=max_level {
        for iv in grid.intervals(level) {
            let parent = iv.parent().unwrap();
            if !parent.contains_interval(&iv) {
                return Err(DmaxError::Construction(format!("{iv:?} escapes its parent {parent:?}")));
            }
        }
    }
    Ok(())
}

/// Pairwise form of the grid property over every level up to `max_level`:
/// intersecting intervals are nested.
pub fn verify_pairwise(grid: &CircleGrid, max_level: u32) -> Result<usize> {
    let all: Vec<GridInterval> = (0..=max_level).flat_map(|j| grid.intervals(j)).collect();
    let mut checked = 0;
    for (a, x) in all.iter().enumerate() {
        for y in &all[a + 1..] {
            checked += 1;
            if x.intersects(y) && !x.contains_interval(y) && !y.contains_interval(x) {
                return Err(DmaxError::Construction(format!("{x:?} and {y:?} overlap unnested")));
            }
        }
    }
    Ok(checked)
}

/// Outcome of the exhaustive covering search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Covering {
    pub resolution_bits: u32,
    pub arcs: usize,
    /// Largest `|J| / |I|` over all arcs, `J` the shortest containing interval.
    pub constant: f64,
    pub worst: Arc,
}

/// Shortest interval among the three grids containing the arc; ties go to
/// the lower grid id.
pub fn best_cover(grids: &[CircleGrid; 3], arc: &Arc) -> GridInterval {
    grids
        .iter()
        .map(|g| g.smallest_containing(arc))
        .min_by_key(|iv| (-(iv.level as i64), iv.grid))
        .unwrap()
}

/// Every closed arc with endpoints on the `2^{−bits}` lattice and length in
/// `(0, 1/3]`, covered by the best interval of the three grids.
pub fn covering_constant(grids: &[CircleGrid; 3], bits: u32) -> Covering {
    let step = TURN >> bits;
    let cells = 1i64 << bits;
    let max_len = cells / 3;
    let mut out = Covering { resolution_bits: bits, arcs: 0, constant: 0.0, worst: Arc::new(0, 0) };
    for a in 0..cells {
        for m in 1..=max_len {
            let arc = Arc::new(a * step, m * step);
            let cover = best_cover(grids, &arc);
            let ratio = cover.length() as f64 / arc.length as f64;
            out.arcs += 1;
            if ratio > out.constant {
                out.constant = ratio;
                out.worst = arc;
            }
        }
    }
    out
}

/// Largest admissible covering constant.
pub const COVERING_BOUND: f64 = 8.0;

/// The grids `𝒢^0, 𝒢^{1/3}, 𝒢^{2/3}`. Nesting to `2^{−14}` and the covering
/// constant at resolution `2^{−12}` are verified once per process.
pub fn make_circle_grids() -> Result<[CircleGrid; 3]> {
    static CHECK: OnceLock<std::result::Result<f64, String>> = OnceLock::new();
    let grids = [CircleGrid { id: 0 }, CircleGrid { id: 1 }, CircleGrid { id: 2 }];
    let outcome = CHECK.get_or_init(|| {
        for g in &grids {
            verify_nesting(g, 14).map_err(|e| e.to_string())?;
        }
        let c = covering_constant(&grids, 12);
        if c.constant > COVERING_BOUND {
            return Err(format!("covering constant {} exceeds {COVERING_BOUND}", c.constant));
        }
        Ok(c.constant)
    });
    match outcome {
        Ok(_) => Ok(grids),
        Err(e) => Err(DmaxError::Construction(e.clone())),
    }
}

/// Converts a fraction of a turn to turn units, snapping to the exact
/// lattice when within rounding distance.
pub fn to_turn_units(turns: f64) -> i64 {
    let x = turns.rem_euclid(1.0) * TURN as f64;
    let r = x.round();
    let v = if (x - r).abs() < 1e-3 { r as i64 } else { x.floor() as i64 };
    v.rem_euclid(TURN)
}

/// Reduced fraction `num/den` for a turn-unit value.
pub fn rational(units: i64) -> String {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    let g = gcd(units, TURN).max(1);
    format!("{}/{}", units / g, TURN / g)
}
