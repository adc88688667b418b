use std::collections::BTreeMap;

use serde::Serialize;

use super::grids::{rational, to_turn_units, GridInterval, TURN};
use super::system::Sector;
use crate::directions::DirectionSet;
use crate::error::{DmaxError, Result};

/// Direction angles in exact turn units.
pub fn direction_turns(set: &DirectionSet) -> Vec<i64> {
    set.vectors()
        .iter()
        .map(|v| to_turn_units(v[1].atan2(v[0]) / std::f64::consts::TAU))
        .collect()
}

/// `|B(ω) ∩ Σ_N|`.
pub fn captured(sector: &Sector, turns: &[i64]) -> usize {
    turns.iter().filter(|&&a| sector.b_contains(a)).count()
}

/// `κ = ⌈log₂ count⌉`, so `2^{κ−1} < count ≤ 2^κ`, with `κ = 0` for a single direction.
pub fn kappa_of(count: usize) -> Option<u32> {
    (count > 0).then(|| usize::BITS - (count - 1).leading_zeros())
}

/// `Ω^κ`: indices into `sectors` grouped by `κ`; sectors capturing no direction are dropped.
pub fn kappa_classes(sectors: &[Sector], set: &DirectionSet) -> BTreeMap<u32, Vec<usize>> {
    let turns = direction_turns(set);
    let mut out: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, s) in sectors.iter().enumerate() {
        if let Some(k) = kappa_of(captured(s, &turns)) {
            out.entry(k).or_default().push(i);
        }
    }
    out
}

/// Splits sector indices by the grid of their `B(ω)`.
pub fn split_by_grid(sectors: &[Sector], members: &[usize]) -> [Vec<usize>; 3] {
    let mut out: [Vec<usize>; 3] = Default::default();
    for &m in members {
        out[sectors[m].b.grid as usize].push(m);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cluster {
    /// Indices into the sector list, ascending.
    pub members: Vec<usize>,
    /// Member whose `B(ω)` is smallest (leftmost on ties).
    pub minimal: usize,
    /// `t(C)`: centre of the smallest `B(ω)`, in turn units.
    pub t: i64,
    /// Nesting forest: `(child, parent)` with `B(parent)` the smallest strictly larger interval.
    pub edges: Vec<(usize, usize)>,
}

impl Cluster {
    pub fn t_turns(&self) -> f64 {
        self.t as f64 / TURN as f64
    }

    pub fn t_direction(&self) -> [f64; 2] {
        let a = std::f64::consts::TAU * self.t_turns();
        [a.cos(), a.sin()]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterSet {
    pub kappa: u32,
    pub grid: u8,
    pub clusters: Vec<Cluster>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.0[hi] = lo;
        }
    }
}

fn size_key(b: &GridInterval) -> (i64, i64) {
    (b.length(), if b.level == 0 { 0 } else { b.lo() })
}

/// Joins sectors whose `B` intervals intersect. Intersecting intervals must
/// nest and each cluster must have a common point; either failure is an error.
pub fn cluster_decompose(sectors: &[Sector], members: &[usize], kappa: u32) -> Result<ClusterSet> {
    let grid = members.first().map(|&m| sectors[m].b.grid).unwrap_or(0);
    if members.iter().any(|&m| sectors[m].b.grid != grid) {
        return Err(DmaxError::Construction("cluster input mixes grids".into()));
    }
    let bs: Vec<GridInterval> = members.iter().map(|&m| sectors[m].b).collect();
    let mut uf = UnionFind((0..members.len()).collect());
    for a in 0..bs.len() {
        for b in a + 1..bs.len() {
            if bs[a].intersects(&bs[b]) {
                if !bs[a].contains_interval(&bs[b]) && !bs[b].contains_interval(&bs[a]) {
                    return Err(DmaxError::Construction(format!(
                        "B intervals {:?} and {:?} intersect without nesting",
                        bs[a], bs[b]
                    )));
                }
                uf.union(a, b);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for a in 0..bs.len() {
        let root = uf.find(a);
        groups.entry(root).or_default().push(a);
    }
    let mut clusters = Vec::with_capacity(groups.len());
    for local in groups.into_values() {
        let min_local = *local.iter().min_by_key(|&&a| size_key(&bs[a])).unwrap();
        let minimal = bs[min_local];
        if let Some(&bad) = local.iter().find(|&&a| !bs[a].contains_interval(&minimal)) {
            return Err(DmaxError::Construction(format!(
                "cluster has empty common intersection: {:?} misses {:?}",
                bs[bad], minimal
            )));
        }
        let mut edges = Vec::new();
        for &a in &local {
            let parent = local
                .iter()
                .filter(|&&b| {
                    b != a
                        && bs[b].contains_interval(&bs[a])
                        && (bs[b] != bs[a] || b < a)
                })
                .min_by_key(|&&b| (size_key(&bs[b]), b));
            if let Some(&p) = parent {
                edges.push((members[a], members[p]));
            }
        }
        let mut ids: Vec<usize> = local.iter().map(|&a| members[a]).collect();
        ids.sort_unstable();
        clusters.push(Cluster { members: ids, minimal: members[min_local], t: minimal.center(), edges });
    }
    clusters.sort_by_key(|c| c.members[0]);
    Ok(ClusterSet { kappa, grid, clusters })
}

impl ClusterSet {
    /// Every pair of `B` intervals from distinct clusters is disjoint.
    pub fn across_disjoint(&self, sectors: &[Sector]) -> bool {
        for (a, c) in self.clusters.iter().enumerate() {
            for d in &self.clusters[a + 1..] {
                for &x in &c.members {
                    for &y in &d.members {
                        if sectors[x].b.intersects(&sectors[y].b) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Record<'a> {
            kappa: u32,
            grid: u8,
            clusters: Vec<ClusterRecord<'a>>,
        }
        #[derive(Serialize)]
        struct ClusterRecord<'a> {
            members: &'a [usize],
            t_turns: String,
            adjacency: BTreeMap<usize, Vec<usize>>,
        }
        let clusters = self
            .clusters
            .iter()
            .map(|c| {
                let mut adjacency: BTreeMap<usize, Vec<usize>> =
                    c.members.iter().map(|&m| (m, Vec::new())).collect();
                for &(child, parent) in &c.edges {
                    adjacency.get_mut(&parent).unwrap().push(child);
                    adjacency.get_mut(&child).unwrap().push(parent);
                }
                adjacency.values_mut().for_each(|v| v.sort_unstable());
                ClusterRecord { members: &c.members, t_turns: rational(c.t), adjacency }
            })
            .collect();
        Ok(serde_json::to_string_pretty(&Record { kappa: self.kappa, grid: self.grid, clusters })?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directions::DirectionKind;
    use crate::sectors::make_sectors;

    fn fake(b: GridInterval) -> Sector {
        Sector { n: 6, index: 0, b, flagged: false }
    }

    #[test]
    fn kappa_boundaries() {
        assert_eq!(kappa_of(0), None);
        assert_eq!(kappa_of(1), Some(0));
        assert_eq!(kappa_of(2), Some(1));
        assert_eq!(kappa_of(3), Some(2));
        assert_eq!(kappa_of(4), Some(2));
        assert_eq!(kappa_of(5), Some(3));
        assert_eq!(kappa_of(16), Some(4));
    }

    #[test]
    fn nested_example() {
        // [0, 1/4), [0, 1/8), [1/2, 3/4) in the standard grid.
        let sectors = vec![
            fake(GridInterval { grid: 0, level: 2, k: 0 }),
            fake(GridInterval { grid: 0, level: 3, k: 0 }),
            fake(GridInterval { grid: 0, level: 2, k: 2 }),
        ];
        let c = cluster_decompose(&sectors, &[0, 1, 2], 1).unwrap();
        assert_eq!(c.clusters.len(), 2);
        assert_eq!(c.clusters[0].members, vec![0, 1]);
        assert_eq!(c.clusters[1].members, vec![2]);
        assert_eq!(c.clusters[0].t, TURN / 16);
        assert_eq!(c.clusters[0].edges, vec![(1, 0)]);
        assert!(c.across_disjoint(&sectors));
        let json = c.to_json().unwrap();
        assert!(json.contains("\"t_turns\": \"1/16\""));
    }

    #[test]
    fn rejects_broken_inputs() {
        // Two disjoint children under a common parent leave no common point.
        let sectors = vec![
            fake(GridInterval { grid: 0, level: 1, k: 0 }),
            fake(GridInterval { grid: 0, level: 2, k: 0 }),
            fake(GridInterval { grid: 0, level: 2, k: 1 }),
        ];
        assert!(cluster_decompose(&sectors, &[0, 1, 2], 1).is_err());
        let mixed =
            vec![fake(GridInterval { grid: 0, level: 2, k: 0 }), fake(GridInterval { grid: 1, level: 2, k: 0 })];
        assert!(cluster_decompose(&mixed, &[0, 1], 1).is_err());
    }

    #[test]
    fn equispaced_sixty_four_at_scale_six() {
        let sectors = make_sectors(6).unwrap();
        let set = DirectionSet::make(DirectionKind::Equispaced, 64, 0).unwrap();
        let classes = kappa_classes(&sectors, &set);
        let turns = direction_turns(&set);
        for s in &sectors {
            let c = captured(s, &turns);
            // B has length ≥ 10/64 turn and ≤ 8 × that.
            assert!(c >= 9, "{c}");
        }
        let total: usize = classes.values().map(Vec::len).sum();
        assert_eq!(total, 64);
        for (&k, members) in &classes {
            for part in split_by_grid(&sectors, members) {
                let cs = cluster_decompose(&sectors, &part, k).unwrap();
                assert!(cs.across_disjoint(&sectors));
                let count: usize = cs.clusters.iter().map(|c| c.members.len()).sum();
                assert_eq!(count, part.len());
            }
        }
    }
}
