//! Sectors of frequency annuli, the three shifted circle grids that assign
//! each sector its admissible direction arc, and the cluster decomposition.

mod checks;
mod clusters;
mod grids;
mod system;

pub use checks::{
    cluster_operator_check, direction_stability_check, selection_check, smoothed_sector, star_maximal,
    ClusterOperatorReport, SelectionReport, SelectionWitness, StabilityReport,
};
pub use clusters::{
    captured, cluster_decompose, direction_turns, kappa_classes, kappa_of, split_by_grid, Cluster,
    ClusterSet,
};
pub use grids::{
    best_cover, covering_constant, make_circle_grids, rational, to_turn_units, verify_nesting,
    verify_pairwise, Arc, CircleGrid, Covering, GridInterval, COVERING_BOUND, MAX_LEVEL, TURN,
};
pub use system::{
    annulus_projection, classify, lattice_angle, make_sectors, sector_projection, sectors_to_json, Sector,
    MAX_SCALE,
};
