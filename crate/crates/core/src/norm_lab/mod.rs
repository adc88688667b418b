//! Operator-norm estimation, the radial extremal experiment, the three-way
//! level-set split and growth curves across direction counts.

mod extremal;
mod growth;
mod search;
mod split;

pub use extremal::{
    extremal_function, fit_log, fit_proportional, lower_bound_experiment, lower_bound_row,
    write_lower_bound_csv, Extremal, LowerBoundConfig, LowerBoundRow, ProportionalFit,
};
pub use growth::{growth_curve, GrowthCurve, GrowthRow, POWER_EXPONENT};
pub use search::{
    exact_diagonal_norm, maximal_norm_search, power_iteration_norm, EstimateKind, FamilySpec,
    MaximalOperator, NormEstimate,
};
pub use split::{layer_cake, lemma3_split, middle_energy, LayerCake, SplitTriple};
