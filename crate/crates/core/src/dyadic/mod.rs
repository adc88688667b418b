//! Dyadic martingale structure on the periodic square: conditional
//! expectations, martingale differences, the square function, Chang–Wilson–Wolff
//! profiling and the pointwise domination estimates.

mod cww;
mod domination;
mod martingale;

pub use cww::{cww_profile, random_dyadic_martingale, CwwProfile, C1_STEP, C2_FIXED};
pub use domination::{
    domination_check, e0_smallness_check, g_function, lemma_rhs, RatioReport,
};
pub use martingale::{
    conditional_expectation, martingale_difference, martingale_maximal, square_function,
    MartingaleDecomposition,
};
