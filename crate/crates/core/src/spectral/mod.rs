//! Torus functions, spectral transforms, Littlewood–Paley machinery and
//! directional multipliers.

pub mod grid;
pub mod io;
pub mod lp;
pub mod multiplier;
pub mod symbol;
pub mod window;

pub use grid::{forward_spectrum, fourier_mode, inverse_spectrum, GridFunction, Spectrum};
pub use lp::{ball_projection, ball_projection_maximal, make_lp_family, scale_projection, LpFamily};
pub use multiplier::{
    apply_directional_multiplier, diagonal_norm, kernel_decay_check, KernelDecay, KernelGrid,
};
pub use symbol::{verify_hm_symbol, HmReport, SampleSpec, Symbol1D};
pub use window::SmoothWindow;
