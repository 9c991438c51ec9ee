//! Quantitative estimates: smoothing constants, estimate checks on solution
//! pairs, and the contraction functional behind the uniqueness probes.

pub mod contraction;
pub mod cutoff;
pub mod hp;

pub use contraction::{
    contraction_functional, uniqueness_alpha, uniqueness_probe, ProbeOptions, ProbeReport,
};
pub use cutoff::CutoffFamily;
pub use hp::{
    ball_integral, check_hp_ordered, check_hp_strong, hp_constant, kappa_m, HpConstant, HpReport,
    HP_REL_TOL,
};
