//! Implicit fast-diffusion solver, lifted approximations, and the
//! minimal-solution ladder.

pub mod field;
pub mod ladder;
pub mod lifted;
pub mod solver;

pub use field::{extend_by_zero, SpaceTimeField};
pub use ladder::{
    minimal_solution, Datum, DatumKind, LadderStage, LiftSchedule, MinimalSolutionResult,
    Sampling, SpatialResolution, SweepKind,
};
pub use lifted::{solve_lifted, LiftedProblem};
pub use solver::{mobility, mobility_deriv, solve_fde, solve_fde_forced, FdeConfig};
