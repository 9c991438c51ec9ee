//! Semilinear elliptic machinery: explicit barriers, supersolution
//! verification, the Dirichlet solver, and the nonexistence experiment.

pub mod barrier;
pub mod nonexistence;
pub mod semilinear;
pub mod supersolution;

pub use barrier::{default_barrier_constant, eval_barrier, BarrierEvaluator, BarrierSpec};
pub use nonexistence::{nonexistence_experiment, DecayRow, DecayTable};
pub use semilinear::{solve_semilinear, solve_semilinear_from, SemilinearSolution};
pub use supersolution::{verify_supersolution, SupersolutionReport};
