//! Lifted, bounded Dirichlet approximations.
//!
//! The problem on the ball of radius R with boundary value ell > 0 and
//! initial state ell + (u0 ^ beta) is both nondegenerate and nonsingular:
//! its states stay inside [ell, ell + beta], so the raw mobility (delta = 0)
//! applies. These are the building blocks the minimal-solution ladder
//! drives to its triple limit.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{Profile, RadialField, RadialGrid};

use super::field::SpaceTimeField;
use super::solver::{solve_fde, FdeConfig};

/// Slack beyond which a state leaving [ell, ell + beta] is a scheme bug.
pub const BOUND_SLACK: f64 = 1e-8;

/// One rung of the approximation ladder.
#[derive(Debug, Clone)]
pub struct LiftedProblem {
    /// Boundary lift ell > 0.
    pub ell: f64,
    /// Datum truncation beta > 0.
    pub beta: f64,
    /// Domain radius (must match the grid).
    pub radius: f64,
    /// Nonnegative datum sampled on the grid.
    pub u0: RadialField,
}

impl LiftedProblem {
    pub fn validate(&self, grid: &RadialGrid) -> Result<()> {
        if !(self.ell > 0.0) {
            return Err(Error::invalid("ell", format!("lift must be positive, got {}", self.ell)));
        }
        if !(self.beta > 0.0) {
            return Err(Error::invalid(
                "beta",
                format!("truncation must be positive, got {}", self.beta),
            ));
        }
        if (self.radius - grid.outer_radius()).abs() > 1e-12 * self.radius.max(1.0) {
            return Err(Error::MeshMismatch(format!(
                "problem radius {} vs grid radius {}",
                self.radius,
                grid.outer_radius()
            )));
        }
        if !self.u0.grid().same_nodes(grid) {
            return Err(Error::MeshMismatch("datum grid differs".into()));
        }
        if self.u0.min() < 0.0 {
            return Err(Error::invalid(
                "u0",
                format!("datum must be nonnegative, min = {}", self.u0.min()),
            ));
        }
        Ok(())
    }
}

/// Solve one lifted problem and assert the state bounds
/// ell <= u <= ell + beta at every stored time.
pub fn solve_lifted(
    p: &Profile,
    cfg: &FdeConfig,
    prob: &LiftedProblem,
    grid: &Arc<RadialGrid>,
) -> Result<SpaceTimeField> {
    prob.validate(grid)?;
    let datum = RadialField::new(
        Arc::clone(grid),
        prob.u0
            .values()
            .iter()
            .map(|&v| prob.ell + v.min(prob.beta))
            .collect(),
    )?;
    let traj = solve_fde(p, cfg, grid, &datum, prob.ell)?;

    for (ti, s) in traj.states().iter().enumerate() {
        for (i, &v) in s.values().iter().enumerate() {
            if v < prob.ell - BOUND_SLACK {
                return Err(Error::MonotonicityViolation {
                    context: format!(
                        "lifted state fell below the boundary lift {} at stored time index {ti}",
                        prob.ell
                    ),
                    violation: prob.ell - v,
                    node: i,
                });
            }
            if v > prob.ell + prob.beta + BOUND_SLACK {
                return Err(Error::MonotonicityViolation {
                    context: format!(
                        "lifted state exceeded ell + beta = {} at stored time index {ti}",
                        prob.ell + prob.beta
                    ),
                    violation: v - prob.ell - prob.beta,
                    node: i,
                });
            }
        }
    }
    Ok(traj)
}
