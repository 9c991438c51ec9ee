//! Damped-Newton solver for the radial Dirichlet problem
//! Delta W = alpha |W|^(p-1) W on [0, R], W'(0) = 0, W(R) = b.
//!
//! The discrete operator is the flux-form Laplacian, so the scheme is
//! monotone: ordered boundary data produce ordered solutions, and constants
//! dominate (maximum principle). The odd extension |W|^(p-1) W keeps the
//! nonlinearity monotone for signed iterates; nonnegativity for
//! nonnegative data is asserted after the solve, not assumed.

use crate::error::{Error, Result};
use crate::geometry::operator::FluxOperator;
use crate::geometry::{Profile, RadialField, RadialGrid};
use crate::newton::{solve_damped, NewtonCtl};

use super::barrier::BarrierSpec;

/// Converged solution with iteration statistics.
#[derive(Debug, Clone)]
pub struct SemilinearSolution {
    pub field: RadialField,
    pub newton_iterations: usize,
    /// Final scaled residual.
    pub residual: f64,
}

fn odd_power(w: f64, p: f64) -> f64 {
    w.signum() * w.abs().powf(p)
}

fn odd_power_deriv(w: f64, p: f64) -> f64 {
    p * w.abs().powf(p - 1.0)
}

/// Solve from the default initial iterate (linear ramp from 0 at the
/// center to `boundary_value` at the outer node).
pub fn solve_semilinear(
    p: &Profile,
    spec: &BarrierSpec,
    grid: &std::sync::Arc<RadialGrid>,
    boundary_value: f64,
    ctl: &NewtonCtl,
) -> Result<SemilinearSolution> {
    let r_max = grid.outer_radius();
    let init = RadialField::from_fn(grid, |r| boundary_value * r / r_max);
    solve_semilinear_from(p, spec, grid, boundary_value, &init, ctl)
}

/// Solve with an explicit initial iterate (used for warm-started
/// continuation in boundary data).
pub fn solve_semilinear_from(
    p: &Profile,
    spec: &BarrierSpec,
    grid: &std::sync::Arc<RadialGrid>,
    boundary_value: f64,
    init: &RadialField,
    ctl: &NewtonCtl,
) -> Result<SemilinearSolution> {
    if !boundary_value.is_finite() {
        return Err(Error::invalid("boundary_value", "must be finite"));
    }
    if !init.grid().same_nodes(grid) {
        return Err(Error::MeshMismatch("initial iterate grid differs".into()));
    }

    let op = FluxOperator::assemble(p, grid)?;
    let nn = grid.num_nodes();
    let unknowns = nn - 1; // outer node pinned to boundary_value
    let alpha = spec.alpha;
    let p_nl = spec.p;

    let u0: Vec<f64> = init.values()[..unknowns].to_vec();
    let (u, stats) = solve_damped(
        u0,
        |u, sys| {
            for i in 0..unknowns {
                let left = if i == 0 { 0.0 } else { u[i - 1] };
                let right = if i + 1 < unknowns { u[i + 1] } else { boundary_value };
                let lap = op.lower()[i] * left + op.diag()[i] * u[i] + op.upper()[i] * right;
                let nonlinear = alpha * odd_power(u[i], p_nl);
                sys.residual[i] = lap - nonlinear;
                sys.lower[i] = op.lower()[i];
                sys.upper[i] = if i + 1 < unknowns { op.upper()[i] } else { 0.0 };
                sys.diag[i] = op.diag()[i] - alpha * odd_power_deriv(u[i], p_nl);
                sys.scale[i] = lap.abs() + nonlinear.abs() + 1.0;
            }
            Ok(())
        },
        ctl,
        0,
    )?;

    let mut values = u;
    values.push(boundary_value);

    if boundary_value >= 0.0 {
        let scale = 1.0 + boundary_value.abs();
        for (i, &v) in values.iter().enumerate() {
            if v < -1e-9 * scale {
                return Err(Error::MonotonicityViolation {
                    context: "semilinear solution lost nonnegativity under nonnegative data".into(),
                    violation: -v,
                    node: i,
                });
            }
        }
    }

    Ok(SemilinearSolution {
        field: RadialField::new(std::sync::Arc::clone(grid), values)?,
        newton_iterations: stats.iterations,
        residual: stats.residual,
    })
}
