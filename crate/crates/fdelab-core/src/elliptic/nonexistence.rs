//! Nonexistence decay experiment.
//!
//! On complete profiles, Delta W = alpha W^p admits no nontrivial
//! nonnegative subsolution: every candidate is dominated by the explicit
//! barrier on the ball of radius R, and the barrier vanishes locally as
//! R grows because H(R) diverges. The experiment makes that collapse
//! measurable: for each R it solves the Dirichlet problem with huge
//! boundary data and records the supremum over a fixed probe ball of both
//! the barrier and the solution. On incomplete profiles H(infinity) is
//! finite, the barrier stays uniformly positive, and the suprema stagnate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Profile, RadialGrid};
use crate::newton::NewtonCtl;
use crate::quad::QuadCtl;

use super::barrier::{BarrierEvaluator, BarrierSpec};
use super::semilinear::{solve_semilinear, solve_semilinear_from, SemilinearSolution};

/// Fraction of R kept between the grid and the blow-up radius.
pub const BLOW_UP_MARGIN: f64 = 1e-3;
/// Boundary data are this multiple of the barrier's value at the outer
/// grid node ("huge" relative to anything the interior can sustain).
pub const BOUNDARY_FACTOR: f64 = 1e3;

/// Per-radius measurements. `failure` records a solver error without
/// aborting the sweep; the numeric columns are NaN in that case.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayRow {
    pub domain_radius: f64,
    pub sup_barrier: f64,
    pub sup_solution: f64,
    pub newton_iterations: usize,
    pub residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayTable {
    pub probe_radius: f64,
    pub rows: Vec<DecayRow>,
}

/// Sweep the blow-up radius over `radii` (strictly increasing), recording
/// the probe-ball suprema. `cells` is the number of grid intervals used for
/// every domain.
pub fn nonexistence_experiment(
    p: &Profile,
    p_nl: f64,
    alpha: f64,
    radii: &[f64],
    probe_radius: f64,
    cells: usize,
    newton: &NewtonCtl,
    quad: &QuadCtl,
) -> Result<DecayTable> {
    if radii.is_empty() {
        return Err(Error::invalid("radii", "need at least one radius"));
    }
    for w in radii.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::invalid(
                "radii",
                format!("radii must be strictly increasing, got {} then {}", w[0], w[1]),
            ));
        }
    }
    if !(probe_radius > 0.0 && probe_radius < radii[0] / 2.0) {
        return Err(Error::invalid(
            "probe_radius",
            format!(
                "probe radius must lie in (0, min(radii)/2) = (0, {}), got {probe_radius}",
                radii[0] / 2.0
            ),
        ));
    }

    let mut rows = Vec::with_capacity(radii.len());
    for &radius in radii {
        match run_one(p, p_nl, alpha, radius, probe_radius, cells, newton, quad) {
            Ok(row) => rows.push(row),
            Err(e) => rows.push(DecayRow {
                domain_radius: radius,
                sup_barrier: f64::NAN,
                sup_solution: f64::NAN,
                newton_iterations: 0,
                residual: f64::NAN,
                failure: Some(e.to_string()),
            }),
        }
    }
    Ok(DecayTable {
        probe_radius,
        rows,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_one(
    p: &Profile,
    p_nl: f64,
    alpha: f64,
    radius: f64,
    probe_radius: f64,
    cells: usize,
    newton: &NewtonCtl,
    quad: &QuadCtl,
) -> Result<DecayRow> {
    let spec = BarrierSpec::new(p_nl, alpha, radius)?;
    let ev = BarrierEvaluator::new(p, spec, quad)?;
    let grid = RadialGrid::uniform(radius * (1.0 - BLOW_UP_MARGIN), cells)?;

    // The barrier is radially increasing, so its probe-ball sup is its
    // value at the probe radius.
    let sup_barrier = ev.eval(probe_radius, quad)?;

    let boundary = BOUNDARY_FACTOR * ev.eval(grid.outer_radius(), quad)?;

    // Continuation in the boundary datum: the boundary layer under the full
    // datum is far thinner than a cell, so warm starts over a geometric
    // ramp keep every Newton solve in its fast-convergence regime.
    let mut iterations = 0usize;
    let mut sol: Option<SemilinearSolution> = None;
    for factor in [1e-3, 1e-2, 1e-1, 1.0] {
        let b = boundary * factor;
        let next = match &sol {
            None => solve_semilinear(p, &spec, &grid, b, newton)?,
            Some(prev) => solve_semilinear_from(p, &spec, &grid, b, &prev.field, newton)?,
        };
        iterations += next.newton_iterations;
        sol = Some(next);
    }
    let sol = sol.unwrap();

    Ok(DecayRow {
        domain_radius: radius,
        sup_barrier,
        sup_solution: sol.field.max_within(probe_radius),
        newton_iterations: iterations,
        residual: sol.residual,
        failure: None,
    })
}
