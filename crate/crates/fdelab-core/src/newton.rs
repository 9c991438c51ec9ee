//! Damped Newton engine for tridiagonal nonlinear systems.
//!
//! Both implicit solvers in this crate (the backward-Euler step and the
//! semilinear Dirichlet problem) reduce to root-finding for a residual with
//! a tridiagonal Jacobian. Globalization is a backtracking line search on
//! the scaled l2 residual with damping factor 1/2 down to a minimum step of
//! 2^-20. Convergence is tested rowwise: max_i |F_i| / scale_i <= tol,
//! where the assembler supplies per-row scales so that rows with hugely
//! different magnitudes (e.g. boundary layers under large Dirichlet data)
//! do not mask each other.

use crate::error::{Error, NewtonFailureKind, Result};
use crate::tridiag;

/// Iteration budget and tolerance for one Newton solve.
#[derive(Debug, Clone, Copy)]
pub struct NewtonCtl {
    /// Scaled residual target.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonCtl {
    fn default() -> Self {
        NewtonCtl {
            tol: 1e-11,
            max_iter: 80,
        }
    }
}

const MIN_STEP: f64 = 1.0 / (1 << 20) as f64;

/// Residual, Jacobian, and row scales of the nonlinear system at the
/// current iterate, filled by the assembler callback.
pub struct System {
    pub residual: Vec<f64>,
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    /// Per-row positive magnitudes used for the convergence test.
    pub scale: Vec<f64>,
}

impl System {
    pub fn zeros(n: usize) -> Self {
        System {
            residual: vec![0.0; n],
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
            scale: vec![1.0; n],
        }
    }

    fn scaled_max(&self) -> f64 {
        self.residual
            .iter()
            .zip(&self.scale)
            .map(|(r, s)| (r / s).abs())
            .fold(0.0, f64::max)
    }

    fn scaled_l2(&self) -> f64 {
        self.residual
            .iter()
            .zip(&self.scale)
            .map(|(r, s)| (r / s) * (r / s))
            .sum::<f64>()
            .sqrt()
    }
}

/// Outcome of a converged Newton solve.
#[derive(Debug, Clone)]
pub struct NewtonStats {
    pub iterations: usize,
    /// Final scaled max-norm residual.
    pub residual: f64,
}

/// Run damped Newton from `u0`. The assembler fills the system at the given
/// iterate and may fail (e.g. a state left the admissible region).
///
/// `step` tags errors with the caller's time-step index.
pub fn solve_damped<A>(
    mut u: Vec<f64>,
    mut assemble: A,
    ctl: &NewtonCtl,
    step: usize,
) -> Result<(Vec<f64>, NewtonStats)>
where
    A: FnMut(&[f64], &mut System) -> Result<()>,
{
    let n = u.len();
    let mut sys = System::zeros(n);
    let mut history = Vec::new();

    assemble(&u, &mut sys)?;
    let mut norm = sys.scaled_l2();
    history.push(sys.scaled_max());

    for iter in 0..ctl.max_iter {
        if sys.scaled_max() <= ctl.tol {
            return Ok((
                u,
                NewtonStats {
                    iterations: iter,
                    residual: sys.scaled_max(),
                },
            ));
        }

        let delta = match tridiag::solve(&sys.lower, &sys.diag, &sys.upper, &sys.residual) {
            Ok(d) => d,
            Err(Error::NewtonFailure { kind, .. }) => {
                return Err(Error::NewtonFailure {
                    step,
                    kind,
                    history,
                })
            }
            Err(e) => return Err(e),
        };

        // Backtracking on the scaled l2 norm.
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda >= MIN_STEP {
            let trial: Vec<f64> = u
                .iter()
                .zip(&delta)
                .map(|(ui, di)| ui - lambda * di)
                .collect();
            match assemble(&trial, &mut sys) {
                Ok(()) => {
                    let trial_norm = sys.scaled_l2();
                    if trial_norm.is_finite() && trial_norm < norm {
                        u = trial;
                        norm = trial_norm;
                        accepted = true;
                        break;
                    }
                }
                Err(Error::MobilityFloorRequired { .. }) if lambda > MIN_STEP => {
                    // Shrink the step instead of failing outright; the full
                    // step may overshoot into the inadmissible region.
                }
                Err(e) => return Err(e),
            }
            lambda *= 0.5;
        }
        history.push(sys.scaled_max());
        if !accepted {
            // Re-assemble at the current iterate so the caller sees a
            // consistent state, then report the stall distinctly.
            assemble(&u, &mut sys)?;
            return Err(Error::NewtonFailure {
                step,
                kind: NewtonFailureKind::LineSearchExhausted,
                history,
            });
        }
    }

    if sys.scaled_max() <= ctl.tol {
        return Ok((
            u,
            NewtonStats {
                iterations: ctl.max_iter,
                residual: sys.scaled_max(),
            },
        ));
    }
    Err(Error::NewtonFailure {
        step,
        kind: NewtonFailureKind::MaxIterations,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_scalar_quadratic_per_row() {
        // F_i(u) = u_i^2 - a_i, decoupled.
        let targets = [4.0, 9.0, 2.0];
        let (u, stats) = solve_damped(
            vec![1.0; 3],
            |u, sys| {
                for i in 0..3 {
                    sys.residual[i] = u[i] * u[i] - targets[i];
                    sys.diag[i] = 2.0 * u[i];
                    sys.lower[i] = 0.0;
                    sys.upper[i] = 0.0;
                    sys.scale[i] = 1.0 + targets[i];
                }
                Ok(())
            },
            &NewtonCtl::default(),
            0,
        )
        .unwrap();
        for (got, want) in u.iter().zip(targets.iter().map(|t| t.sqrt())) {
            assert!((got - want).abs() < 1e-10);
        }
        assert!(stats.iterations > 0);
    }

    #[test]
    fn reports_max_iterations_with_history() {
        let err = solve_damped(
            vec![1.0],
            |u, sys| {
                sys.residual[0] = u[0] * u[0] + 1.0; // no real root
                sys.diag[0] = 2.0 * u[0].max(0.1);
                Ok(())
            },
            &NewtonCtl {
                tol: 1e-12,
                max_iter: 5,
            },
            3,
        )
        .unwrap_err();
        match err {
            Error::NewtonFailure { step, history, .. } => {
                assert_eq!(step, 3);
                assert!(!history.is_empty());
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
