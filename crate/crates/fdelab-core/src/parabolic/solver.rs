//! Implicit solver for the radial fast diffusion equation u_t = Delta u^m.
//!
//! Time stepping is backward Euler: the first-order error is the price for
//! unconditional monotonicity, and monotonicity (the discrete comparison
//! principle) is what the ladder constructions and estimate checks consume.
//! Each step solves
//!
//!   u+ - dt Delta_h phi(u+) = u + dt f
//!
//! by damped Newton on the flux-form operator, with the symmetry condition
//! at r = 0 built into the operator and Dirichlet data at r = R.
//!
//! phi is the signed power phi_0(s) = sign(s) |s|^m, singular at s = 0.
//! States that touch or cross zero need the regularized mobility
//! phi_delta(s) = s (s^2 + delta^2)^((m-1)/2), selected by a positive
//! `mobility_floor`; lifted problems keep delta = 0 because their states
//! stay in [ell, ell + beta].

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::operator::FluxOperator;
use crate::geometry::{Profile, RadialField, RadialGrid};
use crate::newton::{solve_damped, NewtonCtl};

use super::field::SpaceTimeField;

/// Time-stepping configuration.
#[derive(Debug, Clone, Copy)]
pub struct FdeConfig {
    /// Diffusion exponent, 0 < m < 1.
    pub m: f64,
    pub dt: f64,
    pub t_end: f64,
    /// Scaled Newton residual target per step.
    pub newton_tol: f64,
    pub newton_max: usize,
    /// Mobility regularization delta; 0 is allowed only for uniformly
    /// positive states.
    pub mobility_floor: f64,
    /// Store every k-th step (the initial and final states are always kept).
    pub store_every: usize,
}

impl FdeConfig {
    pub fn new(m: f64, dt: f64, t_end: f64) -> Result<Self> {
        let cfg = FdeConfig {
            m,
            dt,
            t_end,
            newton_tol: 1e-12,
            newton_max: 100,
            mobility_floor: 0.0,
            store_every: 1,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_mobility_floor(mut self, delta: f64) -> Self {
        self.mobility_floor = delta;
        self
    }

    pub fn with_store_every(mut self, k: usize) -> Self {
        self.store_every = k.max(1);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0 && self.m < 1.0) {
            return Err(Error::invalid(
                "m",
                format!("must lie in the open interval (0,1), got {}", self.m),
            ));
        }
        if !(self.dt > 0.0) {
            return Err(Error::invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_end > 0.0) || self.dt > self.t_end * (1.0 + 1e-12) {
            return Err(Error::invalid(
                "t_end",
                format!("need 0 < dt <= t_end, got dt = {} and t_end = {}", self.dt, self.t_end),
            ));
        }
        if !(self.mobility_floor >= 0.0) {
            return Err(Error::invalid(
                "mobility_floor",
                format!("must be nonnegative, got {}", self.mobility_floor),
            ));
        }
        if !(self.newton_tol > 0.0) {
            return Err(Error::invalid("newton_tol", "must be positive".to_string()));
        }
        Ok(())
    }

    pub(crate) fn steps(&self) -> usize {
        ((self.t_end / self.dt).round() as usize).max(1)
    }
}

/// sign(s) |s|^m, regularized to s (s^2 + delta^2)^((m-1)/2) for delta > 0.
pub fn mobility(s: f64, m: f64, delta: f64) -> f64 {
    if delta == 0.0 {
        s.signum() * s.abs().powf(m)
    } else {
        s * (s * s + delta * delta).powf((m - 1.0) / 2.0)
    }
}

/// Derivative of [`mobility`] in s. For delta = 0 this is m |s|^(m-1),
/// which diverges at 0; callers must keep such states away from zero.
pub fn mobility_deriv(s: f64, m: f64, delta: f64) -> f64 {
    if delta == 0.0 {
        m * s.abs().powf(m - 1.0)
    } else {
        let q = s * s + delta * delta;
        q.powf((m - 3.0) / 2.0) * (m * s * s + delta * delta)
    }
}

/// Solve the Dirichlet problem for u_t = Delta u^m on the grid's [0, R]
/// with constant boundary value and the given initial state.
pub fn solve_fde(
    p: &Profile,
    cfg: &FdeConfig,
    grid: &Arc<RadialGrid>,
    u0: &RadialField,
    boundary: f64,
) -> Result<SpaceTimeField> {
    solve_fde_forced(p, cfg, grid, u0, boundary, None)
}

/// As [`solve_fde`] with an explicit source term f(r, t) added to the
/// right-hand side (used by manufactured-solution verification).
pub fn solve_fde_forced(
    p: &Profile,
    cfg: &FdeConfig,
    grid: &Arc<RadialGrid>,
    u0: &RadialField,
    boundary: f64,
    forcing: Option<&dyn Fn(f64, f64) -> f64>,
) -> Result<SpaceTimeField> {
    cfg.validate()?;
    if !u0.grid().same_nodes(grid) {
        return Err(Error::MeshMismatch("initial state grid differs".into()));
    }
    if !boundary.is_finite() {
        return Err(Error::invalid("boundary", "must be finite"));
    }
    let delta = cfg.mobility_floor;
    if delta == 0.0 {
        let floor = u0.min().min(boundary);
        if floor <= 0.0 {
            return Err(Error::MobilityFloorRequired {
                step: 0,
                value: floor,
            });
        }
    }

    let op = FluxOperator::assemble(p, grid)?;
    let nn = grid.num_nodes();
    let unknowns = nn - 1;
    let nodes = grid.nodes();
    let m = cfg.m;
    let dt = cfg.dt;
    let steps = cfg.steps();
    let newton = NewtonCtl {
        tol: cfg.newton_tol,
        max_iter: cfg.newton_max,
    };

    // The stored initial state is the datum as given; the Dirichlet value
    // takes over at the outer node from the first step on.
    let mut state: Vec<f64> = u0.values().to_vec();
    let mut times = vec![0.0];
    let mut states = vec![RadialField::new(Arc::clone(grid), state.clone())?];
    state[unknowns] = boundary;

    let phi_boundary = mobility(boundary, m, delta);

    for step in 1..=steps {
        let t_next = step as f64 * dt;
        let mut rhs: Vec<f64> = state[..unknowns].to_vec();
        if let Some(f) = forcing {
            for i in 0..unknowns {
                rhs[i] += dt * f(nodes[i], t_next);
            }
        }

        let (next, _stats) = solve_damped(
            state[..unknowns].to_vec(),
            |u, sys| {
                if delta == 0.0 {
                    for (i, &ui) in u.iter().enumerate() {
                        if ui <= 0.0 {
                            return Err(Error::MobilityFloorRequired { step, value: ui });
                        }
                        let _ = i;
                    }
                }
                for i in 0..unknowns {
                    let left = if i == 0 { 0.0 } else { mobility(u[i - 1], m, delta) };
                    let here = mobility(u[i], m, delta);
                    let right = if i + 1 < unknowns {
                        mobility(u[i + 1], m, delta)
                    } else {
                        phi_boundary
                    };
                    let lap = op.lower()[i] * left + op.diag()[i] * here + op.upper()[i] * right;
                    sys.residual[i] = u[i] - dt * lap - rhs[i];
                    sys.diag[i] = 1.0 - dt * op.diag()[i] * mobility_deriv(u[i], m, delta);
                    sys.lower[i] = if i == 0 {
                        0.0
                    } else {
                        -dt * op.lower()[i] * mobility_deriv(u[i - 1], m, delta)
                    };
                    sys.upper[i] = if i + 1 < unknowns {
                        -dt * op.upper()[i] * mobility_deriv(u[i + 1], m, delta)
                    } else {
                        0.0
                    };
                    sys.scale[i] = 1.0 + rhs[i].abs() + (dt * lap).abs();
                }
                Ok(())
            },
            &newton,
            step,
        )?;

        state[..unknowns].copy_from_slice(&next);
        if step % cfg.store_every == 0 || step == steps {
            times.push(t_next);
            states.push(RadialField::new(Arc::clone(grid), state.clone())?);
        }
    }

    SpaceTimeField::new(Arc::clone(grid), times, states)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euclid3() -> Profile {
        Profile::euclidean(3).unwrap()
    }

    #[test]
    fn constant_state_is_steady() {
        let p = euclid3();
        let g = RadialGrid::uniform(1.0, 32).unwrap();
        let cfg = FdeConfig::new(0.5, 0.05, 0.5).unwrap();
        let c = 2.0;
        let u0 = RadialField::constant(&g, c);
        let traj = solve_fde(&p, &cfg, &g, &u0, c).unwrap();
        for s in traj.states() {
            for &v in s.values() {
                assert!((v - c).abs() < 1e-11, "drifted to {v}");
            }
        }
    }

    #[test]
    fn ordered_data_stay_ordered() {
        let p = euclid3();
        let g = RadialGrid::uniform(1.0, 40).unwrap();
        let cfg = FdeConfig::new(0.5, 0.02, 0.3).unwrap();
        let lo = RadialField::from_fn(&g, |r| 0.5 + 0.2 * (1.0 - r));
        let hi = RadialField::from_fn(&g, |r| 0.8 + 0.3 * (1.0 - r) * (1.0 - r));
        let traj_lo = solve_fde(&p, &cfg, &g, &lo, 0.5).unwrap();
        let traj_hi = solve_fde(&p, &cfg, &g, &hi, 0.8).unwrap();
        let excess = traj_lo.max_excess_over(&traj_hi).unwrap();
        assert!(excess <= 1e-8, "comparison violated by {excess}");
    }

    #[test]
    fn zero_floor_with_zero_states_is_rejected_with_instruction() {
        let p = euclid3();
        let g = RadialGrid::uniform(1.0, 16).unwrap();
        let cfg = FdeConfig::new(0.5, 0.1, 0.5).unwrap();
        let u0 = RadialField::constant(&g, 0.0);
        let err = solve_fde(&p, &cfg, &g, &u0, 1.0).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("mobility_floor"), "unhelpful message: {msg}");
    }

    #[test]
    fn regularized_run_from_zero_data() {
        let p = euclid3();
        let g = RadialGrid::uniform(2.0, 48).unwrap();
        let cfg = FdeConfig::new(0.5, 0.05, 0.5)
            .unwrap()
            .with_mobility_floor(1e-8);
        let u0 = RadialField::constant(&g, 0.0);
        let traj = solve_fde(&p, &cfg, &g, &u0, 1.0).unwrap();
        // Mass enters from the boundary; the center must have risen.
        let center = traj.final_state().values()[0];
        assert!(center > 0.0 && center < 1.0, "center = {center}");
    }

    #[test]
    fn mass_decreases_under_zero_boundary() {
        let p = euclid3();
        let g = RadialGrid::uniform(1.0, 48).unwrap();
        let cfg = FdeConfig::new(0.5, 0.02, 0.4)
            .unwrap()
            .with_mobility_floor(1e-8);
        let u0 = RadialField::from_fn(&g, |r| (1.0 - r * r).max(0.0));
        let traj = solve_fde(&p, &cfg, &g, &u0, 0.0).unwrap();
        let op = FluxOperator::assemble(&p, &g).unwrap();
        let vols = op.cell_volumes(&p).unwrap();
        let mass = |s: &RadialField| -> f64 {
            s.values().iter().zip(&vols).map(|(v, vol)| v * vol).sum()
        };
        let mut prev = f64::INFINITY;
        for s in traj.states() {
            let m = mass(s);
            assert!(m <= prev + 1e-10, "mass increased: {m} > {prev}");
            prev = m;
        }
    }

    #[test]
    fn manufactured_solution_smoke() {
        // u*(r,t) = 2 + cos t cos(pi r / 2R) with the matching source term;
        // a coarse run must already track it to a few times dt + h^2.
        let p = euclid3();
        let r_max = 1.0;
        let g = RadialGrid::uniform(r_max, 64).unwrap();
        let cfg = FdeConfig::new(0.5, 0.005, 0.25).unwrap();
        let k = std::f64::consts::FRAC_PI_2 / r_max;
        let exact = move |r: f64, t: f64| 2.0 + t.cos() * (k * r).cos();
        let forcing = move |r: f64, t: f64| {
            let u = exact(r, t);
            let du_dt = -t.sin() * (k * r).cos();
            // Delta u*^(1/2) on the n=3 flat profile.
            let ur = -t.cos() * k * (k * r).sin();
            let urr = -t.cos() * k * k * (k * r).cos();
            let g = u.sqrt();
            let gr = ur / (2.0 * g);
            let grr = urr / (2.0 * g) - ur * ur / (4.0 * g * g * g);
            let lap = if r < 1e-12 {
                3.0 * urr / (2.0 * g)
            } else {
                grr + 2.0 / r * gr
            };
            du_dt - lap
        };
        let u0 = RadialField::from_fn(&g, |r| exact(r, 0.0));
        let traj = solve_fde_forced(&p, &cfg, &g, &u0, 2.0, Some(&forcing)).unwrap();
        let t_end = traj.horizon();
        let mut worst: f64 = 0.0;
        for (i, &r) in g.nodes().iter().enumerate() {
            worst = worst.max((traj.final_state().values()[i] - exact(r, t_end)).abs());
        }
        assert!(worst < 5e-3, "manufactured error {worst}");
    }

    #[test]
    fn validates_config() {
        assert!(FdeConfig::new(1.2, 0.1, 1.0).is_err());
        assert!(FdeConfig::new(0.5, 0.0, 1.0).is_err());
        assert!(FdeConfig::new(0.5, 2.0, 1.0).is_err());
    }
}
