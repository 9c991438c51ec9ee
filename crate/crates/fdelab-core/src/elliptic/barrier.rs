//! Explicit blow-up barriers for Delta W = alpha W^p on balls.
//!
//! For p > 1 the radial function
//!
//!   W(r) = C H(R)^(1/(p-1)) / [H(R) - H(r)]^(2/(p-1))
//!
//! is a supersolution of Delta W <= W^p on the ball of radius R once the
//! constant satisfies C >= [2(3p+1)/(p-1)^2]^(1/(p-1)); it diverges at the
//! boundary and therefore dominates every subsolution inside. The general
//! coefficient alpha is absorbed by the scaling W_alpha = alpha^(-1/(p-1)) W.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::h_integral::{eval_h, eval_h_many};
use crate::geometry::{Profile, RadialField, RadialGrid};
use crate::quad::QuadCtl;

/// Smallest constant the sufficiency argument provides:
/// [2(3p+1)/(p-1)^2]^(1/(p-1)).
pub fn default_barrier_constant(p: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::invalid(
            "p",
            format!("nonlinearity exponent must exceed 1, got {p}"),
        ));
    }
    let base = 2.0 * (3.0 * p + 1.0) / ((p - 1.0) * (p - 1.0));
    Ok(base.powf(1.0 / (p - 1.0)))
}

/// Parameters of one barrier: exponent, coefficient, blow-up radius, and
/// the barrier constant.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BarrierSpec {
    pub p: f64,
    pub alpha: f64,
    pub radius: f64,
    pub constant: f64,
}

impl BarrierSpec {
    /// Build with the default constant for the given exponent.
    pub fn new(p: f64, alpha: f64, radius: f64) -> Result<Self> {
        let constant = default_barrier_constant(p)?;
        BarrierSpec::with_constant(p, alpha, radius, constant)
    }

    pub fn with_constant(p: f64, alpha: f64, radius: f64, constant: f64) -> Result<Self> {
        if !(p > 1.0) {
            return Err(Error::invalid("p", format!("must exceed 1, got {p}")));
        }
        if !(alpha > 0.0) {
            return Err(Error::invalid("alpha", format!("must be positive, got {alpha}")));
        }
        if !(radius > 0.0) {
            return Err(Error::invalid("radius", format!("must be positive, got {radius}")));
        }
        let floor = default_barrier_constant(p)?;
        if constant < floor * (1.0 - 1e-12) {
            return Err(Error::invalid(
                "constant",
                format!("barrier constant {constant} is below the sufficient value {floor}"),
            ));
        }
        Ok(BarrierSpec {
            p,
            alpha,
            radius,
            constant,
        })
    }
}

/// Caches H(R) so repeated evaluations of one barrier share the quadrature.
#[derive(Debug, Clone)]
pub struct BarrierEvaluator<'a> {
    profile: &'a Profile,
    spec: BarrierSpec,
    h_at_radius: f64,
}

impl<'a> BarrierEvaluator<'a> {
    pub fn new(profile: &'a Profile, spec: BarrierSpec, ctl: &QuadCtl) -> Result<Self> {
        let h_at_radius = eval_h(profile, spec.radius, ctl)?;
        Ok(BarrierEvaluator {
            profile,
            spec,
            h_at_radius,
        })
    }

    pub fn h_at_radius(&self) -> f64 {
        self.h_at_radius
    }

    fn value_from_h(&self, h_at_r: f64) -> f64 {
        let s = &self.spec;
        let gap = self.h_at_radius - h_at_r;
        s.alpha.powf(-1.0 / (s.p - 1.0))
            * s.constant
            * self.h_at_radius.powf(1.0 / (s.p - 1.0))
            / gap.powf(2.0 / (s.p - 1.0))
    }

    /// Barrier value at radius r in [0, R).
    pub fn eval(&self, r: f64, ctl: &QuadCtl) -> Result<f64> {
        if !(r >= 0.0) || r >= self.spec.radius {
            return Err(Error::invalid(
                "r",
                format!(
                    "barrier is defined on [0, R) with R = {}; got r = {r} (blow-up locus)",
                    self.spec.radius
                ),
            ));
        }
        Ok(self.value_from_h(eval_h(self.profile, r, ctl)?))
    }

    /// Barrier sampled on a grid strictly inside the blow-up radius.
    pub fn field(&self, grid: &std::sync::Arc<RadialGrid>, ctl: &QuadCtl) -> Result<RadialField> {
        if grid.outer_radius() >= self.spec.radius {
            return Err(Error::invalid(
                "grid",
                format!(
                    "grid reaches {} but the barrier blows up at {}",
                    grid.outer_radius(),
                    self.spec.radius
                ),
            ));
        }
        let hs = eval_h_many(self.profile, grid.nodes(), ctl)?;
        let values = hs.iter().map(|&h| self.value_from_h(h)).collect();
        RadialField::new(std::sync::Arc::clone(grid), values)
    }
}

/// One-off barrier evaluation; builds the evaluator internally.
pub fn eval_barrier(p: &Profile, spec: &BarrierSpec, r: f64, ctl: &QuadCtl) -> Result<f64> {
    BarrierEvaluator::new(p, *spec, ctl)?.eval(r, ctl)
}
