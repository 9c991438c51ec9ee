//! The time-weighted contraction functional and the uniqueness probe.
//!
//! For two trajectories u, v the functional
//!
//!   W(r) = int_0^t0 |u^m - v^m|(r, s) e^-s ds
//!
//! is, in the continuum, a nonnegative subsolution of
//! Delta W >= alpha W^(1/m) with alpha = (2 - 2 e^-t0)^(-(1-m)/m); the
//! nonexistence of such subsolutions forces W = 0, hence u = v. The probe
//! quantifies how close the discrete pair is to that conclusion: sup W on a
//! probe ball, the worst (most negative) subsolution defect, and the
//! explicit barrier value W would have to stay under.

use serde::{Deserialize, Serialize};

use crate::elliptic::barrier::{BarrierEvaluator, BarrierSpec};
use crate::error::{Error, Result};
use crate::geometry::laplacian::radial_laplacian;
use crate::geometry::{Profile, RadialField};
use crate::parabolic::solver::mobility;
use crate::parabolic::SpaceTimeField;
use crate::quad::QuadCtl;

/// Smallest admissible diffusion exponent in the probe (1/m overflows the
/// power computations far below this).
pub const MIN_PROBE_M: f64 = 0.05;

/// alpha = (2 - 2 e^-t0)^(-(1-m)/m).
pub fn uniqueness_alpha(m: f64, t0: f64) -> f64 {
    (2.0 - 2.0 * (-t0).exp()).powf(-(1.0 - m) / m)
}

/// W(r) = int_0^t0 |u^m - v^m| e^-s ds by trapezoid over the stored times
/// (clipped, with linear interpolation, if t0 falls between samples).
pub fn contraction_functional(
    u: &SpaceTimeField,
    v: &SpaceTimeField,
    m: f64,
    t0: f64,
) -> Result<RadialField> {
    if !u.same_mesh(v) {
        return Err(Error::MeshMismatch(
            "contraction functional needs a shared space-time mesh".into(),
        ));
    }
    if !(t0 > 0.0) || t0 > u.horizon() * (1.0 + 1e-12) {
        return Err(Error::invalid(
            "t0",
            format!("need 0 < t0 <= horizon = {}, got {t0}", u.horizon()),
        ));
    }
    let nn = u.grid().num_nodes();
    let times = u.times();
    let integrand = |idx: usize, node: usize| -> f64 {
        let s = times[idx];
        let a = mobility(u.states()[idx].values()[node], m, 0.0);
        let b = mobility(v.states()[idx].values()[node], m, 0.0);
        (a - b).abs() * (-s).exp()
    };

    let mut acc = vec![0.0; nn];
    for idx in 1..times.len() {
        let (t_lo, t_hi) = (times[idx - 1], times[idx]);
        if t_lo >= t0 {
            break;
        }
        if t_hi <= t0 {
            let h = t_hi - t_lo;
            for node in 0..nn {
                acc[node] += 0.5 * h * (integrand(idx - 1, node) + integrand(idx, node));
            }
        } else {
            // Partial cell [t_lo, t0]: interpolate the integrand linearly.
            let h = t0 - t_lo;
            let frac = h / (t_hi - t_lo);
            for node in 0..nn {
                let f_lo = integrand(idx - 1, node);
                let f_hi = integrand(idx, node);
                let f_t0 = f_lo + frac * (f_hi - f_lo);
                acc[node] += 0.5 * h * (f_lo + f_t0);
            }
        }
    }
    RadialField::new(std::sync::Arc::clone(u.grid()), acc)
}

/// Optional overrides for [`uniqueness_probe`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ProbeOptions {
    /// Replace the derived alpha.
    pub alpha_override: Option<f64>,
    /// Probe ball radius; defaults to half the grid radius.
    pub probe_radius: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeReport {
    pub sup_w: f64,
    /// min over interior nodes of Delta_h W - alpha W^(1/m); the continuum
    /// forces this to be >= 0 up to initial-trace and discretization error.
    pub min_defect: f64,
    pub alpha: f64,
    pub t0: f64,
    pub probe_radius: f64,
    /// Explicit barrier for Delta W = alpha W^(1/m) on the grid's ball,
    /// evaluated at the probe radius; W must sit far below it.
    pub barrier_bound: f64,
}

/// Evaluate the uniqueness mechanism on a trajectory pair.
pub fn uniqueness_probe(
    u: &SpaceTimeField,
    v: &SpaceTimeField,
    p: &Profile,
    m: f64,
    t0: f64,
    opts: &ProbeOptions,
    quad: &QuadCtl,
) -> Result<ProbeReport> {
    if !(m >= MIN_PROBE_M && m < 1.0) {
        return Err(Error::invalid(
            "m",
            format!("probe requires m in [{MIN_PROBE_M}, 1), got {m}"),
        ));
    }
    let w = contraction_functional(u, v, m, t0)?;
    let alpha = opts.alpha_override.unwrap_or_else(|| uniqueness_alpha(m, t0));
    let p_nl = 1.0 / m;
    let radius = u.grid().outer_radius();
    let probe_radius = opts.probe_radius.unwrap_or(0.5 * radius);
    if !(probe_radius > 0.0 && probe_radius < radius) {
        return Err(Error::invalid(
            "probe_radius",
            format!("must lie in (0, {radius}), got {probe_radius}"),
        ));
    }

    let sup_w = w.max_within(probe_radius);

    let lap = radial_laplacian(p, &w)?;
    let mut min_defect = f64::INFINITY;
    for i in 0..w.grid().num_nodes() - 1 {
        let defect = lap.values.values()[i] - alpha * w.values()[i].max(0.0).powf(p_nl);
        min_defect = min_defect.min(defect);
    }

    let spec = BarrierSpec::new(p_nl, alpha, radius)?;
    let barrier_bound = BarrierEvaluator::new(p, spec, quad)?.eval(probe_radius, quad)?;

    Ok(ProbeReport {
        sup_w,
        min_defect,
        alpha,
        t0,
        probe_radius,
        barrier_bound,
    })
}
