//! Local L^1 smoothing estimates of Herrero–Pierre type.
//!
//! For two trajectories of u_t = Delta u^m with u >= v,
//!
//!   [int_{B_R} (u - v)(t)]^(1-m)
//!       <= [int_{B_2R} (u - v)(s)]^(1-m) + H_R |t - s|,
//!
//! and the same with |u - v| when both time derivatives are integrable.
//! The geometric constant is explicit:
//!
//!   H_R = kappa_m sup_{B_2R \ B_R} (|grad phi_R|^2 + |Delta phi_R|)
//!         [mu(B_2R \ B_R)]^(1-m),
//!
//! with kappa_m = (1-m) 2^(1-m) k(k-1) for the cut-off power k, the
//! smallest integer >= 2/(1-m). That kappa is a valid choice read off the
//! chain of elementary bounds, not an optimized one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{unit_sphere_area, Profile, RadialField};
use crate::parabolic::SpaceTimeField;
use crate::quad::{integrate, QuadCtl};

use super::cutoff::CutoffFamily;

/// Relative slack granted to the discrete inequality (stencil O(h^2),
/// backward-Euler O(dt), and quadrature errors all land in this budget).
pub const HP_REL_TOL: f64 = 0.02;

/// kappa_m = (1-m) 2^(1-m) k(k-1), k = ceil(2/(1-m)).
pub fn kappa_m(m: f64) -> Result<f64> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::invalid("m", format!("must lie in (0,1), got {m}")));
    }
    // ceil with a small downward guard: 2/(1-m) is mathematically integral
    // for m like 0.8, but f64 rounding can push it just above the integer.
    let ratio = 2.0 / (1.0 - m);
    let k = (ratio - 1e-9).ceil();
    Ok((1.0 - m) * 2.0_f64.powf(1.0 - m) * k * (k - 1.0))
}

/// The constant's ingredients, kept separate so the composition
/// H_R = kappa * sup * volume^(1-m) can be re-checked exactly.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HpConstant {
    pub value: f64,
    pub kappa: f64,
    /// sup over the annulus of |grad phi_R|^2 + |Delta phi_R|.
    pub sup_term: f64,
    /// mu(B_2R \ B_R).
    pub annulus_volume: f64,
}

/// Compute H_R on the annulus [R, 2R] with `sup_samples` sample points for
/// the sup and adaptive quadrature for the annulus volume.
pub fn hp_constant(
    p: &Profile,
    m: f64,
    radius: f64,
    sup_samples: usize,
    ctl: &QuadCtl,
) -> Result<HpConstant> {
    if !(radius > 0.0) {
        return Err(Error::invalid("radius", format!("must be positive, got {radius}")));
    }
    let samples = sup_samples.max(16);
    let kappa = kappa_m(m)?;
    let cutoff = CutoffFamily::new(radius)?;

    let mut sup_term: f64 = 0.0;
    for i in 0..=samples {
        let r = radius + radius * i as f64 / samples as f64;
        let g = cutoff.grad_norm(r);
        let candidate = g * g + cutoff.laplacian(p, r).abs();
        sup_term = sup_term.max(candidate);
    }

    let omega = unit_sphere_area(p.dimension());
    let q = integrate(|rho| p.volume_density(rho), radius, 2.0 * radius, ctl)?;
    let annulus_volume = omega * q.value;
    if !annulus_volume.is_finite() {
        return Err(Error::NonFinite("annulus volume".into()));
    }

    Ok(HpConstant {
        value: kappa * sup_term * annulus_volume.powf(1.0 - m),
        kappa,
        sup_term,
        annulus_volume,
    })
}

/// Integral of a nodal field over the ball of radius `radius`:
/// omega_{n-1} int_0^radius f~(rho) psi(rho)^(n-1) d rho with f~ the
/// piecewise-linear interpolant. Fixed 5-point Gauss panels per cell keep
/// the quadrature consistent across both sides of the estimate.
pub fn ball_integral(p: &Profile, field: &RadialField, radius: f64) -> Result<f64> {
    let grid = field.grid();
    if radius > grid.outer_radius() * (1.0 + 1e-12) {
        return Err(Error::invalid(
            "radius",
            format!(
                "ball radius {radius} exceeds the grid radius {}",
                grid.outer_radius()
            ),
        ));
    }
    // 5-point Gauss–Legendre on [-1, 1].
    const X: [f64; 5] = [
        -0.906179845938664,
        -0.538469310105683,
        0.0,
        0.538469310105683,
        0.906179845938664,
    ];
    const W: [f64; 5] = [
        0.236926885056189,
        0.478628670499366,
        0.568888888888889,
        0.478628670499366,
        0.236926885056189,
    ];
    let nodes = grid.nodes();
    let mut acc = 0.0;
    for i in 0..nodes.len() - 1 {
        let a = nodes[i];
        if a >= radius {
            break;
        }
        let b = nodes[i + 1].min(radius);
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        for (x, w) in X.iter().zip(W.iter()) {
            let rho = c + h * x;
            acc += w * h * field.interp(rho) * p.volume_density(rho);
        }
    }
    Ok(unit_sphere_area(p.dimension()) * acc)
}

/// Both sides of one estimate instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HpReport {
    pub lhs: f64,
    pub rhs: f64,
    pub h_r: f64,
    /// rhs - lhs; the estimate passes when this is >= -HP_REL_TOL * rhs.
    pub slack: f64,
    pub pass: bool,
}

fn build_report(lhs_int: f64, rhs_int: f64, h_r: f64, m: f64, dt: f64) -> HpReport {
    let lhs = lhs_int.max(0.0).powf(1.0 - m);
    let rhs = rhs_int.max(0.0).powf(1.0 - m) + h_r * dt;
    let slack = rhs - lhs;
    HpReport {
        lhs,
        rhs,
        h_r,
        slack,
        pass: slack >= -HP_REL_TOL * rhs,
    }
}

fn common_checks(
    u: &SpaceTimeField,
    v: &SpaceTimeField,
    m: f64,
    radius: f64,
) -> Result<()> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::invalid("m", format!("must lie in (0,1), got {m}")));
    }
    if !u.same_mesh(v) {
        return Err(Error::MeshMismatch(
            "estimate needs both trajectories on one mesh".into(),
        ));
    }
    if u.grid().outer_radius() < 2.0 * radius {
        return Err(Error::invalid(
            "radius",
            format!(
                "the estimate reads on B_2R = B_{}, beyond the grid radius {}",
                2.0 * radius,
                u.grid().outer_radius()
            ),
        ));
    }
    Ok(())
}

/// Ordered variant: requires u >= v (within 1e-8 nodewise at all stored
/// times) and controls int (u - v).
#[allow(clippy::too_many_arguments)]
pub fn check_hp_ordered(
    u: &SpaceTimeField,
    v: &SpaceTimeField,
    p: &Profile,
    m: f64,
    radius: f64,
    t: f64,
    s: f64,
    ctl: &QuadCtl,
) -> Result<HpReport> {
    common_checks(u, v, m, radius)?;
    let excess = v.max_excess_over(u)?;
    if excess > 1e-8 {
        return Err(Error::invalid(
            "u,v",
            format!(
                "ordered estimate requires u >= v; v exceeds u by {excess:.3e} \
                 (use the strong variant for crossing pairs)"
            ),
        ));
    }
    let ut = u.state_at(t)?;
    let vt = v.state_at(t)?;
    let us = u.state_at(s)?;
    let vs = v.state_at(s)?;
    let diff_t = difference_field(ut, vt, |a, b| a - b)?;
    let diff_s = difference_field(us, vs, |a, b| a - b)?;
    let lhs_int = ball_integral(p, &diff_t, radius)?;
    let rhs_int = ball_integral(p, &diff_s, 2.0 * radius)?;
    let h_r = hp_constant(p, m, radius, 2048, ctl)?.value;
    Ok(build_report(lhs_int, rhs_int, h_r, m, (t - s).abs()))
}

/// Strong variant: no ordering, controls int |u - v|.
#[allow(clippy::too_many_arguments)]
pub fn check_hp_strong(
    u: &SpaceTimeField,
    v: &SpaceTimeField,
    p: &Profile,
    m: f64,
    radius: f64,
    t: f64,
    s: f64,
    ctl: &QuadCtl,
) -> Result<HpReport> {
    common_checks(u, v, m, radius)?;
    let ut = u.state_at(t)?;
    let vt = v.state_at(t)?;
    let us = u.state_at(s)?;
    let vs = v.state_at(s)?;
    let diff_t = difference_field(ut, vt, |a, b| (a - b).abs())?;
    let diff_s = difference_field(us, vs, |a, b| (a - b).abs())?;
    let lhs_int = ball_integral(p, &diff_t, radius)?;
    let rhs_int = ball_integral(p, &diff_s, 2.0 * radius)?;
    let h_r = hp_constant(p, m, radius, 2048, ctl)?.value;
    Ok(build_report(lhs_int, rhs_int, h_r, m, (t - s).abs()))
}

fn difference_field(
    a: &RadialField,
    b: &RadialField,
    op: impl Fn(f64, f64) -> f64,
) -> Result<RadialField> {
    let values = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| op(*x, *y))
        .collect();
    RadialField::new(std::sync::Arc::clone(a.grid()), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::RadialGrid;
    use crate::parabolic::{solve_lifted, FdeConfig, LiftedProblem};

    #[test]
    fn kappa_values() {
        // m = 1/2: k = 4, kappa = (1/2) sqrt(2) * 12 = 6 sqrt(2).
        let oracle = 0.5 * 2.0_f64.powf(0.5) * (4.0 * 3.0);
        let got = kappa_m(0.5).unwrap();
        assert!((got - oracle).abs() < 1e-13);
        assert!((got - 8.48528).abs() < 1e-5);
        // m = 0.3: k = ceil(2/0.7) = 3.
        let k3 = kappa_m(0.3).unwrap();
        assert!((k3 - 0.7 * 2.0_f64.powf(0.7) * 6.0).abs() < 1e-13);
        // m = 0.8: 2/(1-m) = 10 exactly; the f64 guard must keep k = 10.
        let k10 = kappa_m(0.8).unwrap();
        let expect = 0.2 * 2.0_f64.powf(0.2) * 90.0;
        assert!((k10 - expect).abs() < 1e-12, "{k10} vs {expect}");
    }

    #[test]
    fn constant_is_positive_and_finite() {
        let ctl = QuadCtl::default();
        for p in [Profile::euclidean(3).unwrap(), Profile::hyperbolic(1.0, 2).unwrap()] {
            for radius in [1.0, 10.0] {
                let h = hp_constant(&p, 0.5, radius, 512, &ctl).unwrap();
                assert!(h.value > 0.0 && h.value.is_finite(), "H_{radius} = {}", h.value);
            }
        }
    }

    #[test]
    fn composition_recomputes_exactly() {
        let p = Profile::hyperbolic(1.0, 3).unwrap();
        let h = hp_constant(&p, 0.5, 0.75, 512, &QuadCtl::default()).unwrap();
        let recomposed = h.kappa * h.sup_term * h.annulus_volume.powf(0.5);
        assert!((recomposed - h.value).abs() <= 1e-12 * h.value);
    }

    #[test]
    fn flat_space_scaling_law() {
        // On the flat profile the sup term scales as R^-2 exactly and the
        // annulus volume as R^3, so H_2R / H_R = 2^(3(1-m) - 2).
        let p = Profile::euclidean(3).unwrap();
        let ctl = QuadCtl::default();
        let m = 0.5;
        let h1 = hp_constant(&p, m, 1.0, 4096, &ctl).unwrap();
        let h2 = hp_constant(&p, m, 2.0, 4096, &ctl).unwrap();
        let got = h2.value / h1.value;
        let expect = 2.0_f64.powf(3.0 * (1.0 - m) - 2.0);
        assert!((got - expect).abs() < 1e-9, "{got} vs {expect}");
    }

    #[test]
    fn ball_integral_flat_ball() {
        // int over B_1 of 1 in R^3 = 4 pi / 3.
        let p = Profile::euclidean(3).unwrap();
        let g = RadialGrid::uniform(2.0, 64).unwrap();
        let one = RadialField::constant(&g, 1.0);
        let v = ball_integral(&p, &one, 1.0).unwrap();
        assert!((v - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-10);
    }

    fn small_pair() -> (Profile, SpaceTimeField, SpaceTimeField) {
        let p = Profile::euclidean(3).unwrap();
        let g = RadialGrid::uniform(2.5, 50).unwrap();
        let cfg = FdeConfig::new(0.5, 0.05, 1.0).unwrap();
        let u0 = RadialField::from_fn(&g, |r| (1.0 - r).max(0.0));
        let lo = solve_lifted(
            &p,
            &cfg,
            &LiftedProblem {
                ell: 0.05,
                beta: 0.5,
                radius: 2.5,
                u0: u0.clone(),
            },
            &g,
        )
        .unwrap();
        let hi = solve_lifted(
            &p,
            &cfg,
            &LiftedProblem {
                ell: 0.05,
                beta: 1.5,
                radius: 2.5,
                u0,
            },
            &g,
        )
        .unwrap();
        (p, hi, lo)
    }

    #[test]
    fn equal_trajectories_pass_trivially() {
        let (p, hi, _) = small_pair();
        let rep =
            check_hp_ordered(&hi, &hi, &p, 0.5, 1.0, 1.0, 0.5, &QuadCtl::default()).unwrap();
        assert!(rep.pass);
        assert!(rep.lhs.abs() < 1e-14);
        assert!(rep.slack >= 0.0);
    }

    #[test]
    fn equal_times_reduce_to_domain_monotonicity() {
        let (p, hi, lo) = small_pair();
        let rep = check_hp_ordered(&hi, &lo, &p, 0.5, 1.0, 0.5, 0.5, &QuadCtl::default()).unwrap();
        assert!(rep.pass, "slack = {}", rep.slack);
        assert!(rep.slack >= 0.0);
    }

    #[test]
    fn ordered_ladder_pair_passes() {
        let (p, hi, lo) = small_pair();
        let rep = check_hp_ordered(&hi, &lo, &p, 0.5, 1.0, 1.0, 0.5, &QuadCtl::default()).unwrap();
        assert!(rep.pass, "slack = {}, rhs = {}", rep.slack, rep.rhs);
    }

    #[test]
    fn ordered_variant_rejects_crossing_pairs() {
        let (p, hi, lo) = small_pair();
        assert!(check_hp_ordered(&lo, &hi, &p, 0.5, 1.0, 1.0, 0.5, &QuadCtl::default()).is_err());
    }

    #[test]
    fn strong_variant_is_symmetric() {
        let (p, hi, lo) = small_pair();
        let ab = check_hp_strong(&hi, &lo, &p, 0.5, 1.0, 1.0, 0.5, &QuadCtl::default()).unwrap();
        let ba = check_hp_strong(&lo, &hi, &p, 0.5, 1.0, 1.0, 0.5, &QuadCtl::default()).unwrap();
        assert!((ab.lhs - ba.lhs).abs() < 1e-14);
        assert!((ab.rhs - ba.rhs).abs() < 1e-14);
        assert!(ab.pass && ba.pass);
    }

    #[test]
    fn report_serializes_with_fixed_keys() {
        let rep = HpReport {
            lhs: 1.0,
            rhs: 2.0,
            h_r: 3.0,
            slack: 1.0,
            pass: true,
        };
        let json = serde_json::to_string(&rep).unwrap();
        for key in ["\"lhs\"", "\"rhs\"", "\"h_r\"", "\"slack\"", "\"pass\""] {
            assert!(json.contains(key), "missing {key} in {json}");
        }
    }
}
