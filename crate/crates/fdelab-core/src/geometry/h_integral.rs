//! The volume-ratio integral H and its derivative.
//!
//! H(r) = int_0^r H'(rho) d rho with
//! H'(rho) = [int_0^rho psi(zeta)^(n-1) d zeta] / psi(rho)^(n-1).
//!
//! H' is the expected exit time scale of Brownian motion from the ball of
//! radius rho; divergence of H at infinity is the completeness criterion
//! this crate classifies numerically. Two identities pin H down and are
//! asserted in tests: H'(r)^2 <= 2 H(r), and
//! H'' + (n-1)(psi'/psi) H' = 1 for r > 0.
//!
//! The inner/outer ratio is evaluated in log space,
//! H'(rho) = int_0^rho exp[(n-1)(log psi(zeta) - log psi(rho))] d zeta,
//! whose integrand lies in (0, 1]; this survives profiles whose volume
//! density overflows f64 (e.g. the power-exponential family at moderate
//! radii). The ratio has a removable singularity at rho = 0 where it
//! behaves like rho/n, and is evaluated by that limit there.

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_with_breakpoints, QuadCtl};

use super::profile::Profile;

/// Radius below which H' is taken as its analytic limit rho/n.
const LIMIT_RADIUS: f64 = 1e-8;

/// H'(r) to the control's relative tolerance.
pub fn h_prime(p: &Profile, r: f64, ctl: &QuadCtl) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::invalid("r", format!("radius must be nonnegative, got {r}")));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let n = p.dimension() as f64;
    if r < LIMIT_RADIUS {
        return Ok(r / n);
    }
    let exponent = n - 1.0;
    let log_at_r = p.log_psi(r);
    let integrand = |zeta: f64| {
        if zeta <= 0.0 {
            0.0
        } else {
            (exponent * (p.log_psi(zeta) - log_at_r)).exp()
        }
    };
    // On steeply warped profiles the integrand is a boundary layer of width
    // ~1/((n-1) (log psi)'(r)) at zeta = r, far below the panel scale; seed
    // panels geometrically at that scale so the adaptive pass sees it.
    let layer = (exponent * p.log_psi_prime(r)).max(1.0 / r).recip();
    let mut seeds = Vec::new();
    let mut offset = layer;
    while r - offset > 0.25 * r && seeds.len() < 60 {
        seeds.push(r - offset);
        offset *= 2.0;
    }
    let q = integrate_with_breakpoints(integrand, 0.0, r, &seeds, ctl)?;
    if !q.value.is_finite() {
        return Err(Error::NonFinite(format!("H'({r})")));
    }
    Ok(q.value)
}

/// H(r) to the control's relative tolerance.
pub fn eval_h(p: &Profile, r: f64, ctl: &QuadCtl) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::invalid("r", format!("radius must be nonnegative, got {r}")));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    eval_h_segment(p, 0.0, r, ctl)
}

/// int_a^b H'(rho) d rho. Inner relative errors integrate against the same
/// measure as the outer sum, so the inner quadrature runs at the outer
/// tolerance (floored near the error estimator's roundoff floor); an inner
/// failure surfaces as a non-finite sample and is reported.
fn eval_h_segment(p: &Profile, a: f64, b: f64, ctl: &QuadCtl) -> Result<f64> {
    let n = p.dimension() as f64;
    let inner_ctl = QuadCtl {
        tol: ctl.tol.max(2e-13),
        max_panels: ctl.max_panels,
    };
    let integrand = |rho: f64| {
        if rho < LIMIT_RADIUS {
            rho / n
        } else {
            h_prime(p, rho, &inner_ctl).unwrap_or(f64::NAN)
        }
    };
    let q = integrate(integrand, a, b, ctl)?;
    if !q.value.is_finite() {
        return Err(Error::NonFinite(format!("H on [{a}, {b}]")));
    }
    Ok(q.value)
}

/// H at each of a sorted list of radii, computed incrementally.
pub fn eval_h_many(p: &Profile, radii: &[f64], ctl: &QuadCtl) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(radii.len());
    let mut prev_r = 0.0;
    let mut acc = 0.0;
    for &r in radii {
        if !(r >= prev_r) {
            return Err(Error::invalid(
                "radii",
                format!("radii must be nondecreasing, got {r} after {prev_r}"),
            ));
        }
        if r > prev_r {
            acc += eval_h_segment(p, prev_r, r, ctl)?;
            prev_r = r;
        }
        out.push(acc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Closed forms used as oracles:
    //   euclidean, dim n:  H(r) = r^2 / (2n)
    //   hyperbolic a=1, n=2:  H(r) = 2 ln cosh(r/2)
    //   power-exponential q=3, n=3:  H'(r) = (1 - e^(-2 r^3 / 3)) / (2 r^2)

    #[test]
    fn euclidean_closed_form() {
        let ctl = QuadCtl::default();
        for n in [2u32, 3, 5] {
            let p = Profile::euclidean(n).unwrap();
            for r in [0.5, 1.0, 2.0] {
                let h = eval_h(&p, r, &ctl).unwrap();
                let exact = r * r / (2.0 * n as f64);
                assert!(
                    (h - exact).abs() < 1e-11,
                    "n={n} r={r}: {h} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn euclidean_example_value() {
        let p = Profile::euclidean(3).unwrap();
        let h = eval_h(&p, 2.0, &QuadCtl::default()).unwrap();
        assert!((h - 2.0 / 3.0).abs() < 1e-11, "H(2) = {h}");
    }

    #[test]
    fn hyperbolic_closed_form() {
        let p = Profile::hyperbolic(1.0, 2).unwrap();
        let ctl = QuadCtl::default();
        for r in [1.0_f64, 2.0] {
            let h = eval_h(&p, r, &ctl).unwrap();
            let exact = 2.0 * (r / 2.0).cosh().ln();
            assert!((h - exact).abs() < 1e-9, "r={r}: {h} vs {exact}");
        }
        // Frozen from the closed form: 2 ln cosh(1) = 0.8675616609660542.
        let h2 = eval_h(&p, 2.0, &ctl).unwrap();
        assert!((h2 - 0.8675616609660542).abs() < 1e-9);
    }

    #[test]
    fn zero_radius_is_zero() {
        for p in [
            Profile::euclidean(3).unwrap(),
            Profile::hyperbolic(1.0, 4).unwrap(),
            Profile::power_exponential(3.0, 3).unwrap(),
        ] {
            assert_eq!(eval_h(&p, 0.0, &QuadCtl::default()).unwrap(), 0.0);
            assert_eq!(h_prime(&p, 0.0, &QuadCtl::default()).unwrap(), 0.0);
        }
    }

    #[test]
    fn power_exponential_h_prime_closed_form() {
        let p = Profile::power_exponential(3.0, 3).unwrap();
        let ctl = QuadCtl::with_tol(1e-12);
        for r in [0.5_f64, 1.0, 2.0, 5.0, 20.0] {
            let hp = h_prime(&p, r, &ctl).unwrap();
            let exact = (1.0 - (-2.0 * r.powi(3) / 3.0).exp()) / (2.0 * r * r);
            assert!(
                ((hp - exact) / exact).abs() < 1e-9,
                "r={r}: {hp} vs {exact}"
            );
        }
    }

    #[test]
    fn h_prime_limit_matches_small_radius() {
        let p = Profile::euclidean(3).unwrap();
        let ctl = QuadCtl::default();
        let r = 2e-8; // just above the patch threshold
        let hp = h_prime(&p, r, &ctl).unwrap();
        assert!((hp - r / 3.0).abs() < 1e-20);
    }

    #[test]
    fn h_is_monotone_on_samples() {
        let ctl = QuadCtl::default();
        for p in [
            Profile::euclidean(3).unwrap(),
            Profile::hyperbolic(1.0, 3).unwrap(),
            Profile::power_exponential(3.0, 3).unwrap(),
        ] {
            let radii: Vec<f64> = (1..=20).map(|i| 0.25 * i as f64).collect();
            let hs = eval_h_many(&p, &radii, &ctl).unwrap();
            for w in hs.windows(2) {
                assert!(w[1] > w[0], "H not strictly increasing: {w:?}");
            }
        }
    }

    #[test]
    fn eval_h_many_matches_pointwise() {
        let p = Profile::hyperbolic(1.0, 3).unwrap();
        let ctl = QuadCtl::default();
        let radii = [0.5, 1.0, 3.0];
        let many = eval_h_many(&p, &radii, &ctl).unwrap();
        for (i, &r) in radii.iter().enumerate() {
            let single = eval_h(&p, r, &ctl).unwrap();
            assert!((many[i] - single).abs() < 1e-10, "r={r}");
        }
    }

    #[test]
    fn gradient_squared_bounded_by_twice_h() {
        // H'(r)^2 <= 2 H(r), relative slack 1e-6.
        let ctl = QuadCtl::default();
        for p in [
            Profile::euclidean(3).unwrap(),
            Profile::hyperbolic(1.0, 3).unwrap(),
            Profile::power_exponential(3.0, 3).unwrap(),
        ] {
            let radii: Vec<f64> = (1..=30).map(|i| 0.15 * i as f64).collect();
            let hs = eval_h_many(&p, &radii, &ctl).unwrap();
            for (i, &r) in radii.iter().enumerate() {
                let hp = h_prime(&p, r, &ctl).unwrap();
                let slack = 2.0 * hs[i] - hp * hp;
                assert!(
                    slack >= -1e-6 * (2.0 * hs[i]),
                    "violated at r={r}: H'={hp}, H={}",
                    hs[i]
                );
            }
        }
    }
}
