//! Radial cut-off family phi_R(r) = phi(r/R).
//!
//! phi is 1 on [0,1], 0 on [2, infinity), and bridges (1,2) with the
//! quintic smoothstep 1 - (6t^5 - 15t^4 + 10t^3), t = s - 1. That bridge is
//! C^2 with phi' <= 0, which is all the estimate constants require.

use crate::error::{Error, Result};
use crate::geometry::Profile;

/// The scaled cut-off at one radius scale R.
#[derive(Debug, Clone, Copy)]
pub struct CutoffFamily {
    pub scale: f64,
}

fn smoothstep(t: f64) -> f64 {
    t * t * t * (6.0 * t * t - 15.0 * t + 10.0)
}

fn smoothstep_d1(t: f64) -> f64 {
    30.0 * t * t * (t - 1.0) * (t - 1.0)
}

fn smoothstep_d2(t: f64) -> f64 {
    60.0 * t * (2.0 * t - 1.0) * (t - 1.0)
}

/// phi(s) on the reference scale.
pub fn shape(s: f64) -> f64 {
    if s <= 1.0 {
        1.0
    } else if s >= 2.0 {
        0.0
    } else {
        1.0 - smoothstep(s - 1.0)
    }
}

pub fn shape_d1(s: f64) -> f64 {
    if s <= 1.0 || s >= 2.0 {
        0.0
    } else {
        -smoothstep_d1(s - 1.0)
    }
}

pub fn shape_d2(s: f64) -> f64 {
    if s <= 1.0 || s >= 2.0 {
        0.0
    } else {
        -smoothstep_d2(s - 1.0)
    }
}

impl CutoffFamily {
    pub fn new(scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::invalid("scale", format!("must be positive, got {scale}")));
        }
        Ok(CutoffFamily { scale })
    }

    pub fn phi(&self, r: f64) -> f64 {
        shape(r / self.scale)
    }

    /// |grad phi_R|(r) = |phi'(r/R)| / R.
    pub fn grad_norm(&self, r: f64) -> f64 {
        shape_d1(r / self.scale).abs() / self.scale
    }

    /// Delta phi_R(r) = phi''(r/R)/R^2 + (n-1)(psi'/psi)(r) phi'(r/R)/R.
    pub fn laplacian(&self, p: &Profile, r: f64) -> f64 {
        let s = r / self.scale;
        let drift = (p.dimension() as f64 - 1.0) * p.log_psi_prime(r);
        shape_d2(s) / (self.scale * self.scale) + drift * shape_d1(s) / self.scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_and_range() {
        let c = CutoffFamily::new(2.0).unwrap();
        assert_eq!(c.phi(0.0), 1.0);
        assert_eq!(c.phi(2.0), 1.0);
        assert_eq!(c.phi(4.0), 0.0);
        assert_eq!(c.phi(7.0), 0.0);
        for i in 0..100 {
            let r = 5.0 * i as f64 / 100.0;
            let v = c.phi(r);
            assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn bridge_is_monotone_decreasing() {
        for i in 0..200 {
            let s = 1.0 + i as f64 / 200.0;
            assert!(shape_d1(s) <= 0.0, "phi' = {} at s = {s}", shape_d1(s));
        }
    }

    #[test]
    fn c2_matching_at_the_seams() {
        for (a, b) in [(1.0 - 1e-9, 1.0 + 1e-9), (2.0 - 1e-9, 2.0 + 1e-9)] {
            assert!((shape(a) - shape(b)).abs() < 1e-7);
            assert!((shape_d1(a) - shape_d1(b)).abs() < 1e-6);
            assert!((shape_d2(a) - shape_d2(b)).abs() < 1e-5);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for s in [1.2, 1.5, 1.85] {
            let h = 1e-6;
            let fd1 = (shape(s + h) - shape(s - h)) / (2.0 * h);
            assert!((fd1 - shape_d1(s)).abs() < 1e-7, "s={s}");
            // Wider step for the second difference: cancellation at 1e-6
            // costs more accuracy than the O(h^2) truncation at 1e-4.
            let h = 1e-4;
            let fd2 = (shape(s + h) - 2.0 * shape(s) + shape(s - h)) / (h * h);
            assert!((fd2 - shape_d2(s)).abs() < 1e-5, "s={s}");
        }
    }
}
