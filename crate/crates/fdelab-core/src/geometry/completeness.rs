//! Stochastic-completeness classifier.
//!
//! On model manifolds, stochastic completeness is equivalent to the
//! divergence of int_0^inf H'(r) dr. Numerics cannot decide an improper
//! integral, but it can estimate the tail decay exponent sigma in
//! H'(r) ~ c r^(-sigma) over a finite window: sigma < 1 forces divergence
//! (complete), sigma > 1 forces a finite integral (incomplete), and a band
//! of half-width 0.1 around the borderline exponent 1 is reported as
//! undetermined — exactly at sigma = 1 the integral diverges
//! logarithmically, so the band must never produce "incomplete".

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::QuadCtl;

use super::h_integral::{eval_h_many, h_prime};
use super::profile::Profile;

/// Half-width of the undetermined band around the critical exponent.
pub const FIT_BAND: f64 = 0.1;
/// RMS log-residual above which the tail fit is considered oscillatory.
pub const FIT_RESIDUAL_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Complete,
    Incomplete,
    Undetermined,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Complete => write!(f, "complete"),
            Verdict::Incomplete => write!(f, "incomplete"),
            Verdict::Undetermined => write!(f, "undetermined"),
        }
    }
}

/// One sampled point of the expected-exit-time integrand.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HSample {
    pub r: f64,
    pub h: f64,
    pub h_prime: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompletenessReport {
    pub verdict: Verdict,
    /// Fitted tail decay exponent of H'.
    pub sigma: f64,
    /// Fitted prefactor c in H' ~ c r^(-sigma).
    pub prefactor: f64,
    /// RMS residual of the log-log least-squares fit.
    pub fit_residual: f64,
    /// H evaluated at the horizon (the partial integral).
    pub h_at_horizon: f64,
    pub samples: Vec<HSample>,
}

/// Classify a profile by fitting the tail of H' over [horizon/2, horizon].
pub fn classify_completeness(
    p: &Profile,
    horizon: f64,
    samples: usize,
    ctl: &QuadCtl,
) -> Result<CompletenessReport> {
    if !(horizon >= 10.0) {
        return Err(Error::invalid(
            "horizon",
            format!("must be at least 10, got {horizon}"),
        ));
    }
    if samples < 20 {
        return Err(Error::invalid(
            "samples",
            format!("need at least 20 samples, got {samples}"),
        ));
    }
    if let Some(hull) = p.hull() {
        if horizon > hull {
            return Err(Error::invalid(
                "horizon",
                format!("horizon {horizon} exceeds the table profile hull {hull}"),
            ));
        }
    }

    let radii: Vec<f64> = (0..samples)
        .map(|i| horizon / 2.0 + (horizon / 2.0) * i as f64 / (samples - 1) as f64)
        .collect();
    let h_values = eval_h_many(p, &radii, ctl)?;
    let mut points = Vec::with_capacity(samples);
    for (i, &r) in radii.iter().enumerate() {
        let hp = h_prime(p, r, ctl)?;
        if !hp.is_finite() || !h_values[i].is_finite() {
            return Err(Error::NonFinite(format!("H sample at r = {r}")));
        }
        points.push(HSample {
            r,
            h: h_values[i],
            h_prime: hp,
        });
    }
    let h_at_horizon = points.last().unwrap().h;

    // Least squares on ln H' = ln c - sigma ln r.
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for s in &points {
        let x = s.r.ln();
        let y = s.h_prime.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let sigma = -slope;
    let prefactor = intercept.exp();

    let mut ss = 0.0;
    for s in &points {
        let resid = s.h_prime.ln() - (intercept + slope * s.r.ln());
        ss += resid * resid;
    }
    let fit_residual = (ss / n).sqrt();

    let verdict = if fit_residual > FIT_RESIDUAL_LIMIT {
        Verdict::Undetermined
    } else if sigma <= 1.0 - FIT_BAND {
        Verdict::Complete
    } else if sigma >= 1.0 + FIT_BAND {
        Verdict::Incomplete
    } else {
        Verdict::Undetermined
    };

    Ok(CompletenessReport {
        verdict,
        sigma,
        prefactor,
        fit_residual,
        h_at_horizon,
        samples: points,
    })
}
