//! Warping profiles of rotationally symmetric model manifolds.
//!
//! A model manifold of dimension n is determined by a warping function psi
//! with psi(0) = 0, psi'(0) = 1 and psi' >= 0; the metric is
//! dr^2 + psi(r)^2 dS^2 and radial functions see the Laplacian
//! f'' + (n-1)(psi'/psi) f'. Volume growth enters all estimates through the
//! density psi^(n-1), which for steep profiles overflows f64 long before
//! the quantities of interest do, so the profile also exposes log psi and
//! (log psi)' for ratio computations done in log space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Declarative description of a profile, as read from scenario configs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileSpec {
    /// psi(r) = r (flat space).
    Euclidean { n: u32 },
    /// psi(r) = sinh(a r)/a, constant curvature -a^2.
    Hyperbolic { a: f64, n: u32 },
    /// psi(r) = r exp(r^q / q); radial curvature grows like r^(2q-2), so
    /// q = 2 is the quadratic-critical case and q > 2 is superquadratic.
    PowerExponential { q: f64, n: u32 },
    /// Sampled warping function, monotonically interpolated.
    Table { n: u32, samples: Vec<TableSample> },
}

/// One row of a tabulated profile: radius, psi, and optionally psi'.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TableSample {
    pub r: f64,
    pub psi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dpsi: Option<f64>,
}

#[derive(Debug, Clone)]
enum Kind {
    Euclidean,
    Hyperbolic { a: f64 },
    PowerExponential { q: f64 },
    Table(MonotoneCubic),
}

/// An immutable, validated warping profile together with the dimension.
#[derive(Debug, Clone)]
pub struct Profile {
    kind: Kind,
    n: u32,
}

impl Profile {
    /// Build and validate a profile from its descriptor.
    pub fn new(spec: &ProfileSpec) -> Result<Self> {
        let (kind, n) = match spec {
            ProfileSpec::Euclidean { n } => (Kind::Euclidean, *n),
            ProfileSpec::Hyperbolic { a, n } => {
                if !(*a > 0.0) {
                    return Err(Error::invalid(
                        "profile.a",
                        format!("curvature scale must be positive, got {a}"),
                    ));
                }
                (Kind::Hyperbolic { a: *a }, *n)
            }
            ProfileSpec::PowerExponential { q, n } => {
                if !(*q > 1.0) {
                    return Err(Error::invalid(
                        "profile.q",
                        format!("exponent must satisfy q > 1, got {q}"),
                    ));
                }
                (Kind::PowerExponential { q: *q }, *n)
            }
            ProfileSpec::Table { n, samples } => {
                (Kind::Table(MonotoneCubic::from_samples(samples)?), *n)
            }
        };
        if n < 2 {
            return Err(Error::invalid(
                "profile.n",
                format!("dimension must be at least 2, got {n}"),
            ));
        }
        let profile = Profile { kind, n };
        profile.check_origin_behavior()?;
        Ok(profile)
    }

    pub fn euclidean(n: u32) -> Result<Self> {
        Profile::new(&ProfileSpec::Euclidean { n })
    }

    pub fn hyperbolic(a: f64, n: u32) -> Result<Self> {
        Profile::new(&ProfileSpec::Hyperbolic { a, n })
    }

    pub fn power_exponential(q: f64, n: u32) -> Result<Self> {
        Profile::new(&ProfileSpec::PowerExponential { q, n })
    }

    /// Parse from CSV with a required header `r,psi` or `r,psi,dpsi`.
    pub fn from_csv(n: u32, text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("profile table: empty file".into()))?;
        let cols: Vec<&str> = header.split(',').map(|c| c.trim()).collect();
        let with_dpsi = match cols.as_slice() {
            ["r", "psi"] => false,
            ["r", "psi", "dpsi"] => true,
            _ => {
                return Err(Error::Parse(format!(
                    "profile table: expected header 'r,psi' or 'r,psi,dpsi', got '{header}'"
                )))
            }
        };
        let mut samples = Vec::new();
        for (idx, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').map(|c| c.trim()).collect();
            let expected = if with_dpsi { 3 } else { 2 };
            if fields.len() != expected {
                return Err(Error::Parse(format!(
                    "profile table row {}: expected {expected} fields, got {}",
                    idx + 2,
                    fields.len()
                )));
            }
            let parse = |s: &str, name: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("profile table row {}: bad {name} '{s}'", idx + 2)))
            };
            samples.push(TableSample {
                r: parse(fields[0], "r")?,
                psi: parse(fields[1], "psi")?,
                dpsi: if with_dpsi {
                    Some(parse(fields[2], "dpsi")?)
                } else {
                    None
                },
            });
        }
        Profile::new(&ProfileSpec::Table { n, samples })
    }

    fn check_origin_behavior(&self) -> Result<()> {
        // psi(0) = 0 and psi'(0) = 1, probed at r = 1e-8. The probe applies
        // to the analytic kinds; tables are only as good as their data.
        if matches!(self.kind, Kind::Table(_)) {
            return Ok(());
        }
        let probe = 1e-8;
        let slope = self.psi(probe) / probe;
        if !((slope - 1.0).abs() <= 1e-6) {
            return Err(Error::invalid(
                "profile",
                format!("psi'(0) must equal 1: psi({probe:e})/{probe:e} = {slope}"),
            ));
        }
        Ok(())
    }

    pub fn dimension(&self) -> u32 {
        self.n
    }

    /// psi(r). Panics on r < 0 or, for table profiles, beyond the hull.
    pub fn psi(&self, r: f64) -> f64 {
        assert!(r >= 0.0, "psi evaluated at negative radius {r}");
        match &self.kind {
            Kind::Euclidean => r,
            Kind::Hyperbolic { a } => {
                if r == 0.0 {
                    0.0
                } else {
                    (a * r).sinh() / a
                }
            }
            Kind::PowerExponential { q } => r * (r.powf(*q) / q).exp(),
            Kind::Table(t) => t.eval(r),
        }
    }

    /// psi'(r).
    pub fn dpsi(&self, r: f64) -> f64 {
        assert!(r >= 0.0, "dpsi evaluated at negative radius {r}");
        match &self.kind {
            Kind::Euclidean => 1.0,
            Kind::Hyperbolic { a } => (a * r).cosh(),
            Kind::PowerExponential { q } => (r.powf(*q) / q).exp() * (1.0 + r.powf(*q)),
            Kind::Table(t) => t.eval_deriv(r),
        }
    }

    /// psi''(r).
    pub fn ddpsi(&self, r: f64) -> f64 {
        assert!(r >= 0.0, "ddpsi evaluated at negative radius {r}");
        match &self.kind {
            Kind::Euclidean => 0.0,
            Kind::Hyperbolic { a } => {
                if r == 0.0 {
                    0.0
                } else {
                    a * (a * r).sinh()
                }
            }
            Kind::PowerExponential { q } => {
                if r == 0.0 {
                    0.0
                } else {
                    (r.powf(*q) / q).exp() * r.powf(q - 1.0) * (q + 1.0 + r.powf(*q))
                }
            }
            Kind::Table(t) => t.eval_second_deriv(r),
        }
    }

    /// ln psi(r), stable for profiles whose psi overflows f64.
    pub fn log_psi(&self, r: f64) -> f64 {
        assert!(r > 0.0, "log_psi needs r > 0, got {r}");
        match &self.kind {
            Kind::Euclidean => r.ln(),
            Kind::Hyperbolic { a } => {
                let x = a * r;
                if x > 20.0 {
                    // ln(sinh x / a) = x - ln 2 + ln(1 - e^{-2x}) - ln a
                    x - std::f64::consts::LN_2 + (-(2.0 * x)).exp().ln_1p() - a.ln()
                } else {
                    (x.sinh() / a).ln()
                }
            }
            Kind::PowerExponential { q } => r.ln() + r.powf(*q) / q,
            Kind::Table(t) => t.eval(r).ln(),
        }
    }

    /// (ln psi)'(r) = psi'(r)/psi(r).
    pub fn log_psi_prime(&self, r: f64) -> f64 {
        assert!(r > 0.0, "log_psi_prime needs r > 0, got {r}");
        match &self.kind {
            Kind::Euclidean => 1.0 / r,
            Kind::Hyperbolic { a } => a / (a * r).tanh(),
            Kind::PowerExponential { q } => 1.0 / r + r.powf(q - 1.0),
            Kind::Table(t) => t.eval_deriv(r) / t.eval(r),
        }
    }

    /// Volume density psi(r)^(n-1); the weight in all ball integrals.
    /// Returns 0 at r = 0.
    pub fn volume_density(&self, r: f64) -> f64 {
        assert!(r >= 0.0, "volume_density needs r >= 0, got {r}");
        if r == 0.0 {
            return 0.0;
        }
        self.psi(r).powi(self.n as i32 - 1)
    }

    /// For table profiles, the last tabulated radius; unbounded otherwise.
    pub fn hull(&self) -> Option<f64> {
        match &self.kind {
            Kind::Table(t) => Some(t.xs[t.xs.len() - 1]),
            _ => None,
        }
    }
}

/// Surface measure of the unit (n-1)-sphere, 2 pi^(n/2) / Gamma(n/2).
pub fn unit_sphere_area(n: u32) -> f64 {
    assert!(n >= 1);
    let half = n as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(half) / gamma_half_integer(n)
}

/// Gamma(n/2) for integer n >= 1.
fn gamma_half_integer(n: u32) -> f64 {
    // Gamma(1/2) = sqrt(pi), Gamma(1) = 1, Gamma(x+1) = x Gamma(x).
    let mut value = if n % 2 == 0 {
        1.0
    } else {
        std::f64::consts::PI.sqrt()
    };
    let mut x = if n % 2 == 0 { 1.0 } else { 0.5 };
    while 2.0 * x < n as f64 {
        value *= x;
        x += 1.0;
    }
    value
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch–Carlson limiting).
#[derive(Debug, Clone)]
struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    fn from_samples(samples: &[TableSample]) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::invalid(
                "profile.samples",
                format!("need at least 3 table rows, got {}", samples.len()),
            ));
        }
        let xs: Vec<f64> = samples.iter().map(|s| s.r).collect();
        let ys: Vec<f64> = samples.iter().map(|s| s.psi).collect();
        if xs[0] != 0.0 {
            return Err(Error::invalid(
                "profile.samples",
                format!("first radius must be 0, got {}", xs[0]),
            ));
        }
        if ys[0] != 0.0 {
            return Err(Error::invalid(
                "profile.samples",
                format!("psi(0) must be 0, got {}", ys[0]),
            ));
        }
        for w in xs.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::invalid(
                    "profile.samples",
                    format!("radii must be strictly increasing, got {} then {}", w[0], w[1]),
                ));
            }
        }
        for (i, w) in ys.windows(2).enumerate() {
            if w[1] < w[0] {
                return Err(Error::invalid(
                    "profile.samples",
                    format!("psi must be nondecreasing, decreases at row {}", i + 1),
                ));
            }
        }
        for (i, &y) in ys.iter().enumerate().skip(1) {
            if !(y > 0.0) {
                return Err(Error::invalid(
                    "profile.samples",
                    format!("psi must be positive for r > 0, got {y} at row {i}"),
                ));
            }
        }

        let n = xs.len();
        let secants: Vec<f64> = (0..n - 1)
            .map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))
            .collect();

        let mut slopes: Vec<f64> = if samples.iter().all(|s| s.dpsi.is_some()) {
            let d: Vec<f64> = samples.iter().map(|s| s.dpsi.unwrap()).collect();
            for (i, &v) in d.iter().enumerate() {
                if v < 0.0 {
                    return Err(Error::invalid(
                        "profile.samples",
                        format!("dpsi must be nonnegative, got {v} at row {i}"),
                    ));
                }
            }
            d
        } else if samples.iter().all(|s| s.dpsi.is_none()) {
            // Three-point slope estimates, clamped below.
            let mut d = vec![0.0; n];
            d[0] = secants[0];
            d[n - 1] = secants[n - 2];
            for i in 1..n - 1 {
                d[i] = if secants[i - 1] * secants[i] <= 0.0 {
                    0.0
                } else {
                    0.5 * (secants[i - 1] + secants[i])
                };
            }
            d
        } else {
            return Err(Error::invalid(
                "profile.samples",
                "dpsi must be given for all rows or none",
            ));
        };

        // Fritsch–Carlson limiting keeps each cubic segment monotone.
        for i in 0..n - 1 {
            if secants[i] == 0.0 {
                slopes[i] = 0.0;
                slopes[i + 1] = 0.0;
                continue;
            }
            let alpha = slopes[i] / secants[i];
            let beta = slopes[i + 1] / secants[i];
            let norm = (alpha * alpha + beta * beta).sqrt();
            if norm > 3.0 {
                let tau = 3.0 / norm;
                slopes[i] = tau * alpha * secants[i];
                slopes[i + 1] = tau * beta * secants[i];
            }
        }

        Ok(MonotoneCubic { xs, ys, slopes })
    }

    fn segment(&self, x: f64) -> usize {
        assert!(
            x >= self.xs[0] && x <= *self.xs.last().unwrap(),
            "table profile evaluated at r = {x} outside hull [0, {}]",
            self.xs.last().unwrap()
        );
        match self.xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i - 1,
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (h00, h10, h01, h11) = hermite_basis(t);
        h00 * self.ys[i] + h10 * h * self.slopes[i] + h01 * self.ys[i + 1] + h11 * h * self.slopes[i + 1]
    }

    fn eval_deriv(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let dh00 = (6.0 * t * t - 6.0 * t) / h;
        let dh10 = 3.0 * t * t - 4.0 * t + 1.0;
        let dh01 = -dh00;
        let dh11 = 3.0 * t * t - 2.0 * t;
        dh00 * self.ys[i] + dh10 * self.slopes[i] + dh01 * self.ys[i + 1] + dh11 * self.slopes[i + 1]
    }

    fn eval_second_deriv(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let d2h00 = (12.0 * t - 6.0) / (h * h);
        let d2h10 = (6.0 * t - 4.0) / h;
        let d2h01 = -d2h00;
        let d2h11 = (6.0 * t - 2.0) / h;
        d2h00 * self.ys[i] + d2h10 * self.slopes[i] + d2h01 * self.ys[i + 1] + d2h11 * self.slopes[i + 1]
    }
}

fn hermite_basis(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    (
        2.0 * t3 - 3.0 * t2 + 1.0,
        t3 - 2.0 * t2 + t,
        -2.0 * t3 + 3.0 * t2,
        t3 - t2,
    )
}
