//! Adaptive composite Gauss–Legendre quadrature.
//!
//! Panels are subdivided worst-error-first until the summed panel error
//! estimates drop below the requested relative tolerance. The per-panel
//! error is estimated by comparing a 7-point and a 15-point rule. Nodes are
//! strictly interior, so integrands with removable endpoint singularities
//! are never evaluated at the endpoints themselves (callers still patch
//! analytic limits where they know them).

use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Tolerance and budget for one adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadCtl {
    /// Relative tolerance on the integral value.
    pub tol: f64,
    /// Maximum number of panels before giving up.
    pub max_panels: usize,
}

impl Default for QuadCtl {
    fn default() -> Self {
        QuadCtl {
            tol: 1e-12,
            max_panels: 20_000,
        }
    }
}

impl QuadCtl {
    pub fn with_tol(tol: f64) -> Self {
        QuadCtl {
            tol,
            ..QuadCtl::default()
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    /// Summed per-panel error estimates (absolute).
    pub error_estimate: f64,
    pub panels: usize,
}

/// Gauss–Legendre nodes and weights on [-1, 1], computed once by Newton
/// iteration on the Legendre recurrence.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P_n'(x).
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

struct Rules {
    low: (Vec<f64>, Vec<f64>),
    high: (Vec<f64>, Vec<f64>),
}

fn rules() -> &'static Rules {
    static RULES: OnceLock<Rules> = OnceLock::new();
    RULES.get_or_init(|| Rules {
        low: gauss_legendre(7),
        high: gauss_legendre(15),
    })
}

fn apply_rule<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in rule.0.iter().zip(rule.1.iter()) {
        acc += w * f(c + h * x);
    }
    acc * h
}

#[derive(Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn make_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let r = rules();
    let hi = apply_rule(f, a, b, &r.high);
    let lo = apply_rule(f, a, b, &r.low);
    if !hi.is_finite() || !lo.is_finite() {
        return Err(Error::NonFinite(format!("integrand on [{a:.6e}, {b:.6e}]")));
    }
    Ok(Panel {
        a,
        b,
        value: hi,
        err: (hi - lo).abs(),
    })
}

/// Integrate `f` over `[a, b]` to the control's relative tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, ctl: &QuadCtl) -> Result<QuadResult> {
    integrate_with_breakpoints(f, a, b, &[], ctl)
}

/// Integrate with an initial subdivision at the given interior points.
///
/// Adaptive bisection is blind to features much narrower than a panel: if
/// every quadrature node sees ~0 the panel reports zero error and is never
/// split. Callers that know where a boundary layer or kink sits (the H'
/// integrand on steep profiles does) must seed panels at its scale.
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    ctl: &QuadCtl,
) -> Result<QuadResult> {
    if !(ctl.tol > 0.0) {
        return Err(Error::invalid("quad.tol", "tolerance must be positive"));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            panels: 0,
        });
    }
    if !(a < b) {
        return Err(Error::invalid(
            "quad.bounds",
            format!("expected a < b, got a = {a}, b = {b}"),
        ));
    }

    let mut edges: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    edges.push(a);
    edges.push(b);
    edges.sort_by(f64::total_cmp);
    edges.dedup();

    let mut heap: BinaryHeap<Panel> = BinaryHeap::new();
    let mut total_value: f64 = 0.0;
    let mut total_err: f64 = 0.0;
    for w in edges.windows(2) {
        let panel = make_panel(&f, w[0], w[1])?;
        total_value += panel.value;
        total_err += panel.err;
        heap.push(panel);
    }

    loop {
        // Relative target; fall back to an absolute floor for integrals that
        // are genuinely tiny.
        let scale = total_value.abs().max(1e-300);
        if total_err <= ctl.tol * scale || total_err <= f64::MIN_POSITIVE {
            return Ok(QuadResult {
                value: total_value,
                error_estimate: total_err,
                panels: heap.len(),
            });
        }
        if heap.len() >= ctl.max_panels {
            return Err(Error::QuadratureNoConvergence {
                requested: ctl.tol,
                achieved: total_err / scale,
                panels: heap.len(),
            });
        }
        let worst = heap.pop().unwrap();
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel narrower than f64 resolution: accept its estimate as is.
            total_err -= worst.err;
            let mut accepted = worst;
            accepted.err = 0.0;
            heap.push(accepted);
            continue;
        }
        let left = make_panel(&f, worst.a, mid)?;
        let right = make_panel(&f, mid, worst.b)?;
        total_value += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_sine_exactly_enough() {
        let r = integrate(|x: f64| x.sin(), 0.0, std::f64::consts::PI, &QuadCtl::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13, "got {}", r.value);
    }

    #[test]
    fn integrates_polynomial() {
        let r = integrate(|x| 3.0 * x * x, 0.0, 2.0, &QuadCtl::default()).unwrap();
        assert!((r.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn handles_integrable_endpoint_singularity() {
        // 1/sqrt(x) on (0, 1] integrates to 2; nodes never touch x = 0.
        let r = integrate(|x: f64| x.sqrt().recip(), 0.0, 1.0, &QuadCtl::with_tol(1e-10)).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8, "got {}", r.value);
    }

    #[test]
    fn reports_budget_exhaustion_with_achieved_error() {
        let ctl = QuadCtl {
            tol: 1e-14,
            max_panels: 4,
        };
        let err = integrate(|x: f64| (1.0 / (1e-5 + x * x)).sin(), 0.0, 1.0, &ctl).unwrap_err();
        match err {
            Error::QuadratureNoConvergence { achieved, panels, .. } => {
                assert!(achieved > 0.0);
                assert!(panels >= 4);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn empty_interval_is_zero() {
        let r = integrate(|_| f64::NAN, 1.0, 1.0, &QuadCtl::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn rejects_reversed_bounds() {
        assert!(integrate(|x| x, 1.0, 0.0, &QuadCtl::default()).is_err());
    }

    #[test]
    fn gauss_nodes_are_symmetric_and_weights_sum_to_two() {
        for n in [7usize, 15] {
            let (x, w) = gauss_legendre(n);
            let sum: f64 = w.iter().sum();
            assert!((sum - 2.0).abs() < 1e-14);
            for i in 0..n {
                assert!((x[i] + x[n - 1 - i]).abs() < 1e-14);
            }
        }
    }
}
