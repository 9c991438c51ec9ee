//! Discrete verification of the supersolution inequality
//! Delta W <= alpha W^p.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::laplacian::radial_laplacian;
use crate::geometry::{Profile, RadialField};

use super::barrier::BarrierSpec;

/// Outcome of a supersolution check. `max_violation` is the largest value
/// of Delta_h W - alpha W^p over the interior nodes; positive means the
/// discrete inequality failed there.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupersolutionReport {
    pub max_violation: f64,
    pub node_of_max: usize,
    pub tolerance_used: f64,
    pub pass: bool,
}

/// Evaluate Delta_h W - alpha W^p at interior nodes (the outer node carries
/// a one-sided stencil and Dirichlet data in applications, so it is
/// excluded) and compare the maximum against `tol`.
pub fn verify_supersolution(
    p: &Profile,
    w: &RadialField,
    spec: &BarrierSpec,
    tol: f64,
) -> Result<SupersolutionReport> {
    let grid = w.grid();
    if !(grid.outer_radius() < spec.radius) {
        return Err(Error::invalid(
            "grid",
            format!(
                "grid must stay strictly inside the blow-up radius: outer {} vs R = {}",
                grid.outer_radius(),
                spec.radius
            ),
        ));
    }
    for (i, &v) in w.values().iter().enumerate() {
        if !(v > 0.0) {
            return Err(Error::invalid(
                "w",
                format!("barrier candidates must be positive; node {i} has {v}"),
            ));
        }
    }

    let lap = radial_laplacian(p, w)?;
    let mut max_violation = f64::NEG_INFINITY;
    let mut node_of_max = 0;
    for i in 0..grid.num_nodes() - 1 {
        let residual = lap.values.values()[i] - spec.alpha * w.values()[i].powf(spec.p);
        if residual > max_violation {
            max_violation = residual;
            node_of_max = i;
        }
    }
    Ok(SupersolutionReport {
        max_violation,
        node_of_max,
        tolerance_used: tol,
        pass: max_violation <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::barrier::BarrierEvaluator;
    use crate::geometry::RadialGrid;
    use crate::quad::QuadCtl;

    #[test]
    fn constant_fields_pass_with_negative_margin() {
        let p = Profile::euclidean(3).unwrap();
        let spec = BarrierSpec::new(2.0, 1.0, 1.0).unwrap();
        let g = RadialGrid::uniform(0.9, 64).unwrap();
        let c = 3.0;
        let w = RadialField::constant(&g, c);
        let rep = verify_supersolution(&p, &w, &spec, 0.0).unwrap();
        assert!(rep.pass);
        // Delta c = 0, so the margin is exactly -alpha c^p up to stencil noise.
        assert!((rep.max_violation + c * c).abs() < 1e-8, "{}", rep.max_violation);
    }

    #[test]
    fn exact_barrier_passes_on_interior_grid() {
        let p = Profile::euclidean(3).unwrap();
        let spec = BarrierSpec::new(2.0, 1.0, 1.0).unwrap();
        let ctl = QuadCtl::default();
        let ev = BarrierEvaluator::new(&p, spec, &ctl).unwrap();
        let g = RadialGrid::uniform(0.9, 900).unwrap();
        let w = ev.field(&g, &ctl).unwrap();
        let wmax_p = w.values().iter().map(|v| v * v).fold(0.0, f64::max);
        let rep = verify_supersolution(&p, &w, &spec, 1e-2 * wmax_p).unwrap();
        assert!(rep.pass, "violation {} at node {}", rep.max_violation, rep.node_of_max);
    }

    #[test]
    fn rescaled_barrier_fails_somewhere() {
        // The supersolution property is not scale-invariant for p > 1:
        // lambda W has Delta(lambda W) = lambda Delta W but the right-hand
        // side scales by lambda^p, so shrinking (lambda < 1) tightens the
        // inequality by lambda^(1-p) and breaks it where Delta W is within
        // that factor of W^p. Scaling up only strengthens it.
        let p = Profile::euclidean(3).unwrap();
        let spec = BarrierSpec::new(2.0, 1.0, 1.0).unwrap();
        let ctl = QuadCtl::default();
        let ev = BarrierEvaluator::new(&p, spec, &ctl).unwrap();
        let g = RadialGrid::uniform(0.9, 300).unwrap();

        let mut up = ev.field(&g, &ctl).unwrap();
        for v in up.values_mut() {
            *v *= 10.0;
        }
        let rep_up = verify_supersolution(&p, &up, &spec, 1e-6).unwrap();
        assert!(rep_up.pass, "scaling up must keep the inequality");

        let mut down = ev.field(&g, &ctl).unwrap();
        for v in down.values_mut() {
            *v *= 0.1;
        }
        let rep_down = verify_supersolution(&p, &down, &spec, 1e-6).unwrap();
        assert!(
            !rep_down.pass,
            "downscaled barrier should violate: {}",
            rep_down.max_violation
        );
        assert!(rep_down.max_violation > 0.0);
    }

    #[test]
    fn rejects_nonpositive_candidates_and_touching_grids() {
        let p = Profile::euclidean(3).unwrap();
        let spec = BarrierSpec::new(2.0, 1.0, 1.0).unwrap();
        let g = RadialGrid::uniform(0.9, 16).unwrap();
        let w = RadialField::constant(&g, 0.0);
        assert!(verify_supersolution(&p, &w, &spec, 0.0).is_err());
        let g_touch = RadialGrid::uniform(1.0, 16).unwrap();
        let w_touch = RadialField::constant(&g_touch, 1.0);
        assert!(verify_supersolution(&p, &w_touch, &spec, 0.0).is_err());
    }
}
