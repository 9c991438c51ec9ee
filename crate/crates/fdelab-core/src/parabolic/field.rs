//! Time-indexed families of radial fields.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{RadialField, RadialGrid};

/// A numerical parabolic trajectory: one stored state per stored time, all
/// on a shared grid, with times[0] = 0 holding the initial state.
#[derive(Debug, Clone)]
pub struct SpaceTimeField {
    grid: Arc<RadialGrid>,
    times: Vec<f64>,
    states: Vec<RadialField>,
}

impl SpaceTimeField {
    pub fn new(grid: Arc<RadialGrid>, times: Vec<f64>, states: Vec<RadialField>) -> Result<Self> {
        if times.is_empty() || times[0] != 0.0 {
            return Err(Error::invalid(
                "times",
                "stored times must start at 0".to_string(),
            ));
        }
        if times.len() != states.len() {
            return Err(Error::MeshMismatch(format!(
                "{} times vs {} states",
                times.len(),
                states.len()
            )));
        }
        for w in times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::invalid(
                    "times",
                    format!("times must increase, got {} then {}", w[0], w[1]),
                ));
            }
        }
        for s in &states {
            if !s.grid().same_nodes(&grid) {
                return Err(Error::MeshMismatch("state grid differs from trajectory grid".into()));
            }
        }
        Ok(SpaceTimeField {
            grid,
            times,
            states,
        })
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[RadialField] {
        &self.states
    }

    pub fn initial_state(&self) -> &RadialField {
        &self.states[0]
    }

    pub fn final_state(&self) -> &RadialField {
        self.states.last().unwrap()
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Index of a stored time, matched to within 1e-9 absolute.
    pub fn time_index(&self, t: f64) -> Result<usize> {
        for (i, &ti) in self.times.iter().enumerate() {
            if (ti - t).abs() <= 1e-9 {
                return Ok(i);
            }
        }
        Err(Error::invalid(
            "t",
            format!("time {t} is not among the stored times (horizon {})", self.horizon()),
        ))
    }

    pub fn state_at(&self, t: f64) -> Result<&RadialField> {
        Ok(&self.states[self.time_index(t)?])
    }

    /// True if both trajectories share grid nodes and stored times.
    pub fn same_mesh(&self, other: &SpaceTimeField) -> bool {
        self.grid.same_nodes(&other.grid) && self.times == other.times
    }

    /// sup over nodes with r <= radius and over all stored times of
    /// (self - other), with `other` evaluated by linear interpolation so
    /// trajectories on different (nested) grids can be compared.
    pub fn sup_signed_difference_within(&self, other: &SpaceTimeField, radius: f64) -> Result<f64> {
        if self.times != other.times {
            return Err(Error::MeshMismatch("stored times differ".into()));
        }
        let last = self.grid.last_node_within(radius);
        let mut sup = f64::NEG_INFINITY;
        for (s, o) in self.states.iter().zip(&other.states) {
            for (i, &r) in self.grid.nodes()[..=last].iter().enumerate() {
                sup = sup.max(s.values()[i] - o.interp(r));
            }
        }
        Ok(sup)
    }

    /// Largest nodewise amount by which `self` exceeds `other` anywhere on
    /// the common (smaller) grid, over all stored times. Used to assert
    /// orderings: `self <= other + slack` iff the result is <= slack.
    pub fn max_excess_over(&self, other: &SpaceTimeField) -> Result<f64> {
        if self.times != other.times {
            return Err(Error::MeshMismatch("stored times differ".into()));
        }
        let radius = self.grid.outer_radius().min(other.grid.outer_radius());
        let last = self.grid.last_node_within(radius);
        let mut worst = f64::NEG_INFINITY;
        for (s, o) in self.states.iter().zip(&other.states) {
            for (i, &r) in self.grid.nodes()[..=last].iter().enumerate() {
                worst = worst.max(s.values()[i] - o.interp(r));
            }
        }
        Ok(worst)
    }
}

/// Extend a trajectory by zero onto a larger grid: values at new radii
/// beyond the old outer radius are 0, old radii are linearly interpolated
/// (exactly reproduced on nested grids). The jump at the old boundary is
/// expected: the continuum construction extends by zero too.
pub fn extend_by_zero(f: &SpaceTimeField, larger: &Arc<RadialGrid>) -> Result<SpaceTimeField> {
    let old_r = f.grid().outer_radius();
    if larger.outer_radius() < old_r {
        return Err(Error::invalid(
            "larger_grid",
            format!(
                "target grid radius {} is smaller than the source radius {old_r}",
                larger.outer_radius()
            ),
        ));
    }
    let states = f
        .states()
        .iter()
        .map(|s| {
            RadialField::from_fn(larger, |r| if r <= old_r { s.interp(r) } else { 0.0 })
        })
        .collect();
    SpaceTimeField::new(Arc::clone(larger), f.times().to_vec(), states)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traj(grid: &Arc<RadialGrid>, c: f64) -> SpaceTimeField {
        let states = vec![
            RadialField::constant(grid, c),
            RadialField::constant(grid, c),
        ];
        SpaceTimeField::new(Arc::clone(grid), vec![0.0, 1.0], states).unwrap()
    }

    #[test]
    fn extend_constant_one() {
        let small = RadialGrid::uniform(1.0, 8).unwrap();
        let big = RadialGrid::uniform(2.0, 16).unwrap();
        let f = traj(&small, 1.0);
        let g = extend_by_zero(&f, &big).unwrap();
        for (i, &r) in big.nodes().iter().enumerate() {
            let v = g.states()[0].values()[i];
            if r <= 1.0 {
                assert_eq!(v, 1.0, "r={r}");
            } else {
                assert_eq!(v, 0.0, "r={r}");
            }
        }
    }

    #[test]
    fn extend_zero_stays_zero() {
        let small = RadialGrid::uniform(1.0, 8).unwrap();
        let big = RadialGrid::uniform(3.0, 24).unwrap();
        let g = extend_by_zero(&traj(&small, 0.0), &big).unwrap();
        assert!(g.states().iter().all(|s| s.values().iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn extension_is_idempotent() {
        let small = RadialGrid::uniform(1.0, 8).unwrap();
        let big = RadialGrid::uniform(2.0, 16).unwrap();
        let once = extend_by_zero(&traj(&small, 2.5), &big).unwrap();
        let twice = extend_by_zero(&once, &big).unwrap();
        for (a, b) in once.states().iter().zip(twice.states()) {
            assert_eq!(a.values(), b.values());
        }
    }

    #[test]
    fn shrinking_is_rejected() {
        let small = RadialGrid::uniform(1.0, 8).unwrap();
        let smaller = RadialGrid::uniform(0.5, 8).unwrap();
        assert!(extend_by_zero(&traj(&small, 1.0), &smaller).is_err());
    }

    #[test]
    fn time_lookup() {
        let g = RadialGrid::uniform(1.0, 8).unwrap();
        let f = traj(&g, 1.0);
        assert_eq!(f.time_index(1.0).unwrap(), 1);
        assert!(f.time_index(0.5).is_err());
    }
}
