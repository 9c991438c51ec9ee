//! Radial grids on [0, R] and real-valued fields on them.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Strictly increasing nodes r_0 = 0 < r_1 < ... < r_N = R.
///
/// At least 9 nodes, and the spacing may not vary by more than three orders
/// of magnitude (the stencil error analysis assumes mild grading).
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
}

const MAX_GRADING: f64 = 1e3;

impl RadialGrid {
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Arc<Self>> {
        if nodes.len() < 9 {
            return Err(Error::invalid(
                "grid.nodes",
                format!("need at least 9 nodes (N >= 8), got {}", nodes.len()),
            ));
        }
        if nodes[0] != 0.0 {
            return Err(Error::invalid(
                "grid.nodes",
                format!("first node must be 0, got {}", nodes[0]),
            ));
        }
        let mut min_h = f64::INFINITY;
        let mut max_h: f64 = 0.0;
        for w in nodes.windows(2) {
            let h = w[1] - w[0];
            if !(h > 0.0) || !h.is_finite() {
                return Err(Error::invalid(
                    "grid.nodes",
                    format!("nodes must be strictly increasing, got {} then {}", w[0], w[1]),
                ));
            }
            min_h = min_h.min(h);
            max_h = max_h.max(h);
        }
        if max_h / min_h > MAX_GRADING {
            return Err(Error::invalid(
                "grid.nodes",
                format!(
                    "grading max/min spacing = {:.3e} exceeds {MAX_GRADING:.0e}",
                    max_h / min_h
                ),
            ));
        }
        Ok(Arc::new(RadialGrid { nodes }))
    }

    /// Uniform grid with `cells` intervals on [0, r_max].
    pub fn uniform(r_max: f64, cells: usize) -> Result<Arc<Self>> {
        if !(r_max > 0.0) {
            return Err(Error::invalid(
                "grid.r_max",
                format!("outer radius must be positive, got {r_max}"),
            ));
        }
        let h = r_max / cells as f64;
        let mut nodes: Vec<f64> = (0..=cells).map(|i| i as f64 * h).collect();
        if let Some(last) = nodes.last_mut() {
            *last = r_max;
        }
        RadialGrid::from_nodes(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn outer_radius(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// True if both grids have bitwise-identical nodes.
    pub fn same_nodes(&self, other: &RadialGrid) -> bool {
        self.nodes == other.nodes
    }

    /// Index of the last node with r <= radius.
    pub fn last_node_within(&self, radius: f64) -> usize {
        match self.nodes.binary_search_by(|v| v.total_cmp(&radius)) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        }
    }
}

/// Node values of a real function on a shared grid.
#[derive(Debug, Clone)]
pub struct RadialField {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl RadialField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.num_nodes() {
            return Err(Error::MeshMismatch(format!(
                "field has {} values for a grid with {} nodes",
                values.len(),
                grid.num_nodes()
            )));
        }
        Ok(RadialField { grid, values })
    }

    pub fn from_fn(grid: &Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        RadialField {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn constant(grid: &Arc<RadialGrid>, c: f64) -> Self {
        RadialField {
            grid: Arc::clone(grid),
            values: vec![c; grid.num_nodes()],
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Max over nodes with r <= radius.
    pub fn max_within(&self, radius: f64) -> f64 {
        let last = self.grid.last_node_within(radius);
        self.values[..=last]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Piecewise-linear interpolation; exact at nodes, clamped outside.
    pub fn interp(&self, r: f64) -> f64 {
        let nodes = self.grid.nodes();
        if r <= nodes[0] {
            return self.values[0];
        }
        if r >= *nodes.last().unwrap() {
            return *self.values.last().unwrap();
        }
        let i = match nodes.binary_search_by(|v| v.total_cmp(&r)) {
            Ok(i) => return self.values[i],
            Err(i) => i - 1,
        };
        let t = (r - nodes[i]) / (nodes[i + 1] - nodes[i]);
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }
}
