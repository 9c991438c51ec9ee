//! Pointwise radial Laplacian: Delta f = f'' + (n-1)(psi'/psi) f'.
//!
//! Finite-difference stencils on possibly nonuniform grids, with the origin
//! handled by symmetry (f'(0) = 0, so Delta f(0) = n f''(0)) and the outer
//! node by one-sided second-order stencils. Stencil weights come from the
//! Fornberg recurrence, so the interior formulas are the usual 3-point
//! central differences and stay second order on smoothly graded grids.

use crate::error::{Error, Result};

use super::grid::RadialField;
use super::profile::Profile;

/// Which stencil produced each output node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StencilKind {
    /// Symmetry stencil at r = 0.
    Origin,
    /// Central 3-point stencil.
    Interior,
    /// One-sided stencil at the outer node.
    Boundary,
}

/// Discrete Laplacian values with per-node stencil provenance.
#[derive(Debug, Clone)]
pub struct LaplacianField {
    pub values: RadialField,
    pub stencils: Vec<StencilKind>,
}

/// Finite-difference weights for the m-th derivative at `x0` from the
/// nodes `xs` (Fornberg's recurrence).
pub fn fd_weights(x0: f64, xs: &[f64], m: usize) -> Vec<f64> {
    let n = xs.len();
    assert!(n > m, "need more than {m} nodes for the {m}-th derivative");
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// Apply the radial Laplacian to a field. Fails if the grid has fewer than
/// 5 nodes (N >= 4), which the one-sided boundary stencil requires.
pub fn radial_laplacian(p: &Profile, f: &RadialField) -> Result<LaplacianField> {
    let grid = f.grid();
    let nodes = grid.nodes();
    let vals = f.values();
    let nn = nodes.len();
    if nn < 5 {
        return Err(Error::invalid(
            "grid",
            format!("radial Laplacian needs at least 5 nodes (N >= 4), got {nn}"),
        ));
    }
    let dim = p.dimension() as f64;
    let mut out = vec![0.0; nn];
    let mut stencils = vec![StencilKind::Interior; nn];

    // r = 0: even extension gives f''(0) = 2 (f_1 - f_0) / r_1^2 to O(h^2).
    let h1 = nodes[1];
    out[0] = dim * 2.0 * (vals[1] - vals[0]) / (h1 * h1);
    stencils[0] = StencilKind::Origin;

    for i in 1..nn - 1 {
        let xs = &nodes[i - 1..=i + 1];
        let w2 = fd_weights(nodes[i], xs, 2);
        let w1 = fd_weights(nodes[i], xs, 1);
        let drift = (dim - 1.0) * p.log_psi_prime(nodes[i]);
        let mut acc = 0.0;
        for k in 0..3 {
            acc += (w2[k] + drift * w1[k]) * vals[i - 1 + k];
        }
        out[i] = acc;
    }

    // Outer node: 3-point one-sided first derivative, 4-point one-sided
    // second derivative, both second order.
    let i = nn - 1;
    let xs1 = &nodes[i - 2..=i];
    let xs2 = &nodes[i - 3..=i];
    let w1 = fd_weights(nodes[i], xs1, 1);
    let w2 = fd_weights(nodes[i], xs2, 2);
    let drift = (dim - 1.0) * p.log_psi_prime(nodes[i]);
    let mut acc = 0.0;
    for k in 0..4 {
        acc += w2[k] * vals[i - 3 + k];
    }
    for k in 0..3 {
        acc += drift * w1[k] * vals[i - 2 + k];
    }
    out[i] = acc;
    stencils[i] = StencilKind::Boundary;

    Ok(LaplacianField {
        values: RadialField::new(std::sync::Arc::clone(grid), out)?,
        stencils,
    })
}
