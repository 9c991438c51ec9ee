//! Nonuniqueness contrast demo.
//!
//! Solve u_t = Delta u^m from the zero datum with boundary value 1 on balls
//! of growing radius and record the center value at a fixed horizon. On a
//! stochastically complete profile the boundary's influence at the center
//! dies out as R grows — the minimal (zero) solution wins. On an incomplete
//! profile the sequence stabilizes at a positive level: mass arrives from
//! infinity, which is exactly the mechanism that breaks uniqueness of
//! bounded solutions there.

use serde::{Deserialize, Serialize};

use fdelab_core::error::Result;
use fdelab_core::geometry::{Profile, RadialGrid, RadialField};
use fdelab_core::parabolic::{solve_fde, FdeConfig};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContrastRow {
    pub profile: String,
    pub radius: f64,
    /// u at the center at the horizon (NaN if that solve failed).
    pub center_value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContrastTable {
    pub t_star: f64,
    pub rows: Vec<ContrastRow>,
    /// Incomplete-profile level divided by the complete-profile level at
    /// the largest radius that solved on both.
    pub contrast_ratio: f64,
}

/// Center value of the boundary-driven solve on [0, radius].
fn center_value(
    p: &Profile,
    m: f64,
    dt: f64,
    t_star: f64,
    radius: f64,
    cells_per_unit: u32,
    boundary: f64,
) -> Result<f64> {
    let cells = (radius * cells_per_unit as f64).round() as usize;
    let grid = RadialGrid::uniform(radius, cells.max(8))?;
    // The state spans [0, boundary]: the mobility is singular at 0, so the
    // regularized floor is required.
    let cfg = FdeConfig::new(m, dt, t_star)?
        .with_mobility_floor(1e-8 * boundary.max(1.0))
        .with_store_every(usize::MAX);
    let u0 = RadialField::constant(&grid, 0.0);
    let traj = solve_fde(p, &cfg, &grid, &u0, boundary)?;
    Ok(traj.final_state().values()[0])
}

/// Run the contrast sweep over `radii` for both profiles.
#[allow(clippy::too_many_arguments)]
pub fn demo_nonuniqueness(
    p_complete: &Profile,
    p_incomplete: &Profile,
    m: f64,
    radii: &[f64],
    t_star: f64,
    dt: f64,
    cells_per_unit: u32,
    boundary: f64,
) -> Result<ContrastTable> {
    let mut rows = Vec::new();
    for (label, profile) in [("complete", p_complete), ("incomplete", p_incomplete)] {
        for &radius in radii {
            match center_value(profile, m, dt, t_star, radius, cells_per_unit, boundary) {
                Ok(v) => rows.push(ContrastRow {
                    profile: label.to_string(),
                    radius,
                    center_value: v,
                    failure: None,
                }),
                Err(e) => rows.push(ContrastRow {
                    profile: label.to_string(),
                    radius,
                    center_value: f64::NAN,
                    failure: Some(e.to_string()),
                }),
            }
        }
    }

    let level = |label: &str| -> f64 {
        rows.iter()
            .filter(|r| r.profile == label && r.center_value.is_finite())
            .last()
            .map(|r| r.center_value)
            .unwrap_or(f64::NAN)
    };
    let contrast_ratio = level("incomplete") / level("complete");

    Ok(ContrastTable {
        t_star,
        rows,
        contrast_ratio,
    })
}

/// The contrast table as CSV (`profile,R,u_center`).
pub fn contrast_csv(table: &ContrastTable) -> String {
    let mut out = String::from("profile,R,u_center\n");
    for row in &table.rows {
        out.push_str(&format!(
            "{},{},{}\n",
            row.profile,
            fdelab_core::io::format_float(row.radius),
            fdelab_core::io::format_float(row.center_value)
        ));
    }
    out
}
