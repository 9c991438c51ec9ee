//! Triple-limit ladder toward the minimal solution.
//!
//! For a nonnegative datum the minimal nonnegative solution is the monotone
//! limit of lifted Dirichlet approximations: the truncation beta increases
//! (innermost sweep), the lift ell decreases, and the domain radius
//! increases (outermost sweep, with the previous solution extended by
//! zero for comparison). On the discrete side each sweep is monotone up to
//! solver tolerance — a violation beyond 1e-7 is a bug, not noise, and is
//! reported as such — and a sweep is truncated once successive sup-norm
//! increments on a fixed probe ball drop below the stage tolerance.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Profile, RadialField, RadialGrid};

use super::field::SpaceTimeField;
use super::lifted::{solve_lifted, LiftedProblem};
use super::solver::FdeConfig;

/// Monotonicity slack for ladder sweeps.
pub const LADDER_SLACK: f64 = 1e-7;

/// Nonnegative initial data, described independently of any grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatumKind {
    Constant { value: f64 },
    /// max(0, height (1 - r/radius)).
    Cone { height: f64, radius: f64 },
    /// height on [0, radius), 0 beyond.
    Step { height: f64, radius: f64 },
}

/// How a datum is put onto a grid: pointwise sampling for continuous data,
/// cell averaging for merely integrable ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    #[default]
    Pointwise,
    CellAverage,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Datum {
    #[serde(flatten)]
    pub kind: DatumKind,
    #[serde(default)]
    pub sampling: Sampling,
}

impl Datum {
    pub fn constant(value: f64) -> Self {
        Datum {
            kind: DatumKind::Constant { value },
            sampling: Sampling::Pointwise,
        }
    }

    pub fn cone(height: f64, radius: f64) -> Self {
        Datum {
            kind: DatumKind::Cone { height, radius },
            sampling: Sampling::Pointwise,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.kind {
            DatumKind::Constant { value } => value >= 0.0,
            DatumKind::Cone { height, radius } | DatumKind::Step { height, radius } => {
                height >= 0.0 && radius > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid("datum", "datum must be nonnegative with positive radius"))
        }
    }

    fn point(&self, r: f64) -> f64 {
        match self.kind {
            DatumKind::Constant { value } => value,
            DatumKind::Cone { height, radius } => (height * (1.0 - r / radius)).max(0.0),
            DatumKind::Step { height, radius } => {
                if r < radius {
                    height
                } else {
                    0.0
                }
            }
        }
    }

    /// Plain 1-d average over [a, b] (closed forms per shape).
    fn average(&self, a: f64, b: f64) -> f64 {
        match self.kind {
            DatumKind::Constant { value } => value,
            DatumKind::Cone { height, radius } => {
                let lo = a.min(radius);
                let hi = b.min(radius);
                if hi <= lo {
                    0.0
                } else {
                    // integral of height (1 - r/radius) over [lo, hi]
                    let integral =
                        height * ((hi - lo) - (hi * hi - lo * lo) / (2.0 * radius));
                    integral / (b - a)
                }
            }
            DatumKind::Step { height, radius } => {
                let covered = (b.min(radius) - a.min(radius)).max(0.0);
                height * covered / (b - a)
            }
        }
    }

    /// Sample onto a grid according to the declared sampling mode.
    pub fn sample(&self, grid: &Arc<RadialGrid>) -> RadialField {
        match self.sampling {
            Sampling::Pointwise => RadialField::from_fn(grid, |r| self.point(r)),
            Sampling::CellAverage => {
                let nodes = grid.nodes();
                let nn = nodes.len();
                let values = (0..nn)
                    .map(|i| {
                        let a = if i == 0 { 0.0 } else { 0.5 * (nodes[i - 1] + nodes[i]) };
                        let b = if i == nn - 1 {
                            nodes[nn - 1]
                        } else {
                            0.5 * (nodes[i] + nodes[i + 1])
                        };
                        self.average(a, b)
                    })
                    .collect();
                RadialField::new(Arc::clone(grid), values).unwrap()
            }
        }
    }

    pub fn sup(&self) -> f64 {
        match self.kind {
            DatumKind::Constant { value } => value,
            DatumKind::Cone { height, .. } | DatumKind::Step { height, .. } => height,
        }
    }
}

/// The (R_k, ell_j, beta_i) ladder plus stopping tolerances.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LiftSchedule {
    /// Increasing domain radii R_k.
    pub radii: Vec<f64>,
    /// Decreasing lifts ell_j.
    pub lifts: Vec<f64>,
    /// Increasing truncations beta_i.
    pub caps: Vec<f64>,
    /// Probe ball radius on which sweep increments are measured.
    pub probe_radius: f64,
    /// Stage tolerance; `None` selects 1e-4 * max(sup datum, 1).
    #[serde(default)]
    pub stage_tol: Option<f64>,
}

impl LiftSchedule {
    /// Geometric defaults: R_k = 2^k R0, ell_j = 4^-j ell0, beta_i = 2^i b0,
    /// probe radius R0/2.
    pub fn geometric(
        r0: f64,
        domain_rungs: usize,
        ell0: f64,
        lift_rungs: usize,
        beta0: f64,
        cap_rungs: usize,
    ) -> Self {
        LiftSchedule {
            radii: (0..domain_rungs).map(|k| r0 * (1 << k) as f64).collect(),
            lifts: (0..lift_rungs).map(|j| ell0 * 0.25_f64.powi(j as i32)).collect(),
            caps: (0..cap_rungs).map(|i| beta0 * (1 << i) as f64).collect(),
            probe_radius: r0 / 2.0,
            stage_tol: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.radii.is_empty() || self.lifts.is_empty() || self.caps.is_empty() {
            return Err(Error::invalid("ladder", "all three rung lists must be nonempty"));
        }
        for w in self.radii.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::invalid("ladder.radii", "must be strictly increasing"));
            }
        }
        for w in self.lifts.windows(2) {
            if !(w[1] < w[0]) {
                return Err(Error::invalid("ladder.lifts", "must be strictly decreasing"));
            }
        }
        for w in self.caps.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::invalid("ladder.caps", "must be strictly increasing"));
            }
        }
        if !(self.lifts[self.lifts.len() - 1] > 0.0) {
            return Err(Error::invalid("ladder.lifts", "lifts must stay positive"));
        }
        if !(self.probe_radius > 0.0 && self.probe_radius <= self.radii[0]) {
            return Err(Error::invalid(
                "ladder.probe_radius",
                "probe ball must fit inside the smallest domain",
            ));
        }
        Ok(())
    }
}

/// Which sweep a log entry belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Cap,
    Lift,
    Domain,
}

/// One solved rung: its parameters and the sup-norm increment against the
/// previous rung of the same sweep (NaN for the first rung of a sweep).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LadderStage {
    pub sweep: SweepKind,
    pub domain_radius: f64,
    pub lift: f64,
    pub cap: f64,
    pub sup_increment: f64,
}

#[derive(Debug, Clone)]
pub struct MinimalSolutionResult {
    /// Converged approximation on the largest domain.
    pub field: SpaceTimeField,
    pub ladder_log: Vec<LadderStage>,
    /// True iff every sweep met the stage tolerance before exhausting its
    /// rungs.
    pub converged: bool,
}

/// Grid resolution shared by all ladder domains (uniform spacing
/// 1/cells_per_unit, so grids over nested radii are nested nodewise).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpatialResolution {
    pub cells_per_unit: u32,
}

impl SpatialResolution {
    fn grid(&self, radius: f64) -> Result<Arc<RadialGrid>> {
        let cells = (radius * self.cells_per_unit as f64).round();
        if (cells - radius * self.cells_per_unit as f64).abs() > 1e-9 {
            return Err(Error::invalid(
                "resolution",
                format!("radius {radius} is not a whole number of cells at {} per unit", self.cells_per_unit),
            ));
        }
        RadialGrid::uniform(radius, cells as usize)
    }
}

/// Run the full ladder. Sweeps run innermost-to-outermost: caps, lifts,
/// domains; each inner sweep restarts for every outer rung.
pub fn minimal_solution(
    p: &Profile,
    cfg: &FdeConfig,
    datum: &Datum,
    ladder: &LiftSchedule,
    resolution: SpatialResolution,
) -> Result<MinimalSolutionResult> {
    ladder.validate()?;
    datum.validate()?;
    let stage_tol = ladder
        .stage_tol
        .unwrap_or_else(|| 1e-4 * datum.sup().max(1.0));
    let probe = ladder.probe_radius;

    let mut log = Vec::new();
    let mut converged = true;
    let mut per_domain: Option<SpaceTimeField> = None;

    for (k, &radius) in ladder.radii.iter().enumerate() {
        let grid = resolution.grid(radius)?;
        let u0 = datum.sample(&grid);

        // Lift sweep (decreasing), each rung resolved by its own cap sweep.
        let mut lift_result: Option<SpaceTimeField> = None;
        let mut lift_converged = false;
        for (j, &ell) in ladder.lifts.iter().enumerate() {
            let mut cap_result: Option<SpaceTimeField> = None;
            let mut cap_converged = false;
            for &beta in &ladder.caps {
                let traj = solve_lifted(
                    p,
                    cfg,
                    &LiftedProblem {
                        ell,
                        beta,
                        radius,
                        u0: u0.clone(),
                    },
                    &grid,
                )?;
                let increment = match &cap_result {
                    None => f64::NAN,
                    Some(prev) => {
                        // beta grows, so the trajectory may only grow.
                        let drop = prev.sup_signed_difference_within(&traj, probe)?;
                        if drop > LADDER_SLACK {
                            return Err(monotonicity("cap sweep decreased", drop));
                        }
                        traj.sup_signed_difference_within(prev, probe)?.max(0.0)
                    }
                };
                log.push(LadderStage {
                    sweep: SweepKind::Cap,
                    domain_radius: radius,
                    lift: ell,
                    cap: beta,
                    sup_increment: increment,
                });
                cap_result = Some(traj);
                if increment.is_finite() && increment < stage_tol {
                    cap_converged = true;
                    break;
                }
            }
            converged &= cap_converged;
            let settled = cap_result.unwrap();

            let increment = match &lift_result {
                None => f64::NAN,
                Some(prev) => {
                    // ell shrinks, so the trajectory may only shrink.
                    let rise = settled.sup_signed_difference_within(prev, probe)?;
                    if rise > LADDER_SLACK {
                        return Err(monotonicity("lift sweep increased", rise));
                    }
                    prev.sup_signed_difference_within(&settled, probe)?.max(0.0)
                }
            };
            log.push(LadderStage {
                sweep: SweepKind::Lift,
                domain_radius: radius,
                lift: ell,
                cap: f64::NAN,
                sup_increment: increment,
            });
            lift_result = Some(settled);
            if increment.is_finite() && increment < stage_tol {
                lift_converged = true;
                break;
            }
            let _ = j;
        }
        converged &= lift_converged;
        let domain_result = lift_result.unwrap();

        let increment = match &per_domain {
            None => f64::NAN,
            Some(prev) => {
                // The domain grows and the previous solution extends by 0,
                // so on the probe ball the trajectory may only grow.
                let drop = prev.sup_signed_difference_within(&domain_result, probe)?;
                if drop > LADDER_SLACK {
                    return Err(monotonicity("domain sweep decreased", drop));
                }
                domain_result.sup_signed_difference_within(prev, probe)?.max(0.0)
            }
        };
        log.push(LadderStage {
            sweep: SweepKind::Domain,
            domain_radius: radius,
            lift: f64::NAN,
            cap: f64::NAN,
            sup_increment: increment,
        });
        let domain_converged = increment.is_finite() && increment < stage_tol;
        per_domain = Some(domain_result);
        if domain_converged {
            let _ = k;
            return Ok(MinimalSolutionResult {
                field: per_domain.unwrap(),
                ladder_log: log,
                converged,
            });
        }
    }

    // Ladder exhausted before the domain sweep settled.
    Ok(MinimalSolutionResult {
        field: per_domain.unwrap(),
        ladder_log: log,
        converged: false,
    })
}

fn monotonicity(context: &str, violation: f64) -> Error {
    Error::MonotonicityViolation {
        context: format!("ladder ordering violated: {context}"),
        violation,
        node: 0,
    }
}
