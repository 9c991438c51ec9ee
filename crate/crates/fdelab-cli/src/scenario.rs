//! Scenario configuration: one JSON file per experiment run.
//!
//! The schema ships in-repo at `docs/scenario.schema.json`. Validation is
//! eager and reports dotted field paths so a bad config fails before any
//! numerics start.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use fdelab_core::error::{Error, Result};
use fdelab_core::geometry::ProfileSpec;
use fdelab_core::parabolic::{Datum, LiftSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Classify,
    Barrier,
    EllipticNonexistence,
    Fde,
    Minimal,
    HpCheck,
    UniquenessProbe,
    DemoNonuniqueness,
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ExperimentKind::Classify => "classify",
            ExperimentKind::Barrier => "barrier",
            ExperimentKind::EllipticNonexistence => "elliptic-nonexistence",
            ExperimentKind::Fde => "fde",
            ExperimentKind::Minimal => "minimal",
            ExperimentKind::HpCheck => "hp-check",
            ExperimentKind::UniquenessProbe => "uniqueness-probe",
            ExperimentKind::DemoNonuniqueness => "demo-nonuniqueness",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub profile: ProfileSpec,
    pub experiment: ExperimentKind,
    pub parameters: serde_json::Value,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("scenario: {e}")))
    }
}

fn bad(field: &str, message: impl Into<String>) -> Error {
    Error::invalid(format!("parameters.{field}"), message.into())
}

pub(crate) fn require_open_unit(field: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(bad(field, format!("must lie in the open interval (0,1), got {v}")))
    }
}

pub(crate) fn require_positive(field: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(bad(field, format!("must be positive and finite, got {v}")))
    }
}

fn default_alpha() -> f64 {
    1.0
}
fn default_store_every() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyParams {
    #[serde(default = "ClassifyParams::default_horizon")]
    pub horizon: f64,
    #[serde(default = "ClassifyParams::default_samples")]
    pub samples: usize,
    #[serde(default = "ClassifyParams::default_quad_tol")]
    pub quad_tol: f64,
}

impl ClassifyParams {
    fn default_horizon() -> f64 {
        50.0
    }
    fn default_samples() -> usize {
        40
    }
    fn default_quad_tol() -> f64 {
        1e-10
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon < 10.0 {
            return Err(bad("horizon", format!("must be at least 10, got {}", self.horizon)));
        }
        if self.samples < 20 {
            return Err(bad("samples", format!("need at least 20, got {}", self.samples)));
        }
        require_positive("quad_tol", self.quad_tol)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierParams {
    pub p: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub radius: f64,
    /// Barrier constant; omitted means the default sufficient constant.
    #[serde(default)]
    pub constant: Option<f64>,
    #[serde(default = "BarrierParams::default_cells")]
    pub cells: usize,
    /// Fraction of the radius kept clear of the blow-up locus.
    #[serde(default = "BarrierParams::default_margin")]
    pub margin: f64,
    /// Supersolution tolerance for the pass verdict.
    #[serde(default)]
    pub tolerance: f64,
}

impl BarrierParams {
    fn default_cells() -> usize {
        512
    }
    fn default_margin() -> f64 {
        0.1
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0) {
            return Err(bad("p", format!("must exceed 1, got {}", self.p)));
        }
        require_positive("alpha", self.alpha)?;
        require_positive("radius", self.radius)?;
        if !(self.margin > 0.0 && self.margin < 1.0) {
            return Err(bad("margin", format!("must lie in (0,1), got {}", self.margin)));
        }
        if self.cells < 8 {
            return Err(bad("cells", format!("need at least 8, got {}", self.cells)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EllipticParams {
    #[serde(default = "EllipticParams::default_p")]
    pub p: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub radii: Vec<f64>,
    pub probe_radius: f64,
    #[serde(default = "EllipticParams::default_cells")]
    pub cells: usize,
}

impl EllipticParams {
    fn default_p() -> f64 {
        2.0
    }
    fn default_cells() -> usize {
        1000
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0) {
            return Err(bad("p", format!("must exceed 1, got {}", self.p)));
        }
        require_positive("alpha", self.alpha)?;
        if self.radii.is_empty() {
            return Err(bad("radii", "need at least one radius"));
        }
        for w in self.radii.windows(2) {
            if !(w[1] > w[0]) {
                return Err(bad("radii", "must be strictly increasing"));
            }
        }
        if !(self.probe_radius > 0.0 && self.probe_radius < self.radii[0] / 2.0) {
            return Err(bad(
                "probe_radius",
                format!(
                    "must lie in (0, min(radii)/2) = (0, {}), got {}",
                    self.radii[0] / 2.0,
                    self.probe_radius
                ),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    pub r_max: f64,
    pub cells: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryFormat {
    #[default]
    Csv,
    Binary,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FdeParams {
    pub m: f64,
    pub dt: f64,
    pub t_end: f64,
    pub boundary: f64,
    pub grid: GridParams,
    pub datum: Datum,
    /// Mobility regularization; omitted selects 0 for uniformly positive
    /// data and 1e-8 x scale otherwise.
    #[serde(default)]
    pub mobility_floor: Option<f64>,
    #[serde(default = "default_store_every")]
    pub store_every: usize,
    #[serde(default)]
    pub format: TrajectoryFormat,
}

impl FdeParams {
    pub fn validate(&self) -> Result<()> {
        require_open_unit("m", self.m)?;
        require_positive("dt", self.dt)?;
        require_positive("t_end", self.t_end)?;
        if self.dt > self.t_end {
            return Err(bad("dt", format!("must not exceed t_end = {}", self.t_end)));
        }
        require_positive("grid.r_max", self.grid.r_max)?;
        if self.grid.cells < 8 {
            return Err(bad("grid.cells", format!("need at least 8, got {}", self.grid.cells)));
        }
        if let Some(floor) = self.mobility_floor {
            if floor < 0.0 {
                return Err(bad("mobility_floor", format!("must be nonnegative, got {floor}")));
            }
        }
        self.datum.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinimalParams {
    pub m: f64,
    pub dt: f64,
    pub t_end: f64,
    pub cells_per_unit: u32,
    pub datum: Datum,
    pub ladder: LiftSchedule,
    #[serde(default = "default_store_every")]
    pub store_every: usize,
}

impl MinimalParams {
    pub fn validate(&self) -> Result<()> {
        require_open_unit("m", self.m)?;
        require_positive("dt", self.dt)?;
        require_positive("t_end", self.t_end)?;
        if self.cells_per_unit == 0 {
            return Err(bad("cells_per_unit", "must be positive"));
        }
        self.datum.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HpCheckParams {
    pub m: f64,
    /// Ball radius R of the estimate (reads on B_2R).
    pub radius: f64,
    pub dt: f64,
    pub t_end: f64,
    pub domain_radius: f64,
    pub cells_per_unit: u32,
    pub ell: f64,
    pub beta_low: f64,
    pub beta_high: f64,
    pub datum: Datum,
    /// (t, s) pairs, all among the stored times.
    pub pairs: Vec<(f64, f64)>,
}

impl HpCheckParams {
    pub fn validate(&self) -> Result<()> {
        require_open_unit("m", self.m)?;
        require_positive("radius", self.radius)?;
        require_positive("dt", self.dt)?;
        require_positive("t_end", self.t_end)?;
        require_positive("ell", self.ell)?;
        if !(self.beta_high > self.beta_low && self.beta_low > 0.0) {
            return Err(bad(
                "beta_high",
                format!("need 0 < beta_low < beta_high, got {} and {}", self.beta_low, self.beta_high),
            ));
        }
        if self.domain_radius < 2.0 * self.radius {
            return Err(bad(
                "domain_radius",
                format!(
                    "estimate reads on B_{}, so the domain must reach at least that",
                    2.0 * self.radius
                ),
            ));
        }
        if self.pairs.is_empty() {
            return Err(bad("pairs", "need at least one (t, s) pair"));
        }
        self.datum.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeParams {
    pub m: f64,
    pub t0: f64,
    pub dt: f64,
    pub t_end: f64,
    pub cells_per_unit: u32,
    pub datum: Datum,
    pub ladder_a: LiftSchedule,
    pub ladder_b: LiftSchedule,
    #[serde(default)]
    pub probe_radius: Option<f64>,
    #[serde(default)]
    pub alpha_override: Option<f64>,
}

impl ProbeParams {
    pub fn validate(&self) -> Result<()> {
        require_open_unit("m", self.m)?;
        require_positive("t0", self.t0)?;
        require_positive("dt", self.dt)?;
        require_positive("t_end", self.t_end)?;
        if self.t0 > self.t_end {
            return Err(bad("t0", format!("must not exceed t_end = {}", self.t_end)));
        }
        if self.cells_per_unit == 0 {
            return Err(bad("cells_per_unit", "must be positive"));
        }
        self.datum.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemoParams {
    pub m: f64,
    pub t_star: f64,
    pub radii: Vec<f64>,
    pub dt: f64,
    pub cells_per_unit: u32,
    /// The stochastically incomplete contrast profile; the scenario's main
    /// profile plays the complete side.
    pub incomplete_profile: ProfileSpec,
    #[serde(default = "DemoParams::default_boundary")]
    pub boundary: f64,
}

impl DemoParams {
    fn default_boundary() -> f64 {
        1.0
    }

    pub fn validate(&self) -> Result<()> {
        require_open_unit("m", self.m)?;
        require_positive("t_star", self.t_star)?;
        require_positive("dt", self.dt)?;
        require_positive("boundary", self.boundary)?;
        if self.radii.is_empty() {
            return Err(bad("radii", "need at least one radius"));
        }
        for w in self.radii.windows(2) {
            if !(w[1] > w[0]) {
                return Err(bad("radii", "must be strictly increasing"));
            }
        }
        if self.cells_per_unit == 0 {
            return Err(bad("cells_per_unit", "must be positive"));
        }
        Ok(())
    }
}

/// Parse the `parameters` table into the experiment's typed struct.
pub fn parse_params<T: serde::de::DeserializeOwned>(scenario: &Scenario) -> Result<T> {
    serde_json::from_value(scenario.parameters.clone())
        .map_err(|e| Error::invalid("parameters", e.to_string()))
}
