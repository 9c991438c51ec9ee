//! Experiment execution: each scenario kind maps onto the core modules and
//! emits machine-readable artifacts plus a checksum manifest.

use std::path::Path;

use serde::Serialize;

use fdelab_core::elliptic::{
    nonexistence_experiment, verify_supersolution, BarrierEvaluator, BarrierSpec,
};
use fdelab_core::error::{Error, Result};
use fdelab_core::estimates::{
    check_hp_ordered, check_hp_strong, hp_constant, uniqueness_probe, HpReport, ProbeOptions,
};
use fdelab_core::geometry::{classify_completeness, Profile, RadialGrid};
use fdelab_core::io;
use fdelab_core::newton::NewtonCtl;
use fdelab_core::parabolic::{
    minimal_solution, solve_fde, solve_lifted, FdeConfig, LiftedProblem, MinimalSolutionResult,
    SpaceTimeField, SpatialResolution,
};
use fdelab_core::quad::QuadCtl;

use crate::demo::{contrast_csv, demo_nonuniqueness};
use crate::manifest::{ArtifactSink, Manifest};
use crate::scenario::{
    parse_params, BarrierParams, ClassifyParams, DemoParams, EllipticParams, ExperimentKind,
    FdeParams, HpCheckParams, MinimalParams, ProbeParams, Scenario, TrajectoryFormat,
};

/// Run a scenario, writing artifacts under `out_dir`.
pub fn run_scenario(scenario: &Scenario, out_dir: &Path) -> Result<Manifest> {
    let profile = Profile::new(&scenario.profile)?;
    let mut sink = ArtifactSink::create(out_dir)?;
    match scenario.experiment {
        ExperimentKind::Classify => run_classify(scenario, &profile, &mut sink)?,
        ExperimentKind::Barrier => run_barrier(scenario, &profile, &mut sink)?,
        ExperimentKind::EllipticNonexistence => run_elliptic(scenario, &profile, &mut sink)?,
        ExperimentKind::Fde => run_fde(scenario, &profile, &mut sink)?,
        ExperimentKind::Minimal => run_minimal(scenario, &profile, &mut sink)?,
        ExperimentKind::HpCheck => run_hp_check(scenario, &profile, &mut sink)?,
        ExperimentKind::UniquenessProbe => run_probe(scenario, &profile, &mut sink)?,
        ExperimentKind::DemoNonuniqueness => run_demo(scenario, &profile, &mut sink)?,
    }
    sink.finish(&scenario.name, &scenario.experiment.to_string())
}

fn run_classify(scenario: &Scenario, profile: &Profile, sink: &mut ArtifactSink) -> Result<()> {
    let params: ClassifyParams = parse_params(scenario)?;
    params.validate()?;
    let report = classify_completeness(
        profile,
        params.horizon,
        params.samples,
        &QuadCtl::with_tol(params.quad_tol),
    )?;

    #[derive(Serialize)]
    struct Completeness<'a> {
        verdict: &'a fdelab_core::geometry::Verdict,
        sigma: f64,
        prefactor: f64,
        fit_residual: f64,
        h_at_horizon: f64,
    }
    sink.emit_json(
        "completeness.json",
        &Completeness {
            verdict: &report.verdict,
            sigma: report.sigma,
            prefactor: report.prefactor,
            fit_residual: report.fit_residual,
            h_at_horizon: report.h_at_horizon,
        },
    )?;

    let mut csv = String::from("r,h,h_prime\n");
    for s in &report.samples {
        csv.push_str(&format!(
            "{},{},{}\n",
            io::format_float(s.r),
            io::format_float(s.h),
            io::format_float(s.h_prime)
        ));
    }
    sink.emit("h_samples.csv", csv.as_bytes())
}

fn run_barrier(scenario: &Scenario, profile: &Profile, sink: &mut ArtifactSink) -> Result<()> {
    let params: BarrierParams = parse_params(scenario)?;
    params.validate()?;
    let spec = match params.constant {
        Some(c) => BarrierSpec::with_constant(params.p, params.alpha, params.radius, c)?,
        None => BarrierSpec::new(params.p, params.alpha, params.radius)?,
    };
    let quad = QuadCtl::default();
    let evaluator = BarrierEvaluator::new(profile, spec, &quad)?;
    let grid = RadialGrid::uniform(params.radius * (1.0 - params.margin), params.cells)?;
    let field = evaluator.field(&grid, &quad)?;
    let report = verify_supersolution(profile, &field, &spec, params.tolerance)?;

    let mut csv = String::from("r,w\n");
    for (r, w) in grid.nodes().iter().zip(field.values()) {
        csv.push_str(&format!("{},{}\n", io::format_float(*r), io::format_float(*w)));
    }
    sink.emit("barrier.csv", csv.as_bytes())?;
    sink.emit_json("supersolution.json", &report)
}

fn run_elliptic(scenario: &Scenario, profile: &Profile, sink: &mut ArtifactSink) -> Result<()> {
    let params: EllipticParams = parse_params(scenario)?;
    params.validate()?;
    let table = nonexistence_experiment(
        profile,
        params.p,
        params.alpha,
        &params.radii,
        params.probe_radius,
        params.cells,
        &NewtonCtl::default(),
        &QuadCtl::default(),
    )?;
    let mut csv = Vec::new();
    io::write_decay_csv(&mut csv, &table)?;
    sink.emit("decay.csv", &csv)?;
    sink.emit_json("decay.json", &table)
}

fn emit_trajectory(
    sink: &mut ArtifactSink,
    name_stem: &str,
    traj: &SpaceTimeField,
    format: TrajectoryFormat,
) -> Result<()> {
    match format {
        TrajectoryFormat::Csv => {
            let mut buf = Vec::new();
            io::write_trajectory_csv(&mut buf, traj)?;
            sink.emit(&format!("{name_stem}.csv"), &buf)
        }
        TrajectoryFormat::Binary => {
            let mut buf = Vec::new();
            io::write_trajectory_bin(&mut buf, traj)?;
            sink.emit(&format!("{name_stem}.bin"), &buf)
        }
    }
}

fn run_fde(scenario: &Scenario, profile: &Profile, sink: &mut ArtifactSink) -> Result<()> {
    let params: FdeParams = parse_params(scenario)?;
    params.validate()?;
    let grid = RadialGrid::uniform(params.grid.r_max, params.grid.cells)?;
    let u0 = params.datum.sample(&grid);
    let floor = params.mobility_floor.unwrap_or_else(|| {
        if u0.min() > 0.0 && params.boundary > 0.0 {
            0.0
        } else {
            1e-8 * u0.max().max(params.boundary.abs()).max(1.0)
        }
    });
    let cfg = FdeConfig::new(params.m, params.dt, params.t_end)?
        .with_mobility_floor(floor)
        .with_store_every(params.store_every);
    let traj = solve_fde(profile, &cfg, &grid, &u0, params.boundary)?;
    emit_trajectory(sink, "trajectory", &traj, params.format)
}

fn run_minimal(scenario: &Scenario, profile: &Profile, sink: &mut ArtifactSink) -> Result<()> {
    let params: MinimalParams = parse_params(scenario)?;
    params.validate()?;
    let cfg = FdeConfig::new(params.m, params.dt, params.t_end)?
        .with_store_every(params.store_every);
    let result = minimal_solution(
        profile,
        &cfg,
        &params.datum,
        &params.ladder,
        SpatialResolution {
            cells_per_unit: params.cells_per_unit,
        },
    )?;
    emit_minimal(sink, &result)
}

fn emit_minimal(sink: &mut ArtifactSink, result: &MinimalSolutionResult) -> Result<()> {
    let mut log_csv = String::from("sweep,domain_radius,lift,cap,sup_increment\n");
    for stage in &result.ladder_log {
        let sweep = match stage.sweep {
            fdelab_core::parabolic::SweepKind::Cap => "cap",
            fdelab_core::parabolic::SweepKind::Lift => "lift",
            fdelab_core::parabolic::SweepKind::Domain => "domain",
        };
        log_csv.push_str(&format!(
            "{},{},{},{},{}\n",
            sweep,
            io::format_float(stage.domain_radius),
            io::format_float(stage.lift),
            io::format_float(stage.cap),
            io::format_float(stage.sup_increment)
        ));
    }
    sink.emit("ladder_log.csv", log_csv.as_bytes())?;

    #[derive(Serialize)]
    struct Summary {
        converged: bool,
        stages: usize,
        horizon: f64,
        domain_radius: f64,
    }
    sink.emit_json(
        "minimal.json",
        &Summary {
            converged: result.converged,
            stages: result.ladder_log.len(),
            horizon: result.field.horizon(),
            domain_radius: result.field.grid().outer_radius(),
        },
    )?;
    emit_trajectory(sink, "trajectory", &result.field, TrajectoryFormat::Csv)
}

fn run_hp_check(scenario: &Scenario, profile: &Profile, sink: &mut ArtifactSink) -> Result<()> {
    let params: HpCheckParams = parse_params(scenario)?;
    params.validate()?;
    let cells = (params.domain_radius * params.cells_per_unit as f64).round() as usize;
    let grid = RadialGrid::uniform(params.domain_radius, cells.max(8))?;
    let u0 = params.datum.sample(&grid);
    let cfg = FdeConfig::new(params.m, params.dt, params.t_end)?;
    let low = solve_lifted(
        profile,
        &cfg,
        &LiftedProblem {
            ell: params.ell,
            beta: params.beta_low,
            radius: params.domain_radius,
            u0: u0.clone(),
        },
        &grid,
    )?;
    let high = solve_lifted(
        profile,
        &cfg,
        &LiftedProblem {
            ell: params.ell,
            beta: params.beta_high,
            radius: params.domain_radius,
            u0,
        },
        &grid,
    )?;

    let quad = QuadCtl::default();
    #[derive(Serialize)]
    struct PairReport {
        t: f64,
        s: f64,
        ordered: HpReport,
        strong: HpReport,
    }
    let mut reports = Vec::new();
    for &(t, s) in &params.pairs {
        reports.push(PairReport {
            t,
            s,
            ordered: check_hp_ordered(&high, &low, profile, params.m, params.radius, t, s, &quad)?,
            strong: check_hp_strong(&high, &low, profile, params.m, params.radius, t, s, &quad)?,
        });
    }
    sink.emit_json("hp_reports.json", &reports)?;
    let constant = hp_constant(profile, params.m, params.radius, 2048, &quad)?;
    sink.emit_json("hp_constant.json", &constant)
}

fn run_probe(scenario: &Scenario, profile: &Profile, sink: &mut ArtifactSink) -> Result<()> {
    let params: ProbeParams = parse_params(scenario)?;
    params.validate()?;
    let cfg = FdeConfig::new(params.m, params.dt, params.t_end)?;
    let resolution = SpatialResolution {
        cells_per_unit: params.cells_per_unit,
    };
    let a = minimal_solution(profile, &cfg, &params.datum, &params.ladder_a, resolution)?;
    let b = minimal_solution(profile, &cfg, &params.datum, &params.ladder_b, resolution)?;
    let report = uniqueness_probe(
        &a.field,
        &b.field,
        profile,
        params.m,
        params.t0,
        &ProbeOptions {
            alpha_override: params.alpha_override,
            probe_radius: params.probe_radius,
        },
        &QuadCtl::default(),
    )?;
    sink.emit_json("probe.json", &report)
}

fn run_demo(scenario: &Scenario, profile: &Profile, sink: &mut ArtifactSink) -> Result<()> {
    let params: DemoParams = parse_params(scenario)?;
    params.validate()?;
    let incomplete = Profile::new(&params.incomplete_profile)?;
    let table = demo_nonuniqueness(
        profile,
        &incomplete,
        params.m,
        &params.radii,
        params.t_star,
        params.dt,
        params.cells_per_unit,
        params.boundary,
    )?;
    sink.emit("contrast.csv", contrast_csv(&table).as_bytes())?;
    sink.emit_json("demo.json", &table)
}

/// Map an error to the documented process exit code: 2 for validation
/// failures, 3 for numerical ones.
pub fn exit_code_for(error: &Error) -> u8 {
    if error.is_validation() {
        2
    } else {
        3
    }
}
