//! Cross-module properties of the approximation ladder: the ordering chain,
//! the a priori mass estimate against the datum, and the uniqueness-probe
//! defect under refinement.

use std::sync::Arc;

use fdelab_core::estimates::{check_hp_ordered, uniqueness_probe, ProbeOptions};
use fdelab_core::geometry::{Profile, RadialField, RadialGrid};
use fdelab_core::parabolic::{
    minimal_solution, solve_fde, solve_lifted, Datum, FdeConfig, LiftSchedule, LiftedProblem,
    SpaceTimeField, SpatialResolution,
};
use fdelab_core::quad::QuadCtl;

const SLACK: f64 = 1e-7;

fn euclid3() -> Profile {
    Profile::euclidean(3).unwrap()
}

fn cone_on(grid: &Arc<RadialGrid>) -> RadialField {
    RadialField::from_fn(grid, |r| (1.0 - r).max(0.0))
}

fn lifted(
    p: &Profile,
    cfg: &FdeConfig,
    radius: f64,
    cells: usize,
    ell: f64,
    beta: f64,
) -> SpaceTimeField {
    let grid = RadialGrid::uniform(radius, cells).unwrap();
    solve_lifted(
        p,
        cfg,
        &LiftedProblem {
            ell,
            beta,
            radius,
            u0: cone_on(&grid),
        },
        &grid,
    )
    .unwrap()
}

#[test]
fn ordering_chain_of_the_lifted_family() {
    let p = euclid3();
    let cfg = FdeConfig::new(0.5, 0.02, 0.3).unwrap();
    let (ell, beta) = (0.1, 0.5);

    let base = lifted(&p, &cfg, 1.0, 32, ell, beta);
    let wider = lifted(&p, &cfg, 2.0, 64, ell, beta);
    let lifted_up = lifted(&p, &cfg, 1.0, 32, 0.2, beta);
    let capped_up = lifted(&p, &cfg, 1.0, 32, ell, 1.0);

    // ell <= u
    for s in base.states() {
        assert!(s.min() >= ell - SLACK);
    }
    // u <= ell + beta
    for s in base.states() {
        assert!(s.max() <= ell + beta + SLACK);
    }
    // domain growth raises the solution on the common ball
    assert!(base.max_excess_over(&wider).unwrap() <= SLACK);
    // larger lift dominates
    assert!(base.max_excess_over(&lifted_up).unwrap() <= SLACK);
    // larger truncation dominates
    assert!(base.max_excess_over(&capped_up).unwrap() <= SLACK);
}

#[test]
fn comparison_principle_for_ordered_data() {
    let p = euclid3();
    let g = RadialGrid::uniform(1.0, 48).unwrap();
    let cfg = FdeConfig::new(0.5, 0.02, 0.3).unwrap();
    let lo = RadialField::from_fn(&g, |r| 0.3 + 0.1 * (1.0 - r));
    let hi = RadialField::from_fn(&g, |r| 0.4 + 0.2 * (1.0 - r));
    let traj_lo = solve_fde(&p, &cfg, &g, &lo, 0.3).unwrap();
    let traj_hi = solve_fde(&p, &cfg, &g, &hi, 0.4).unwrap();
    assert!(traj_lo.max_excess_over(&traj_hi).unwrap() <= 1e-8);
}

#[test]
fn mass_estimate_of_the_ladder_limit_against_its_datum() {
    // [int_{B_R} u(t)]^(1-m) <= [int_{B_2R} u0]^(1-m) + H_R t, 2% slack,
    // checked through the ordered estimate with v = 0 and s = 0.
    let p = euclid3();
    let cfg = FdeConfig::new(0.5, 0.05, 1.0).unwrap();
    let ladder = LiftSchedule {
        radii: vec![2.5],
        lifts: vec![1e-2, 1e-3, 1e-4],
        caps: vec![1.0, 2.0],
        probe_radius: 1.0,
        stage_tol: Some(1e-4),
    };
    let run = minimal_solution(
        &p,
        &cfg,
        &Datum::cone(1.0, 1.0),
        &ladder,
        SpatialResolution { cells_per_unit: 20 },
    )
    .unwrap();
    let traj = &run.field;
    let zero = SpaceTimeField::new(
        Arc::clone(traj.grid()),
        traj.times().to_vec(),
        traj
            .times()
            .iter()
            .map(|_| RadialField::constant(traj.grid(), 0.0))
            .collect(),
    )
    .unwrap();
    for &t in &[0.25, 0.5, 1.0] {
        let rep =
            check_hp_ordered(traj, &zero, &p, 0.5, 1.0, t, 0.0, &QuadCtl::default()).unwrap();
        assert!(
            rep.pass,
            "mass estimate failed at t={t}: lhs={} rhs={} slack={}",
            rep.lhs, rep.rhs, rep.slack
        );
    }
}

#[test]
fn probe_defect_is_controlled_under_refinement() {
    // For a pair with identical initial data whose difference is purely
    // discretization (the same lifted problem at dt and dt/2, common stored
    // times), the contraction functional's subsolution defect may dip below
    // zero only by discretization error: min_defect >= -K (h^2 + dt) with
    // one K across a refinement. (Pairs from different lift floors are NOT
    // covered: their W carries a kink at the datum's support edge whose
    // discrete Laplacian grows like 1/h.)
    let p = euclid3();
    let mut defects = Vec::new();
    for (cells_per_unit, dt) in [(16usize, 0.05), (32usize, 0.025)] {
        let grid = RadialGrid::uniform(2.0, 2 * cells_per_unit).unwrap();
        let prob = LiftedProblem {
            ell: 0.05,
            beta: 1.0,
            radius: 2.0,
            u0: cone_on(&grid),
        };
        let coarse_cfg = FdeConfig::new(0.5, dt, 1.0).unwrap();
        let fine_cfg = FdeConfig::new(0.5, dt / 2.0, 1.0)
            .unwrap()
            .with_store_every(2);
        let u = solve_lifted(&p, &coarse_cfg, &prob, &grid).unwrap();
        let v = solve_lifted(&p, &fine_cfg, &prob, &grid).unwrap();
        let rep = uniqueness_probe(
            &u,
            &v,
            &p,
            0.5,
            1.0,
            &ProbeOptions::default(),
            &QuadCtl::default(),
        )
        .unwrap();
        let h = 1.0 / cells_per_unit as f64;
        defects.push((rep.min_defect, h * h + dt, rep.sup_w, rep.barrier_bound));
    }
    // Calibrate K on the coarse pair (with margin); the finer pair must
    // stay within the same constant.
    let k = (3.0 * defects[0].0.abs() / defects[0].1).max(1e-6);
    for (defect, scale, sup_w, barrier) in &defects {
        assert!(
            *defect >= -k * scale,
            "defect {defect} below -K(h^2+dt) = {}",
            -k * scale
        );
        assert!(sup_w < barrier, "sup W {sup_w} should sit far below the barrier {barrier}");
    }
    // The defect floor itself must shrink as (h, dt) refine.
    assert!(
        defects[1].0.abs() <= defects[0].0.abs(),
        "defect floor grew under refinement: {defects:?}"
    );
}

#[test]
fn two_ladders_sup_w_sits_far_below_the_barrier() {
    let p = euclid3();
    let datum = Datum::cone(1.0, 1.0);
    let cfg = FdeConfig::new(0.5, 0.025, 1.0).unwrap();
    let res = SpatialResolution { cells_per_unit: 16 };
    let a = minimal_solution(
        &p,
        &cfg,
        &datum,
        &LiftSchedule {
            radii: vec![2.0],
            lifts: vec![1e-2, 1e-3],
            caps: vec![1.0],
            probe_radius: 1.0,
            stage_tol: Some(1e-6),
        },
        res,
    )
    .unwrap();
    let b = minimal_solution(
        &p,
        &cfg,
        &datum,
        &LiftSchedule {
            radii: vec![2.0],
            lifts: vec![3e-2, 3e-3],
            caps: vec![1.5],
            probe_radius: 1.0,
            stage_tol: Some(1e-6),
        },
        res,
    )
    .unwrap();
    let rep = uniqueness_probe(
        &a.field,
        &b.field,
        &p,
        0.5,
        1.0,
        &ProbeOptions::default(),
        &QuadCtl::default(),
    )
    .unwrap();
    assert!(
        rep.sup_w < 0.05 * rep.barrier_bound,
        "sup W = {} vs barrier {}",
        rep.sup_w,
        rep.barrier_bound
    );
}

#[test]
fn ladder_rejects_nonmonotone_spoofing() {
    // A schedule whose caps decrease must be rejected up front.
    let p = euclid3();
    let cfg = FdeConfig::new(0.5, 0.05, 0.25).unwrap();
    let bad = LiftSchedule {
        radii: vec![1.0],
        lifts: vec![0.1],
        caps: vec![2.0, 1.0],
        probe_radius: 0.5,
        stage_tol: None,
    };
    assert!(minimal_solution(
        &p,
        &cfg,
        &Datum::constant(1.0),
        &bad,
        SpatialResolution { cells_per_unit: 16 }
    )
    .is_err());
}
