//! Parameter sweeps, continuity diagnostics, grid control and CSV export.

mod common;

use std::sync::Arc;

use grapde::calculus::OperatorOrder;
use grapde::continuation::{
    branch_continuity_report, control_on_branch, grid_points, sweep, write_csv,
};
use grapde::energy::ProblemInstance;
use grapde::nonlinearity::{builtin, BuiltinParams, HypothesisSpec, Nonlinearity};
use grapde::solvers::{SolverConfig, SolverKind};

use common::p2;

fn mp_branch_on(grid: &[f64]) -> (ProblemInstance<f64>, grapde::continuation::Branch<f64>) {
    let inst = common::builtin_instance("mp-example", &p2(), &BuiltinParams::default());
    let branch = sweep(&inst, grid, SolverKind::MountainPass, &SolverConfig::default(), true).unwrap();
    (inst, branch)
}

fn mp_branch(n: usize) -> (ProblemInstance<f64>, grapde::continuation::Branch<f64>) {
    mp_branch_on(&grid_points(&Default::default(), n))
}

#[test]
fn branch_norms_stay_within_bounds() {
    let (inst, branch) = mp_branch(11);
    let report = branch_continuity_report(&inst, &branch, &SolverConfig::default()).unwrap();
    assert!(report.norms_within_bounds, "{:?}", report.outside_bounds);
    assert_eq!(report.coverage, 1.0);
    assert!(report.limit_check.as_ref().is_some_and(|l| l.agrees));
    assert!(branch.endpoint.is_some());
}

#[test]
fn single_point_grid_has_no_jump() {
    let (inst, branch) = mp_branch_on(&[0.25]);
    assert_eq!(branch.points.len(), 1);
    let report = branch_continuity_report(&inst, &branch, &SolverConfig::default()).unwrap();
    assert!(report.max_jump.is_none());
}

#[test]
fn parameter_free_problem_has_no_jumps() {
    let g = p2();
    let nl = Arc::new(Nonlinearity::for_graph("(u^2+v^2)^2", &common::no_tables(), &g).unwrap());
    let spec = HypothesisSpec { theta: Some(4.0), c1: Some(16.0), c2: Some(16.0), r1: Some(4.0), r2: Some(4.0), ..Default::default() };
    let inst = ProblemInstance::new(
        g,
        OperatorOrder::new(1, 3.0).unwrap(),
        OperatorOrder::new(1, 2.0).unwrap(),
        nl,
        Arc::new(spec),
        0.0,
    )
    .unwrap();
    let cfg = SolverConfig::default();
    let branch = sweep(&inst, &grid_points(&inst.interval(), 5), SolverKind::MountainPass, &cfg, true).unwrap();
    let report = branch_continuity_report(&inst, &branch, &cfg).unwrap();
    assert!(report.max_jump.unwrap() < 1e-6, "{:?}", report.max_jump);
}

#[test]
fn constant_objective_picks_the_first_grid_point() {
    let (inst, branch) = mp_branch(5);
    let g = Nonlinearity::for_graph("1", &common::no_tables(), inst.graph()).unwrap();
    let c = control_on_branch(&inst, &branch, &g).unwrap();
    assert_eq!(c.index, 0);
    assert_eq!(c.w_bar, -1.0);
}

#[test]
fn negated_objective_matches_the_grid_oracle() {
    let (inst, branch) = mp_branch(11);
    let def = builtin("control-objective", inst.graph(), &BuiltinParams::default()).unwrap();
    let source = format!("-({})", def.objective.unwrap());
    let g = Nonlinearity::for_graph(&source, &def.coefficients, inst.graph()).unwrap();
    let c = control_on_branch(&inst, &branch, &g).unwrap();
    let oracle = c
        .psi
        .iter()
        .enumerate()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .fold(None, |best: Option<(usize, f64)>, (k, v)| match best {
            Some((_, b)) if b <= v => best,
            _ => Some((k, v)),
        })
        .unwrap();
    assert_eq!(c.index, oracle.0);
    assert!(c.w_bar != 0.0);
    assert!(c.psi_bar < 0.0);
}

#[test]
fn csv_has_one_row_per_grid_point() {
    let (_, branch) = mp_branch(5);
    let mut buf = Vec::new();
    write_csv(&branch, None, &mut buf).unwrap();
    let mut rdr = csv::Reader::from_reader(buf.as_slice());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["w", "norm_u", "norm_v", "energy", "residual", "C1", "C2", "psi"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 5);
    for row in &rows {
        let c1: f64 = row[5].parse().unwrap();
        let c2: f64 = row[6].parse().unwrap();
        assert!(c1 <= c2);
        assert!(row[7].is_empty());
    }
}
