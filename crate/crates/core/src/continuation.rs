//! Parameter sweeps, branch continuity diagnostics and the optimal-control search over the
//! computed solution set.

use std::io::Write;

use log::warn;
use rayon::prelude::*;
use serde::Serialize;

use crate::energy::{psi, ProblemInstance};
use crate::error::{Error, Result};
use crate::graph::StatePair;
use crate::nonlinearity::{Interval, Nonlinearity};
use crate::real::Real;
use crate::solvers::{
    ball_radius, local_min_with, mountain_pass_with_endpoint, negative_endpoint, uniform_grid, SolveReport,
    SolverConfig, SolverKind,
};

/// `n` uniform points on `J` (default 21 in the command-line tool).
pub fn grid_points(j: &Interval, n: usize) -> Vec<f64> {
    j.samples(n)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchPoint<T> {
    pub w: f64,
    pub report: Option<SolveReport<T>>,
    pub error: Option<String>,
    pub warm_started: bool,
    /// Component norms `||u||`, `||v||` of the solution.
    pub norm_u: Option<f64>,
    pub norm_v: Option<f64>,
}

impl<T: Real> BranchPoint<T> {
    pub fn converged(&self) -> Option<&SolveReport<T>> {
        self.report.as_ref().filter(|r| r.converged)
    }
}

/// Solutions along an increasing parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch<T> {
    pub kind: SolverKind,
    pub grid: Vec<f64>,
    pub points: Vec<BranchPoint<T>>,
    /// Product-norm distance between consecutive converged states (`None` across failures).
    pub jumps: Vec<Option<f64>>,
    /// Shared negative endpoint of every mountain-pass certificate.
    pub endpoint: Option<Vec<f64>>,
    /// Shared ball radius of every local-minimum certificate.
    pub rho: Option<f64>,
    pub warm: bool,
}

/// Context shared by all solves of one branch.
struct Shared<T> {
    endpoint: Option<Vec<T>>,
    rho: Option<(f64, bool)>,
}

fn prepare<T: Real>(inst: &ProblemInstance<T>, grid: &[f64], kind: SolverKind, cfg: &SolverConfig) -> Result<Shared<T>> {
    let mut ws = uniform_grid(inst, cfg.uniform_grid);
    ws.extend(grid.iter().map(|&w| T::of(w)));
    Ok(match kind {
        SolverKind::MountainPass => Shared {
            endpoint: Some(negative_endpoint(inst, &ws, cfg.max_doublings)?),
            rho: None,
        },
        SolverKind::LocalMin => Shared {
            endpoint: None,
            rho: Some(match cfg.rho_override {
                Some(r) => (r, false),
                None => (ball_radius(inst, &ws, cfg)?.rho, true),
            }),
        },
    })
}

fn solve_at<T: Real>(
    inst: &ProblemInstance<T>,
    kind: SolverKind,
    shared: &Shared<T>,
    warm: Option<&[T]>,
    cfg: &SolverConfig,
) -> Result<SolveReport<T>> {
    match kind {
        SolverKind::MountainPass => {
            let endpoint = shared.endpoint.as_deref().expect("endpoint prepared");
            mountain_pass_with_endpoint(inst, endpoint, warm, cfg)
        }
        SolverKind::LocalMin => {
            let (rho, estimated) = shared.rho.expect("radius prepared");
            local_min_with(inst, rho, estimated, warm.map(<[T]>::to_vec), cfg)
        }
    }
}

fn check_grid(inst_j: &Interval, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Input("empty parameter grid".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Input("parameter grid must be strictly increasing".into()));
    }
    if let Some(w) = grid.iter().find(|&&w| !inst_j.contains(w)) {
        return Err(Error::Input(format!("grid value {w} lies outside [{}, {}]", inst_j.lo, inst_j.hi)));
    }
    Ok(())
}

fn point<T: Real>(inst: &ProblemInstance<T>, w: f64, res: Result<SolveReport<T>>, warm_started: bool) -> BranchPoint<T> {
    match res {
        Ok(r) => {
            let x = inst.to_flat(&r.state).unwrap_or_default();
            let (a, b) = inst.component_norm_pows(&x);
            let norm_u = a.powf(inst.p().recip()).as_f64();
            let norm_v = if inst.is_scalar() { 0.0 } else { b.powf(inst.q().recip()).as_f64() };
            BranchPoint {
                w,
                report: Some(r),
                error: None,
                warm_started,
                norm_u: Some(norm_u),
                norm_v: Some(norm_v),
            }
        }
        Err(e) => BranchPoint {
            w,
            report: None,
            error: Some(e.to_string()),
            warm_started,
            norm_u: None,
            norm_v: None,
        },
    }
}

/// Solves at every grid value. Warm sweeps go left to right from the previous solution
/// (cold start whenever that fails); cold sweeps run the grid points in parallel.
pub fn sweep<T: Real>(
    inst: &ProblemInstance<T>,
    grid: &[f64],
    kind: SolverKind,
    cfg: &SolverConfig,
    warm: bool,
) -> Result<Branch<T>> {
    check_grid(&inst.interval(), grid)?;
    let shared = prepare(inst, grid, kind, cfg)?;
    let points: Vec<BranchPoint<T>> = if warm {
        let mut out: Vec<BranchPoint<T>> = Vec::with_capacity(grid.len());
        for &w in grid {
            let at = inst.with_parameter(T::of(w))?;
            let prev = out
                .last()
                .and_then(|p| p.converged())
                .and_then(|r| at.to_flat(&r.state).ok());
            let mut res = None;
            if let Some(x) = &prev {
                match solve_at(&at, kind, &shared, Some(x), cfg) {
                    Ok(r) if r.converged => res = Some((Ok(r), true)),
                    Ok(_) => warn!("warm start at w = {w} did not converge; cold start"),
                    Err(e) => warn!("warm start at w = {w} failed ({e}); cold start"),
                }
            }
            let (r, warm_started) = res.unwrap_or_else(|| (solve_at(&at, kind, &shared, None, cfg), false));
            out.push(point(&at, w, r, warm_started));
        }
        out
    } else {
        grid.par_iter()
            .map(|&w| match inst.with_parameter(T::of(w)) {
                Ok(at) => point(&at, w, solve_at(&at, kind, &shared, None, cfg), false),
                Err(e) => point(inst, w, Err(e), false),
            })
            .collect()
    };
    let jumps = points
        .windows(2)
        .map(|pair| match (pair[0].converged(), pair[1].converged()) {
            (Some(a), Some(b)) => distance(inst, &a.state, &b.state),
            _ => None,
        })
        .collect();
    Ok(Branch {
        kind,
        grid: grid.to_vec(),
        points,
        jumps,
        endpoint: shared.endpoint.map(|e| e.iter().map(|x| x.as_f64()).collect()),
        rho: shared.rho.map(|r| r.0),
        warm,
    })
}

fn distance<T: Real>(inst: &ProblemInstance<T>, a: &StatePair<T>, b: &StatePair<T>) -> Option<f64> {
    let x = inst.to_flat(a).ok()?;
    let y = inst.to_flat(b).ok()?;
    let d: Vec<T> = x.iter().zip(&y).map(|(&p, &q)| p - q).collect();
    Some(inst.norm(&d).as_f64())
}

/// Largest absolute entry difference between two states.
pub fn max_abs_difference<T: Real>(a: &StatePair<T>, b: &StatePair<T>) -> f64 {
    a.u.iter()
        .zip(b.u.iter())
        .chain(a.v.iter().zip(b.v.iter()))
        .fold(0.0, |m, (&x, &y)| m.max((x - y).abs().as_f64()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpRow {
    pub w_from: f64,
    pub w_to: f64,
    pub jump: f64,
    /// `jump / dw`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitCheck {
    pub w0: f64,
    pub warm_from: f64,
    pub distance: f64,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityReport {
    /// `None` when fewer than two consecutive points converged.
    pub max_jump: Option<f64>,
    pub jumps: Vec<JumpRow>,
    pub norms_within_bounds: bool,
    /// Grid values whose norm falls outside the certified bounds (or lack a certificate).
    pub outside_bounds: Vec<f64>,
    /// Fraction of grid points that converged.
    pub coverage: f64,
    pub failed: Vec<f64>,
    pub limit_check: Option<LimitCheck>,
    pub notes: Vec<String>,
}

/// Jump table, bound membership, coverage, and a limit check: the middle grid point is
/// re-solved warm-started from its nearest converged neighbour and compared.
pub fn branch_continuity_report<T: Real>(
    inst: &ProblemInstance<T>,
    branch: &Branch<T>,
    cfg: &SolverConfig,
) -> Result<ContinuityReport> {
    let mut notes = Vec::new();
    let mut jumps = Vec::new();
    for (k, j) in branch.jumps.iter().enumerate() {
        if let Some(j) = j {
            let (a, b) = (branch.grid[k], branch.grid[k + 1]);
            jumps.push(JumpRow { w_from: a, w_to: b, jump: *j, ratio: j / (b - a) });
        }
    }
    let max_jump = jumps.iter().map(|r| r.jump).fold(None, |m: Option<f64>, j| Some(m.map_or(j, |m| m.max(j))));
    if max_jump.is_none() {
        notes.push("max jump undefined: fewer than two consecutive converged points".into());
    }
    let mut outside = Vec::new();
    let mut failed = Vec::new();
    for p in &branch.points {
        match p.converged() {
            Some(r) => {
                if !r.certificate.as_ref().is_some_and(|c| c.satisfied) {
                    outside.push(p.w);
                }
            }
            None => failed.push(p.w),
        }
    }
    let n = branch.points.len();
    let coverage = (n - failed.len()) as f64 / n as f64;
    if coverage < 1.0 {
        notes.push(format!("coverage {:.1}%: failed points excluded from the diagnostics", 100.0 * coverage));
    }
    let limit_check = limit_check(inst, branch, cfg)?;
    Ok(ContinuityReport {
        max_jump,
        jumps,
        norms_within_bounds: outside.is_empty(),
        outside_bounds: outside,
        coverage,
        failed,
        limit_check,
        notes,
    })
}

fn limit_check<T: Real>(inst: &ProblemInstance<T>, branch: &Branch<T>, cfg: &SolverConfig) -> Result<Option<LimitCheck>> {
    let n = branch.points.len();
    if n < 2 {
        return Ok(None);
    }
    let mid = n / 2;
    let Some(target) = branch.points[mid].converged() else { return Ok(None) };
    let neighbour = (0..n)
        .filter(|&k| k != mid && branch.points[k].converged().is_some())
        .min_by(|&a, &b| {
            let da = (branch.grid[a] - branch.grid[mid]).abs();
            let db = (branch.grid[b] - branch.grid[mid]).abs();
            da.total_cmp(&db).then(a.cmp(&b))
        });
    let Some(k) = neighbour else { return Ok(None) };
    let at = inst.with_parameter(T::of(branch.grid[mid]))?;
    let start = at.to_flat(&branch.points[k].report.as_ref().expect("converged").state)?;
    let shared = Shared {
        endpoint: branch.endpoint.as_ref().map(|e| e.iter().map(|&x| T::of(x)).collect()),
        rho: branch.rho.map(|r| (r, true)),
    };
    let res = solve_at(&at, branch.kind, &shared, Some(&start), cfg)?;
    let distance = max_abs_difference(&res.state, &target.state);
    Ok(Some(LimitCheck {
        w0: branch.grid[mid],
        warm_from: branch.grid[k],
        distance,
        agrees: res.converged && distance <= 1e-6,
    }))
}

/// Grid minimizer of `psi` over the converged points of a branch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlReport<T> {
    /// `psi` per grid point (`None` where the solve failed).
    pub psi: Vec<Option<f64>>,
    pub index: usize,
    pub w_bar: f64,
    pub psi_bar: f64,
    pub state: StatePair<T>,
}

/// Evaluates `psi` on a computed branch and returns the smallest value, ties broken by the
/// smallest `w`.
pub fn control_on_branch<T: Real>(
    inst: &ProblemInstance<T>,
    branch: &Branch<T>,
    g: &Nonlinearity<T>,
) -> Result<ControlReport<T>> {
    let psi_vals: Vec<Option<f64>> = branch
        .points
        .par_iter()
        .map(|p| {
            let r = p.converged()?;
            let at = inst.with_parameter(T::of(p.w)).ok()?;
            psi(&at, &r.state, g).ok().map(|v| v.as_f64())
        })
        .collect();
    let mut best: Option<usize> = None;
    for (k, v) in psi_vals.iter().enumerate() {
        if let Some(v) = v {
            // grid is increasing, so strict comparison keeps the smallest w on ties
            if best.is_none_or(|b| *v < psi_vals[b].expect("set")) {
                best = Some(k);
            }
        }
    }
    let Some(index) = best else {
        return Err(Error::Solver("no converged grid point to evaluate the objective on".into()));
    };
    Ok(ControlReport {
        psi_bar: psi_vals[index].expect("set"),
        w_bar: branch.grid[index],
        state: branch.points[index].report.as_ref().expect("converged").state.clone(),
        psi: psi_vals,
        index,
    })
}

/// Sweep followed by the grid minimization of `psi`.
pub fn optimal_control<T: Real>(
    inst: &ProblemInstance<T>,
    g: &Nonlinearity<T>,
    grid: &[f64],
    kind: SolverKind,
    cfg: &SolverConfig,
    warm: bool,
) -> Result<(Branch<T>, ControlReport<T>)> {
    let branch = sweep(inst, grid, kind, cfg, warm)?;
    let control = control_on_branch(inst, &branch, g)?;
    Ok((branch, control))
}

/// CSV with columns `w, norm_u, norm_v, energy, residual, C1, C2, psi`; the bound columns
/// hold whichever lower/upper pair the certificate carries.
pub fn write_csv<T: Real, W: Write>(branch: &Branch<T>, psi: Option<&[Option<f64>]>, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["w", "norm_u", "norm_v", "energy", "residual", "C1", "C2", "psi"])?;
    let fmt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
    for (k, p) in branch.points.iter().enumerate() {
        let r = p.report.as_ref();
        let cert = r.and_then(|r| r.certificate.as_ref());
        wtr.write_record([
            format!("{:e}", p.w),
            fmt(p.norm_u),
            fmt(p.norm_v),
            fmt(r.map(|r| r.energy)),
            fmt(r.map(|r| r.residual)),
            fmt(cert.map(|c| c.lower)),
            fmt(cert.map(|c| c.upper)),
            fmt(psi.and_then(|v| v.get(k).copied().flatten())),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}
