//! Local minimizers in a small ball: radius estimation and projected descent.

use log::{debug, info};
use serde::Serialize;

use super::{
    axpy, bound_certificate_min, diff, finish_status, scaled, uniform_grid, Counted, SolveReport, SolverConfig,
    SolverKind, Status,
};
use crate::energy::ProblemInstance;
use crate::error::{Error, Result};
use crate::graph::Potential;
use crate::real::{linspace, Real};
use crate::sobolev::embedding_constants;

/// A radius on which `F <= D (|t|^p + |s|^p)` was observed for every sampled pair and
/// parameter. Sampled, hence labelled estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallRadius {
    pub rho: f64,
    /// The growth constant `D` that was checked.
    pub bound: f64,
    pub rung: usize,
    pub estimated: bool,
}

/// Largest `rho_max 2^-k` such that the small-amplitude growth bound holds on the sup-norm
/// box reachable from the ball of radius `rho`, at every parameter in `ws`.
pub fn ball_radius<T: Real>(inst: &ProblemInstance<T>, ws: &[T], cfg: &SolverConfig) -> Result<BallRadius> {
    let p = inst.p();
    if !inst.is_scalar() && p != inst.q() {
        return Err(Error::BallRadius("the ball construction needs p = q".into()));
    }
    let ec = embedding_constants(inst.graph(), p, inst.q())?;
    let b = if inst.is_scalar() && inst.space1().potential == Potential::H2 {
        (T::one() / (ec.mu_min * ec.h2_min)).powf(p.recip())
    } else {
        ec.b
    };
    let k1 = ec.volume.powf(p.recip()) * b;
    let mut bound = T::one() / (p * k1.powf(p));
    if !inst.is_scalar() {
        bound = bound.min(T::one() / (p * ec.k2.powf(p)));
    }
    let bound = T::of(0.9) * bound;
    let nl = inst.nonlinearity();
    for rung in 0..cfg.ball_ladder {
        let rho = T::of(cfg.rho_max) * T::of(0.5).powi(rung as i32);
        let ts = linspace(-b * rho, b * rho, if inst.is_scalar() { 2 * cfg.ball_grid - 1 } else { cfg.ball_grid });
        let ss = if inst.is_scalar() { vec![T::zero()] } else { linspace(-ec.d * rho, ec.d * rho, cfg.ball_grid) };
        let mut ok = true;
        'scan: for x in 0..inst.n() {
            for &w in ws {
                for &t in &ts {
                    for &s in &ss {
                        let rhs = bound * (t.abs().powf(p) + s.abs().powf(p));
                        match nl.eval(crate::nonlinearity::Which::F, x, t, s, w) {
                            Ok(v) if v <= rhs + T::of(1e-12) * rhs.abs() => {}
                            _ => {
                                ok = false;
                                break 'scan;
                            }
                        }
                    }
                }
            }
        }
        if ok {
            debug!("ball radius {rho} accepted at rung {rung}");
            return Ok(BallRadius {
                rho: rho.as_f64(),
                bound: bound.as_f64(),
                rung,
                estimated: true,
            });
        }
    }
    Err(Error::BallRadius(format!(
        "growth bound fails on every radius down to {:e}",
        cfg.rho_max * 0.5f64.powi(cfg.ball_ladder as i32 - 1)
    )))
}

pub(crate) struct Descent<T> {
    pub x: Vec<T>,
    pub energy: T,
    pub residual: T,
    pub iterations: usize,
    pub converged: bool,
    pub on_boundary: bool,
}

/// Radial retraction onto the closed ball (exact for the 1-homogeneous product norm up to
/// the non-Euclidean geometry of the ball).
fn retract<T: Real>(inst: &ProblemInstance<T>, x: Vec<T>, rho: Option<T>) -> Vec<T> {
    match rho {
        Some(r) => {
            let n = inst.norm(&x);
            if n > r {
                scaled(r / n, &x)
            } else {
                x
            }
        }
        None => x,
    }
}

/// Barzilai–Borwein descent with Armijo backtracking, optionally retracted onto the ball
/// `||x|| <= rho`.
pub(crate) fn projected_descent<T: Real>(
    f: &Counted<T>,
    start: Vec<T>,
    rho: Option<T>,
    cfg: &SolverConfig,
) -> Result<Descent<T>> {
    let inst = f.inst;
    let tol = T::of(cfg.tol);
    let c = T::of(cfg.armijo);
    let mut x = retract(inst, start, rho);
    let mut e = f.energy(&x)?;
    let mut g = f.gradient(&x)?;
    let mut alpha = T::one() / inst.metric_norm(&g).max(T::one());
    let mut prev: Option<(Vec<T>, Vec<T>)> = None;
    let inside = |x: &[T]| rho.is_none_or(|r| inst.norm(x) < r * (T::one() - T::of(1e-9)));
    let mut it = 0;
    let mut converged = false;
    let mut on_boundary = false;
    while it < cfg.max_iter {
        let res = inst.metric_norm(&g);
        if inside(&x) && res <= tol {
            converged = true;
            break;
        }
        if !inside(&x) {
            // projected-gradient stationarity on the sphere
            let y = retract(inst, axpy(-T::one(), &g, &x), rho);
            if inst.metric_norm(&diff(&y, &x)) <= tol {
                on_boundary = true;
                break;
            }
        }
        if let Some((xp, gp)) = &prev {
            let s = diff(&x, xp);
            let y = diff(&g, gp);
            let sy = inst.inner(&s, &y);
            if sy > T::zero() {
                alpha = (inst.inner(&s, &s) / sy).min(T::of(1e12)).max(T::of(1e-12));
            }
        }
        let mut a = alpha;
        let mut accepted = None;
        for _ in 0..60 {
            let y = retract(inst, axpy(-a, &g, &x), rho);
            if let Ok(ey) = f.energy(&y) {
                let dec = inst.inner(&g, &diff(&y, &x));
                if ey <= e + c * dec {
                    accepted = Some((y, ey));
                    break;
                }
            }
            a /= T::two();
        }
        it += 1;
        let Some((y, ey)) = accepted else {
            debug!("descent stalled at iteration {it}");
            on_boundary = !inside(&x);
            break;
        };
        let gy = f.gradient(&y)?;
        prev = Some((x, g));
        x = y;
        e = ey;
        g = gy;
        if prev.as_ref().is_some_and(|(xp, _)| inst.metric_norm(&diff(&x, xp)) == T::zero()) {
            on_boundary = !inside(&x);
            break;
        }
    }
    let residual = inst.metric_norm(&g);
    if !converged && inside(&x) && residual <= tol {
        converged = true;
    }
    Ok(Descent {
        x,
        energy: e,
        residual,
        iterations: it,
        converged,
        on_boundary: on_boundary && !converged,
    })
}

/// Local minimizer inside the ball, started from `t0 (spike, spike)` with
/// `t0 = t0_factor * min(delta, rho / ||spike||)`.
pub fn local_min_solve<T: Real>(inst: &ProblemInstance<T>, cfg: &SolverConfig) -> Result<SolveReport<T>> {
    let (rho, estimated) = match cfg.rho_override {
        Some(r) => (r, false),
        None => {
            let ws = uniform_grid(inst, cfg.uniform_grid);
            (ball_radius(inst, &ws, cfg)?.rho, true)
        }
    };
    local_min_with(inst, rho, estimated, None, cfg)
}

/// Local-minimum solve on a known ball; `start` replaces the spike start (warm starts).
/// The certificate always refers to the spike construction.
pub(crate) fn local_min_with<T: Real>(
    inst: &ProblemInstance<T>,
    rho: f64,
    estimated: bool,
    start: Option<Vec<T>>,
    cfg: &SolverConfig,
) -> Result<SolveReport<T>> {
    if !inst.is_scalar() && inst.p() != inst.q() {
        return Err(Error::Hypothesis("the local-minimum construction needs p = q".into()));
    }
    let x0 = inst.spec().spike_vertex(inst.graph())?;
    let spike = inst.spike(x0);
    let sn = inst.norm(&spike).as_f64();
    let delta = inst.spec().delta().unwrap_or(f64::INFINITY);
    let t0 = cfg.t0_factor * delta.min(rho / sn);
    let start = start.unwrap_or_else(|| scaled(T::of(t0), &spike));
    let mut report = local_min_from(inst, start, rho, cfg)?;
    match bound_certificate_min(inst, x0, t0, rho, report.norm) {
        Ok(mut c) => {
            c.rho_estimated = estimated;
            report.certificate = Some(c);
        }
        Err(e) => report.flags.push(format!("no certificate: {e}")),
    }
    Ok(report)
}

/// Projected descent inside the ball of radius `rho` from an explicit start.
pub fn local_min_from<T: Real>(
    inst: &ProblemInstance<T>,
    start: Vec<T>,
    rho: f64,
    cfg: &SolverConfig,
) -> Result<SolveReport<T>> {
    if start.len() != inst.dim() {
        return Err(Error::DimensionMismatch { expected: inst.dim(), found: start.len() });
    }
    let f = Counted::new(inst);
    let d = projected_descent(&f, start, Some(T::of(rho)), cfg)?;
    let norm = inst.norm(&d.x);
    let status = finish_status(SolverKind::LocalMin, d.converged, d.energy, norm, cfg.trivial_norm, d.on_boundary);
    let mut flags = Vec::new();
    match status {
        Status::BoundaryMinimum => flags.push("boundary-minimum: the minimizer touches the ball boundary".into()),
        Status::TypeUncertain => flags.push("non-negative energy: not a negative-energy local minimum".into()),
        Status::Trivial => flags.push("trivial: converged to the zero state".into()),
        Status::NotConverged => flags.push("iteration limit reached".into()),
        Status::Critical => {}
    }
    info!(
        "local minimum at w = {}: energy {:.6e}, residual {:.3e}, norm {:.6e}",
        inst.w(),
        d.energy.as_f64(),
        d.residual.as_f64(),
        norm.as_f64()
    );
    Ok(SolveReport {
        kind: SolverKind::LocalMin,
        w: inst.w().as_f64(),
        state: inst.to_state(&d.x),
        energy: d.energy.as_f64(),
        residual: d.residual.as_f64(),
        norm: norm.as_f64(),
        converged: d.converged,
        status,
        certificate: None,
        iterations: d.iterations,
        evaluations: f.evaluations(),
        flags,
    })
}
