//! Uniqueness certificate for local minimizers and numerical nonexistence evidence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{local_min_solve, monotonicity_check, scaled, MonotonicityCheck, SolveReport, SolverConfig, Status};
use crate::energy::ProblemInstance;
use crate::error::{Error, Result};
use crate::nonlinearity::{check_lipschitz_bounds, ConditionResult, SamplingConfig, Verdict};
use crate::nonlinearity::Which;
use crate::real::{linspace, Real};
use crate::sobolev::embedding_constants;

/// Random flat states with product norm drawn uniformly from `[lo, hi]` (log-uniformly if
/// `log` is set); the RNG is seeded per index so results do not depend on scheduling.
pub(crate) fn random_states<T: Real>(
    inst: &ProblemInstance<T>,
    count: usize,
    seed: u64,
    lo: f64,
    hi: f64,
    log: bool,
) -> Vec<Vec<T>> {
    (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let dir: Vec<T> = (0..inst.dim()).map(|_| T::of(rng.gen_range(-1.0..1.0))).collect();
            let u: f64 = rng.gen();
            let r = if log { lo * (hi / lo).powf(u) } else { lo + (hi - lo) * u };
            let n = inst.norm(&dir);
            if n > T::zero() {
                scaled(T::of(r) / n, &dir)
            } else {
                dir
            }
        })
        .collect()
}

/// Runs constrained descent from every start in parallel; results keep the input order.
pub fn multistart_stationary<T: Real>(
    inst: &ProblemInstance<T>,
    starts: Vec<Vec<T>>,
    rho: f64,
    cfg: &SolverConfig,
) -> Vec<Result<SolveReport<T>>> {
    starts
        .into_par_iter()
        .map(|s| super::local_min_from(inst, s, rho, cfg))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub monotonicity: MonotonicityCheck,
    /// Upper norm bound of the local minimizer.
    pub c4: Option<f64>,
    pub lipschitz: ConditionResult,
    pub lipschitz_radius: f64,
    /// `C_p / 2^(p-1) - max(d1, d2) |V|`; positive margins certify uniqueness.
    pub margin: f64,
    pub minimizer: SolveReport<f64>,
    pub starts: usize,
    pub converged: usize,
    /// Largest max-norm distance between converged interior solutions.
    pub spread: f64,
    pub unique_numerically: bool,
    pub certified: bool,
    pub notes: Vec<String>,
}

fn to_f64<T: Real>(r: &SolveReport<T>) -> SolveReport<f64> {
    SolveReport {
        kind: r.kind,
        w: r.w,
        state: crate::graph::StatePair {
            u: crate::graph::VertexFunction::new(r.state.u.iter().map(|x| x.as_f64()).collect()),
            v: crate::graph::VertexFunction::new(r.state.v.iter().map(|x| x.as_f64()).collect()),
        },
        energy: r.energy,
        residual: r.residual,
        norm: r.norm,
        converged: r.converged,
        status: r.status,
        certificate: r.certificate.clone(),
        iterations: r.iterations,
        evaluations: r.evaluations,
        flags: r.flags.clone(),
    }
}

/// Certifies that the local minimizer is the only critical point in the ball: monotonicity
/// constant, Lipschitz bounds on the reachable region, a positive margin, and agreement of
/// a seeded multistart.
pub fn uniqueness_certificate<T: Real>(inst: &ProblemInstance<T>, cfg: &SolverConfig) -> Result<UniquenessReport> {
    if inst.is_scalar() || inst.p() != inst.q() {
        return Err(Error::Hypothesis("uniqueness needs the coupled system with p = q".into()));
    }
    let spec = inst.spec();
    let (d1, d2) = (spec.d1()?, spec.d2()?);
    let p = inst.p().as_f64();
    let mut notes = Vec::new();
    let monotonicity = monotonicity_check(p, 100, 2.0);
    let minimizer = local_min_solve(inst, cfg)?;
    let cert = minimizer.certificate.clone();
    let c4 = cert.as_ref().map(|c| c.upper);
    let rho = cert.as_ref().and_then(|c| c.rho).unwrap_or(cfg.rho_max);
    let ec = embedding_constants(inst.graph(), inst.p(), inst.q())?;
    // taken literally: C4 times the small-amplitude growth threshold
    let radius = c4.unwrap_or(rho) * ec.growth_threshold().as_f64();
    let lipschitz = check_lipschitz_bounds(inst.nonlinearity(), inst.graph(), spec, p, radius, &SamplingConfig::default());
    let volume = ec.volume.as_f64();
    let margin = monotonicity.constant / 2f64.powf(p - 1.0) - d1.max(d2) * volume;
    let starts = random_states(inst, cfg.multistart, cfg.seed, 1e-3 * rho, rho, false);
    let count = starts.len();
    let runs = multistart_stationary(inst, starts, rho, cfg);
    let mut sols: Vec<Vec<f64>> = Vec::new();
    let mut converged = 0;
    for r in runs.iter().flatten() {
        if r.converged && r.status != Status::BoundaryMinimum {
            converged += 1;
            sols.push(r.state.to_flat().iter().map(|x| x.as_f64()).collect());
        }
    }
    let mut spread: f64 = 0.0;
    for a in &sols {
        for b in &sols {
            let d = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            spread = spread.max(d);
        }
    }
    let unique_numerically = converged > 0 && spread <= 1e-6;
    if margin <= 0.0 {
        notes.push(format!("non-positive margin {margin:.6e}"));
    }
    if minimizer.status != Status::Critical {
        notes.push(format!("the minimizer has status {:?}", minimizer.status));
    }
    let certified = monotonicity.holds
        && matches!(lipschitz.verdict, Verdict::Pass | Verdict::PassSampled)
        && margin > 0.0
        && unique_numerically
        && minimizer.certified();
    Ok(UniquenessReport {
        monotonicity,
        c4,
        lipschitz,
        lipschitz_radius: radius,
        margin,
        minimizer: to_f64(&minimizer),
        starts: count,
        converged,
        spread,
        unique_numerically,
        certified,
        notes,
    })
}

/// Random states probed by the radial integral test and by the multistart descent.
pub const NONEXISTENCE_STARTS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonexistenceReport {
    /// Radial-sign condition `F_u t + F_v s < 0` on the sampled grid.
    pub radial_sign: bool,
    pub radial_samples: usize,
    pub radial_violations: usize,
    /// Random states whose radial integral `integral(F_u u + F_v v)` is negative.
    pub random_states: usize,
    pub random_negative: usize,
    pub starts: usize,
    pub converged: usize,
    /// Largest norm of any state the multistart descent converged to.
    pub max_norm: f64,
    pub nonexistence_supported: bool,
}

/// Evidence that only the trivial solution exists: the radial-sign condition, negative
/// radial integrals on random states, and unconstrained multistart descent.
pub fn nonexistence_check<T: Real>(inst: &ProblemInstance<T>, cfg: &SolverConfig) -> Result<NonexistenceReport> {
    let nl = inst.nonlinearity();
    let grid = linspace(T::of(-10.0), T::of(10.0), 64);
    let ss = if inst.is_scalar() { vec![T::zero()] } else { grid.clone() };
    let ws: Vec<T> = inst.interval().samples(8).into_iter().map(T::of).collect();
    let mut radial_samples = 0;
    let mut radial_violations = 0;
    for x in 0..inst.n() {
        for &w in &ws {
            for &t in &grid {
                for &s in &ss {
                    if t == T::zero() && s == T::zero() {
                        continue;
                    }
                    radial_samples += 1;
                    let mut val = nl.eval(Which::Fu, x, t, s, w)? * t;
                    if !inst.is_scalar() {
                        val += nl.eval(Which::Fv, x, t, s, w)? * s;
                    }
                    if !(val < T::zero()) {
                        radial_violations += 1;
                    }
                }
            }
        }
    }
    let random = random_states(inst, NONEXISTENCE_STARTS, cfg.seed, 1e-2, 1e2, true);
    let mut random_negative = 0;
    for x in &random {
        if inst.radial_integral(x)? < T::zero() {
            random_negative += 1;
        }
    }
    let starts = random_states(inst, NONEXISTENCE_STARTS, cfg.seed.wrapping_add(1 << 32), 1e-2, 1e2, true);
    let count = starts.len();
    let runs = multistart_stationary(inst, starts, f64::INFINITY, cfg);
    let mut converged = 0;
    let mut max_norm: f64 = 0.0;
    for r in runs.iter().flatten() {
        if r.converged {
            converged += 1;
            max_norm = max_norm.max(r.norm);
        }
    }
    let nonexistence_supported =
        radial_violations == 0 && random_negative == random.len() && converged > 0 && max_norm < 1e-6;
    Ok(NonexistenceReport {
        radial_sign: radial_violations == 0,
        radial_samples,
        radial_violations,
        random_states: random.len(),
        random_negative,
        starts: count,
        converged,
        max_norm,
        nonexistence_supported,
    })
}
