//! Critical-point solvers, bound certificates, uniqueness and nonexistence checks.

mod certificate;
mod checks;
mod descent;
mod saddle;

use std::cell::Cell;

use serde::Serialize;

pub use certificate::{
    bound_certificate_min, bound_certificate_mp, local_min_upper, monotonicity_check, mp_constants,
    scalar_local_min_upper, scalar_lower, scalar_upper, BoundCertificate, MonotonicityCheck, MpConstants,
    MpInputs,
};
pub use checks::{
    multistart_stationary, nonexistence_check, uniqueness_certificate, NonexistenceReport, UniquenessReport,
    NONEXISTENCE_STARTS,
};
pub use descent::{ball_radius, local_min_from, local_min_solve, BallRadius};
pub(crate) use descent::local_min_with;
pub use saddle::{mountain_pass_solve, mountain_pass_with_endpoint, negative_endpoint};

use crate::energy::ProblemInstance;
use crate::error::Result;
use crate::graph::StatePair;
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    MountainPass,
    LocalMin,
}

impl SolverKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "mp" | "mountain-pass" => Some(Self::MountainPass),
            "min" | "local-min" => Some(Self::LocalMin),
            _ => None,
        }
    }
}

/// Outcome classification of a single solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// Converged to a nontrivial critical point of the expected type.
    Critical,
    /// Converged, but the energy sign contradicts the solver kind.
    TypeUncertain,
    /// The constrained minimizer sits on the ball boundary; not certified critical.
    BoundaryMinimum,
    /// Converged to the trivial state.
    Trivial,
    NotConverged,
}

/// Tolerances, iteration limits and discretization choices shared by every solver.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub path_nodes: usize,
    pub path_iter: usize,
    pub path_tol: f64,
    pub reparam_every: usize,
    pub armijo: f64,
    pub max_doublings: usize,
    /// Parameter samples on which the endpoint and the ball radius must work uniformly.
    pub uniform_grid: usize,
    pub rho_max: f64,
    pub rho_override: Option<f64>,
    pub ball_grid: usize,
    pub ball_ladder: usize,
    pub t0_factor: f64,
    pub multistart: usize,
    pub seed: u64,
    /// Norm below which a state counts as trivial.
    pub trivial_norm: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 100_000,
            path_nodes: 41,
            path_iter: 2_000,
            path_tol: 1e-3,
            reparam_every: 25,
            armijo: 1e-4,
            max_doublings: 60,
            uniform_grid: 21,
            rho_max: 1.0,
            rho_override: None,
            ball_grid: 17,
            ball_ladder: 40,
            t0_factor: 0.5,
            multistart: 50,
            seed: 0,
            trivial_norm: 1e-6,
        }
    }
}

/// A solver's result and diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport<T> {
    pub kind: SolverKind,
    pub w: f64,
    pub state: StatePair<T>,
    pub energy: f64,
    pub residual: f64,
    pub norm: f64,
    pub converged: bool,
    pub status: Status,
    pub certificate: Option<BoundCertificate>,
    pub iterations: usize,
    pub evaluations: usize,
    pub flags: Vec<String>,
}

impl<T: Real> SolveReport<T> {
    /// Converged, of the expected type, and inside its certified bounds.
    pub fn certified(&self) -> bool {
        self.converged
            && self.status == Status::Critical
            && self.certificate.as_ref().is_some_and(|c| c.satisfied)
    }
}

/// Counts energy and gradient evaluations of an instance.
pub(crate) struct Counted<'a, T> {
    pub inst: &'a ProblemInstance<T>,
    evals: Cell<usize>,
}

impl<'a, T: Real> Counted<'a, T> {
    pub fn new(inst: &'a ProblemInstance<T>) -> Self {
        Self { inst, evals: Cell::new(0) }
    }

    pub fn energy(&self, x: &[T]) -> Result<T> {
        self.evals.set(self.evals.get() + 1);
        self.inst.energy(x)
    }

    pub fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        self.evals.set(self.evals.get() + 1);
        self.inst.gradient(x)
    }

    pub fn evaluations(&self) -> usize {
        self.evals.get()
    }
}

// Small dense helpers on flat vectors.

pub(crate) fn axpy<T: Real>(a: T, x: &[T], y: &[T]) -> Vec<T> {
    x.iter().zip(y).map(|(&xi, &yi)| a * xi + yi).collect()
}

pub(crate) fn scaled<T: Real>(a: T, x: &[T]) -> Vec<T> {
    x.iter().map(|&xi| a * xi).collect()
}

pub(crate) fn diff<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    x.iter().zip(y).map(|(&a, &b)| a - b).collect()
}

/// Parameter samples used for w-uniform constructions: `J` samples plus `w` itself.
pub fn uniform_grid<T: Real>(inst: &ProblemInstance<T>, n: usize) -> Vec<T> {
    let mut ws: Vec<T> = inst.interval().samples(n).into_iter().map(T::of).collect();
    if !ws.contains(&inst.w()) {
        ws.push(inst.w());
    }
    ws
}

pub(crate) fn finish_status<T: Real>(
    kind: SolverKind,
    converged: bool,
    energy: T,
    norm: T,
    trivial: f64,
    on_boundary: bool,
) -> Status {
    if on_boundary {
        Status::BoundaryMinimum
    } else if !converged {
        Status::NotConverged
    } else if norm.as_f64() < trivial {
        Status::Trivial
    } else {
        let ok = match kind {
            SolverKind::MountainPass => energy > T::zero(),
            SolverKind::LocalMin => energy < T::zero(),
        };
        if ok {
            Status::Critical
        } else {
            Status::TypeUncertain
        }
    }
}
