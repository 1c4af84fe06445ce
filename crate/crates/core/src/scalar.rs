//! The single-unknown equation: a thin wrapper that specializes the system machinery.

use std::sync::Arc;

use crate::calculus::OperatorOrder;
use crate::continuation::{optimal_control, sweep, Branch, ControlReport};
use crate::energy::ProblemInstance;
use crate::error::{Error, Result};
use crate::graph::{Potential, VertexFunction, WeightedGraph};
use crate::nonlinearity::{check_scalar_hypotheses, HypothesisReport, HypothesisSpec, Nonlinearity, SamplingConfig};
use crate::real::Real;
use crate::solvers::{
    local_min_solve, mountain_pass_solve, nonexistence_check, scalar_lower, scalar_upper, NonexistenceReport,
    SolveReport, SolverConfig, SolverKind,
};

/// `F(x, u, w)` with order `(m, p)` and one potential.
#[derive(Debug, Clone)]
pub struct ScalarInstance<T>(ProblemInstance<T>);

impl<T: Real> ScalarInstance<T> {
    pub fn new(
        graph: Arc<WeightedGraph<T>>,
        ord: OperatorOrder<T>,
        nl: Arc<Nonlinearity<T>>,
        spec: Arc<HypothesisSpec>,
        w: T,
        potential: Potential,
    ) -> Result<Self> {
        if ord.s() < T::two() {
            return Err(Error::InvalidOrder(format!("single-unknown solver needs p >= 2, got {}", ord.s())));
        }
        ProblemInstance::new_scalar(graph, ord, nl, spec, w, potential).map(Self)
    }

    pub fn as_instance(&self) -> &ProblemInstance<T> {
        &self.0
    }

    pub fn with_parameter(&self, w: T) -> Result<Self> {
        self.0.with_parameter(w).map(Self)
    }
}

pub fn scalar_check<T: Real>(inst: &ScalarInstance<T>, cfg: &SamplingConfig) -> HypothesisReport {
    let i = inst.as_instance();
    check_scalar_hypotheses(i.nonlinearity(), i.spec(), i.graph(), i.ord1(), cfg)
}

pub fn scalar_solve_mp<T: Real>(inst: &ScalarInstance<T>, cfg: &SolverConfig) -> Result<SolveReport<T>> {
    mountain_pass_solve(&inst.0, cfg)
}

/// `(C'1, C'2)` for a negative endpoint `u0`.
pub fn scalar_bounds<T: Real>(inst: &ScalarInstance<T>, u0: &VertexFunction<T>) -> Result<(f64, f64)> {
    let i = &inst.0;
    i.graph().check(u0)?;
    let spec = i.spec();
    let p = i.p().as_f64();
    let ec = crate::sobolev::embedding_constants(i.graph(), i.p(), i.p())?;
    let hmin = match i.space1().potential {
        Potential::H1 => ec.h1_min,
        Potential::H2 => ec.h2_min,
    };
    let b = (T::one() / (ec.mu_min * hmin)).powf(i.p().recip()).as_f64();
    let lower = scalar_lower(p, spec.r1()?, spec.c1()?, b, ec.volume.as_f64())?;
    let (np, _) = i.component_norm_pows(u0.as_slice());
    let upper = scalar_upper(p, spec.theta()?, np.as_f64())?;
    Ok((lower, upper))
}

pub fn scalar_solve_min<T: Real>(inst: &ScalarInstance<T>, cfg: &SolverConfig) -> Result<SolveReport<T>> {
    local_min_solve(&inst.0, cfg)
}

pub fn scalar_sweep<T: Real>(
    inst: &ScalarInstance<T>,
    grid: &[f64],
    kind: SolverKind,
    cfg: &SolverConfig,
    warm: bool,
) -> Result<Branch<T>> {
    sweep(&inst.0, grid, kind, cfg, warm)
}

pub fn scalar_control<T: Real>(
    inst: &ScalarInstance<T>,
    g: &Nonlinearity<T>,
    grid: &[f64],
    kind: SolverKind,
    cfg: &SolverConfig,
    warm: bool,
) -> Result<(Branch<T>, ControlReport<T>)> {
    optimal_control(&inst.0, g, grid, kind, cfg, warm)
}

/// Radial-sign condition `f(x, t, w) t < 0` plus the same sampled evidence as the system.
pub fn scalar_nonexistence<T: Real>(inst: &ScalarInstance<T>, cfg: &SolverConfig) -> Result<NonexistenceReport> {
    nonexistence_check(&inst.0, cfg)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::graph::GraphData;

    #[test]
    fn rejects_v_dependence() {
        let g = Arc::new(WeightedGraph::from_data(&GraphData::path(2)).unwrap());
        let nl = Arc::new(Nonlinearity::from_source("u^4 + v^4", &BTreeMap::new(), 2).unwrap());
        let r = ScalarInstance::new(
            g,
            OperatorOrder::new(1, 2.0).unwrap(),
            nl,
            Arc::new(HypothesisSpec::default()),
            0.0,
            Potential::H1,
        );
        assert!(r.is_err());
    }
}
