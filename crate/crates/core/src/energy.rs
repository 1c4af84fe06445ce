//! The action functional, its μ-weighted gradient, the Euler–Lagrange residual and the
//! control objective.
//!
//! An instance either couples two unknowns `(u, v)` or, in single-unknown mode, carries
//! only `u` (the `v` block is absent from flat vectors and treated as zero).

use std::sync::Arc;

use crate::calculus::{polylap_operator_raw, OperatorOrder};
use crate::error::{Error, Result};
use crate::graph::{Potential, StatePair, VertexFunction, WeightedGraph};
use crate::nonlinearity::{HypothesisSpec, Interval, Nonlinearity, Which};
use crate::real::{compensated_sum, signed_pow, Real};
use crate::sobolev::{w_norm_pow_raw, SpaceSpec};

/// Graph, orders, nonlinearity, hypothesis constants and the parameter `w`.
#[derive(Debug, Clone)]
pub struct ProblemInstance<T> {
    graph: Arc<WeightedGraph<T>>,
    ord1: OperatorOrder<T>,
    ord2: OperatorOrder<T>,
    nl: Arc<Nonlinearity<T>>,
    spec: Arc<HypothesisSpec>,
    w: T,
    scalar: bool,
    potential: Potential,
}

impl<T: Real> ProblemInstance<T> {
    /// Coupled system with `(m1, p)`, `(m2, q)` and potentials `h1`, `h2`.
    pub fn new(
        graph: Arc<WeightedGraph<T>>,
        ord1: OperatorOrder<T>,
        ord2: OperatorOrder<T>,
        nl: Arc<Nonlinearity<T>>,
        spec: Arc<HypothesisSpec>,
        w: T,
    ) -> Result<Self> {
        Self::build(graph, ord1, ord2, nl, spec, w, false, Potential::H1)
    }

    /// Single unknown `u` with order `(m, p)` and the selected potential.
    pub fn new_scalar(
        graph: Arc<WeightedGraph<T>>,
        ord: OperatorOrder<T>,
        nl: Arc<Nonlinearity<T>>,
        spec: Arc<HypothesisSpec>,
        w: T,
        potential: Potential,
    ) -> Result<Self> {
        if nl.f().depends_on(crate::expr::Var::V) {
            return Err(Error::Input("a single-unknown nonlinearity must not depend on v".into()));
        }
        Self::build(graph, ord, ord, nl, spec, w, true, potential)
    }

    #[allow(clippy::too_many_arguments)]
    fn build(
        graph: Arc<WeightedGraph<T>>,
        ord1: OperatorOrder<T>,
        ord2: OperatorOrder<T>,
        nl: Arc<Nonlinearity<T>>,
        spec: Arc<HypothesisSpec>,
        w: T,
        scalar: bool,
        potential: Potential,
    ) -> Result<Self> {
        graph.check_len(nl.len())?;
        if !spec.j.contains(w.as_f64()) {
            return Err(Error::Input(format!(
                "parameter w = {w} lies outside [{}, {}]",
                spec.j.lo, spec.j.hi
            )));
        }
        Ok(Self {
            graph,
            ord1,
            ord2,
            nl,
            spec,
            w,
            scalar,
            potential,
        })
    }

    /// Same problem at another parameter value.
    pub fn with_parameter(&self, w: T) -> Result<Self> {
        if !self.spec.j.contains(w.as_f64()) {
            return Err(Error::Input(format!(
                "parameter w = {w} lies outside [{}, {}]",
                self.spec.j.lo, self.spec.j.hi
            )));
        }
        let mut out = self.clone();
        out.w = w;
        Ok(out)
    }

    pub fn graph(&self) -> &WeightedGraph<T> {
        &self.graph
    }

    pub fn graph_arc(&self) -> &Arc<WeightedGraph<T>> {
        &self.graph
    }

    pub fn nonlinearity(&self) -> &Nonlinearity<T> {
        &self.nl
    }

    pub fn spec(&self) -> &HypothesisSpec {
        &self.spec
    }

    pub fn ord1(&self) -> &OperatorOrder<T> {
        &self.ord1
    }

    pub fn ord2(&self) -> &OperatorOrder<T> {
        &self.ord2
    }

    pub fn w(&self) -> T {
        self.w
    }

    pub fn interval(&self) -> Interval {
        self.spec.j
    }

    pub fn is_scalar(&self) -> bool {
        self.scalar
    }

    pub fn p(&self) -> T {
        self.ord1.s()
    }

    pub fn q(&self) -> T {
        self.ord2.s()
    }

    pub fn n(&self) -> usize {
        self.graph.len()
    }

    /// Length of flat state vectors: `2n` for the system, `n` for a single unknown.
    pub fn dim(&self) -> usize {
        if self.scalar {
            self.n()
        } else {
            2 * self.n()
        }
    }

    pub fn space1(&self) -> SpaceSpec<T> {
        SpaceSpec {
            ord: self.ord1,
            potential: if self.scalar { self.potential } else { Potential::H1 },
        }
    }

    pub fn space2(&self) -> SpaceSpec<T> {
        SpaceSpec {
            ord: self.ord2,
            potential: Potential::H2,
        }
    }

    /// μ repeated per block: the metric of every inner product on flat vectors.
    pub fn metric(&self) -> Vec<T> {
        let mu = self.graph.mu();
        if self.scalar {
            mu.to_vec()
        } else {
            mu.iter().chain(mu.iter()).copied().collect()
        }
    }

    pub fn inner(&self, a: &[T], b: &[T]) -> T {
        let mu = self.graph.mu();
        let n = self.n();
        compensated_sum(a.iter().zip(b).enumerate().map(|(i, (&x, &y))| mu[i % n] * x * y))
    }

    pub fn metric_norm(&self, a: &[T]) -> T {
        self.inner(a, a).max(T::zero()).sqrt()
    }

    pub fn to_flat(&self, state: &StatePair<T>) -> Result<Vec<T>> {
        self.graph.check(&state.u)?;
        self.graph.check(&state.v)?;
        Ok(if self.scalar {
            state.u.as_slice().to_vec()
        } else {
            state.to_flat()
        })
    }

    pub fn to_state(&self, x: &[T]) -> StatePair<T> {
        let n = self.n();
        if self.scalar {
            StatePair {
                u: VertexFunction::new(x[..n].to_vec()),
                v: VertexFunction::zeros(n),
            }
        } else {
            StatePair::from_flat(x)
        }
    }

    fn blocks<'a>(&self, x: &'a [T], zeros: &'a [T]) -> (&'a [T], &'a [T]) {
        let n = self.n();
        if self.scalar {
            (&x[..n], zeros)
        } else {
            (&x[..n], &x[n..2 * n])
        }
    }

    /// Spike at `x0` in every block.
    pub fn spike(&self, x0: usize) -> Vec<T> {
        let n = self.n();
        let mut s = vec![T::zero(); self.dim()];
        s[x0] = T::one();
        if !self.scalar {
            s[n + x0] = T::one();
        }
        s
    }

    /// `(||u||^p, ||v||^q)` in the component spaces (second entry 0 for a single unknown).
    pub fn component_norm_pows(&self, x: &[T]) -> (T, T) {
        let zeros = vec![T::zero(); self.n()];
        let (u, v) = self.blocks(x, &zeros);
        let a = w_norm_pow_raw(&self.graph, u, &self.space1());
        let b = if self.scalar { T::zero() } else { w_norm_pow_raw(&self.graph, v, &self.space2()) };
        (a, b)
    }

    /// Product norm `||u|| + ||v||` (just `||u||` for a single unknown).
    pub fn norm(&self, x: &[T]) -> T {
        let (a, b) = self.component_norm_pows(x);
        let first = a.powf(self.p().recip());
        if self.scalar {
            first
        } else {
            first + b.powf(self.q().recip())
        }
    }

    /// Energy at a flat state.
    pub fn energy(&self, x: &[T]) -> Result<T> {
        let (a, b) = self.component_norm_pows(x);
        let zeros = vec![T::zero(); self.n()];
        let (u, v) = self.blocks(x, &zeros);
        let f = self.nl.eval_all(Which::F, u, v, self.w)?;
        let integral = self.graph.integrate(&f);
        let mut e = a / self.p() - integral;
        if !self.scalar {
            e += b / self.q();
        }
        if e.is_finite() {
            Ok(e)
        } else {
            Err(Error::Solver(format!("non-finite energy at w = {}", self.w)))
        }
    }

    /// μ-weighted gradient at a flat state.
    pub fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        let n = self.n();
        let zeros = vec![T::zero(); n];
        let (u, v) = self.blocks(x, &zeros);
        let h1 = self.graph.potential(self.space1().potential);
        let mut out = Vec::with_capacity(self.dim());
        let lu = polylap_operator_raw(&self.graph, u, &self.ord1);
        for i in 0..n {
            let fu = self.nl.eval(Which::Fu, i, u[i], v[i], self.w)?;
            out.push(lu[i] + h1[i] * signed_pow(u[i], self.p()) - fu);
        }
        if !self.scalar {
            let h2 = self.graph.potential(Potential::H2);
            let lv = polylap_operator_raw(&self.graph, v, &self.ord2);
            for i in 0..n {
                let fv = self.nl.eval(Which::Fv, i, u[i], v[i], self.w)?;
                out.push(lv[i] + h2[i] * signed_pow(v[i], self.q()) - fv);
            }
        }
        if out.iter().all(|g| g.is_finite()) {
            Ok(out)
        } else {
            Err(Error::Solver(format!("non-finite gradient at w = {}", self.w)))
        }
    }

    /// `integral(F_u u + F_v v) dmu`.
    pub fn radial_integral(&self, x: &[T]) -> Result<T> {
        let zeros = vec![T::zero(); self.n()];
        let (u, v) = self.blocks(x, &zeros);
        let fu = self.nl.eval_all(Which::Fu, u, v, self.w)?;
        let mut terms: Vec<T> = fu.iter().zip(u).map(|(&a, &b)| a * b).collect();
        if !self.scalar {
            let fv = self.nl.eval_all(Which::Fv, u, v, self.w)?;
            for (i, (&a, &b)) in fv.iter().zip(v).enumerate() {
                terms[i] += a * b;
            }
        }
        Ok(self.graph.integrate(&terms))
    }
}

/// Energy of a state pair.
pub fn phi<T: Real>(inst: &ProblemInstance<T>, state: &StatePair<T>) -> Result<T> {
    inst.energy(&inst.to_flat(state)?)
}

/// μ-weighted gradient `(g_u, g_v)`; `g_v` is zero for a single unknown.
pub fn phi_grad<T: Real>(inst: &ProblemInstance<T>, state: &StatePair<T>) -> Result<StatePair<T>> {
    let g = inst.gradient(&inst.to_flat(state)?)?;
    Ok(inst.to_state(&g))
}

/// `sqrt(integral(g_u^2 + g_v^2) dmu)`.
pub fn el_residual_norm<T: Real>(inst: &ProblemInstance<T>, state: &StatePair<T>) -> Result<T> {
    let g = inst.gradient(&inst.to_flat(state)?)?;
    Ok(inst.metric_norm(&g))
}

/// Both sides of the identity satisfied by critical points:
/// `(||u||^p + ||v||^q, integral(F_u u + F_v v))`.
pub fn critical_identity<T: Real>(inst: &ProblemInstance<T>, state: &StatePair<T>) -> Result<(T, T)> {
    let x = inst.to_flat(state)?;
    let (a, b) = inst.component_norm_pows(&x);
    Ok((a + b, inst.radial_integral(&x)?))
}

/// Control objective `psi = integral g(x, u, v, w) dmu`.
pub fn psi<T: Real>(inst: &ProblemInstance<T>, state: &StatePair<T>, g: &Nonlinearity<T>) -> Result<T> {
    inst.graph().check(&state.u)?;
    inst.graph().check(&state.v)?;
    inst.graph().check_len(g.len())?;
    let vals = g.eval_all(Which::F, state.u.as_slice(), state.v.as_slice(), inst.w())?;
    Ok(inst.graph().integrate(&vals))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::graph::GraphData;

    fn instance(src: &str, p: f64, q: f64, w: f64) -> ProblemInstance<f64> {
        let g = Arc::new(WeightedGraph::from_data(&GraphData::path(2)).unwrap());
        let mut t = BTreeMap::new();
        t.insert("gamma".to_string(), vec![1.0, 1.0]);
        t.insert("z".to_string(), vec![1.0, 1.0]);
        t.insert("e".to_string(), vec![0.1, 0.1]);
        let nl = Arc::new(Nonlinearity::from_source(src, &t, 2).unwrap());
        ProblemInstance::new(
            g,
            OperatorOrder::new(1, p).unwrap(),
            OperatorOrder::new(1, q).unwrap(),
            nl,
            Arc::new(HypothesisSpec::default()),
            w,
        )
        .unwrap()
    }

    fn pair(u: &[f64], v: &[f64]) -> StatePair<f64> {
        StatePair::new(VertexFunction::new(u.to_vec()), VertexFunction::new(v.to_vec())).unwrap()
    }

    #[test]
    fn energy_at_origin_vanishes() {
        let inst = instance("(u^2+v^2)^2*(1+w^2)*abs(gamma)", 3.0, 2.0, 0.5);
        assert_eq!(phi(&inst, &StatePair::zeros(2)).unwrap(), 0.0);
        let g = phi_grad(&inst, &StatePair::zeros(2)).unwrap();
        assert_eq!(g, StatePair::zeros(2));
    }

    #[test]
    fn quadratic_energy_closed_form() {
        let inst = instance("e*(u^2+v^2)*(1+w^2)*abs(gamma)", 2.0, 2.0, 0.0);
        let st = pair(&[0.3, -1.0], &[2.0, 0.5]);
        // ||u||^2 = (du)^2 + sum u^2 on the unit path
        let norm_sq = |a: &[f64]| (a[0] - a[1]).powi(2) + a[0] * a[0] + a[1] * a[1];
        let expect = 0.5 * (norm_sq(&[0.3, -1.0]) + norm_sq(&[2.0, 0.5]))
            - 0.1 * (0.09 + 1.0 + 4.0 + 0.25);
        assert!((phi(&inst, &st).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn linear_case_gradient() {
        let inst = instance("0", 2.0, 2.0, 0.0);
        let st = pair(&[1.0, 0.0], &[0.0, 0.0]);
        let g = phi_grad(&inst, &st).unwrap();
        // -Delta u + u = (1, -1) + (1, 0)
        assert_eq!(g.u.as_slice(), &[2.0, -1.0]);
    }

    #[test]
    fn psi_examples() {
        let inst = instance("0", 2.0, 2.0, 1.0);
        let g = Nonlinearity::from_source("z*(u^2+v^2)^2*w^2", &[("z".to_string(), vec![1.0, 1.0])].into(), 2).unwrap();
        let st = pair(&[1.0, 0.0], &[0.0, 0.0]);
        assert_eq!(psi(&inst, &st, &g).unwrap(), 1.0);
        let at0 = inst.with_parameter(0.0).unwrap();
        assert_eq!(psi(&at0, &st, &g).unwrap(), 0.0);
        let one = Nonlinearity::from_source("1", &BTreeMap::new(), 2).unwrap();
        assert_eq!(psi(&inst, &st, &one).unwrap(), 2.0);
    }

    #[test]
    fn parameter_outside_interval_is_rejected() {
        let inst = instance("0", 2.0, 2.0, 0.0);
        assert!(inst.with_parameter(1.5).is_err());
    }
}
