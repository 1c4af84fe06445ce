//! Norms of W^{m,s}(V), the product norm and the embedding constants.

use serde::Serialize;

use crate::calculus::{grad_modulus_sq_raw, OperatorOrder};
use crate::error::{Error, Result};
use crate::graph::{Potential, StatePair, VertexFunction, WeightedGraph};
use crate::real::{compensated_sum, Real};

/// One factor of the product space: order, exponent and which potential weights `|u|^s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpaceSpec<T> {
    pub ord: OperatorOrder<T>,
    pub potential: Potential,
}

impl<T: Real> SpaceSpec<T> {
    pub fn new(m: u32, s: T, potential: Potential) -> Result<Self> {
        Ok(Self {
            ord: OperatorOrder::new(m, s)?,
            potential,
        })
    }

    pub fn s(&self) -> T {
        self.ord.s()
    }
}

/// `integral(|grad^m u|^s + h |u|^s)`, the s-th power of the norm.
pub(crate) fn w_norm_pow_raw<T: Real>(g: &WeightedGraph<T>, u: &[T], spec: &SpaceSpec<T>) -> T {
    let s = spec.s();
    let half = s / T::two();
    let h = g.potential(spec.potential);
    let grad = grad_modulus_sq_raw(g, u, spec.ord.m());
    compensated_sum(
        (0..g.len()).map(|x| g.mu()[x] * (grad[x].max(T::zero()).powf(half) + h[x] * u[x].abs().powf(s))),
    )
}

pub fn w_norm_pow<T: Real>(g: &WeightedGraph<T>, u: &VertexFunction<T>, spec: &SpaceSpec<T>) -> Result<T> {
    g.check(u)?;
    Ok(w_norm_pow_raw(g, u.as_slice(), spec))
}

/// `(integral(|grad^m u|^s + h |u|^s) dmu)^(1/s)`.
pub fn w_norm<T: Real>(g: &WeightedGraph<T>, u: &VertexFunction<T>, spec: &SpaceSpec<T>) -> Result<T> {
    Ok(w_norm_pow(g, u, spec)?.powf(spec.s().recip()))
}

/// `||u||_{W^{m1,p}} + ||v||_{W^{m2,q}}`.
pub fn product_norm<T: Real>(
    g: &WeightedGraph<T>,
    state: &StatePair<T>,
    spec1: &SpaceSpec<T>,
    spec2: &SpaceSpec<T>,
) -> Result<T> {
    Ok(w_norm(g, &state.u, spec1)? + w_norm(g, &state.v, spec2)?)
}

pub fn sup_norm<T: Real>(u: &VertexFunction<T>) -> T {
    u.max_abs()
}

/// `(integral |u|^r dmu)^(1/r)`.
pub fn lr_norm<T: Real>(g: &WeightedGraph<T>, u: &VertexFunction<T>, r: T) -> Result<T> {
    g.check(u)?;
    Ok(compensated_sum(g.mu().iter().zip(u.iter()).map(|(&m, &x)| m * x.abs().powf(r))).powf(r.recip()))
}

/// Sup-norm embedding constants of both factors and the derived growth thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmbeddingConstants<T> {
    pub b: T,
    pub d: T,
    #[serde(rename = "K1")]
    pub k1: T,
    #[serde(rename = "K2")]
    pub k2: T,
    pub mu_min: T,
    pub h1_min: T,
    pub h2_min: T,
    pub volume: T,
    pub p: T,
    pub q: T,
}

impl<T: Real> EmbeddingConstants<T> {
    /// `min{1/(p K1^p), 1/(q K2^q)}`: the admissible small-amplitude growth of F.
    pub fn growth_threshold(&self) -> T {
        (T::one() / (self.p * self.k1.powf(self.p))).min(T::one() / (self.q * self.k2.powf(self.q)))
    }
}

pub fn embedding_constants<T: Real>(g: &WeightedGraph<T>, p: T, q: T) -> Result<EmbeddingConstants<T>> {
    if !(p >= T::two()) || !(q >= T::two()) {
        return Err(Error::InvalidOrder(format!("exponents must be >= 2, got p={p}, q={q}")));
    }
    let mu_min = g.mu_min();
    let h1_min = g.potential_min(Potential::H1);
    let h2_min = g.potential_min(Potential::H2);
    let volume = g.total_measure();
    let b = (T::one() / (mu_min * h1_min)).powf(p.recip());
    let d = (T::one() / (mu_min * h2_min)).powf(q.recip());
    Ok(EmbeddingConstants {
        b,
        d,
        k1: volume.powf(p.recip()) * b,
        k2: volume.powf(q.recip()) * d,
        mu_min,
        h1_min,
        h2_min,
        volume,
        p,
        q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GraphData, VertexRecord};

    fn p2() -> WeightedGraph<f64> {
        WeightedGraph::from_data(&GraphData::path(2)).unwrap()
    }

    #[test]
    fn w_norm_on_p2() {
        let g = p2();
        let spec = SpaceSpec::new(1, 2.0, Potential::H1).unwrap();
        let u = VertexFunction::new(vec![1.0, 0.0]);
        assert!((w_norm(&g, &u, &spec).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(w_norm(&g, &VertexFunction::zeros(2), &spec).unwrap(), 0.0);
        let st = StatePair::new(u.clone(), u).unwrap();
        let spec2 = SpaceSpec::new(1, 2.0, Potential::H2).unwrap();
        assert!((product_norm(&g, &st, &spec, &spec2).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sup_norm_examples() {
        assert_eq!(sup_norm(&VertexFunction::new(vec![-3.0, 2.0])), 3.0);
        assert_eq!(sup_norm(&VertexFunction::<f64>::zeros(3)), 0.0);
    }

    #[test]
    fn embedding_constants_examples() {
        let c = embedding_constants(&p2(), 2.0, 2.0).unwrap();
        assert_eq!(c.b, 1.0);
        assert!((c.k1 - 2f64.sqrt()).abs() < 1e-15);
        let data = GraphData {
            vertices: vec![VertexRecord { id: "a".into(), mu: 4.0, h1: 0.25, h2: 1.0 }],
            edges: vec![],
        };
        let g = WeightedGraph::<f64>::from_data(&data).unwrap();
        assert!((embedding_constants(&g, 2.0, 2.0).unwrap().b - 1.0).abs() < 1e-15);
        assert!(embedding_constants(&g, 1.5, 2.0).is_err());
    }

    #[test]
    fn lr_norm_of_indicator() {
        let u = VertexFunction::new(vec![2.0, 0.0]);
        assert!((lr_norm(&p2(), &u, 3.0).unwrap() - 2.0).abs() < 1e-14);
    }
}
