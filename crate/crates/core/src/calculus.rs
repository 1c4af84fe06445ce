//! Discrete differential operators on a weighted graph and the weak-form poly-Laplacian.
//!
//! Powers of the Laplacian are computed by repeated vertex sweeps over the precomputed
//! adjacency lists. The weight `|grad^m u|^(s-2)` is taken as 0 where the modulus vanishes
//! for `s > 2`, and as 1 for `s = 2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{VertexFunction, WeightedGraph};
use crate::real::Real;

/// Order `m >= 1` and exponent `s >= 2` of a poly-Laplacian block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorOrder<T> {
    m: u32,
    s: T,
}

impl<T: Real> OperatorOrder<T> {
    pub fn new(m: u32, s: T) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidOrder("order m must be at least 1".into()));
        }
        if !(s >= T::two()) || !s.is_finite() {
            return Err(Error::InvalidOrder(format!("exponent must be >= 2, got {s}")));
        }
        Ok(Self { m, s })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn s(&self) -> T {
        self.s
    }

    /// Number of Laplacian applications before the final gradient or modulus.
    fn half(&self) -> u32 {
        if self.m % 2 == 1 {
            (self.m - 1) / 2
        } else {
            self.m / 2
        }
    }
}

pub(crate) fn laplacian_raw<T: Real>(g: &WeightedGraph<T>, u: &[T]) -> Vec<T> {
    (0..g.len())
        .map(|x| {
            let ux = u[x];
            let acc: T = g.neighbors(x).iter().map(|&(y, w)| w * (u[y] - ux)).sum();
            acc / g.mu()[x]
        })
        .collect()
}

pub(crate) fn laplacian_pow<T: Real>(g: &WeightedGraph<T>, u: &[T], k: u32) -> Vec<T> {
    let mut a = u.to_vec();
    for _ in 0..k {
        a = laplacian_raw(g, &a);
    }
    a
}

pub(crate) fn gradient_form_raw<T: Real>(g: &WeightedGraph<T>, u: &[T], v: &[T]) -> Vec<T> {
    (0..g.len())
        .map(|x| {
            let acc: T = g
                .neighbors(x)
                .iter()
                .map(|&(y, w)| w * (u[y] - u[x]) * (v[y] - v[x]))
                .sum();
            acc / (T::two() * g.mu()[x])
        })
        .collect()
}

/// `|grad^m u|^2` per vertex: Gamma(a, a) for odd m, (Delta^{m/2} u)^2 for even m.
pub(crate) fn grad_modulus_sq_raw<T: Real>(g: &WeightedGraph<T>, u: &[T], m: u32) -> Vec<T> {
    if m % 2 == 1 {
        let a = laplacian_pow(g, u, (m - 1) / 2);
        gradient_form_raw(g, &a, &a)
    } else {
        laplacian_pow(g, u, m / 2).into_iter().map(|x| x * x).collect()
    }
}

/// `|grad^m u|^(s-2)` from the squared modulus.
#[inline]
pub(crate) fn modulus_weight<T: Real>(modulus_sq: T, s: T) -> T {
    if s == T::two() {
        T::one()
    } else if modulus_sq <= T::zero() {
        T::zero()
    } else {
        modulus_sq.powf((s - T::two()) / T::two())
    }
}

/// Graph Laplacian: (1/mu(x)) sum_{y~x} w_xy (u(y) - u(x)).
pub fn laplacian<T: Real>(g: &WeightedGraph<T>, u: &VertexFunction<T>) -> Result<VertexFunction<T>> {
    g.check(u)?;
    Ok(VertexFunction::new(laplacian_raw(g, u.as_slice())))
}

/// Gradient form Gamma(u, v)(x) = (1/(2 mu(x))) sum_{y~x} w_xy (u(y)-u(x))(v(y)-v(x)).
pub fn gradient_form<T: Real>(
    g: &WeightedGraph<T>,
    u: &VertexFunction<T>,
    v: &VertexFunction<T>,
) -> Result<VertexFunction<T>> {
    g.check(u)?;
    g.check(v)?;
    Ok(VertexFunction::new(gradient_form_raw(g, u.as_slice(), v.as_slice())))
}

/// Modulus of the m-th order gradient.
pub fn grad_modulus<T: Real>(
    g: &WeightedGraph<T>,
    u: &VertexFunction<T>,
    m: u32,
) -> Result<VertexFunction<T>> {
    g.check(u)?;
    if m == 0 {
        return Err(Error::InvalidOrder("order m must be at least 1".into()));
    }
    Ok(VertexFunction::new(
        grad_modulus_sq_raw(g, u.as_slice(), m)
            .into_iter()
            .map(T::sqrt)
            .collect(),
    ))
}

pub(crate) fn p_laplacian_raw<T: Real>(g: &WeightedGraph<T>, u: &[T], p: T) -> Vec<T> {
    let weights: Vec<T> = gradient_form_raw(g, u, u)
        .into_iter()
        .map(|sq| modulus_weight(sq, p))
        .collect();
    (0..g.len())
        .map(|x| {
            let acc: T = g
                .neighbors(x)
                .iter()
                .map(|&(y, w)| (weights[y] + weights[x]) * w * (u[y] - u[x]))
                .sum();
            acc / (T::two() * g.mu()[x])
        })
        .collect()
}

/// p-Laplacian with the symmetrized weight (|grad u|^{p-2}(y) + |grad u|^{p-2}(x)).
pub fn p_laplacian<T: Real>(
    g: &WeightedGraph<T>,
    u: &VertexFunction<T>,
    p: T,
) -> Result<VertexFunction<T>> {
    g.check(u)?;
    if !(p >= T::two()) {
        return Err(Error::InvalidOrder(format!("p must be >= 2, got {p}")));
    }
    Ok(VertexFunction::new(p_laplacian_raw(g, u.as_slice(), p)))
}

pub(crate) fn weak_form_raw<T: Real>(
    g: &WeightedGraph<T>,
    u: &[T],
    phi: &[T],
    ord: &OperatorOrder<T>,
) -> T {
    let k = ord.half();
    let a = laplacian_pow(g, u, k);
    let b = laplacian_pow(g, phi, k);
    let integrand: Vec<T> = if ord.m % 2 == 1 {
        let weight = gradient_form_raw(g, &a, &a);
        let cross = gradient_form_raw(g, &a, &b);
        weight
            .into_iter()
            .zip(cross)
            .map(|(sq, c)| modulus_weight(sq, ord.s) * c)
            .collect()
    } else {
        a.iter()
            .zip(&b)
            .map(|(&ax, &bx)| modulus_weight(ax * ax, ord.s) * ax * bx)
            .collect()
    };
    g.integrate(&integrand)
}

/// The bilinear-in-phi pairing that defines the poly-Laplacian weakly:
/// odd m: integral of |grad^m u|^{s-2} Gamma(Delta^k u, Delta^k phi), even m: integral of
/// |grad^m u|^{s-2} Delta^k u Delta^k phi.
pub fn polylap_weak_form<T: Real>(
    g: &WeightedGraph<T>,
    u: &VertexFunction<T>,
    phi: &VertexFunction<T>,
    ord: &OperatorOrder<T>,
) -> Result<T> {
    g.check(u)?;
    g.check(phi)?;
    Ok(weak_form_raw(g, u.as_slice(), phi.as_slice(), ord))
}

/// Strong form recovered by testing against the normalized indicators `delta_x / mu(x)`, so
/// that `integral(r * phi) = polylap_weak_form(u, phi)` for every phi.
pub fn polylap_apply<T: Real>(
    g: &WeightedGraph<T>,
    u: &VertexFunction<T>,
    ord: &OperatorOrder<T>,
) -> Result<VertexFunction<T>> {
    g.check(u)?;
    let n = g.len();
    let values = (0..n)
        .map(|x| {
            let mut test = vec![T::zero(); n];
            test[x] = T::one() / g.mu()[x];
            weak_form_raw(g, u.as_slice(), &test, ord)
        })
        .collect();
    Ok(VertexFunction::new(values))
}

/// Same operator as [`polylap_apply`], assembled through the adjoint of the Laplacian powers
/// instead of n weak-form evaluations. Used on the hot path of the energy gradient.
pub(crate) fn polylap_operator_raw<T: Real>(
    g: &WeightedGraph<T>,
    u: &[T],
    ord: &OperatorOrder<T>,
) -> Vec<T> {
    let k = ord.half();
    let a = laplacian_pow(g, u, k);
    let inner: Vec<T> = if ord.m % 2 == 1 {
        p_laplacian_raw(g, &a, ord.s).into_iter().map(|x| -x).collect()
    } else {
        a.iter()
            .map(|&ax| modulus_weight(ax * ax, ord.s) * ax)
            .collect()
    };
    laplacian_pow(g, &inner, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphData;

    fn graph(data: GraphData) -> WeightedGraph<f64> {
        WeightedGraph::from_data(&data).unwrap()
    }

    fn vf(v: &[f64]) -> VertexFunction<f64> {
        VertexFunction::new(v.to_vec())
    }

    #[test]
    fn order_rejects_bad_values() {
        assert!(OperatorOrder::new(0, 2.0).is_err());
        assert!(OperatorOrder::new(1, 1.5).is_err());
        assert!(OperatorOrder::new(1, f64::NAN).is_err());
        assert!(OperatorOrder::new(3, 2.0).is_ok());
    }

    #[test]
    fn laplacian_examples() {
        let p2 = graph(GraphData::path(2));
        assert_eq!(laplacian(&p2, &vf(&[1.0, 0.0])).unwrap().as_slice(), &[-1.0, 1.0]);
        let tri = graph(GraphData::complete(3));
        assert_eq!(
            laplacian(&tri, &vf(&[1.0, 0.0, 0.0])).unwrap().as_slice(),
            &[-2.0, 1.0, 1.0]
        );
        assert_eq!(
            laplacian(&tri, &vf(&[4.0, 4.0, 4.0])).unwrap().as_slice(),
            &[0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn gradient_form_examples() {
        let p2 = graph(GraphData::path(2));
        let u = vf(&[1.0, 0.0]);
        assert_eq!(gradient_form(&p2, &u, &u).unwrap().as_slice(), &[0.5, 0.5]);
        let c = vf(&[3.0, 3.0]);
        assert_eq!(gradient_form(&p2, &u, &c).unwrap().as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn grad_modulus_examples() {
        let p2 = graph(GraphData::path(2));
        let u = vf(&[1.0, 0.0]);
        let m1 = grad_modulus(&p2, &u, 1).unwrap();
        let r = 1.0 / 2f64.sqrt();
        assert!((m1[0] - r).abs() < 1e-15 && (m1[1] - r).abs() < 1e-15);
        assert_eq!(grad_modulus(&p2, &u, 2).unwrap().as_slice(), &[1.0, 1.0]);
        for m in 1..5 {
            assert_eq!(
                grad_modulus(&p2, &vf(&[2.0, 2.0]), m).unwrap().as_slice(),
                &[0.0, 0.0]
            );
        }
    }

    #[test]
    fn p_laplacian_examples() {
        let p2 = graph(GraphData::path(2));
        let u = vf(&[1.0, 0.0]);
        // |grad u|^2 = 1/2 at both vertices, so the weight sum is 2 * (1/2) = 1.
        let l4 = p_laplacian(&p2, &u, 4.0).unwrap();
        assert!((l4[0] + 0.5).abs() < 1e-15 && (l4[1] - 0.5).abs() < 1e-15);
        assert_eq!(p_laplacian(&p2, &vf(&[1.0, 1.0]), 3.0).unwrap().as_slice(), &[0.0, 0.0]);
        assert_eq!(
            p_laplacian(&p2, &u, 2.0).unwrap(),
            laplacian(&p2, &u).unwrap()
        );
    }

    #[test]
    fn weak_form_constant_test_function_vanishes_for_odd_order() {
        let tri = graph(GraphData::complete(3));
        let ord = OperatorOrder::new(1, 3.0).unwrap();
        let u = vf(&[0.3, -1.2, 2.0]);
        let c = vf(&[5.0, 5.0, 5.0]);
        assert_eq!(polylap_weak_form(&tri, &u, &c, &ord).unwrap(), 0.0);
    }

    #[test]
    fn mismatched_functions_are_rejected() {
        let p2 = graph(GraphData::path(2));
        assert!(laplacian(&p2, &vf(&[1.0])).is_err());
        assert!(gradient_form(&p2, &vf(&[1.0, 2.0]), &vf(&[1.0])).is_err());
    }
}
