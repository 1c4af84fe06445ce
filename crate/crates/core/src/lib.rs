//! Variational solvers for coupled poly-Laplacian systems on weighted finite graphs.
//!
//! The numerical core is generic over the scalar type ([`Real`], implemented for `f32` and
//! `f64`); the aliases below fix it to `f64`, which is what the command-line tool uses.

// `!(x >= y)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod cli;
pub mod continuation;
pub mod energy;
pub mod error;
pub mod expr;
pub mod graph;
pub mod nonlinearity;
pub mod real;
pub mod scalar;
pub mod sobolev;
pub mod solvers;

pub use calculus::{
    gradient_form, grad_modulus, laplacian, p_laplacian, polylap_apply, polylap_weak_form,
    OperatorOrder,
};
pub use error::{Error, Result};
pub use graph::{integral, total_measure, validate, GraphData, StatePair, VertexFunction, WeightedGraph};
pub use real::Real;
pub use sobolev::{embedding_constants, product_norm, sup_norm, w_norm, EmbeddingConstants, SpaceSpec};

pub type Graph = WeightedGraph<f64>;
pub type Function = VertexFunction<f64>;
pub type State = StatePair<f64>;
pub type Order = OperatorOrder<f64>;
