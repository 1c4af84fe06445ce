//! Random graphs, functions and small fixtures shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use grapde::graph::{vertex_name, EdgeRecord, VertexRecord};
use grapde::nonlinearity::{builtin, BuiltinParams};
use grapde::{GraphData, WeightedGraph};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Connected graph on `n` vertices: a random spanning tree plus random extra edges, with
/// measures, potentials and weights drawn from `[0.5, 2]`.
pub fn random_graph_data(rng: &mut ChaCha8Rng, n: usize) -> GraphData {
    let vertices = (0..n)
        .map(|i| VertexRecord {
            id: vertex_name(i),
            mu: rng.gen_range(0.5..2.0),
            h1: rng.gen_range(0.5..2.0),
            h2: rng.gen_range(0.5..2.0),
        })
        .collect();
    let mut edges = Vec::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        edges.push((j, i));
    }
    for i in 0..n {
        for j in i + 1..n {
            if !edges.contains(&(i, j)) && rng.gen_bool(0.3) {
                edges.push((i, j));
            }
        }
    }
    let edges = edges
        .into_iter()
        .map(|(a, b)| EdgeRecord {
            a: vertex_name(a),
            b: vertex_name(b),
            w: rng.gen_range(0.5..2.0),
        })
        .collect();
    GraphData { vertices, edges }
}

pub fn random_graph(rng: &mut ChaCha8Rng, max_n: usize) -> WeightedGraph<f64> {
    let n = rng.gen_range(2..=max_n);
    WeightedGraph::from_data(&random_graph_data(rng, n)).unwrap()
}

pub fn random_values(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-scale..scale)).collect()
}

pub fn graph(data: GraphData) -> Arc<WeightedGraph<f64>> {
    Arc::new(WeightedGraph::from_data(&data).unwrap())
}

pub fn p2() -> Arc<WeightedGraph<f64>> {
    graph(GraphData::path(2))
}

pub fn builtin_instance(name: &str, g: &Arc<WeightedGraph<f64>>, params: &BuiltinParams) -> grapde::energy::ProblemInstance<f64> {
    builtin(name, g, params).unwrap().instance(g.clone(), 0.0).unwrap()
}

pub fn no_tables() -> BTreeMap<String, Vec<f64>> {
    BTreeMap::new()
}

/// `|a - b| <= tol * max(1, scale)`.
pub fn close(a: f64, b: f64, scale: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * scale.max(1.0)
}
