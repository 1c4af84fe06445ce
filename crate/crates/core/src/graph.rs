//! Weighted finite graphs, vertex functions and integration against the vertex measure.
//!
//! A graph is read from its on-disk form ([`GraphData`]), checked by [`validate`], and then
//! frozen into a [`WeightedGraph`] whose adjacency lists are precomputed. Every map over the
//! vertices iterates in the stored vertex order.

use std::collections::{BTreeSet, HashMap};
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, GraphError, Result};
use crate::real::{compensated_sum, Real};

/// One vertex record of the graph file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub id: String,
    pub mu: f64,
    pub h1: f64,
    pub h2: f64,
}

/// One undirected edge record of the graph file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub a: String,
    pub b: String,
    pub w: f64,
}

/// Serialized graph: `{"vertices":[{"id","mu","h1","h2"}],"edges":[{"a","b","w"}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphData {
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
}

impl GraphData {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn unit_vertices(n: usize) -> Vec<VertexRecord> {
        (0..n)
            .map(|i| VertexRecord {
                id: vertex_name(i),
                mu: 1.0,
                h1: 1.0,
                h2: 1.0,
            })
            .collect()
    }

    /// Path graph on `n` vertices with unit measure, potentials and weights.
    pub fn path(n: usize) -> Self {
        let edges = (1..n)
            .map(|i| EdgeRecord {
                a: vertex_name(i - 1),
                b: vertex_name(i),
                w: 1.0,
            })
            .collect();
        Self {
            vertices: Self::unit_vertices(n),
            edges,
        }
    }

    /// Complete graph on `n` vertices with unit data.
    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push(EdgeRecord {
                    a: vertex_name(i),
                    b: vertex_name(j),
                    w: 1.0,
                });
            }
        }
        Self {
            vertices: Self::unit_vertices(n),
            edges,
        }
    }
}

/// Vertex names `a, b, ..., z, v26, v27, ...` used by the generated graphs.
pub fn vertex_name(i: usize) -> String {
    if i < 26 {
        char::from(b'a' + i as u8).to_string()
    } else {
        format!("v{i}")
    }
}

/// A soft violation of the standing assumptions on the graph data.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    NonPositiveMeasure { vertex: String, value: f64 },
    NonPositivePotential { vertex: String, which: String, value: f64 },
    NonPositiveWeight { a: String, b: String, value: f64 },
    NonFinite { location: String },
    DuplicateEdge { a: String, b: String },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::NonPositiveMeasure { vertex, value } => {
                write!(f, "non-positive measure mu({vertex}) = {value}")
            }
            Self::NonPositivePotential { vertex, which, value } => {
                write!(f, "non-positive potential {which}({vertex}) = {value}")
            }
            Self::NonPositiveWeight { a, b, value } => {
                write!(f, "non-positive weight on edge {{{a},{b}}}: {value}")
            }
            Self::NonFinite { location } => write!(f, "non-finite value at {location}"),
            Self::DuplicateEdge { a, b } => write!(f, "duplicate edge {{{a},{b}}}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks graph data against the standing assumptions.
///
/// Dangling endpoints, self-loops, duplicate vertex ids and an empty vertex set are hard
/// errors. Non-positive or non-finite data and duplicate edges are reported as violations;
/// isolated vertices only produce a warning.
pub fn validate(data: &GraphData) -> Result<ValidationReport, GraphError> {
    if data.vertices.is_empty() {
        return Err(GraphError::Empty);
    }
    let mut index = HashMap::new();
    for (i, v) in data.vertices.iter().enumerate() {
        if index.insert(v.id.as_str(), i).is_some() {
            return Err(GraphError::DuplicateVertex(v.id.clone()));
        }
    }
    let mut report = ValidationReport::default();
    for v in &data.vertices {
        for (name, value) in [("mu", v.mu), ("h1", v.h1), ("h2", v.h2)] {
            if !value.is_finite() {
                report.violations.push(Violation::NonFinite {
                    location: format!("{name}({})", v.id),
                });
            } else if value <= 0.0 {
                report.violations.push(if name == "mu" {
                    Violation::NonPositiveMeasure {
                        vertex: v.id.clone(),
                        value,
                    }
                } else {
                    Violation::NonPositivePotential {
                        vertex: v.id.clone(),
                        which: name.to_string(),
                        value,
                    }
                });
            }
        }
    }
    let mut seen = BTreeSet::new();
    let mut degree = vec![0usize; data.vertices.len()];
    for (k, e) in data.edges.iter().enumerate() {
        let ia = *index.get(e.a.as_str()).ok_or_else(|| GraphError::DanglingEndpoint {
            index: k,
            id: e.a.clone(),
        })?;
        let ib = *index.get(e.b.as_str()).ok_or_else(|| GraphError::DanglingEndpoint {
            index: k,
            id: e.b.clone(),
        })?;
        if ia == ib {
            return Err(GraphError::SelfLoop(e.a.clone()));
        }
        if !seen.insert((ia.min(ib), ia.max(ib))) {
            report.violations.push(Violation::DuplicateEdge {
                a: e.a.clone(),
                b: e.b.clone(),
            });
        }
        if !e.w.is_finite() {
            report.violations.push(Violation::NonFinite {
                location: format!("w({},{})", e.a, e.b),
            });
        } else if e.w <= 0.0 {
            report.violations.push(Violation::NonPositiveWeight {
                a: e.a.clone(),
                b: e.b.clone(),
                value: e.w,
            });
        }
        degree[ia] += 1;
        degree[ib] += 1;
    }
    for (v, d) in data.vertices.iter().zip(&degree) {
        if *d == 0 && data.vertices.len() > 1 {
            report.warnings.push(format!("isolated vertex `{}`", v.id));
        }
    }
    Ok(report)
}

/// Which vertex potential a space uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Potential {
    H1,
    H2,
}

/// Validated weighted graph with vertex measure and the two potentials.
#[derive(Debug, Clone)]
pub struct WeightedGraph<T> {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    mu: Vec<T>,
    h1: Vec<T>,
    h2: Vec<T>,
    adjacency: Vec<Vec<(usize, T)>>,
    edge_count: usize,
    warnings: Vec<String>,
}

impl<T: Real> WeightedGraph<T> {
    /// Builds a graph, refusing data with hard errors or violations.
    pub fn from_data(data: &GraphData) -> Result<Self> {
        let report = validate(data)?;
        if !report.is_ok() {
            let msg = report
                .violations
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; ");
            return Err(GraphError::Invalid(msg).into());
        }
        let ids: Vec<String> = data.vertices.iter().map(|v| v.id.clone()).collect();
        let index: HashMap<String, usize> =
            ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
        let mut adjacency = vec![Vec::new(); ids.len()];
        for e in &data.edges {
            let (a, b) = (index[&e.a], index[&e.b]);
            let w = T::of(e.w);
            adjacency[a].push((b, w));
            adjacency[b].push((a, w));
        }
        Ok(Self {
            mu: data.vertices.iter().map(|v| T::of(v.mu)).collect(),
            h1: data.vertices.iter().map(|v| T::of(v.h1)).collect(),
            h2: data.vertices.iter().map(|v| T::of(v.h2)).collect(),
            ids,
            index,
            adjacency,
            edge_count: data.edges.len(),
            warnings: report.warnings,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_data(&GraphData::from_json(text)?)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn mu(&self) -> &[T] {
        &self.mu
    }

    pub fn potential(&self, which: Potential) -> &[T] {
        match which {
            Potential::H1 => &self.h1,
            Potential::H2 => &self.h2,
        }
    }

    pub fn neighbors(&self, x: usize) -> &[(usize, T)] {
        &self.adjacency[x]
    }

    /// deg(x) = sum of incident edge weights.
    pub fn degree(&self, x: usize) -> T {
        self.adjacency[x].iter().map(|&(_, w)| w).sum()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// |V| = sum of the vertex measure.
    pub fn total_measure(&self) -> T {
        compensated_sum(self.mu.iter().copied())
    }

    pub fn mu_min(&self) -> T {
        min_of(&self.mu)
    }

    pub fn potential_min(&self, which: Potential) -> T {
        min_of(self.potential(which))
    }

    pub fn check(&self, f: &VertexFunction<T>) -> Result<()> {
        self.check_len(f.len())
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len == self.len() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.len(),
                found: len,
            })
        }
    }

    /// Integral against the vertex measure: sum_x mu(x) f(x).
    pub fn integral(&self, f: &VertexFunction<T>) -> Result<T> {
        self.check(f)?;
        Ok(self.integrate(f.as_slice()))
    }

    pub(crate) fn integrate(&self, f: &[T]) -> T {
        compensated_sum(self.mu.iter().zip(f).map(|(&m, &v)| m * v))
    }

    /// Converts a map keyed by vertex id into a vertex function; every vertex must be present.
    pub fn function_from_map<'a, I>(&self, entries: I) -> Result<VertexFunction<T>>
    where
        I: IntoIterator<Item = (&'a String, &'a f64)>,
    {
        let mut values = vec![None; self.len()];
        for (id, &v) in entries {
            let i = self
                .index_of(id)
                .ok_or_else(|| Error::Input(format!("unknown vertex `{id}` in table")))?;
            values[i] = Some(T::of(v));
        }
        values
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::Input(format!("missing value for `{}`", self.ids[i]))))
            .collect::<Result<Vec<T>>>()
            .map(VertexFunction::new)
    }
}

fn min_of<T: Real>(xs: &[T]) -> T {
    xs.iter().copied().fold(T::infinity(), T::min)
}

/// Integral of `f` over the graph.
pub fn integral<T: Real>(graph: &WeightedGraph<T>, f: &VertexFunction<T>) -> Result<T> {
    graph.integral(f)
}

pub fn total_measure<T: Real>(graph: &WeightedGraph<T>) -> T {
    graph.total_measure()
}

/// A real value per vertex, in the graph's vertex order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexFunction<T>(Vec<T>);

impl<T: Real> VertexFunction<T> {
    pub fn new(values: Vec<T>) -> Self {
        Self(values)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![T::zero(); n])
    }

    pub fn constant(n: usize, c: T) -> Self {
        Self(vec![c; n])
    }

    /// Indicator of vertex `i`.
    pub fn indicator(n: usize, i: usize) -> Self {
        let mut v = vec![T::zero(); n];
        v[i] = T::one();
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.0.iter()
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self(self.0.iter().map(|&x| f(x)).collect())
    }

    pub fn scale(&self, t: T) -> Self {
        self.map(|x| x * t)
    }

    /// `a * self + b * other`.
    pub fn axpby(&self, a: T, other: &Self, b: T) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(&x, &y)| a * x + b * y).collect())
    }

    pub fn max_abs(&self) -> T {
        self.0.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }
}

impl<T> Index<usize> for VertexFunction<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

/// The unknown `(u, v)` of the coupled system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatePair<T> {
    pub u: VertexFunction<T>,
    pub v: VertexFunction<T>,
}

impl<T: Real> StatePair<T> {
    pub fn new(u: VertexFunction<T>, v: VertexFunction<T>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: u.len(),
                found: v.len(),
            });
        }
        Ok(Self { u, v })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            u: VertexFunction::zeros(n),
            v: VertexFunction::zeros(n),
        }
    }

    pub fn scale(&self, t: T) -> Self {
        Self {
            u: self.u.scale(t),
            v: self.v.scale(t),
        }
    }

    /// Flattened `[u..., v...]`.
    pub fn to_flat(&self) -> Vec<T> {
        self.u.iter().chain(self.v.iter()).copied().collect()
    }

    pub fn from_flat(x: &[T]) -> Self {
        let n = x.len() / 2;
        Self {
            u: VertexFunction::new(x[..n].to_vec()),
            v: VertexFunction::new(x[n..].to_vec()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> WeightedGraph<f64> {
        WeightedGraph::from_data(&GraphData::path(2)).unwrap()
    }

    #[test]
    fn p2_validates() {
        let report = validate(&GraphData::path(2)).unwrap();
        assert!(report.is_ok());
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn zero_weight_is_a_violation() {
        let mut data = GraphData::path(2);
        data.edges[0].w = 0.0;
        let report = validate(&data).unwrap();
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].to_string().contains("non-positive weight"));
        assert!(WeightedGraph::<f64>::from_data(&data).is_err());
    }

    #[test]
    fn self_loop_is_a_hard_error() {
        let mut data = GraphData::path(2);
        data.edges.push(EdgeRecord {
            a: "a".into(),
            b: "a".into(),
            w: 1.0,
        });
        assert_eq!(validate(&data), Err(GraphError::SelfLoop("a".into())));
    }

    #[test]
    fn dangling_endpoint_is_a_hard_error() {
        let mut data = GraphData::path(2);
        data.edges[0].b = "zz".into();
        assert!(matches!(
            validate(&data),
            Err(GraphError::DanglingEndpoint { .. })
        ));
    }

    #[test]
    fn duplicate_edges_and_isolated_vertices() {
        let mut data = GraphData::path(3);
        data.edges.push(EdgeRecord {
            a: "b".into(),
            b: "a".into(),
            w: 2.0,
        });
        data.vertices.push(VertexRecord {
            id: "lonely".into(),
            mu: 1.0,
            h1: 1.0,
            h2: 1.0,
        });
        let report = validate(&data).unwrap();
        assert_eq!(
            report.violations,
            vec![Violation::DuplicateEdge {
                a: "b".into(),
                b: "a".into()
            }]
        );
        assert_eq!(report.warnings, vec!["isolated vertex `lonely`".to_string()]);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"vertices":[{"id":"a","mu":1,"h1":1,"h2":1,"extra":2}],"edges":[]}"#;
        assert!(GraphData::from_json(text).is_err());
    }

    #[test]
    fn integral_examples() {
        let g = p2();
        let f = VertexFunction::new(vec![1.0, 0.0]);
        assert_eq!(g.integral(&f).unwrap(), 1.0);
        assert_eq!(g.integral(&VertexFunction::zeros(2)).unwrap(), 0.0);

        let mut data = GraphData::path(2);
        data.vertices[0].mu = 2.0;
        data.vertices[1].mu = 3.0;
        let g = WeightedGraph::<f64>::from_data(&data).unwrap();
        assert_eq!(g.integral(&VertexFunction::constant(2, 1.0)).unwrap(), 5.0);
    }

    #[test]
    fn integral_rejects_mismatched_function() {
        let g = p2();
        let f = VertexFunction::new(vec![1.0, 2.0, 3.0]);
        assert!(matches!(
            g.integral(&f),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn total_measure_examples() {
        assert_eq!(p2().total_measure(), 2.0);

        let single = GraphData {
            vertices: vec![VertexRecord {
                id: "x".into(),
                mu: 7.0,
                h1: 1.0,
                h2: 1.0,
            }],
            edges: vec![],
        };
        let g = WeightedGraph::<f64>::from_data(&single).unwrap();
        assert_eq!(g.total_measure(), 7.0);
        assert!(g.warnings().is_empty());

        let mut tri = GraphData::complete(3);
        for (v, m) in tri.vertices.iter_mut().zip([1.0, 2.0, 3.0]) {
            v.mu = m;
        }
        assert_eq!(WeightedGraph::<f64>::from_data(&tri).unwrap().total_measure(), 6.0);
    }

    #[test]
    fn degree_sums_weights() {
        let mut data = GraphData::complete(3);
        data.edges[0].w = 2.5;
        let g = WeightedGraph::<f64>::from_data(&data).unwrap();
        assert_eq!(g.degree(0), 3.5);
        assert_eq!(g.degree(2), 2.0);
    }

    #[test]
    fn function_from_map_requires_every_vertex() {
        let g = p2();
        let mut m = std::collections::BTreeMap::new();
        m.insert("a".to_string(), 1.0);
        assert!(g.function_from_map(&m).is_err());
        m.insert("b".to_string(), 2.0);
        assert_eq!(g.function_from_map(&m).unwrap().as_slice(), &[1.0, 2.0]);
    }
}
