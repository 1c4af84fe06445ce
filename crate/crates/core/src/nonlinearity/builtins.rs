//! Shipped example problems with their hypothesis constants.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use std::sync::Arc;

use super::{FloorSample, HypothesisSpec, Interval, Nonlinearity};
use crate::calculus::OperatorOrder;
use crate::energy::ProblemInstance;
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::real::Real;
use crate::sobolev::embedding_constants;

pub const BUILTIN_NAMES: [&str; 5] = [
    "mp-example",
    "localmin-example",
    "unique-example",
    "control-objective",
    "nonexist-example",
];

/// User-adjustable parameters of the builtins; `None` selects the graph-dependent default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuiltinParams {
    /// gamma(x) in vertex order (default 1).
    pub gamma: Option<Vec<f64>>,
    /// z(x) of the control objective (default 1).
    pub z: Option<Vec<f64>>,
    /// Amplitude e (or e*) of the local-minimum examples.
    pub e: Option<f64>,
    /// The squared-coordinate table of the nonexistence example (default 1, 2, ..., n).
    pub xsq: Option<Vec<f64>>,
    #[serde(rename = "J")]
    pub j: Option<Interval>,
}

/// A fully instantiated example: expression sources, tables, orders and constants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Builtin {
    pub name: String,
    pub source: String,
    pub objective: Option<String>,
    pub coefficients: BTreeMap<String, Vec<f64>>,
    pub m1: u32,
    pub m2: u32,
    pub p: f64,
    pub q: f64,
    pub spec: HypothesisSpec,
    /// Default amplitude actually used, if the example has one.
    pub amplitude: Option<f64>,
}

impl Builtin {
    /// The coupled problem on `graph` at parameter `w`.
    pub fn instance<T: Real>(&self, graph: Arc<WeightedGraph<T>>, w: T) -> Result<ProblemInstance<T>> {
        let nl = Nonlinearity::for_graph(&self.source, &self.coefficients, &graph)?;
        ProblemInstance::new(
            graph,
            OperatorOrder::new(self.m1, T::of(self.p))?,
            OperatorOrder::new(self.m2, T::of(self.q))?,
            Arc::new(nl),
            Arc::new(self.spec.clone()),
            w,
        )
    }

    /// The control objective, if the example has one.
    pub fn objective_fn<T: Real>(&self, graph: &WeightedGraph<T>) -> Result<Option<Nonlinearity<T>>> {
        self.objective
            .as_deref()
            .map(|src| Nonlinearity::for_graph(src, &self.coefficients, graph))
            .transpose()
    }
}

fn table(values: &Option<Vec<f64>>, n: usize, fill: f64, name: &str) -> Result<Vec<f64>> {
    match values {
        Some(v) if v.len() != n => Err(Error::Input(format!(
            "table `{name}` has {} entries, graph has {n} vertices",
            v.len()
        ))),
        Some(v) => Ok(v.clone()),
        None => Ok(vec![fill; n]),
    }
}

fn sup_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, &x| m.max(x.abs()))
}

fn min_abs(v: &[f64]) -> f64 {
    v.iter().fold(f64::INFINITY, |m, &x| m.min(x.abs()))
}

/// Instantiates a builtin on `graph`.
///
/// The default amplitude of the local-minimum examples is
/// `0.9 * threshold / (k (1 + max_J w^2) ||gamma||_inf)` where `k` bounds the angular factor
/// of `F / (|t|^p + |s|^p)` (2 for the quartic, 1 for the quadratic), so the small-amplitude
/// growth bound holds at every `w` in `J`, not only at `w = 0`.
pub fn builtin<T: Real>(name: &str, graph: &WeightedGraph<T>, params: &BuiltinParams) -> Result<Builtin> {
    let n = graph.len();
    let j = params.j.unwrap_or_default();
    let gamma = table(&params.gamma, n, 1.0, "gamma")?;
    let gsup = sup_abs(&gamma);
    let gmin = min_abs(&gamma);
    let wfac = 1.0 + j.max_abs().powi(2);
    let mut coefficients = BTreeMap::new();
    coefficients.insert("gamma".to_string(), gamma.clone());
    let out = match name {
        "mp-example" | "control-objective" => {
            let spec = HypothesisSpec {
                theta: Some(4.0),
                c1: Some(16.0 * gsup),
                c2: Some(16.0 * gsup),
                r1: Some(4.0),
                r2: Some(4.0),
                j,
                a_floor: [0.01, 0.1, 0.5, 1.0, 2.0, 10.0]
                    .iter()
                    .map(|&r: &f64| FloorSample { radius: r, a: r.powi(4) })
                    .collect(),
                c_fn: Some(gamma.iter().map(|g| g.abs()).collect()),
                ..Default::default()
            };
            let objective = if name == "control-objective" {
                coefficients.insert("z".into(), table(&params.z, n, 1.0, "z")?);
                Some("z*(u^2+v^2)^2*w^2".to_string())
            } else {
                None
            };
            Builtin {
                name: name.into(),
                source: "(u^2+v^2)^2*(1+w^2)*abs(gamma)".into(),
                objective,
                coefficients,
                m1: 1,
                m2: 1,
                p: 3.0,
                q: 2.0,
                spec,
                amplitude: None,
            }
        }
        "localmin-example" | "unique-example" => {
            let quartic = name == "localmin-example";
            let p = if quartic { 4.0 } else { 2.0 };
            let threshold = embedding_constants(graph, T::of(p), T::of(p))?.growth_threshold().as_f64();
            let angular = if quartic { 2.0 } else { 1.0 };
            let e = params
                .e
                .unwrap_or(0.9 * threshold / (angular * wfac * gsup.max(f64::MIN_POSITIVE)));
            if !(e > 0.0) {
                return Err(Error::Input(format!("amplitude e must be positive, got {e}")));
            }
            coefficients.insert("e".into(), vec![e; n]);
            let l = vec![4.0 * e * gmin; n];
            let mut spec = HypothesisSpec {
                delta: Some(1.0),
                l: Some(l),
                j,
                c_fn: Some(gamma.iter().map(|g| e * g.abs()).collect()),
                ..Default::default()
            };
            if quartic {
                // radial derivative equals 4F <= 8 e (1+w^2) |gamma| (t^4 + s^4)
                spec.theta = Some(5.0);
                spec.r1 = Some(5.0);
                spec.r2 = Some(5.0);
                spec.c1 = Some(8.0 * e * wfac * gsup);
                spec.c2 = Some(8.0 * e * wfac * gsup);
            } else {
                spec.theta = Some(4.0);
                spec.r1 = Some(4.0);
                spec.r2 = Some(4.0);
                spec.c1 = Some(4.0 * e * gsup);
                spec.c2 = Some(4.0 * e * gsup);
                spec.d1 = Some(4.0 * e * gsup);
                spec.d2 = Some(4.0 * e * gsup);
            }
            Builtin {
                name: name.into(),
                source: if quartic {
                    "e*(u^2+v^2)^2*(1+w^2)*abs(gamma)".into()
                } else {
                    "e*(u^2+v^2)*(1+w^2)*abs(gamma)".into()
                },
                objective: None,
                coefficients,
                m1: 1,
                m2: 1,
                p,
                q: p,
                spec,
                amplitude: Some(e),
            }
        }
        "nonexist-example" => {
            let default_xsq: Vec<f64> = (1..=n).map(|k| k as f64).collect();
            let xsq = match &params.xsq {
                Some(_) => table(&params.xsq, n, 1.0, "xsq")?,
                None => default_xsq,
            };
            let mut coefficients = BTreeMap::new();
            coefficients.insert("xsq".to_string(), xsq);
            Builtin {
                name: name.into(),
                source: "-xsq*(u*atan(u) - 0.5*log(1+u^2) + v*atan(v) - 0.5*log(1+v^2))".into(),
                objective: None,
                coefficients,
                m1: 1,
                m2: 1,
                p: 2.0,
                q: 2.0,
                spec: HypothesisSpec { j, ..Default::default() },
                amplitude: None,
            }
        }
        other => return Err(Error::UnknownBuiltin(other.to_string())),
    };
    Ok(out)
}
