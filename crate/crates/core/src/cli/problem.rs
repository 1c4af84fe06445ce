//! Problem files: either a builtin with parameters or an explicit nonlinearity.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::calculus::OperatorOrder;
use crate::energy::ProblemInstance;
use crate::error::{Error, Result};
use crate::graph::{Potential, WeightedGraph};
use crate::nonlinearity::{builtin, Builtin, BuiltinParams, HypothesisSpec, Nonlinearity};

/// On-disk problem description. Coefficient tables map vertex id to value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub builtin: Option<String>,
    pub params: Option<BuiltinParams>,
    #[serde(rename = "F")]
    pub f: Option<String>,
    #[serde(default)]
    pub coefficients: BTreeMap<String, BTreeMap<String, f64>>,
    pub m1: Option<u32>,
    pub m2: Option<u32>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub w: Option<f64>,
    pub hypotheses: Option<HypothesisSpec>,
    pub objective: Option<String>,
    #[serde(default)]
    pub scalar: bool,
    pub potential: Option<Potential>,
}

/// A problem resolved against a graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    #[serde(flatten)]
    pub def: Builtin,
    pub scalar: bool,
    pub potential: Potential,
    pub w: f64,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn builtin(name: &str) -> Self {
        Self { builtin: Some(name.to_string()), ..Default::default() }
    }

    pub fn resolve(&self, graph: &WeightedGraph<f64>) -> Result<Resolved> {
        let w = self.w.unwrap_or(0.0);
        let potential = self.potential.unwrap_or(Potential::H1);
        if let Some(name) = &self.builtin {
            let explicit = self.f.is_some()
                || !self.coefficients.is_empty()
                || self.m1.is_some()
                || self.m2.is_some()
                || self.p.is_some()
                || self.q.is_some()
                || self.hypotheses.is_some()
                || self.objective.is_some()
                || self.scalar;
            if explicit {
                return Err(Error::Input(format!(
                    "builtin `{name}` accepts only `params` and `w`; remove the explicit problem fields"
                )));
            }
            let def = builtin(name, graph, &self.params.clone().unwrap_or_default())?;
            return Ok(Resolved { def, scalar: false, potential, w });
        }
        let Some(source) = &self.f else {
            return Err(Error::Input("problem needs either `builtin` or `F`".into()));
        };
        if self.params.is_some() {
            return Err(Error::Input("`params` only applies to builtins".into()));
        }
        let p = self.p.ok_or_else(|| Error::Input("problem needs the exponent `p`".into()))?;
        let mut coefficients = BTreeMap::new();
        for (name, table) in &self.coefficients {
            let f = graph.function_from_map(table)?;
            coefficients.insert(name.clone(), f.into_vec());
        }
        if self.scalar && (self.m2.is_some() || self.q.is_some()) {
            return Err(Error::Input("a single-unknown problem takes only `m1` and `p`".into()));
        }
        let def = Builtin {
            name: "custom".into(),
            source: source.clone(),
            objective: self.objective.clone(),
            coefficients,
            m1: self.m1.unwrap_or(1),
            m2: self.m2.or(self.m1).unwrap_or(1),
            p,
            q: self.q.unwrap_or(p),
            spec: self.hypotheses.clone().unwrap_or_default(),
            amplitude: None,
        };
        Ok(Resolved { def, scalar: self.scalar, potential, w })
    }
}

impl Resolved {
    pub fn instance(&self, graph: Arc<WeightedGraph<f64>>) -> Result<ProblemInstance<f64>> {
        if self.scalar {
            let nl = Nonlinearity::for_graph(&self.def.source, &self.def.coefficients, &graph)?;
            ProblemInstance::new_scalar(
                graph,
                OperatorOrder::new(self.def.m1, self.def.p)?,
                Arc::new(nl),
                Arc::new(self.def.spec.clone()),
                self.w,
                self.potential,
            )
        } else {
            self.def.instance(graph, self.w)
        }
    }
}
