//! The nonlinearity `F(x, u, v, w)`, its partial derivatives, hypothesis constants,
//! hypothesis screening and the shipped example problems.

mod builtins;
mod check;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use builtins::{builtin, Builtin, BuiltinParams, BUILTIN_NAMES};
pub use check::{
    check_continuity, check_hypotheses, check_lipschitz_bounds, check_scalar_hypotheses,
    ConditionResult, HypothesisReport, SamplingConfig, Verdict, Witness,
};

use crate::error::{Error, EvalError, Result};
use crate::expr::{parse_expr, Compiled, EvalPoint, Expr, Var};
use crate::graph::{VertexFunction, WeightedGraph};
use crate::real::Real;

/// Which of the three compiled expressions to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    F,
    Fu,
    Fv,
}

/// `F` with its symbolic partials and per-vertex coefficient tables.
#[derive(Debug, Clone)]
pub struct Nonlinearity<T> {
    f: Expr,
    fu: Expr,
    fv: Expr,
    names: Vec<String>,
    tables: Vec<VertexFunction<T>>,
    rows: Vec<Vec<T>>,
    compiled: [Compiled<T>; 3],
}

impl<T: Real> Nonlinearity<T> {
    /// Builds from an expression and coefficient tables; every referenced name must be present
    /// and all tables must have the same length. Unreferenced tables are dropped.
    pub fn new(f: Expr, tables: &BTreeMap<String, VertexFunction<T>>, n: usize) -> Result<Self> {
        let fu = f.differentiate(Var::U);
        let fv = f.differentiate(Var::V);
        let names: Vec<String> = f.coefficients().into_iter().collect();
        let mut kept = Vec::with_capacity(names.len());
        for name in &names {
            let table = tables
                .get(name)
                .ok_or_else(|| Error::UnknownCoefficient(name.clone()))?;
            if table.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: table.len(),
                });
            }
            kept.push(table.clone());
        }
        let rows = (0..n).map(|x| kept.iter().map(|t| t[x]).collect()).collect();
        let compile = |e: &Expr| Compiled::new(e, &names).map_err(Error::UnknownCoefficient);
        let compiled = [compile(&f)?, compile(&fu)?, compile(&fv)?];
        Ok(Self {
            f,
            fu,
            fv,
            names,
            tables: kept,
            rows,
            compiled,
        })
    }

    /// Parses `source` and attaches tables given as plain vectors in vertex order.
    pub fn from_source(source: &str, tables: &BTreeMap<String, Vec<f64>>, n: usize) -> Result<Self> {
        let f = parse_expr(source)?;
        let tables = tables
            .iter()
            .map(|(k, v)| (k.clone(), VertexFunction::new(v.iter().map(|&c| T::of(c)).collect())))
            .collect();
        Self::new(f, &tables, n)
    }

    /// Same as [`Nonlinearity::from_source`] with the tables aligned to `graph`.
    pub fn for_graph(source: &str, tables: &BTreeMap<String, Vec<f64>>, graph: &WeightedGraph<T>) -> Result<Self> {
        Self::from_source(source, tables, graph.len())
    }

    pub fn f(&self) -> &Expr {
        &self.f
    }

    pub fn fu(&self) -> &Expr {
        &self.fu
    }

    pub fn fv(&self) -> &Expr {
        &self.fv
    }

    pub fn expr(&self, which: Which) -> &Expr {
        match which {
            Which::F => &self.f,
            Which::Fu => &self.fu,
            Which::Fv => &self.fv,
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn coefficient_names(&self) -> &[String] {
        &self.names
    }

    pub fn table(&self, name: &str) -> Option<&VertexFunction<T>> {
        self.names.iter().position(|n| n == name).map(|i| &self.tables[i])
    }

    /// Evaluates one expression at vertex `x`.
    pub fn eval(&self, which: Which, x: usize, u: T, v: T, w: T) -> Result<T> {
        self.eval_raw(which, x, u, v, w).map_err(|e| {
            let label = match which {
                Which::F => "F",
                Which::Fu => "F_u",
                Which::Fv => "F_v",
            };
            Error::Eval(EvalError {
                message: format!("{label} at vertex #{x} (u={u}, v={v}, w={w}): {}", e.message),
            })
        })
    }

    pub(crate) fn eval_raw(&self, which: Which, x: usize, u: T, v: T, w: T) -> Result<T, EvalError> {
        let idx = match which {
            Which::F => 0,
            Which::Fu => 1,
            Which::Fv => 2,
        };
        self.compiled[idx].eval(&EvalPoint {
            u,
            v,
            w,
            coefs: &self.rows[x],
        })
    }

    /// Evaluates at every vertex with vertex-wise `u`, `v`.
    pub fn eval_all(&self, which: Which, u: &[T], v: &[T], w: T) -> Result<Vec<T>> {
        (0..self.len()).map(|x| self.eval(which, x, u[x], v[x], w)).collect()
    }
}

/// Closed parameter interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::Input(format!("invalid parameter interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, w: f64) -> bool {
        self.lo <= w && w <= self.hi
    }

    /// `n` evenly spaced samples including both ends.
    pub fn samples(&self, n: usize) -> Vec<f64> {
        if self.lo == self.hi {
            vec![self.lo]
        } else {
            crate::real::linspace(self.lo, self.hi, n.max(2))
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }
}

impl Default for Interval {
    fn default() -> Self {
        Self { lo: -1.0, hi: 1.0 }
    }
}

/// One user-supplied lower-bound sample `a(radius) >= a` for the positivity floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FloorSample {
    pub radius: f64,
    pub a: f64,
}

/// Constants attached to the growth and structure hypotheses. Vertex tables (`L`, `c_fn`)
/// are stored in the graph's vertex order. Absent constants make the corresponding checks
/// and certificates unavailable.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypothesisSpec {
    pub theta: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    pub delta: Option<f64>,
    #[serde(rename = "L")]
    pub l: Option<Vec<f64>>,
    pub x0: Option<String>,
    pub d1: Option<f64>,
    pub d2: Option<f64>,
    #[serde(rename = "J", default)]
    pub j: Interval,
    #[serde(default)]
    pub a_floor: Vec<FloorSample>,
    pub c_fn: Option<Vec<f64>>,
}

fn need(value: Option<f64>, name: &str) -> Result<f64> {
    value.ok_or_else(|| Error::Hypothesis(format!("constant `{name}` not provided")))
}

impl HypothesisSpec {
    pub fn theta(&self) -> Result<f64> {
        need(self.theta, "theta")
    }
    pub fn c1(&self) -> Result<f64> {
        need(self.c1, "c1")
    }
    pub fn c2(&self) -> Result<f64> {
        need(self.c2, "c2")
    }
    pub fn r1(&self) -> Result<f64> {
        need(self.r1, "r1")
    }
    pub fn r2(&self) -> Result<f64> {
        need(self.r2, "r2")
    }
    pub fn delta(&self) -> Result<f64> {
        need(self.delta, "delta")
    }
    pub fn d1(&self) -> Result<f64> {
        need(self.d1, "d1")
    }
    pub fn d2(&self) -> Result<f64> {
        need(self.d2, "d2")
    }

    /// Checks the stated ranges: `theta > max{p,q}`, `min{r1,r2} > max{p,q}`, positivity.
    pub fn check_ranges(&self, p: f64, q: f64) -> Vec<String> {
        let mut bad = Vec::new();
        let top = p.max(q);
        if let Some(t) = self.theta {
            if !(t > top) {
                bad.push(format!("theta = {t} must exceed max(p,q) = {top}"));
            }
        }
        for (name, r) in [("r1", self.r1), ("r2", self.r2)] {
            if let Some(r) = r {
                if !(r > top) {
                    bad.push(format!("{name} = {r} must exceed max(p,q) = {top}"));
                }
            }
        }
        for (name, c) in [
            ("c1", self.c1),
            ("c2", self.c2),
            ("d1", self.d1),
            ("d2", self.d2),
            ("delta", self.delta),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
        ] {
            if let Some(c) = c {
                if !(c > 0.0) {
                    bad.push(format!("{name} = {c} must be positive"));
                }
            }
        }
        if !(self.j.lo <= self.j.hi) {
            bad.push("parameter interval is empty".into());
        }
        bad
    }

    /// Index of the spike vertex: the given `x0`, or the vertex maximizing `mu(x) L(x)`
    /// (first one on ties), or vertex 0 if no `L` is known.
    pub fn spike_vertex<T: Real>(&self, graph: &WeightedGraph<T>) -> Result<usize> {
        if let Some(id) = &self.x0 {
            return graph
                .index_of(id)
                .ok_or_else(|| Error::Input(format!("spike vertex `{id}` is not in the graph")));
        }
        let Some(l) = &self.l else { return Ok(0) };
        let mut best = 0;
        let mut best_val = f64::NEG_INFINITY;
        for (x, &lx) in l.iter().enumerate().take(graph.len()) {
            let val = graph.mu()[x].as_f64() * lx;
            if val > best_val {
                best = x;
                best_val = val;
            }
        }
        Ok(best)
    }
}
