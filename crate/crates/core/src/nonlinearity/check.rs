//! Sampled screening of the growth and structure hypotheses.
//!
//! Limit conditions are probed on radius ladders and can only ever be "pass (sampled)".
//! Pointwise inequalities are probed on radius x angle x parameter x vertex grids, with a
//! relative tolerance so that conditions holding with equality are not misreported.

use serde::Serialize;

use super::{HypothesisSpec, Nonlinearity, Which};
use crate::calculus::OperatorOrder;
use crate::error::EvalError;
use crate::expr::Func;
use crate::graph::{Potential, VertexFunction, WeightedGraph};
use crate::real::{linspace, Real};
use crate::sobolev::{embedding_constants, w_norm_pow, SpaceSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    PassSampled,
    Fail,
    Inconclusive,
    NotChecked,
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        matches!(self, Verdict::Pass | Verdict::PassSampled)
    }
}

/// Sample point at which a condition failed or could not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub vertex: String,
    pub t: f64,
    pub s: f64,
    pub w: f64,
    pub value: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionResult {
    pub name: String,
    pub verdict: Verdict,
    pub detail: String,
    pub witness: Option<Witness>,
    /// `(radius, sampled extremum)` pairs for ladder-based conditions.
    pub ladder: Vec<(f64, f64)>,
    pub samples: usize,
}

impl ConditionResult {
    fn new(name: &str, verdict: Verdict, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            verdict,
            detail: detail.into(),
            witness: None,
            ladder: Vec::new(),
            samples: 0,
        }
    }

    fn with_witness(mut self, w: Option<Witness>) -> Self {
        self.witness = w;
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub conditions: Vec<ConditionResult>,
    pub notes: Vec<String>,
}

impl HypothesisReport {
    pub fn get(&self, name: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn verdict(&self, name: &str) -> Verdict {
        self.get(name).map_or(Verdict::NotChecked, |c| c.verdict)
    }

    /// Whether every named condition passed (sampled passes included).
    pub fn passes(&self, names: &[&str]) -> bool {
        names.iter().all(|n| self.verdict(n).is_pass())
    }
}

/// Grids and ladders used by the screening.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingConfig {
    pub small_radii: Vec<f64>,
    pub large_radii: Vec<f64>,
    pub w_samples: usize,
    pub angles: usize,
    pub inequality_radii: Vec<f64>,
    pub box_points: usize,
    pub box_radius: f64,
    pub rel_tol: f64,
    pub floor_points: usize,
    pub lipschitz_points: usize,
    /// Radius for the Lipschitz-type screening; only known once a local-min certificate exists.
    pub lipschitz_radius: Option<f64>,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            small_radii: (1..=6).map(|k| 10f64.powi(-k)).collect(),
            large_radii: (1..=4).map(|k| 10f64.powi(k)).collect(),
            w_samples: 8,
            angles: 32,
            inequality_radii: vec![1e-3, 1e-2, 1e-1, 0.5, 1.0, 2.0, 10.0, 100.0],
            box_points: 64,
            box_radius: 10.0,
            rel_tol: 1e-9,
            floor_points: 64,
            lipschitz_points: 9,
            lipschitz_radius: None,
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    System,
    Scalar,
}

struct Ctx<'a, T> {
    nl: &'a Nonlinearity<T>,
    graph: &'a WeightedGraph<T>,
    cfg: &'a SamplingConfig,
    mode: Mode,
    p: f64,
    q: f64,
    ws: Vec<f64>,
    dirs: Vec<(f64, f64)>,
}

impl<T: Real> Ctx<'_, T> {
    fn eval(&self, which: Which, x: usize, t: f64, s: f64, w: f64) -> Result<f64, EvalError> {
        self.nl
            .eval_raw(which, x, T::of(t), T::of(s), T::of(w))
            .map(Real::as_f64)
    }

    /// `F_t t + F_s s` (only `F_t t` for a single unknown).
    fn radial(&self, x: usize, t: f64, s: f64, w: f64) -> Result<f64, EvalError> {
        let mut r = self.eval(Which::Fu, x, t, s, w)? * t;
        if self.mode == Mode::System {
            r += self.eval(Which::Fv, x, t, s, w)? * s;
        }
        Ok(r)
    }

    fn witness(&self, x: usize, t: f64, s: f64, w: f64, value: f64, note: impl Into<String>) -> Witness {
        Witness {
            vertex: self.graph.ids()[x].clone(),
            t,
            s,
            w,
            value,
            note: note.into(),
        }
    }

    /// Visits every (vertex, w, direction) at radius `r`.
    fn sphere<F>(&self, r: f64, mut visit: F) -> Result<(), Witness>
    where
        F: FnMut(usize, f64, f64, f64) -> Result<(), (EvalError, usize, f64, f64, f64)>,
    {
        for x in 0..self.graph.len() {
            for &w in &self.ws {
                for &(ct, cs) in &self.dirs {
                    let (t, s) = (r * ct, r * cs);
                    if let Err((e, x, t, s, w)) = visit(x, t, s, w) {
                        return Err(self.witness(x, t, s, w, f64::NAN, e.message));
                    }
                }
            }
        }
        Ok(())
    }

    fn denom(&self, t: f64, s: f64, a: f64, b: f64) -> f64 {
        t.abs().powf(a) + if self.mode == Mode::System { s.abs().powf(b) } else { 0.0 }
    }

    fn count(&self) -> usize {
        self.graph.len() * self.ws.len() * self.dirs.len()
    }
}

fn directions(mode: Mode, angles: usize) -> Vec<(f64, f64)> {
    match mode {
        Mode::Scalar => vec![(1.0, 0.0), (-1.0, 0.0)],
        Mode::System => (0..angles.max(1))
            .map(|k| {
                let phi = 2.0 * std::f64::consts::PI * k as f64 / angles.max(1) as f64;
                (phi.cos(), phi.sin())
            })
            .collect(),
    }
}

fn violates(lhs: f64, rhs: f64, tol: f64) -> bool {
    lhs - rhs > tol * (lhs.abs() + rhs.abs()) + 1e-300
}

fn check_vanishing<T: Real>(c: &Ctx<'_, T>, name: &str) -> ConditionResult {
    for x in 0..c.graph.len() {
        for &w in &c.ws {
            match c.eval(Which::F, x, 0.0, 0.0, w) {
                Err(e) => {
                    return ConditionResult::new(name, Verdict::Inconclusive, "evaluation failed at the origin")
                        .with_witness(Some(c.witness(x, 0.0, 0.0, w, f64::NAN, e.message)))
                }
                Ok(v) if v.abs() > 1e-14 => {
                    return ConditionResult::new(name, Verdict::Fail, "F does not vanish at the origin")
                        .with_witness(Some(c.witness(x, 0.0, 0.0, w, v, "F(x,0,0,w) != 0")))
                }
                Ok(_) => {}
            }
        }
    }
    let mut r = ConditionResult::new(name, Verdict::Pass, "F(x,0,0,w) = 0 at every vertex and parameter sample");
    r.samples = c.graph.len() * c.ws.len();
    r
}

fn check_small_growth<T: Real>(c: &Ctx<'_, T>, name: &str, threshold: f64) -> ConditionResult {
    let mut radii = c.cfg.small_radii.clone();
    radii.sort_by(|a, b| b.total_cmp(a));
    let mut ladder = Vec::new();
    let mut last_arg = None;
    for &r in &radii {
        let mut sup = f64::NEG_INFINITY;
        let mut arg = None;
        let res = c.sphere(r, |x, t, s, w| {
            let f = c.eval(Which::F, x, t, s, w).map_err(|e| (e, x, t, s, w))?;
            let ratio = f / c.denom(t, s, c.p, c.q);
            if ratio > sup {
                sup = ratio;
                arg = Some((x, t, s, w));
            }
            Ok(())
        });
        if let Err(wit) = res {
            return ConditionResult::new(name, Verdict::Inconclusive, "evaluation failed near the origin")
                .with_witness(Some(wit));
        }
        ladder.push((r, sup));
        last_arg = arg;
    }
    let tail = &ladder[ladder.len().saturating_sub(3)..];
    let (verdict, witness) = if tail.iter().all(|&(_, v)| v < threshold) {
        (Verdict::PassSampled, None)
    } else if ladder.last().is_some_and(|&(_, v)| v >= threshold) {
        let (x, t, s, w) = last_arg.expect("non-empty ladder");
        let v = ladder.last().unwrap().1;
        (Verdict::Fail, Some(c.witness(x, t, s, w, v, format!("ratio >= threshold {threshold:.6e}"))))
    } else {
        (Verdict::Inconclusive, None)
    };
    let mut out = ConditionResult::new(
        name,
        verdict,
        format!("sup of F/(|t|^p+|s|^q) on shrinking spheres vs threshold {threshold:.6e}"),
    )
    .with_witness(witness);
    out.ladder = ladder;
    out.samples = c.count() * radii.len();
    out
}

fn check_superlinear<T: Real>(c: &Ctx<'_, T>, name: &str) -> ConditionResult {
    let mut radii = c.cfg.large_radii.clone();
    radii.sort_by(f64::total_cmp);
    let mut ladder = Vec::new();
    for &r in &radii {
        let mut inf = f64::INFINITY;
        let res = c.sphere(r, |x, t, s, w| {
            let f = c.eval(Which::F, x, t, s, w).map_err(|e| (e, x, t, s, w))?;
            inf = inf.min(f / c.denom(t, s, c.p, c.q));
            Ok(())
        });
        if let Err(wit) = res {
            return ConditionResult::new(name, Verdict::Inconclusive, "evaluation failed on a large sphere")
                .with_witness(Some(wit));
        }
        ladder.push((r, inf));
    }
    let increasing = ladder.windows(2).all(|w| w[1].1 > w[0].1);
    let (first, last) = (ladder[0].1, ladder[ladder.len() - 1].1);
    let verdict = if increasing && last > 0.0 && (first <= 0.0 || last >= 10.0 * first) {
        Verdict::PassSampled
    } else if last <= first {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    let mut out = ConditionResult::new(
        name,
        verdict,
        "inf of F/(|t|^p+|s|^q) on growing spheres must increase without bound",
    );
    out.ladder = ladder;
    out.samples = c.count() * radii.len();
    out
}

fn check_radial_excess<T: Real>(c: &Ctx<'_, T>, name: &str, g1: f64, g2: f64) -> ConditionResult {
    let top = c.p.max(c.q);
    let mut radii = c.cfg.large_radii.clone();
    radii.sort_by(f64::total_cmp);
    let mut ladder = Vec::new();
    for &r in &radii {
        let mut inf = f64::INFINITY;
        let res = c.sphere(r, |x, t, s, w| {
            let f = c.eval(Which::F, x, t, s, w).map_err(|e| (e, x, t, s, w))?;
            let rad = c.radial(x, t, s, w).map_err(|e| (e, x, t, s, w))?;
            inf = inf.min((rad - top * f) / c.denom(t, s, g1, g2));
            Ok(())
        });
        if let Err(wit) = res {
            return ConditionResult::new(name, Verdict::Inconclusive, "evaluation failed on a large sphere")
                .with_witness(Some(wit));
        }
        ladder.push((r, inf));
    }
    let n = ladder.len();
    let last = ladder[n - 1].1;
    let prev = if n > 1 { ladder[n - 2].1 } else { last };
    let verdict = if last > 0.0 && prev > 0.0 && last >= 0.5 * prev {
        Verdict::PassSampled
    } else if last <= 0.0 {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    let mut out = ConditionResult::new(
        name,
        verdict,
        format!("liminf of (radial derivative - {top} F)/(|t|^{g1}+|s|^{g2}) must be positive"),
    );
    out.ladder = ladder;
    out.samples = c.count() * n;
    out
}

/// Pointwise inequality `lhs <= rhs` over the inequality grid.
fn check_inequality<T: Real, L, R>(c: &Ctx<'_, T>, name: &str, detail: &str, lhs: L, rhs: R) -> ConditionResult
where
    L: Fn(usize, f64, f64, f64) -> Result<f64, EvalError>,
    R: Fn(usize, f64, f64, f64) -> Result<f64, EvalError>,
{
    let mut worst: Option<(f64, Witness)> = None;
    let mut samples = 0;
    for &r in &c.cfg.inequality_radii {
        let res = c.sphere(r, |x, t, s, w| {
            samples += 1;
            let a = lhs(x, t, s, w).map_err(|e| (e, x, t, s, w))?;
            let b = rhs(x, t, s, w).map_err(|e| (e, x, t, s, w))?;
            if violates(a, b, c.cfg.rel_tol) {
                let excess = (a - b) / (a.abs() + b.abs()).max(1e-300);
                if worst.as_ref().is_none_or(|(e, _)| excess > *e) {
                    worst = Some((excess, c.witness(x, t, s, w, a - b, "lhs - rhs > 0")));
                }
            }
            Ok(())
        });
        if let Err(wit) = res {
            return ConditionResult::new(name, Verdict::Inconclusive, "evaluation failed").with_witness(Some(wit));
        }
    }
    let mut out = match worst {
        None => ConditionResult::new(name, Verdict::Pass, detail),
        Some((_, wit)) => ConditionResult::new(name, Verdict::Fail, detail).with_witness(Some(wit)),
    };
    out.samples = samples;
    out
}

fn check_floor<T: Real>(c: &Ctx<'_, T>, spec: &HypothesisSpec, name: &str) -> ConditionResult {
    let n = c.graph.len();
    let cfn = spec.c_fn.clone().unwrap_or_else(|| vec![1.0; n]);
    if cfn.len() != n {
        return ConditionResult::new(name, Verdict::Inconclusive, "c(x) table does not match the graph");
    }
    if let Some(x) = cfn.iter().position(|&v| !(v > 0.0)) {
        return ConditionResult::new(name, Verdict::Fail, "c(x) must be positive")
            .with_witness(Some(c.witness(x, 0.0, 0.0, 0.0, cfn[x], "c(x) <= 0")));
    }
    if !spec.a_floor.is_empty() {
        let mut samples = 0;
        for fs in &spec.a_floor {
            if !(fs.a > 0.0) || !(fs.radius > 0.0) {
                return ConditionResult::new(name, Verdict::Fail, "floor samples need a(r) > 0 at r > 0")
                    .with_witness(Some(c.witness(0, fs.radius, 0.0, 0.0, fs.a, "non-positive floor sample")));
            }
            let mut bad = None;
            let res = c.sphere(fs.radius, |x, t, s, w| {
                samples += 1;
                let f = c.eval(Which::F, x, t, s, w).map_err(|e| (e, x, t, s, w))?;
                let floor = fs.a * cfn[x];
                if violates(floor, f, c.cfg.rel_tol) && bad.is_none() {
                    bad = Some(c.witness(x, t, s, w, f - floor, "F below a(r) c(x)"));
                }
                Ok(())
            });
            if let Err(wit) = res {
                return ConditionResult::new(name, Verdict::Inconclusive, "evaluation failed").with_witness(Some(wit));
            }
            if bad.is_some() {
                return ConditionResult::new(name, Verdict::Fail, "F >= a(|(t,s)|) c(x) violated at a floor sample")
                    .with_witness(bad);
            }
        }
        let mut out = ConditionResult::new(name, Verdict::Pass, "F >= a(|(t,s)|) c(x) at every supplied floor sample");
        out.ladder = spec.a_floor.iter().map(|f| (f.radius, f.a)).collect();
        out.samples = samples;
        return out;
    }
    // No floor supplied: estimate a(r) = min F / c on sampled spheres; it must stay positive.
    let mut ladder = Vec::new();
    for &r in &c.cfg.inequality_radii {
        let mut inf = f64::INFINITY;
        let mut arg = (0, 0.0, 0.0, 0.0);
        let res = c.sphere(r, |x, t, s, w| {
            let f = c.eval(Which::F, x, t, s, w).map_err(|e| (e, x, t, s, w))? / cfn[x];
            if f < inf {
                inf = f;
                arg = (x, t, s, w);
            }
            Ok(())
        });
        if let Err(wit) = res {
            return ConditionResult::new(name, Verdict::Inconclusive, "evaluation failed").with_witness(Some(wit));
        }
        ladder.push((r, inf));
        if !(inf > 0.0) {
            let (x, t, s, w) = arg;
            let mut out = ConditionResult::new(name, Verdict::Fail, "no positive floor a(r): F/c(x) is not positive")
                .with_witness(Some(c.witness(x, t, s, w, inf, "min F/c(x) <= 0")));
            out.ladder = ladder;
            return out;
        }
    }
    let mut out = ConditionResult::new(name, Verdict::PassSampled, "estimated floor min F/c(x) is positive on every sampled sphere");
    out.samples = c.count() * ladder.len();
    out.ladder = ladder;
    out
}

fn spike_norms_pow<T: Real>(graph: &WeightedGraph<T>, x0: usize, ords: &[(OperatorOrder<T>, Potential)]) -> f64 {
    let spike = VertexFunction::indicator(graph.len(), x0);
    ords.iter()
        .map(|&(ord, pot)| {
            let spec = SpaceSpec { ord, potential: pot };
            w_norm_pow(graph, &spike, &spec).map_or(f64::NAN, Real::as_f64)
        })
        .sum()
}

fn check_spike_floor<T: Real>(
    c: &Ctx<'_, T>,
    spec: &HypothesisSpec,
    name: &str,
    ords: &[(OperatorOrder<T>, Potential)],
) -> ConditionResult {
    if c.mode == Mode::System && c.p != c.q {
        return ConditionResult::new(name, Verdict::NotChecked, "requires p = q");
    }
    let (Some(l), Some(delta)) = (&spec.l, spec.delta) else {
        return ConditionResult::new(name, Verdict::NotChecked, "needs L and delta");
    };
    if l.len() != c.graph.len() {
        return ConditionResult::new(name, Verdict::Inconclusive, "L table does not match the graph");
    }
    let x0 = match spec.spike_vertex(c.graph) {
        Ok(x) => x,
        Err(e) => return ConditionResult::new(name, Verdict::Inconclusive, e.to_string()),
    };
    let p = c.p;
    let lx0 = l[x0];
    let mu0 = c.graph.mu()[x0].as_f64();
    let needed = spike_norms_pow(c.graph, x0, ords) / p;
    let mut failures = Vec::new();
    let mut witness = None;
    if !(lx0 > 0.0) {
        failures.push(format!("L(x0) = {lx0} is not positive"));
    }
    if !(mu0 * lx0 > needed) {
        failures.push(format!("mu(x0) L(x0) = {:.6e} does not exceed {:.6e}", mu0 * lx0, needed));
    }
    let mut ts: Vec<f64> = (1..=c.cfg.floor_points)
        .map(|k| delta * k as f64 / (c.cfg.floor_points + 1) as f64)
        .collect();
    ts.extend((1..=20).map(|j| delta * 0.5f64.powi(j)));
    // Single-vertex inequality for the system, every vertex for the single unknown.
    let vertices: Vec<usize> = match c.mode {
        Mode::System => vec![x0],
        Mode::Scalar => (0..c.graph.len()).collect(),
    };
    let mut samples = 0;
    'outer: for &x in &vertices {
        for &w in &c.ws {
            for &t in &ts {
                samples += 1;
                let s = if c.mode == Mode::System { t } else { 0.0 };
                match c.eval(Which::F, x, t, s, w) {
                    Err(e) => {
                        return ConditionResult::new(name, Verdict::Inconclusive, "evaluation failed")
                            .with_witness(Some(c.witness(x, t, s, w, f64::NAN, e.message)))
                    }
                    Ok(f) => {
                        let floor = lx0 * t.powf(p);
                        if violates(floor, f, c.cfg.rel_tol) {
                            failures.push(format!("F < L(x0) t^p at t = {t:.3e}"));
                            witness = Some(c.witness(x, t, s, w, f - floor, "F - L(x0) t^p < 0"));
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    let vertex = &c.graph.ids()[x0];
    let mut out = if failures.is_empty() {
        ConditionResult::new(name, Verdict::Pass, format!("x0 = {vertex}: all three requirements hold"))
    } else {
        ConditionResult::new(name, Verdict::Fail, format!("x0 = {vertex}: {}", failures.join("; ")))
            .with_witness(witness)
    };
    out.samples = samples;
    out
}

fn check_radial_sign<T: Real>(c: &Ctx<'_, T>, name: &str) -> ConditionResult {
    let rad = c.cfg.box_radius;
    let axis = linspace(-rad, rad, c.cfg.box_points);
    let second: Vec<f64> = if c.mode == Mode::System { axis.clone() } else { vec![0.0] };
    let mut violations = 0usize;
    let mut samples = 0usize;
    let mut witness = None;
    for x in 0..c.graph.len() {
        for &w in &c.ws {
            for &t in &axis {
                for &s in &second {
                    if t == 0.0 && s == 0.0 {
                        continue;
                    }
                    samples += 1;
                    match c.radial(x, t, s, w) {
                        Err(e) => {
                            return ConditionResult::new(name, Verdict::Inconclusive, "evaluation failed")
                                .with_witness(Some(c.witness(x, t, s, w, f64::NAN, e.message)))
                        }
                        Ok(v) if !(v < 0.0) => {
                            violations += 1;
                            if witness.is_none() {
                                witness = Some(c.witness(x, t, s, w, v, "radial derivative >= 0"));
                            }
                        }
                        Ok(_) => {}
                    }
                }
            }
        }
    }
    let detail = format!("{violations} violations among {samples} nontrivial box samples");
    let mut out = if violations == 0 {
        ConditionResult::new(name, Verdict::Pass, detail)
    } else {
        ConditionResult::new(name, Verdict::Fail, detail).with_witness(witness)
    };
    out.samples = samples;
    out
}

/// Screens the Lipschitz-type bounds on `F_u`, `F_v` for all pairs inside the given radius.
pub fn check_lipschitz_bounds<T: Real>(
    nl: &Nonlinearity<T>,
    graph: &WeightedGraph<T>,
    spec: &HypothesisSpec,
    p: f64,
    radius: f64,
    cfg: &SamplingConfig,
) -> ConditionResult {
    let name = "H5";
    let (Some(d1), Some(d2)) = (spec.d1, spec.d2) else {
        return ConditionResult::new(name, Verdict::NotChecked, "needs d1 and d2");
    };
    let c = Ctx {
        nl,
        graph,
        cfg,
        mode: Mode::System,
        p,
        q: p,
        ws: spec.j.samples(cfg.w_samples),
        dirs: Vec::new(),
    };
    let grid = linspace(-radius, radius, cfg.lipschitz_points.max(2));
    let mut pairs = Vec::new();
    for &a in &grid {
        for &b in &grid {
            if a * a + b * b <= radius * radius * (1.0 + 1e-12) {
                pairs.push((a, b));
            }
        }
    }
    let mut samples = 0;
    for x in 0..graph.len() {
        for &w in &c.ws {
            for &(t1, t2) in &pairs {
                for &(s1, s2) in &pairs {
                    samples += 1;
                    let fu = c.eval(Which::Fu, x, t2, s2, w).and_then(|a| Ok(a - c.eval(Which::Fu, x, t1, s1, w)?));
                    let fv = c.eval(Which::Fv, x, t2, s2, w).and_then(|a| Ok(a - c.eval(Which::Fv, x, t1, s1, w)?));
                    let (du, dv) = match (fu, fv) {
                        (Ok(a), Ok(b)) => (a.abs(), b.abs()),
                        (Err(e), _) | (_, Err(e)) => {
                            return ConditionResult::new(name, Verdict::Inconclusive, "evaluation failed")
                                .with_witness(Some(c.witness(x, t2, s2, w, f64::NAN, e.message)))
                        }
                    };
                    let bu = d1 * (t2 - t1).abs().powf(p - 1.0);
                    let bv = d2 * (s2 - s1).abs().powf(p - 1.0);
                    let slack = |b: f64| b * cfg.rel_tol + 1e-13;
                    if du > bu + slack(bu) {
                        return ConditionResult::new(name, Verdict::Fail, format!("|F_u difference| exceeds d1 |dt|^(p-1) within radius {radius:.6e}"))
                            .with_witness(Some(c.witness(x, t2, s2, w, du - bu, format!("pair t1={t1}, s1={s1}"))));
                    }
                    if dv > bv + slack(bv) {
                        return ConditionResult::new(name, Verdict::Fail, format!("|F_v difference| exceeds d2 |ds|^(p-1) within radius {radius:.6e}"))
                            .with_witness(Some(c.witness(x, t2, s2, w, dv - bv, format!("pair t1={t1}, s1={s1}"))));
                    }
                }
            }
        }
    }
    let mut out = ConditionResult::new(name, Verdict::Pass, format!("bounds hold on all sampled pairs within radius {radius:.6e}"));
    out.samples = samples;
    out
}

fn build_ctx<'a, T: Real>(
    nl: &'a Nonlinearity<T>,
    graph: &'a WeightedGraph<T>,
    spec: &HypothesisSpec,
    cfg: &'a SamplingConfig,
    mode: Mode,
    p: f64,
    q: f64,
) -> Ctx<'a, T> {
    Ctx {
        nl,
        graph,
        cfg,
        mode,
        p,
        q,
        ws: spec.j.samples(cfg.w_samples),
        dirs: directions(mode, cfg.angles),
    }
}

/// Screens every hypothesis of the coupled system whose constants are available.
pub fn check_hypotheses<T: Real>(
    nl: &Nonlinearity<T>,
    spec: &HypothesisSpec,
    graph: &WeightedGraph<T>,
    ord1: &OperatorOrder<T>,
    ord2: &OperatorOrder<T>,
    cfg: &SamplingConfig,
) -> HypothesisReport {
    let (p, q) = (ord1.s().as_f64(), ord2.s().as_f64());
    let c = build_ctx(nl, graph, spec, cfg, Mode::System, p, q);
    let mut report = HypothesisReport::default();
    for bad in spec.check_ranges(p, q) {
        report.notes.push(format!("constant out of range: {bad}"));
    }
    report.conditions.push(check_vanishing(&c, "F1"));
    let threshold = embedding_constants(graph, ord1.s(), ord2.s()).map_or(f64::NAN, |e| e.growth_threshold().as_f64());
    report.conditions.push(check_small_growth(&c, "F2", threshold));
    report.conditions.push(check_superlinear(&c, "F3"));
    report.conditions.push(check_radial_excess(&c, "F4", spec.gamma1.unwrap_or(p), spec.gamma2.unwrap_or(q)));
    report.conditions.push(match spec.theta {
        Some(theta) if theta > p.max(q) => check_inequality(
            &c,
            "H1",
            &format!("theta F <= F_t t + F_s s with theta = {theta}"),
            |x, t, s, w| Ok(theta * c.eval(Which::F, x, t, s, w)?),
            |x, t, s, w| c.radial(x, t, s, w),
        ),
        Some(theta) => ConditionResult::new("H1", Verdict::Fail, format!("theta = {theta} must exceed max(p,q)")),
        None => ConditionResult::new("H1", Verdict::NotChecked, "theta not provided"),
    });
    report.conditions.push(match (spec.c1, spec.c2, spec.r1, spec.r2) {
        (Some(c1), Some(c2), Some(r1), Some(r2)) if r1.min(r2) > p.max(q) => check_inequality(
            &c,
            "H2",
            &format!("F_t t + F_s s <= {c1} |t|^{r1} + {c2} |s|^{r2}"),
            |x, t, s, w| c.radial(x, t, s, w),
            |_, t, s, _| Ok(c1 * t.abs().powf(r1) + c2 * s.abs().powf(r2)),
        ),
        (Some(_), Some(_), Some(r1), Some(r2)) => {
            ConditionResult::new("H2", Verdict::Fail, format!("min(r1,r2) = {} must exceed max(p,q)", r1.min(r2)))
        }
        _ => ConditionResult::new("H2", Verdict::NotChecked, "c1, c2, r1, r2 not all provided"),
    });
    report.conditions.push(check_floor(&c, spec, "H3"));
    report.conditions.push(check_spike_floor(
        &c,
        spec,
        "H4",
        &[(*ord1, Potential::H1), (*ord2, Potential::H2)],
    ));
    report.conditions.push(match cfg.lipschitz_radius {
        Some(r) if p == q => check_lipschitz_bounds(nl, graph, spec, p, r, cfg),
        Some(_) => ConditionResult::new("H5", Verdict::NotChecked, "requires p = q"),
        None => ConditionResult::new("H5", Verdict::NotChecked, "radius comes from the local-minimum certificate"),
    });
    report.conditions.push(check_radial_sign(&c, "radial-sign"));
    report.notes.push(
        "H4 is screened at the single vertex x0 as stated for the system; the single-unknown variant is stated for every vertex"
            .into(),
    );
    report
}

/// Screens the single-unknown hypotheses; `nl` must not depend on `v`.
pub fn check_scalar_hypotheses<T: Real>(
    nl: &Nonlinearity<T>,
    spec: &HypothesisSpec,
    graph: &WeightedGraph<T>,
    ord: &OperatorOrder<T>,
    cfg: &SamplingConfig,
) -> HypothesisReport {
    let p = ord.s().as_f64();
    let c = build_ctx(nl, graph, spec, cfg, Mode::Scalar, p, p);
    let mut report = HypothesisReport::default();
    for bad in spec.check_ranges(p, p) {
        report.notes.push(format!("constant out of range: {bad}"));
    }
    report.conditions.push(check_vanishing(&c, "F'1"));
    let threshold = embedding_constants(graph, ord.s(), ord.s()).map_or(f64::NAN, |e| {
        (T::one() / (e.p * e.k1.powf(e.p))).as_f64()
    });
    report.conditions.push(check_small_growth(&c, "F'2", threshold));
    report.conditions.push(check_superlinear(&c, "F'3"));
    report.conditions.push(check_radial_excess(&c, "F'4", spec.gamma1.unwrap_or(p), 1.0));
    report.conditions.push(match spec.theta {
        Some(theta) if theta > p => check_inequality(
            &c,
            "H'1",
            &format!("theta F <= f t with theta = {theta}"),
            |x, t, s, w| Ok(theta * c.eval(Which::F, x, t, s, w)?),
            |x, t, s, w| c.radial(x, t, s, w),
        ),
        Some(theta) => ConditionResult::new("H'1", Verdict::Fail, format!("theta = {theta} must exceed p")),
        None => ConditionResult::new("H'1", Verdict::NotChecked, "theta not provided"),
    });
    report.conditions.push(match (spec.c1, spec.r1) {
        (Some(c1), Some(r1)) if r1 > p => check_inequality(
            &c,
            "H'2",
            &format!("f t <= {c1} |t|^{r1}"),
            |x, t, s, w| c.radial(x, t, s, w),
            |_, t, _, _| Ok(c1 * t.abs().powf(r1)),
        ),
        (Some(_), Some(r1)) => ConditionResult::new("H'2", Verdict::Fail, format!("r1 = {r1} must exceed p")),
        _ => ConditionResult::new("H'2", Verdict::NotChecked, "c1, r1 not provided"),
    });
    report.conditions.push(check_floor(&c, spec, "H'3"));
    report
        .conditions
        .push(check_spike_floor(&c, spec, "H'4", &[(*ord, Potential::H1)]));
    report.conditions.push(check_radial_sign(&c, "radial-sign"));
    report.notes.push(
        "H'4 is screened at every vertex as stated for the single unknown; the system variant is stated only at x0".into(),
    );
    report
}

/// Continuity screening of a control objective; with `convex_in_w` also sampled midpoint
/// convexity of `w -> g(x,u,w)`.
pub fn check_continuity<T: Real>(
    g: &Nonlinearity<T>,
    graph: &WeightedGraph<T>,
    spec: &HypothesisSpec,
    cfg: &SamplingConfig,
    convex_in_w: bool,
) -> ConditionResult {
    let name = if convex_in_w { "G'" } else { "G" };
    if g.f().uses_func(Func::Sign) {
        return ConditionResult::new(name, Verdict::Fail, "objective uses sign(), which is discontinuous");
    }
    if !convex_in_w {
        return ConditionResult::new(name, Verdict::Pass, "objective built from continuous primitives");
    }
    let c = build_ctx(g, graph, spec, cfg, Mode::Scalar, 2.0, 2.0);
    let us = linspace(-cfg.box_radius, cfg.box_radius, 17);
    let mut samples = 0;
    for x in 0..graph.len() {
        for &u in &us {
            for (i, &w1) in c.ws.iter().enumerate() {
                for &w2 in &c.ws[i + 1..] {
                    samples += 1;
                    let mid = 0.5 * (w1 + w2);
                    let vals = (
                        c.eval(Which::F, x, u, 0.0, mid),
                        c.eval(Which::F, x, u, 0.0, w1),
                        c.eval(Which::F, x, u, 0.0, w2),
                    );
                    match vals {
                        (Ok(m), Ok(a), Ok(b)) => {
                            if violates(m, 0.5 * (a + b), cfg.rel_tol) {
                                return ConditionResult::new(name, Verdict::Fail, "midpoint convexity in w violated")
                                    .with_witness(Some(c.witness(x, u, 0.0, mid, m - 0.5 * (a + b), format!("w1={w1}, w2={w2}"))));
                            }
                        }
                        (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => {
                            return ConditionResult::new(name, Verdict::Inconclusive, "evaluation failed")
                                .with_witness(Some(c.witness(x, u, 0.0, mid, f64::NAN, e.message)))
                        }
                    }
                }
            }
        }
    }
    let mut out = ConditionResult::new(name, Verdict::PassSampled, "continuous primitives; midpoint convex in w on samples");
    out.samples = samples;
    out
}
