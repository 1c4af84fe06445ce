//! Mountain-pass critical points: a discretized path is relaxed until its highest node is
//! near a saddle, then min-mode following polishes that node to the requested residual.

use log::{debug, info};

use super::{
    axpy, bound_certificate_mp, diff, finish_status, scaled, uniform_grid, Counted, SolveReport, SolverConfig,
    SolverKind,
};
use crate::energy::ProblemInstance;
use crate::error::{Error, Result};
use crate::real::Real;

/// Finds `t (spike, spike)` with negative energy at every parameter in `ws`, doubling `t`
/// from 1 at most `max_doublings` times.
pub fn negative_endpoint<T: Real>(inst: &ProblemInstance<T>, ws: &[T], max_doublings: usize) -> Result<Vec<T>> {
    let x0 = inst.spec().spike_vertex(inst.graph())?;
    let spike = inst.spike(x0);
    let insts = ws.iter().map(|&w| inst.with_parameter(w)).collect::<Result<Vec<_>>>()?;
    let mut t = T::one();
    let mut last = String::new();
    for _ in 0..=max_doublings {
        let x = scaled(t, &spike);
        let mut all = true;
        for i in &insts {
            match i.energy(&x) {
                Ok(e) if e < T::zero() => {}
                Ok(e) => {
                    last = format!("energy {e} at t = {t}, w = {}", i.w());
                    all = false;
                    break;
                }
                Err(err) => {
                    last = err.to_string();
                    all = false;
                    break;
                }
            }
        }
        if all {
            debug!("negative endpoint at t = {t}");
            return Ok(x);
        }
        t *= T::two();
    }
    Err(Error::NoNegativeEndpoint(format!(
        "no negative energy along the spike at `{}` after {max_doublings} doublings ({last})",
        inst.graph().ids()[x0]
    )))
}

/// Mountain-pass solve with an endpoint valid for every sampled parameter in `J`.
pub fn mountain_pass_solve<T: Real>(inst: &ProblemInstance<T>, cfg: &SolverConfig) -> Result<SolveReport<T>> {
    let ws = uniform_grid(inst, cfg.uniform_grid);
    let endpoint = negative_endpoint(inst, &ws, cfg.max_doublings)?;
    mountain_pass_with_endpoint(inst, &endpoint, None, cfg)
}

/// Mountain-pass solve for a given negative endpoint; `warm` skips path relaxation and
/// polishes directly from a nearby state.
pub fn mountain_pass_with_endpoint<T: Real>(
    inst: &ProblemInstance<T>,
    endpoint: &[T],
    warm: Option<&[T]>,
    cfg: &SolverConfig,
) -> Result<SolveReport<T>> {
    if endpoint.len() != inst.dim() {
        return Err(Error::DimensionMismatch { expected: inst.dim(), found: endpoint.len() });
    }
    let f = Counted::new(inst);
    let e_end = f.energy(endpoint)?;
    if !(e_end < T::zero()) {
        return Err(Error::NoNegativeEndpoint(format!("endpoint energy {e_end} is not negative")));
    }
    let (start, tangent, path_iters) = match warm {
        Some(x) => {
            if x.len() != inst.dim() {
                return Err(Error::DimensionMismatch { expected: inst.dim(), found: x.len() });
            }
            (x.to_vec(), x.to_vec(), 0)
        }
        None => relax_path(&f, endpoint, cfg)?,
    };
    let mut flags = Vec::new();
    let polished = polish(&f, start, tangent, cfg)?;
    let iterations = path_iters + polished.iterations;
    let x = polished.x;
    let energy = f.energy(&x)?;
    let norm = inst.norm(&x);
    let converged = polished.residual <= T::of(cfg.tol);
    let status = finish_status(SolverKind::MountainPass, converged, energy, norm, cfg.trivial_norm, false);
    if energy <= T::zero() && converged {
        flags.push("type-uncertain: converged to a critical point with non-positive energy".into());
    }
    if norm.as_f64() < cfg.trivial_norm {
        flags.push("trivial: converged to the zero state".into());
    }
    if polished.lambda >= T::zero() {
        flags.push(format!("lowest Hessian eigenvalue estimate {} is not negative", polished.lambda));
    }
    let certificate = match bound_certificate_mp(inst, endpoint, norm.as_f64()) {
        Ok(c) => Some(c),
        Err(e) => {
            flags.push(format!("no certificate: {e}"));
            None
        }
    };
    info!(
        "mountain pass at w = {}: energy {:.6e}, residual {:.3e}, norm {:.6e}, {iterations} iterations",
        inst.w(),
        energy.as_f64(),
        polished.residual.as_f64(),
        norm.as_f64()
    );
    Ok(SolveReport {
        kind: SolverKind::MountainPass,
        w: inst.w().as_f64(),
        state: inst.to_state(&x),
        energy: energy.as_f64(),
        residual: polished.residual.as_f64(),
        norm: norm.as_f64(),
        converged,
        status,
        certificate,
        iterations,
        evaluations: f.evaluations(),
        flags,
    })
}

/// Relaxes the straight path from 0 to `endpoint`; returns the highest node, the local path
/// tangent there and the iteration count.
fn relax_path<T: Real>(f: &Counted<T>, endpoint: &[T], cfg: &SolverConfig) -> Result<(Vec<T>, Vec<T>, usize)> {
    let inst = f.inst;
    let nodes = cfg.path_nodes.max(3);
    let last = T::of_usize(nodes - 1);
    let mut path: Vec<Vec<T>> = (0..nodes).map(|i| scaled(T::of_usize(i) / last, endpoint)).collect();
    let mut energies = path.iter().map(|x| f.energy(x)).collect::<Result<Vec<_>>>()?;
    let mut step = T::one();
    let c = T::of(cfg.armijo);
    let mut it = 0;
    while it < cfg.path_iter {
        let k = peak(&energies);
        if !(energies[k] > T::zero()) {
            return Err(Error::Solver("path has no positive energy barrier between 0 and the endpoint".into()));
        }
        let g = f.gradient(&path[k])?;
        let gn = inst.metric_norm(&g);
        if gn <= T::of(cfg.path_tol) * T::one().max(inst.metric_norm(&path[k])) {
            break;
        }
        // move the peak perpendicular to the path only, never further than a node spacing
        let tau = diff(&path[k + 1], &path[k - 1]);
        let spacing = inst.metric_norm(&tau) / T::two();
        let perp = match normalize(inst, &tau) {
            Some(t) => axpy(-inst.inner(&g, &t), &t, &g),
            None => g.clone(),
        };
        let pn2 = inst.inner(&perp, &perp);
        let pn = pn2.sqrt();
        if !(pn > T::zero()) {
            break;
        }
        let mut a = (step * T::two()).min(spacing / pn);
        let mut accepted = false;
        for _ in 0..60 {
            let trial = axpy(-a, &perp, &path[k]);
            if let Ok(et) = f.energy(&trial) {
                if et <= energies[k] - c * a * pn2 {
                    path[k] = trial;
                    energies[k] = et;
                    accepted = true;
                    break;
                }
            }
            a /= T::two();
        }
        it += 1;
        if !accepted {
            debug!("path relaxation stalled at iteration {it}");
            break;
        }
        step = a;
        if it % cfg.reparam_every.max(1) == 0 || uneven(inst, &path) {
            reparametrize(inst, &mut path);
            energies = path.iter().map(|x| f.energy(x)).collect::<Result<Vec<_>>>()?;
        }
    }
    let k = peak(&energies);
    let tangent = diff(&path[k + 1], &path[k - 1]);
    debug!("path relaxed in {it} iterations, peak energy {}", energies[k]);
    Ok((path[k].clone(), tangent, it))
}

fn peak<T: Real>(energies: &[T]) -> usize {
    let mut k = 1;
    for i in 1..energies.len() - 1 {
        if energies[i] > energies[k] {
            k = i;
        }
    }
    k
}

fn segment_lengths<T: Real>(inst: &ProblemInstance<T>, path: &[Vec<T>]) -> Vec<T> {
    path.windows(2).map(|w| inst.metric_norm(&diff(&w[1], &w[0]))).collect()
}

fn uneven<T: Real>(inst: &ProblemInstance<T>, path: &[Vec<T>]) -> bool {
    let seg = segment_lengths(inst, path);
    let lo = seg.iter().copied().fold(T::infinity(), T::min);
    let hi = seg.iter().copied().fold(T::zero(), T::max);
    hi > T::of(4.0) * lo
}

/// Redistributes interior nodes at equal μ-arclength along the polygonal path.
fn reparametrize<T: Real>(inst: &ProblemInstance<T>, path: &mut [Vec<T>]) {
    let seg = segment_lengths(inst, path);
    let mut cum = vec![T::zero()];
    for s in &seg {
        let next = *cum.last().unwrap() + *s;
        cum.push(next);
    }
    let total = *cum.last().unwrap();
    if !(total > T::zero()) {
        return;
    }
    let old = path.to_vec();
    let n = path.len();
    let mut j = 0;
    for (i, node) in path.iter_mut().enumerate().take(n - 1).skip(1) {
        let target = total * T::of_usize(i) / T::of_usize(n - 1);
        while j + 1 < n - 1 && cum[j + 1] < target {
            j += 1;
        }
        let len = cum[j + 1] - cum[j];
        let lam = if len > T::zero() { (target - cum[j]) / len } else { T::zero() };
        *node = old[j].iter().zip(&old[j + 1]).map(|(&a, &b)| a + lam * (b - a)).collect();
    }
}

struct Polished<T> {
    x: Vec<T>,
    residual: T,
    lambda: T,
    iterations: usize,
}

/// Finite-difference Hessian-vector product with a central stencil.
fn hess_vec<T: Real>(f: &Counted<T>, x: &[T], v: &[T]) -> Result<Vec<T>> {
    let inst = f.inst;
    let vn = inst.metric_norm(v);
    if !(vn > T::zero()) {
        return Ok(vec![T::zero(); v.len()]);
    }
    let eps = T::epsilon().cbrt() * (T::one() + inst.metric_norm(x)) / vn;
    let gp = f.gradient(&axpy(eps, v, x))?;
    let gm = f.gradient(&axpy(-eps, v, x))?;
    Ok(gp.iter().zip(&gm).map(|(&a, &b)| (a - b) / (T::two() * eps)).collect())
}

fn normalize<T: Real>(inst: &ProblemInstance<T>, v: &[T]) -> Option<Vec<T>> {
    let n = inst.metric_norm(v);
    (n > T::zero() && n.is_finite()).then(|| scaled(n.recip(), v))
}

/// Lowest Hessian eigenpair in the μ-metric by two-dimensional Rayleigh–Ritz iterations
/// (steepest descent on the Rayleigh quotient), warm-started from `tau`.
fn lowest_mode<T: Real>(f: &Counted<T>, x: &[T], tau: Vec<T>, iters: usize) -> Result<(Vec<T>, T)> {
    let inst = f.inst;
    let mut tau = normalize(inst, &tau).unwrap_or_else(|| {
        let mut e = vec![T::zero(); x.len()];
        e[0] = T::one();
        normalize(inst, &e).expect("unit vector")
    });
    let mut ht = hess_vec(f, x, &tau)?;
    let mut lam = inst.inner(&tau, &ht);
    for _ in 0..iters {
        let r = axpy(-lam, &tau, &ht);
        let rn = inst.metric_norm(&r);
        if rn <= T::of(1e-6) * lam.abs().max(T::one()) {
            break;
        }
        let proj = inst.inner(&r, &tau);
        let Some(rh) = normalize(inst, &axpy(-proj, &tau, &r)) else { break };
        let hr = hess_vec(f, x, &rh)?;
        let a = lam;
        let b = (inst.inner(&tau, &hr) + inst.inner(&rh, &ht)) / T::two();
        let c = inst.inner(&rh, &hr);
        let mid = (a + c) / T::two();
        let rad = (((a - c) / T::two()).powi(2) + b * b).sqrt();
        let low = mid - rad;
        let (y1, y2) = if b.abs() <= T::epsilon() * (a.abs() + c.abs()) {
            if a <= c {
                (T::one(), T::zero())
            } else {
                (T::zero(), T::one())
            }
        } else {
            let (y1, y2) = (b, low - a);
            let n = (y1 * y1 + y2 * y2).sqrt();
            (y1 / n, y2 / n)
        };
        tau = tau.iter().zip(&rh).map(|(&t, &r)| y1 * t + y2 * r).collect();
        ht = ht.iter().zip(&hr).map(|(&t, &r)| y1 * t + y2 * r).collect();
        lam = low;
    }
    Ok((tau, lam))
}

/// Min-mode following: the force reflected along the lowest mode turns an index-one saddle
/// into an attractor; Barzilai–Borwein steps with a length cap and resets on blow-up.
fn polish<T: Real>(f: &Counted<T>, start: Vec<T>, tangent: Vec<T>, cfg: &SolverConfig) -> Result<Polished<T>> {
    let inst = f.inst;
    let tol = T::of(cfg.tol);
    let mut x = start;
    let mut g = f.gradient(&x)?;
    let (mut tau, mut lam) = lowest_mode(f, &x, tangent, 50)?;
    let mut res = inst.metric_norm(&g);
    let mut best = (x.clone(), res, lam);
    let max_step = T::of(0.1) * (T::one() + inst.metric_norm(&x));
    let mut alpha = T::one() / lam.abs().max(T::one());
    let mut prev: Option<(Vec<T>, Vec<T>)> = None;
    let mut it = 0;
    while it < cfg.max_iter {
        if res <= tol {
            break;
        }
        let (t, l) = lowest_mode(f, &x, tau, 4)?;
        tau = t;
        lam = l;
        let gt = inst.inner(&g, &tau);
        let force: Vec<T> = if lam < T::zero() {
            axpy(-T::two() * gt, &tau, &g)
        } else {
            scaled(-gt, &tau)
        };
        if let Some((xp, fp)) = &prev {
            let s = diff(&x, xp);
            let y = diff(&force, fp);
            let sy = inst.inner(&s, &y);
            if sy > T::zero() {
                alpha = inst.inner(&s, &s) / sy;
            }
        }
        let fnorm = inst.metric_norm(&force);
        if !(fnorm > T::zero()) {
            break;
        }
        let a = alpha.min(max_step / fnorm);
        let xn = axpy(-a, &force, &x);
        it += 1;
        let gn = match f.gradient(&xn) {
            Ok(gn) => gn,
            Err(_) => {
                alpha /= T::of(10.0);
                prev = None;
                continue;
            }
        };
        let rn = inst.metric_norm(&gn);
        if !(rn <= T::of(1e3) * best.1.max(tol)) {
            // diverging: restart from the best point with a shorter step
            x = best.0.clone();
            g = f.gradient(&x)?;
            res = best.1;
            alpha /= T::of(10.0);
            prev = None;
            continue;
        }
        prev = Some((x, force));
        x = xn;
        g = gn;
        res = rn;
        if res < best.1 {
            best = (x.clone(), res, lam);
        }
    }
    debug!("polishing: {it} iterations, residual {:.3e}, lowest eigenvalue {}", best.1.as_f64(), best.2);
    Ok(Polished {
        x: best.0,
        residual: best.1,
        lambda: best.2,
        iterations: it,
    })
}
