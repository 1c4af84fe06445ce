//! A-priori norm bounds for mountain-pass and local-minimum solutions.

use serde::Serialize;

use crate::energy::ProblemInstance;
use crate::error::{Error, Result};
use crate::graph::Potential;
use crate::real::{linspace, signed_pow, Real};
use crate::sobolev::embedding_constants;

/// Lower/upper norm bounds with every intermediate quantity that produced them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCertificate {
    pub lower_label: String,
    pub upper_label: String,
    pub lower: f64,
    pub upper: f64,
    /// A1..A6 for the coupled mountain-pass bounds, empty otherwise.
    pub a: Vec<f64>,
    pub m: Option<f64>,
    pub e0: Option<f64>,
    pub endpoint: Option<Vec<f64>>,
    pub t0: Option<f64>,
    pub rho: Option<f64>,
    pub rho_estimated: bool,
    pub delta: Option<f64>,
    pub x0: Option<String>,
    pub norm: f64,
    pub satisfied: bool,
    pub notes: Vec<String>,
}

impl BoundCertificate {
    fn new(lower_label: &str, upper_label: &str, lower: f64, upper: f64, norm: f64) -> Self {
        // one ulp-scale slack for the comparison, nothing more
        let slack = 1e-12 * upper.abs().max(1.0);
        Self {
            lower_label: lower_label.into(),
            upper_label: upper_label.into(),
            lower,
            upper,
            a: Vec::new(),
            m: None,
            e0: None,
            endpoint: None,
            t0: None,
            rho: None,
            rho_estimated: false,
            delta: None,
            x0: None,
            norm,
            satisfied: lower - slack <= norm && norm <= upper + slack,
            notes: Vec::new(),
        }
    }
}

/// Inputs of the coupled mountain-pass bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MpInputs {
    pub p: f64,
    pub q: f64,
    pub theta: f64,
    pub c1: f64,
    pub c2: f64,
    pub r1: f64,
    pub r2: f64,
    /// Sup-norm embedding constants of the two factors.
    pub b: f64,
    pub d: f64,
    /// Total measure `|V|`.
    pub volume: f64,
    /// Energy proxy `||u0||^p / p + ||v0||^q / q` of the negative endpoint.
    pub e0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MpConstants {
    pub a: [f64; 6],
    pub m: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Lower bound `C1 = min(A1, A2)` and upper bound `C2 = max(A3..A6)` of mountain-pass
/// solution norms.
pub fn mp_constants(i: &MpInputs) -> Result<MpConstants> {
    let (p, q) = (i.p, i.q);
    let rmin = i.r1.min(i.r2);
    let rmax = i.r1.max(i.r2);
    let big = p.max(q);
    if !(rmin > big) {
        return Err(Error::Hypothesis(format!("need min(r1, r2) > max(p, q), got r1={}, r2={}", i.r1, i.r2)));
    }
    if !(i.theta > big) {
        return Err(Error::Hypothesis(format!("need theta > max(p, q), got theta={}", i.theta)));
    }
    if !(i.c1 > 0.0 && i.c2 > 0.0) {
        return Err(Error::Hypothesis("c1 and c2 must be positive".into()));
    }
    if !(i.e0 > 0.0) {
        return Err(Error::Hypothesis(format!("endpoint energy proxy must be positive, got {}", i.e0)));
    }
    let m = i.c1.max(i.c2) * i.b.powf(i.r1).max(i.d.powf(i.r2));
    let vm = i.volume * m;
    let a1 = (1.0 / (2f64.powf(p) * vm))
        .powf(1.0 / (rmax - q))
        .min((1.0 / (2f64.powf(p - 1.0) * vm)).powf(1.0 / (rmin - p)));
    let a2 = (1.0 / (2f64.powf(q) * vm))
        .powf(1.0 / (rmax - p))
        .min((1.0 / (2f64.powf(q - 1.0) * vm)).powf(1.0 / (rmin - q)));
    let base_p = p * i.theta * 2f64.powf(p - 1.0) * i.e0 / (i.theta - p);
    let base_q = q * i.theta * 2f64.powf(q - 1.0) * i.e0 / (i.theta - q);
    let a = [a1, a2, base_p.powf(1.0 / p), base_p.powf(1.0 / q), base_q.powf(1.0 / q), base_q.powf(1.0 / p)];
    Ok(MpConstants {
        a,
        m,
        lower: a1.min(a2),
        upper: a[2].max(a[3]).max(a[4]).max(a[5]),
    })
}

/// Single-unknown lower bound `(1 / (2^p |V| c b^r))^(1/(r-p))`.
pub fn scalar_lower(p: f64, r: f64, c: f64, b: f64, volume: f64) -> Result<f64> {
    if !(r > p) {
        return Err(Error::Hypothesis(format!("need r > p, got r={r}, p={p}")));
    }
    if !(c > 0.0) {
        return Err(Error::Hypothesis("c must be positive".into()));
    }
    Ok((1.0 / (2f64.powf(p) * volume * c * b.powf(r))).powf(1.0 / (r - p)))
}

/// Single-unknown upper bound `(theta 2^(p-1) ||u0||^p / (theta - p))^(1/p)`.
pub fn scalar_upper(p: f64, theta: f64, u0_norm_pow: f64) -> Result<f64> {
    if !(theta > p) {
        return Err(Error::Hypothesis(format!("need theta > p, got theta={theta}")));
    }
    Ok((theta * 2f64.powf(p - 1.0) * u0_norm_pow / (theta - p)).powf(1.0 / p))
}

/// Upper bound of local minimizers started from `t0 (spike, spike)`:
/// `(theta 2^(p-1) t0^p (||u*||^p + ||v*||^p) / (p (theta - p)))^(1/p)`.
pub fn local_min_upper(p: f64, theta: f64, t0: f64, spike_norm_pows: f64) -> Result<f64> {
    if !(theta > p) {
        return Err(Error::Hypothesis(format!("need theta > p, got theta={theta}")));
    }
    Ok((theta * 2f64.powf(p - 1.0) * t0.powf(p) * spike_norm_pows / (p * (theta - p))).powf(1.0 / p))
}

/// Single-unknown version: `(theta 2^(p-1) t0^p ||u*||^p / (theta - p))^(1/p)`.
pub fn scalar_local_min_upper(p: f64, theta: f64, t0: f64, spike_norm_pow: f64) -> Result<f64> {
    if !(theta > p) {
        return Err(Error::Hypothesis(format!("need theta > p, got theta={theta}")));
    }
    Ok((theta * 2f64.powf(p - 1.0) * t0.powf(p) * spike_norm_pow / (theta - p)).powf(1.0 / p))
}

/// Sup-norm embedding constant of the instance's first factor (its own potential in
/// single-unknown mode) and the second factor.
fn embeddings<T: Real>(inst: &ProblemInstance<T>) -> Result<(f64, f64, f64)> {
    let ec = embedding_constants(inst.graph(), inst.p(), inst.q())?;
    let b = if inst.is_scalar() && inst.space1().potential == Potential::H2 {
        // same exponent, other potential
        (T::one() / (ec.mu_min * ec.h2_min)).powf(inst.p().recip())
    } else {
        ec.b
    };
    Ok((b.as_f64(), ec.d.as_f64(), ec.volume.as_f64()))
}

/// Mountain-pass bounds for a solution of norm `norm`, given the negative endpoint used.
pub fn bound_certificate_mp<T: Real>(inst: &ProblemInstance<T>, endpoint: &[T], norm: f64) -> Result<BoundCertificate> {
    let spec = inst.spec();
    let (b, d, volume) = embeddings(inst)?;
    let p = inst.p().as_f64();
    let (np, nq) = inst.component_norm_pows(endpoint);
    let (np, nq) = (np.as_f64(), nq.as_f64());
    let theta = spec.theta()?;
    let mut cert = if inst.is_scalar() {
        let lower = scalar_lower(p, spec.r1()?, spec.c1()?, b, volume)?;
        let upper = scalar_upper(p, theta, np)?;
        BoundCertificate::new("C'1", "C'2", lower, upper, norm)
    } else {
        let q = inst.q().as_f64();
        let inputs = MpInputs {
            p,
            q,
            theta,
            c1: spec.c1()?,
            c2: spec.c2()?,
            r1: spec.r1()?,
            r2: spec.r2()?,
            b,
            d,
            volume,
            e0: np / p + nq / q,
        };
        let k = mp_constants(&inputs)?;
        let mut c = BoundCertificate::new("C1", "C2", k.lower, k.upper, norm);
        c.a = k.a.to_vec();
        c.m = Some(k.m);
        c.e0 = Some(inputs.e0);
        c
    };
    cert.endpoint = Some(endpoint.iter().map(|x| x.as_f64()).collect());
    Ok(cert)
}

/// Local-minimum bounds: lower `rho` (ball radius, the inner bound of the construction is
/// reported as C3/C'3), upper from the spike start `t0`.
pub fn bound_certificate_min<T: Real>(
    inst: &ProblemInstance<T>,
    x0: usize,
    t0: f64,
    rho: f64,
    norm: f64,
) -> Result<BoundCertificate> {
    let spec = inst.spec();
    let (b, d, volume) = embeddings(inst)?;
    let p = inst.p().as_f64();
    let theta = spec.theta()?;
    let spike = inst.spike(x0);
    let (sp, sq) = inst.component_norm_pows(&spike);
    let mut cert = if inst.is_scalar() {
        let lower = scalar_lower(p, spec.r1()?, spec.c1()?, b, volume)?;
        let upper = scalar_local_min_upper(p, theta, t0, sp.as_f64())?;
        BoundCertificate::new("C'3", "C'4", lower, upper, norm)
    } else {
        if inst.p() != inst.q() {
            return Err(Error::Hypothesis("local-minimum bounds need p = q".into()));
        }
        // the lower bound is the equal-exponent case of the mountain-pass lower bound;
        // the endpoint-energy term does not enter it, so any positive proxy works
        let inputs = MpInputs {
            p,
            q: p,
            theta,
            c1: spec.c1()?,
            c2: spec.c2()?,
            r1: spec.r1()?,
            r2: spec.r2()?,
            b,
            d,
            volume,
            e0: 1.0,
        };
        let k = mp_constants(&inputs)?;
        let upper = local_min_upper(p, theta, t0, (sp + sq).as_f64())?;
        let mut c = BoundCertificate::new("C3", "C4", k.lower, upper, norm);
        c.m = Some(k.m);
        c
    };
    cert.t0 = Some(t0);
    cert.rho = Some(rho);
    cert.delta = spec.delta;
    cert.x0 = Some(inst.graph().ids()[x0].clone());
    if !(norm <= rho) {
        cert.notes.push(format!("solution norm {norm:.6e} is not inside the ball of radius {rho:.6e}"));
    }
    Ok(cert)
}

/// Sampled check of `(|a|^(p-2) a - |b|^(p-2) b)(a - b) >= C_p |a - b|^p`, `C_p = 2^(2-p)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityCheck {
    pub p: f64,
    pub constant: f64,
    /// Smallest observed ratio of the two sides.
    pub min_ratio: f64,
    pub samples: usize,
    pub holds: bool,
}

pub fn monotonicity_check(p: f64, points: usize, radius: f64) -> MonotonicityCheck {
    let constant = 2f64.powf(2.0 - p);
    let grid = linspace(-radius, radius, points.max(2));
    let mut min_ratio = f64::INFINITY;
    let mut samples = 0;
    for &a in &grid {
        for &b in &grid {
            let gap = (a - b).abs();
            if gap < 1e-12 * radius {
                continue;
            }
            samples += 1;
            let lhs = (signed_pow(a, p) - signed_pow(b, p)) * (a - b);
            min_ratio = min_ratio.min(lhs / gap.powf(p));
        }
    }
    MonotonicityCheck {
        p,
        constant,
        min_ratio,
        samples,
        holds: min_ratio >= constant * (1.0 - 1e-12),
    }
}
