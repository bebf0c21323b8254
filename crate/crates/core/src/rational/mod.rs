//! Continued fractions, Dirichlet approximation and the minor-arc dichotomy.
//!
//! Convergents of the coefficient ratio drive the scale sequence
//! X = q^(5k/(k+2)); their quality certificates are established in exact
//! arithmetic because the whole minor-arc argument leans on them.

mod parse;
mod surd;

pub use parse::parse_ratio;
pub use surd::QuadraticReal;

use crate::error::{Error, Result};
use crate::form::{CircleParams, FormParams};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{FromPrimitive, One, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use serde::Serialize;
use std::cmp::Ordering;

/// A continued-fraction convergent a/q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergent {
    pub a: BigInt,
    pub q: BigInt,
    pub index: usize,
    /// True when |x - a/q| <= 1/q^2 was verified in exact arithmetic.
    pub certified: bool,
}

impl Convergent {
    pub fn q_f64(&self) -> f64 {
        self.q.to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn a_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::INFINITY)
    }
}

/// Dirichlet approximant: q <= tau with |alpha q - a| <= 1/tau.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DirichletApprox {
    pub a: i64,
    pub q: u64,
    /// |alpha q - a| in double precision.
    pub quality: f64,
}

const MAX_CONVERGENTS: usize = 60;

/// Convergents of an exact quadratic real (or rational), each certified
/// against the 1/q^2 bound. Rational inputs terminate early with the exact
/// value as the final convergent.
pub fn convergents(x: &QuadraticReal, count: usize) -> Result<Vec<Convergent>> {
    if count > MAX_CONVERGENTS {
        return Err(Error::Precondition(format!(
            "requested {count} convergents, cap is {MAX_CONVERGENTS}"
        )));
    }
    let mut out = Vec::with_capacity(count);
    let mut state = x.clone();
    let (mut h_prev, mut h_prev2) = (BigInt::one(), BigInt::zero());
    let (mut k_prev, mut k_prev2) = (BigInt::zero(), BigInt::one());
    for index in 0..count {
        let a = state.floor();
        let h = &a * &h_prev + &h_prev2;
        let k = &a * &k_prev + &k_prev2;
        // certify |x - h/k| <= 1/q^2, i.e. |k x - h| <= 1/k
        let defect = x.mul_int(&k).sub_int(&h);
        let bound =
            QuadraticReal::from_rational(BigInt::one(), k.clone()).expect("k >= 1 after step 0");
        let certified = defect.abs_cmp(&bound) != Ordering::Greater;
        out.push(Convergent {
            a: h.clone(),
            q: k.clone(),
            index,
            certified,
        });
        h_prev2 = std::mem::replace(&mut h_prev, h);
        k_prev2 = std::mem::replace(&mut k_prev, k);
        let frac = state.sub_int(&a);
        if frac.is_zero() {
            break;
        }
        state = frac.recip()?;
    }
    Ok(out)
}

/// Floating continued fraction: no certificates, marked accordingly.
pub fn convergents_f64(x: f64, count: usize) -> Vec<Convergent> {
    let mut out = Vec::new();
    let mut state = x;
    let (mut h_prev, mut h_prev2) = (BigInt::one(), BigInt::zero());
    let (mut k_prev, mut k_prev2) = (BigInt::zero(), BigInt::one());
    for index in 0..count.min(MAX_CONVERGENTS) {
        let a_f = state.floor();
        let Some(a) = BigInt::from_f64(a_f) else {
            break;
        };
        let h = &a * &h_prev + &h_prev2;
        let k = &a * &k_prev + &k_prev2;
        out.push(Convergent {
            a: h.clone(),
            q: k.clone(),
            index,
            certified: false,
        });
        h_prev2 = std::mem::replace(&mut h_prev, h);
        k_prev2 = std::mem::replace(&mut k_prev, k);
        let frac = state - a_f;
        if frac.abs() < 1e-12 || k_prev.to_f64().is_none_or(|k| k > 2f64.powi(50)) {
            break;
        }
        state = 1.0 / frac;
    }
    out
}

/// Dirichlet approximation via the continued fraction of the (dyadic
/// rational) double `alpha`, truncated at denominator `tau`. The returned
/// pair is the last convergent with q <= tau, which the best-approximation
/// law guarantees satisfies |alpha q - a| <= 1/tau.
pub fn dirichlet(alpha: f64, tau: f64) -> Result<DirichletApprox> {
    if !(tau >= 1.0) {
        return Err(Error::Precondition(format!("tau = {tau} must be >= 1")));
    }
    if !alpha.is_finite() {
        return Err(Error::Precondition(format!("alpha = {alpha} not finite")));
    }
    let exact = BigRational::from_float(alpha)
        .ok_or_else(|| Error::Precondition("alpha not representable".into()))?;
    let tau_int = BigInt::from_f64(tau.floor()).unwrap();

    let mut state = exact;
    let (mut h_prev, mut h_prev2) = (BigInt::one(), BigInt::zero());
    let (mut k_prev, mut k_prev2) = (BigInt::zero(), BigInt::one());
    let mut best: Option<(BigInt, BigInt)> = None;
    loop {
        let a = state.floor().to_integer();
        let h = &a * &h_prev + &h_prev2;
        let k = &a * &k_prev + &k_prev2;
        if best.is_some() && k > tau_int {
            break;
        }
        best = Some((h.clone(), k.clone()));
        h_prev2 = std::mem::replace(&mut h_prev, h);
        k_prev2 = std::mem::replace(&mut k_prev, k);
        let frac = &state - BigRational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        state = frac.recip();
    }
    let (h, k) = best.expect("q0 = 1 <= tau");
    let a_i = h
        .to_i64()
        .ok_or_else(|| Error::Precondition("approximant numerator overflow".into()))?;
    let q_u = k
        .to_u64()
        .ok_or_else(|| Error::Precondition("approximant denominator overflow".into()))?;
    Ok(DirichletApprox {
        a: a_i,
        q: q_u,
        quality: (alpha * q_u as f64 - a_i as f64).abs(),
    })
}

/// Scale driven by a convergent denominator: X = q^(5k/(k+2)), with the
/// inverted exponent returned as a round-trip check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScaleResult {
    pub x: f64,
    pub q_round_trip: f64,
}

pub fn scale_exponent(k: f64) -> f64 {
    5.0 * k / (k + 2.0)
}

pub fn scale_sequence(k: f64, conv: &Convergent) -> Result<ScaleResult> {
    let q = conv.q_f64();
    if q < 1.0 {
        return Err(Error::Precondition(format!("convergent q = {q} invalid")));
    }
    let x = q.powf(scale_exponent(k));
    let q_round_trip = x.powf((k + 2.0) / (5.0 * k));
    Ok(ScaleResult { x, q_round_trip })
}

/// Everything the minor-arc dichotomy argument measures at one alpha.
#[derive(Debug, Clone, Serialize)]
pub struct DichotomyReport {
    pub alpha: f64,
    pub tau: f64,
    pub q_cap: f64,
    pub approx1: DirichletApprox,
    pub approx2: DirichletApprox,
    /// a1 a2 = 0 would place alpha in the major arc.
    pub major_arc_like: bool,
    pub max_q_exceeds_cap: bool,
    /// |a2 q1 (l1/l2) - a1 q2|
    pub bd1_lhs: f64,
    /// 1/(2 q) from the best-approximation law
    pub bd1_threshold: f64,
    /// 2 (1 + |l1/l2|) Q^2 / X
    pub bd1_bound: f64,
    /// The bound-vs-threshold comparison only bites for X large enough;
    /// false means the run predates the asymptotic regime.
    pub bd1_effective: bool,
    /// The contradiction chain q <= |a2 q1| << q1 q2 R <= Q^2 R <= X^((k+2)/(5k) - eps)
    pub bd2_chain: [f64; 4],
}

/// Runs the two Dirichlet approximations of the dichotomy at one minor-arc
/// point and reports every quantity the argument compares. Nothing is
/// asserted: at desk scale the conclusion may predate the asymptotic regime.
pub fn dichotomy_check(
    alpha: f64,
    params: &FormParams,
    cp: &CircleParams,
    conv: &Convergent,
) -> Result<DichotomyReport> {
    let lo = cp.major_halfwidth();
    if !(alpha.abs() > lo && alpha.abs() < cp.r) {
        return Err(Error::Precondition(format!(
            "alpha = {alpha} outside the minor arc ({lo}, {})",
            cp.r
        )));
    }
    let tau = cp.x / cp.q_approx;
    let a1 = dirichlet(params.lambda[0] * alpha, tau)?;
    let a2 = dirichlet(params.lambda[1] * alpha, tau)?;
    let rho = params.lambda[0] / params.lambda[1];
    let q = conv.q_f64();
    let bd1_lhs = (a2.a as f64 * a1.q as f64 * rho - a1.a as f64 * a2.q as f64).abs();
    let bd1_threshold = 1.0 / (2.0 * q);
    let bd1_bound = 2.0 * (1.0 + rho.abs()) * cp.q_approx * cp.q_approx / cp.x;
    let chain = [
        (a2.a as f64 * a1.q as f64).abs(),
        a1.q as f64 * a2.q as f64 * cp.r,
        cp.q_approx * cp.q_approx * cp.r,
        cp.x.powf((params.k + 2.0) / (5.0 * params.k)),
    ];
    Ok(DichotomyReport {
        alpha,
        tau,
        q_cap: cp.q_approx,
        major_arc_like: a1.a == 0 || a2.a == 0,
        max_q_exceeds_cap: (a1.q.max(a2.q)) as f64 > cp.q_approx,
        approx1: a1,
        approx2: a2,
        bd1_lhs,
        bd1_threshold,
        bd1_bound,
        bd1_effective: bd1_bound < bd1_threshold,
        bd2_chain: chain,
    })
}

/// Monte Carlo sweep of the dichotomy over the minor arc.
#[derive(Debug, Clone, Serialize)]
pub struct DichotomySweep {
    pub samples: usize,
    pub major_arc_like: usize,
    /// How often max(q1, q2) <= Q, the case the lemma rules out asymptotically.
    pub both_q_small: usize,
    pub bd1_effective: bool,
}

pub fn dichotomy_sweep(
    params: &FormParams,
    cp: &CircleParams,
    conv: &Convergent,
    samples: usize,
    seed: u64,
) -> Result<DichotomySweep> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let lo = cp.major_halfwidth();
    let mut major_like = 0;
    let mut both_small = 0;
    let mut effective = false;
    for _ in 0..samples {
        let alpha = rng.gen_range(lo..cp.r) * 1.0000000001;
        let rep = dichotomy_check(alpha, params, cp, conv)?;
        if rep.major_arc_like {
            major_like += 1;
        }
        if !rep.max_q_exceeds_cap {
            both_small += 1;
        }
        effective = rep.bd1_effective;
    }
    Ok(DichotomySweep {
        samples,
        major_arc_like: major_like,
        both_q_small: both_small,
        bd1_effective: effective,
    })
}

/// Smallest convergent index (if any, within `convs`) at which the (bd-1)
/// bound 2 (1 + |rho|) Q^2 / X drops below 1/(2q).
pub fn bd1_first_effective(k: f64, rho_abs: f64, convs: &[Convergent]) -> Option<usize> {
    convs.iter().position(|c| {
        let q = c.q_f64();
        let x = q.powf(scale_exponent(k));
        let q_cap = x.powf(0.4 - 1.0 / (5.0 * k));
        2.0 * (1.0 + rho_abs) * q_cap * q_cap / x < 1.0 / (2.0 * q)
    })
}
