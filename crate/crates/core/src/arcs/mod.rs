//! Numerical evaluation of I(eta, varpi, .) over the arc decomposition,
//! with certified truncation of the non-compact pieces.
//!
//! Truncation leans on two exact facts at k = 1: |S_1|^2 has period one,
//! and its unit-interval integral is sum (log p)^2. Unit blocks of the tail
//! therefore sum to a trigamma weight, which both sizes the truncation point
//! and gives the trivial-arc integrals in closed-block form.

pub mod major;
pub mod selberg;

pub use major::{major_arc_error_terms, major_arc_j1, ErrorTermReport, J1Result};
pub use selberg::{gallagher_lhs, gallagher_rhs, selberg_j, GallagherRhs, SelbergSpec};

use crate::error::{Error, Result};
use crate::expsum::PowerRange;
use crate::form::{ArcPiece, CircleParams, FormParams};
use crate::primes::PrimeTable;
use crate::quad::{integrate_sum_product, unit_phase, ComplexQuadratureResult, QuadratureResult};
use num::complex::Complex64;
use std::f64::consts::PI;

/// Knobs for the oscillatory integrals. `step_divisor` is the number of
/// panels per oscillation (the contract requires >= 8); `refine` scales the
/// panel density; `tail_rel` sets the certified-tail target relative to the
/// main-term estimate; `budget` caps total samples per call.
#[derive(Debug, Clone, Copy)]
pub struct IntegrateOpts {
    pub step_divisor: f64,
    pub refine: f64,
    pub tail_rel: f64,
    pub budget: u64,
    /// Use f(-a) = conj f(a) and integrate only the positive half-line.
    pub use_symmetry: bool,
}

impl Default for IntegrateOpts {
    fn default() -> Self {
        Self {
            step_divisor: 8.0,
            refine: 1.0,
            tail_rel: 1e-3,
            budget: 100_000_000,
            use_symmetry: true,
        }
    }
}

/// Trigamma function psi'(x) for x >= 1: shift into the asymptotic regime,
/// then the standard series.
pub fn trigamma(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut acc = 0.0;
    let mut t = x;
    while t < 20.0 {
        acc += 1.0 / (t * t);
        t += 1.0;
    }
    let inv = 1.0 / t;
    let inv2 = inv * inv;
    // 1/t + 1/(2t^2) + 1/(6t^3) - 1/(30t^5) + 1/(42t^7) - 1/(30t^9)
    acc + inv
        + 0.5 * inv2
        + inv * inv2 * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 * (1.0 / 42.0 - inv2 / 30.0)))
}

/// Certified bound on the full-line integrand mass beyond |alpha| >= t:
///   |I restricted to the tail| <= S_k(0)/pi^2 * sum_j |l_j| L2 / (floor(|l_j| t) - 1)
/// where L2 = sum (log p)^2 over [delta X, X]. Uses the exact periodicity of
/// |S_1|^2 and its unit-interval Parseval value blockwise.
fn certified_tail(sk0: f64, l2_anchor: f64, lambda: [f64; 3], t: f64) -> f64 {
    let mut tail = 0.0;
    for lam in &lambda[..2] {
        let n0 = (lam.abs() * t).floor();
        if n0 < 2.0 {
            return f64::INFINITY;
        }
        tail += sk0 / (PI * PI) * lam.abs() * l2_anchor / (n0 - 1.0);
    }
    tail
}

/// Picks the truncation point so the certified tail sits below
/// `opts.tail_rel` times the main-term estimate, and returns the point with
/// the bound it achieves.
pub fn auto_truncation(
    params: &FormParams,
    cp: &CircleParams,
    table: &PrimeTable,
    opts: &IntegrateOpts,
) -> Result<(f64, f64)> {
    let primes_k = PowerRange::primes(table, params.k, cp.x, params.delta)?;
    let sk0: f64 = primes_k.weights.iter().sum();
    let r1 = table.range(params.delta * cp.x, cp.x)?;
    let l2_anchor = r1.sum_log_sq();
    let main_estimate = major::j1_three_d(params, cp.x, cp.eta)
        .value
        .max(cp.eta * cp.eta * cp.x.powf(1.0 + 1.0 / params.k) * 1e-3);
    let target = opts.tail_rel * main_estimate;
    // invert the per-coefficient block bound, splitting the target evenly
    let mut t: f64 = cp.r;
    for lam in &params.lambda[..2] {
        let need_n0 = 2.0 * sk0 * lam.abs() * l2_anchor / (PI * PI * target) + 2.0;
        t = t.max(need_n0 / lam.abs());
    }
    Ok((t, certified_tail(sk0, l2_anchor, params.lambda, t)))
}

/// Largest truncation point whose full-line pass stays within the sample
/// budget (with a little headroom for the compact arcs).
pub fn max_truncation_for_budget(params: &FormParams, cp: &CircleParams, opts: &IntegrateOpts) -> f64 {
    let max_l = params.lambda.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let step = 1.0 / (opts.step_divisor * cp.x * max_l * opts.refine);
    0.95 * (opts.budget as f64 / 6.0) * step
}

/// I(eta, varpi, piece): oscillation-resolving quadrature of
/// S_1(l1 a) S_1(l2 a) S_k(l3 a) K_eta(a) e(-varpi a) over the arc piece.
/// `trunc` fixes the truncation point of the non-compact pieces (take it
/// from [`auto_truncation`]); it is ignored for the major and minor arcs.
pub fn integrate_i(
    params: &FormParams,
    cp: &CircleParams,
    piece: ArcPiece,
    table: &PrimeTable,
    trunc: f64,
    opts: &IntegrateOpts,
) -> Result<ComplexQuadratureResult> {
    let primes1 = PowerRange::primes(table, 1.0, cp.x, params.delta)?;
    let primes_k = PowerRange::primes(table, params.k, cp.x, params.delta)?;
    let s1_l1 = primes1.freq_sum(params.lambda[0]);
    let s1_l2 = primes1.freq_sum(params.lambda[1]);
    let sk_l3 = primes_k.freq_sum(params.lambda[2]);
    let max_l = params.lambda.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let step = 1.0 / (opts.step_divisor * cp.x * max_l * opts.refine);
    let (eta, varpi) = (cp.eta, params.varpi);
    let combine = |alpha: f64, sv: &[Complex64]| {
        sv[0] * sv[1] * sv[2] * (crate::kernel::fejer(eta, alpha) * unit_phase(-varpi * alpha))
    };

    let tail = match piece {
        ArcPiece::TrivialTruncated | ArcPiece::FullTruncated => {
            let sk0: f64 = primes_k.weights.iter().sum();
            let l2_anchor = table.range(params.delta * cp.x, cp.x)?.sum_log_sq();
            certified_tail(sk0, l2_anchor, params.lambda, trunc)
        }
        _ => 0.0,
    };

    let sums = [&s1_l1, &s1_l2, &sk_l3];
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut samples = 0u64;
    let intervals = cp.positive_intervals(piece, trunc);
    for (a, b) in intervals {
        if opts.use_symmetry {
            let r = integrate_sum_product(a, b, step, &sums, combine, opts.budget - samples)?;
            value += Complex64::new(2.0 * r.value.re, 0.0);
            err += 2.0 * r.abs_error_est;
            samples += r.samples;
        } else {
            for (lo, hi) in [(a, b), (-b, -a)] {
                let r = integrate_sum_product(lo, hi, step, &sums, combine, opts.budget - samples)?;
                value += r.value;
                err += r.abs_error_est;
                samples += r.samples;
            }
        }
    }
    Ok(ComplexQuadratureResult {
        value,
        abs_error_est: err,
        samples: samples.max(1),
        truncation_tail: tail,
    })
}

/// Minor-arc L^2 of one exponential sum against the kernel:
/// int_m |S(l_j a)|^2 K_eta(a) da, j in {1, 2, 3} (S_1 for 1 and 2, S_k
/// for 3). Panels split at 1/eta, the kernel's regime boundary.
pub fn minor_arc_l2(
    params: &FormParams,
    cp: &CircleParams,
    table: &PrimeTable,
    which: usize,
    opts: &IntegrateOpts,
) -> Result<QuadratureResult> {
    let (range, lambda) = match which {
        1 | 2 => (
            PowerRange::primes(table, 1.0, cp.x, params.delta)?,
            params.lambda[which - 1],
        ),
        3 => (
            PowerRange::primes(table, params.k, cp.x, params.delta)?,
            params.lambda[2],
        ),
        _ => {
            return Err(Error::Precondition(format!(
                "variable index {which} not in {{1,2,3}}"
            )))
        }
    };
    let sum = range.freq_sum(lambda);
    let eta = cp.eta;
    let step = 1.0 / (opts.step_divisor * cp.x * lambda.abs().max(1e-12) * opts.refine);
    let combine = |alpha: f64, sv: &[Complex64]| {
        Complex64::new(sv[0].norm_sqr() * crate::kernel::fejer(eta, alpha), 0.0)
    };
    let (lo, hi) = (cp.major_halfwidth(), cp.r);
    let split = 1.0 / eta;
    let mut segments = vec![];
    if split > lo && split < hi {
        segments.push((lo, split));
        segments.push((split, hi));
    } else {
        segments.push((lo, hi));
    }
    let mut value = 0.0;
    let mut err = 0.0;
    let mut samples = 0u64;
    for (a, b) in segments {
        let r = integrate_sum_product(a, b, step, &[&sum], combine, opts.budget - samples)?;
        // the integrand is even: double for the mirrored arc
        value += 2.0 * r.value.re;
        err += 2.0 * r.abs_error_est;
        samples += r.samples;
    }
    Ok(QuadratureResult {
        value,
        abs_error_est: err,
        samples,
        truncation_tail: 0.0,
    })
}

/// Trivial-arc tail diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct TrivialTailReport {
    /// C_j = int_{|l_j| R}^inf |S_1(b)|^2 / b^2 db for j = 1, 2.
    pub c: [QuadratureResult; 2],
    /// C_j * |l_j| R / (X log X): the lemma's fitted constants.
    pub fitted: [f64; 2],
    /// S_k(0) (2/pi^2) sqrt(|l1| C1 |l2| C2): certified bound on |I(trivial)|.
    pub i_trivial_bound: f64,
}

/// Evaluates the C_j integrals by the unit-block decomposition: |S_1|^2 is
/// exactly 1-periodic, so the blocks beyond ceil(|l_j| R) resum into a
/// single unit-interval integral against trigamma, leaving no discarded
/// tail at all.
pub fn trivial_arc_tail(
    params: &FormParams,
    cp: &CircleParams,
    table: &PrimeTable,
    opts: &IntegrateOpts,
) -> Result<TrivialTailReport> {
    let primes1 = PowerRange::primes(table, 1.0, cp.x, params.delta)?;
    let primes_k = PowerRange::primes(table, params.k, cp.x, params.delta)?;
    let sk0: f64 = primes_k.weights.iter().sum();
    let sum = primes1.freq_sum(1.0);
    let step = 1.0 / (opts.step_divisor * cp.x * opts.refine);
    let mut c = [QuadratureResult {
        value: 0.0,
        abs_error_est: 0.0,
        samples: 0,
        truncation_tail: 0.0,
    }; 2];
    for (j, lam) in params.lambda[..2].iter().enumerate() {
        let start = lam.abs() * cp.r;
        let n0 = start.ceil();
        // head piece [|l| R, ceil(|l| R)]
        let head = integrate_sum_product(
            start,
            n0,
            step,
            &[&sum],
            |alpha, sv| Complex64::new(sv[0].norm_sqr() / (alpha * alpha), 0.0),
            opts.budget,
        )?;
        // resummed blocks: int_0^1 |S_1(t)|^2 psi'(n0 + t) dt
        let blocks = integrate_sum_product(
            0.0,
            1.0,
            step,
            &[&sum],
            |t, sv| Complex64::new(sv[0].norm_sqr() * trigamma(n0 + t), 0.0),
            opts.budget,
        )?;
        c[j] = QuadratureResult {
            value: head.value.re + blocks.value.re,
            abs_error_est: head.abs_error_est + blocks.abs_error_est,
            samples: head.samples + blocks.samples,
            truncation_tail: 0.0,
        };
    }
    let fitted = [
        c[0].value * params.lambda[0].abs() * cp.r / (cp.x * cp.x.ln()),
        c[1].value * params.lambda[1].abs() * cp.r / (cp.x * cp.x.ln()),
    ];
    let i_trivial_bound = sk0
        * (2.0 / (PI * PI))
        * (params.lambda[0].abs() * c[0].value * params.lambda[1].abs() * c[1].value).sqrt();
    Ok(TrivialTailReport {
        c,
        fitted,
        i_trivial_bound,
    })
}
