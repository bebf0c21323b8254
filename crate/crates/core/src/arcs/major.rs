//! Major-arc main term and error terms.
//!
//! The main term is computed along two independent routes: the 1D integral
//! of T_1 T_1 T_k K_eta e(-varpi alpha) over the arc, and the 3D detection
//! volume over the box. The 3D route reduces the innermost (linear)
//! variable to the closed-form primitive of the triangle kernel, splits the
//! second variable at its kink lines (where the integrand is piecewise
//! quadratic, so two-point Gauss is exact), and leaves one smooth outer
//! quadrature.

use crate::error::Result;
use crate::expsum::{t_interval, PowerRange};
use crate::form::{CircleParams, FormParams};
use crate::primes::PrimeTable;
use crate::quad::{
    integrate_fn_real, integrate_sum_product, unit_phase, ComplexQuadratureResult, FreqSum,
    QuadratureResult, GAUSS4_NODES, GAUSS4_WEIGHTS,
};
use crate::util::Neumaier;
use num::complex::Complex64;
use std::f64::consts::TAU;

use super::IntegrateOpts;

/// T_1(beta) = int_{delta X}^{X} e(t beta) dt in closed form, with a series
/// branch guarding the small-beta cancellation.
pub fn t1_closed(x: f64, delta: f64, beta: f64) -> Complex64 {
    let (a, b) = (delta * x, x);
    let w = TAU * beta;
    if (w * b).abs() < 1e-3 {
        // int e^{iwt} dt = (b-a) + iw(b^2-a^2)/2 - w^2(b^3-a^3)/6 - iw^3(b^4-a^4)/24
        let w2 = w * w;
        let re = (b - a) - w2 * (b * b * b - a * a * a) / 6.0;
        let im = w * (b * b - a * a) / 2.0 - w2 * w * (b * b * b * b - a * a * a * a) / 24.0;
        return Complex64::new(re, im);
    }
    (unit_phase(b * beta) - unit_phase(a * beta)) / Complex64::new(0.0, w)
}

/// T_k(lambda alpha) discretised as a fixed Gauss sum: frequencies t_i^k
/// lambda, weights the panel quadrature weights. Valid for |alpha| up to
/// `alpha_max` at the 1/16-oscillation panel rule.
pub fn t_freq_sum(k: f64, x: f64, delta: f64, lambda: f64, alpha_max: f64) -> FreqSum {
    let (lo, hi) = t_interval(k, x, delta);
    let len = hi - lo;
    let rate = k * hi.powf(k - 1.0) * (lambda * alpha_max).abs();
    let n = ((len * 16.0 * rate).ceil() as usize).clamp(4, 2_000_000);
    let h = len / n as f64;
    let mut freqs = Vec::with_capacity(4 * n);
    let mut weights = Vec::with_capacity(4 * n);
    for j in 0..n {
        let base = lo + j as f64 * h;
        for (node, w) in GAUSS4_NODES.iter().zip(GAUSS4_WEIGHTS) {
            let t = base + node * h;
            freqs.push(t.powf(k) * lambda);
            weights.push(w * h);
        }
    }
    FreqSum::new(freqs, weights)
}

/// Primitive of w -> max(0, eta - |w|): 0 below -eta, eta^2 above eta.
fn triangle_primitive(eta: f64, w: f64) -> f64 {
    if w <= -eta {
        0.0
    } else if w <= 0.0 {
        let s = w + eta;
        0.5 * s * s
    } else if w <= eta {
        let s = eta - w;
        eta * eta - 0.5 * s * s
    } else {
        eta * eta
    }
}

/// The 3D detection volume over [dX, X]^2 x [(dX)^{1/k}, X^{1/k}]:
/// integral of max(0, eta - |l1 t1 + l2 t2 + l3 t3^k - varpi|).
pub fn j1_three_d(params: &FormParams, x: f64, eta: f64) -> QuadratureResult {
    let l = params.lambda;
    let (lo1, hi1) = (params.delta * x, x);
    let (lo3, hi3) = t_interval(params.k, x, params.delta);
    let k = params.k;
    let varpi = params.varpi;

    // exact t2 integral of the (piecewise quadratic) inner primitive
    let mid = |t3: f64| -> f64 {
        let c = l[2] * t3.powf(k) - varpi;
        let w_at = |t1: f64, t2: f64| l[0] * t1 + l[1] * t2 + c;
        let inner = |t2: f64| -> f64 {
            let wa = w_at(lo1, t2);
            let wb = w_at(hi1, t2);
            let (wlo, whi) = if wa <= wb { (wa, wb) } else { (wb, wa) };
            (triangle_primitive(eta, whi) - triangle_primitive(eta, wlo)) / l[0].abs()
        };
        // kink locations of inner(t2): l1 T + l2 t2 + c = -eta, 0, eta
        let mut cuts = vec![lo1, hi1];
        for t1_end in [lo1, hi1] {
            for v in [-eta, 0.0, eta] {
                let t2 = (v - l[0] * t1_end - c) / l[1];
                if t2 > lo1 && t2 < hi1 {
                    cuts.push(t2);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        // two-point Gauss is exact on each quadratic piece
        const G2_NODES: [f64; 2] = [0.211324865405187118, 0.788675134594812882];
        let mut acc = 0.0;
        for wpair in cuts.windows(2) {
            let (a, b) = (wpair[0], wpair[1]);
            let len = b - a;
            if len <= 0.0 {
                continue;
            }
            acc += 0.5 * len * (inner(a + G2_NODES[0] * len) + inner(a + G2_NODES[1] * len));
        }
        acc
    };

    // outer t3 panels split where a t2 kink line crosses the box corners
    let mut cuts = vec![lo3, hi3];
    for t1_end in [lo1, hi1] {
        for t2_end in [lo1, hi1] {
            for v in [-eta, 0.0, eta] {
                let u = (v - l[0] * t1_end - l[1] * t2_end + varpi) / l[2];
                if u > 0.0 {
                    let t3 = u.powf(1.0 / k);
                    if t3 > lo3 && t3 < hi3 {
                        cuts.push(t3);
                    }
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let scale = (eta / (k * hi3.powf(k - 1.0) * l[2].abs())).max(1e-12);
    let mut value = Neumaier::new();
    let mut err = 0.0;
    let mut samples = 0u64;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = b - a;
        if len <= 0.0 {
            continue;
        }
        let n = ((len / (scale / 3.0)).ceil() as usize).clamp(4, 400_000);
        let r = integrate_fn_real(a, b, n, mid);
        value.add(r.value);
        err += r.abs_error_est;
        samples += r.samples;
    }
    QuadratureResult {
        value: value.total(),
        abs_error_est: err,
        samples,
        truncation_tail: 0.0,
    }
}

/// Shared driver for major-arc integrals: 2 Re of the integral over
/// [0, P/X], panels at the oscillation-resolving step.
pub(super) fn major_integral<F>(
    params: &FormParams,
    cp: &CircleParams,
    opts: &IntegrateOpts,
    sums: &[&FreqSum],
    combine: F,
) -> Result<ComplexQuadratureResult>
where
    F: Fn(f64, &[Complex64]) -> Complex64 + Sync,
{
    let max_l = params.lambda.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let step = 1.0 / (opts.step_divisor * cp.x * max_l * opts.refine);
    let mut r = integrate_sum_product(0.0, cp.major_halfwidth(), step, sums, combine, opts.budget)?;
    r.value = Complex64::new(2.0 * r.value.re, 0.0);
    r.abs_error_est *= 2.0;
    Ok(r)
}

#[derive(Debug, Clone)]
pub struct J1Result {
    pub one_d: Option<ComplexQuadratureResult>,
    pub three_d: QuadratureResult,
    /// eta^2 X^{1 + 1/k}
    pub scale: f64,
    pub ratio_to_scale: f64,
    pub route_gap: Option<f64>,
    /// The error-term shape eta^2 X^{1+1/k} P^-2 from the tail of the
    /// completed integral.
    pub documented_gap_bound: f64,
}

/// Main-term evaluation. `with_one_d` controls whether the (more expensive)
/// 1D route is run alongside the 3D volume.
pub fn major_arc_j1(
    params: &FormParams,
    cp: &CircleParams,
    opts: &IntegrateOpts,
    with_one_d: bool,
) -> Result<J1Result> {
    let three_d = j1_three_d(params, cp.x, cp.eta);
    let scale = cp.eta * cp.eta * cp.x.powf(1.0 + 1.0 / params.k);
    let one_d = if with_one_d {
        let tk = t_freq_sum(
            params.k,
            cp.x,
            params.delta,
            params.lambda[2],
            cp.major_halfwidth(),
        );
        let x = cp.x;
        let delta = params.delta;
        let (l1, l2) = (params.lambda[0], params.lambda[1]);
        let (eta, varpi) = (cp.eta, params.varpi);
        Some(major_integral(params, cp, opts, &[&tk], |alpha, sv| {
            t1_closed(x, delta, l1 * alpha)
                * t1_closed(x, delta, l2 * alpha)
                * sv[0]
                * (crate::kernel::fejer(eta, alpha) * unit_phase(-varpi * alpha))
        })?)
    } else {
        None
    };
    Ok(J1Result {
        route_gap: one_d.map(|r| (r.value.re - three_d.value).abs()),
        one_d,
        three_d,
        scale,
        ratio_to_scale: three_d.value / scale,
        documented_gap_bound: scale / (cp.p * cp.p),
    })
}

/// The four-way splitting of the major arc integral, each piece normalised
/// by eta^2 X^{1+1/k}, plus the A/B refinements of J2 and J4.
#[derive(Debug, Clone)]
pub struct ErrorTermReport {
    pub i_major: ComplexQuadratureResult,
    pub j1: ComplexQuadratureResult,
    pub j2: ComplexQuadratureResult,
    pub j3: ComplexQuadratureResult,
    pub j4: ComplexQuadratureResult,
    pub a2: QuadratureResult,
    pub b2: QuadratureResult,
    pub a4: QuadratureResult,
    pub b4: QuadratureResult,
    pub normalizer: f64,
    /// |(J1 + J2 + J3 + J4) - I(major)|: the splitting telescopes.
    pub telescoping_gap: f64,
}

pub fn major_arc_error_terms(
    params: &FormParams,
    cp: &CircleParams,
    table: &PrimeTable,
    opts: &IntegrateOpts,
) -> Result<ErrorTermReport> {
    let x = cp.x;
    let delta = params.delta;
    let (l1, l2, l3) = (params.lambda[0], params.lambda[1], params.lambda[2]);
    let (eta, varpi) = (cp.eta, params.varpi);

    let primes1 = PowerRange::primes(table, 1.0, x, delta)?;
    let primes_k = PowerRange::primes(table, params.k, x, delta)?;
    let ints1 = PowerRange::integers(1.0, x, delta);
    let ints_k = PowerRange::integers(params.k, x, delta);

    let s1_l1 = primes1.freq_sum(l1);
    let s1_l2 = primes1.freq_sum(l2);
    let sk_l3 = primes_k.freq_sum(l3);
    let u1_l1 = ints1.freq_sum(l1);
    let uk_l3 = ints_k.freq_sum(l3);
    let tk_l3 = t_freq_sum(params.k, x, delta, l3, cp.major_halfwidth());

    let kern = |alpha: f64| crate::kernel::fejer(eta, alpha) * unit_phase(-varpi * alpha);
    let t1 = |beta: f64| t1_closed(x, delta, beta);

    let i_major = major_integral(params, cp, opts, &[&s1_l1, &s1_l2, &sk_l3], |a, sv| {
        sv[0] * sv[1] * sv[2] * kern(a)
    })?;
    let j1 = major_integral(params, cp, opts, &[&tk_l3], |a, sv| {
        t1(l1 * a) * t1(l2 * a) * sv[0] * kern(a)
    })?;
    let j2 = major_integral(params, cp, opts, &[&s1_l1, &tk_l3], |a, sv| {
        (sv[0] - t1(l1 * a)) * t1(l2 * a) * sv[1] * kern(a)
    })?;
    let j3 = major_integral(params, cp, opts, &[&s1_l1, &s1_l2, &tk_l3], |a, sv| {
        sv[0] * (sv[1] - t1(l2 * a)) * sv[2] * kern(a)
    })?;
    let j4 = major_integral(
        params,
        cp,
        opts,
        &[&s1_l1, &s1_l2, &sk_l3, &tk_l3],
        |a, sv| sv[0] * sv[1] * (sv[2] - sv[3]) * kern(a),
    )?;

    // A/B splittings: absolute-value integrands, no kernel twist
    let a2 = major_integral(params, cp, opts, &[&s1_l1, &u1_l1, &tk_l3], |a, sv| {
        Complex64::new(
            (sv[0] - sv[1]).norm() * t1(l2 * a).norm() * sv[2].norm(),
            0.0,
        )
    })?
    .real_part();
    let b2 = major_integral(params, cp, opts, &[&u1_l1, &tk_l3], |a, sv| {
        Complex64::new(
            (sv[0] - t1(l1 * a)).norm() * t1(l2 * a).norm() * sv[1].norm(),
            0.0,
        )
    })?
    .real_part();
    let a4 = major_integral(
        params,
        cp,
        opts,
        &[&s1_l1, &s1_l2, &sk_l3, &uk_l3],
        |_a, sv| Complex64::new(sv[0].norm() * sv[1].norm() * (sv[2] - sv[3]).norm(), 0.0),
    )?
    .real_part();
    let b4 = major_integral(
        params,
        cp,
        opts,
        &[&s1_l1, &s1_l2, &uk_l3, &tk_l3],
        |_a, sv| Complex64::new(sv[0].norm() * sv[1].norm() * (sv[2] - sv[3]).norm(), 0.0),
    )?
    .real_part();

    let sum4 = j1.value + j2.value + j3.value + j4.value;
    Ok(ErrorTermReport {
        telescoping_gap: (sum4 - i_major.value).norm(),
        i_major,
        j1,
        j2,
        j3,
        j4,
        a2,
        b2,
        a4,
        b4,
        normalizer: cp.eta * cp.eta * cp.x.powf(1.0 + 1.0 / params.k),
    })
}
