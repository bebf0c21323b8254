//! The generalized Selberg integral J_k(X, h) and the L^2 comparison of
//! S_k with U_k over short symmetric intervals.

use crate::error::{Error, Result};
use crate::expsum::PowerRange;
use crate::form::FormParams;
use crate::primes::PrimeTable;
use crate::quad::{integrate_fn_real, integrate_sum_product, FreqSum, QuadratureResult};
use crate::util::Neumaier;
use num::complex::Complex64;

/// J_k(X, h) = int_X^{2X} (theta((x+h)^{1/k}) - theta(x^{1/k})
///                          - ((x+h)^{1/k} - x^{1/k}))^2 dx.
#[derive(Debug, Clone, Copy)]
pub struct SelbergSpec {
    pub k: f64,
    pub x: f64,
    pub h: f64,
}

impl SelbergSpec {
    pub fn new(k: f64, x: f64, h: f64) -> Result<Self> {
        if !(k >= 1.0) {
            return Err(Error::Precondition(format!("k = {k} must be >= 1")));
        }
        if !(x >= 10.0) {
            return Err(Error::Precondition(format!("X = {x} must be >= 10")));
        }
        if !(0.0 <= h && h <= x) {
            return Err(Error::Precondition(format!(
                "window h = {h} outside [0, X = {x}]"
            )));
        }
        Ok(Self { k, x, h })
    }
}

/// Piecewise-exact evaluation: the integrand is smooth between the
/// breakpoints x = p^k and x = p^k - h, where the theta terms are constant,
/// so each piece is integrated with Gauss panels at spectral accuracy.
pub fn selberg_j(spec: &SelbergSpec, table: &PrimeTable) -> Result<QuadratureResult> {
    let SelbergSpec { k, x, h } = *spec;
    let top = ((2.0 * x + h).powf(1.0 / k)).ceil();
    if top > table.limit() as f64 {
        return Err(Error::OutOfTable {
            x: top,
            limit: table.limit(),
        });
    }
    if h == 0.0 {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_est: 0.0,
            samples: 1,
            truncation_tail: 0.0,
        });
    }

    // breakpoints of both step functions inside (X, 2X)
    let mut cuts = vec![x, 2.0 * x];
    let p_lo = (x.max(1.0)).powf(1.0 / k) - 2.0;
    let range = table.range(p_lo.max(0.0), top)?;
    for &p in range.members {
        let pk = if k == 1.0 { p as f64 } else { (p as f64).powf(k) };
        for cut in [pk, pk - h] {
            if cut > x && cut < 2.0 * x {
                cuts.push(cut);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut value = Neumaier::new();
    let mut err = 0.0;
    let mut samples = 0u64;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let len = hi - lo;
        if len <= 0.0 {
            continue;
        }
        let mid = lo + 0.5 * len;
        // theta terms are constant on the open piece
        let t_hi = table.theta((mid + h).powf(1.0 / k))?;
        let t_lo = table.theta(mid.powf(1.0 / k))?;
        let step_part = t_hi - t_lo;
        let n = ((len / (x / 128.0)).ceil() as usize).max(2);
        let r = integrate_fn_real(lo, hi, n, |t| {
            let smooth = (t + h).powf(1.0 / k) - t.powf(1.0 / k);
            let d = step_part - smooth;
            d * d
        });
        value.add(r.value);
        err += r.abs_error_est;
        samples += r.samples;
    }
    Ok(QuadratureResult {
        value: value.total(),
        abs_error_est: err,
        samples,
        truncation_tail: 0.0,
    })
}

/// Left side of the Gallagher-type lemma:
/// int_{-Y}^{Y} |S_k(alpha) - U_k(alpha)|^2 d alpha.
pub fn gallagher_lhs(
    params: &FormParams,
    x: f64,
    y: f64,
    table: &PrimeTable,
    budget: u64,
) -> Result<QuadratureResult> {
    if !(y > 0.0 && y <= 0.5) {
        return Err(Error::Precondition(format!("Y = {y} outside (0, 1/2]")));
    }
    let primes = PowerRange::primes(table, params.k, x, params.delta)?;
    let integers = PowerRange::integers(params.k, x, params.delta);
    let diff = FreqSum::difference(&primes.freq_sum(1.0), &integers.freq_sum(1.0));
    // |S_k - U_k|^2 is even: integrate the positive half and double
    let r = integrate_sum_product(
        0.0,
        y,
        1.0 / (8.0 * x),
        &[&diff],
        |_alpha, sv| Complex64::new(sv[0].norm_sqr(), 0.0),
        budget,
    )?;
    let mut out = r.real_part();
    out.value *= 2.0;
    out.abs_error_est *= 2.0;
    Ok(out)
}

/// Right side of the lemma, with the three pieces reported separately:
/// X^{2/k-2} log^2 X / Y  +  Y^2 X  +  Y^2 J_k(X, 1/(2Y)).
#[derive(Debug, Clone, Copy)]
pub struct GallagherRhs {
    pub dispersion: f64,
    pub short_interval: f64,
    pub selberg: f64,
    pub selberg_detail: QuadratureResult,
}

impl GallagherRhs {
    pub fn total(&self) -> f64 {
        self.dispersion + self.short_interval + self.selberg
    }
}

pub fn gallagher_rhs(
    params: &FormParams,
    x: f64,
    y: f64,
    table: &PrimeTable,
) -> Result<GallagherRhs> {
    if !(y > 0.0 && y <= 0.5) {
        return Err(Error::Precondition(format!("Y = {y} outside (0, 1/2]")));
    }
    let h = 1.0 / (2.0 * y);
    let spec = SelbergSpec::new(params.k, x, h.min(x))?;
    let selberg_detail = selberg_j(&spec, table)?;
    let log_x = x.ln();
    Ok(GallagherRhs {
        dispersion: x.powf(2.0 / params.k - 2.0) * log_x * log_x / y,
        short_interval: y * y * x,
        selberg: y * y * selberg_detail.value,
        selberg_detail,
    })
}
