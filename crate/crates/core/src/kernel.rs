//! Fejér kernel and its Fourier transform, the solution-detection device.
//!
//! `fejer_hat(eta, t) = max(0, eta - |t|)` counts how close a form value
//! lands to the target; `fejer` is the kernel whose transform it is.

use crate::error::{Error, Result};
use crate::quad::{integrate_fn, unit_phase, QuadratureResult};

use std::f64::consts::PI;

/// Fourier transform of the Fejér kernel: max(0, eta - |t|).
pub fn fejer_hat(eta: f64, t: f64) -> f64 {
    debug_assert!(eta > 0.0);
    (eta - t.abs()).max(0.0)
}

/// Fejér kernel (sin(pi eta alpha) / (pi alpha))^2, continuous at 0 with
/// value eta^2.
///
/// Near zero a three-term Taylor expansion is used; the switch point is
/// wide enough that neither branch can round above the envelope
/// min(eta^2, (pi alpha)^-2).
pub fn fejer(eta: f64, alpha: f64) -> f64 {
    debug_assert!(eta > 0.0);
    let u = eta * alpha;
    if u.abs() < 1e-4 {
        let x2 = (PI * u) * (PI * u);
        return eta * eta * (1.0 - x2 / 3.0 + x2 * x2 * (2.0 / 45.0));
    }
    // sin(pi u)^2 with u reduced mod 1 keeps the sine argument small; the
    // square makes the sign of the reduction irrelevant.
    let r = u - u.round();
    let s = (PI * r).sin();
    let ratio = s / (PI * alpha);
    ratio * ratio
}

/// Truncated numeric check of the Fourier pair: integrates
/// K_eta(alpha) e(-t alpha) over [-T, T]. The certified tail bound
/// 2 / (pi^2 T) from K_eta(alpha) <= (pi alpha)^-2 is reported alongside.
pub fn fourier_pair_check(eta: f64, t: f64, trunc: f64) -> Result<QuadratureResult> {
    if eta <= 0.0 {
        return Err(Error::Precondition(format!("eta = {eta} must be positive")));
    }
    if trunc <= 0.0 {
        return Err(Error::Precondition(format!(
            "truncation T = {trunc} must be positive"
        )));
    }
    // Oscillation scales: 1/eta from the kernel, 1/|t| from the twist.
    let step = 0.25 / eta.max(t.abs()).max(1.0);
    let n = ((2.0 * trunc) / step).ceil() as usize;
    let r = integrate_fn(-trunc, trunc, n, |alpha| {
        unit_phase(-t * alpha) * fejer(eta, alpha)
    });
    if !r.value.re.is_finite() {
        return Err(Error::Quadrature(format!(
            "non-finite Fourier check at eta = {eta}, t = {t}, T = {trunc}"
        )));
    }
    let mut out = r.real_part();
    out.truncation_tail = 2.0 / (PI * PI * trunc);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hat_values() {
        assert_eq!(fejer_hat(0.5, 0.2), 0.3);
        assert_eq!(fejer_hat(0.5, 0.7), 0.0);
        for eta in [0.1, 0.5, 1.0, 3.0] {
            assert_eq!(fejer_hat(eta, 0.0), eta);
        }
    }

    #[test]
    fn kernel_values() {
        assert_eq!(fejer(0.5, 0.0), 0.25);
        // sine zero at alpha = 1/eta
        assert_eq!(fejer(0.5, 2.0), 0.0);
        // (sin(pi/2)/pi)^2 = 1/pi^2
        assert_relative_eq!(fejer(0.5, 1.0), 1.0 / (PI * PI), max_relative = 1e-15);
    }

    #[test]
    fn kernel_even_exactly() {
        for eta in [0.1, 0.5, 1.0] {
            for alpha in [1e-9, 1e-5, 0.3, 2.7, 41.5] {
                assert_eq!(fejer(eta, alpha), fejer(eta, -alpha));
            }
        }
        assert_eq!(fejer_hat(0.5, 0.3), fejer_hat(0.5, -0.3));
    }

    #[test]
    fn kernel_envelope_dense_grid() {
        // the "trivial, but crucial" bound with explicit constant 1
        for eta in [0.1, 0.5, 1.0] {
            for i in 1..=20_000 {
                let alpha = i as f64 * 5e-4 * 40.0 / eta; // out to 40/eta
                let k = fejer(eta, alpha);
                let env = (1.0 / (PI * alpha.abs())).powi(2);
                assert!(k <= eta * eta, "K > eta^2 at eta={eta}, alpha={alpha}");
                assert!(k <= env, "K > (pi a)^-2 at eta={eta}, alpha={alpha}");
            }
        }
    }

    #[test]
    fn taylor_branch_continuous() {
        // compare the two branches at the switch point
        let eta = 0.7;
        let a = 1e-4 / eta;
        let taylor = fejer(eta, a * 0.999_999);
        let trig = fejer(eta, a * 1.000_001);
        assert_relative_eq!(taylor, trig, max_relative = 1e-10);
    }

    #[test]
    fn fourier_pair_at_grid_points() {
        // quadrature oracle for the transform; limit is fejer_hat
        let cases = [(0.5, 0.0, 0.5), (0.5, 1.0, 0.0), (1.0, 0.5, 0.5)];
        for (eta, t, want) in cases {
            let r = fourier_pair_check(eta, t, 1e3).unwrap();
            assert!(
                (r.value - want).abs() < 1e-3,
                "eta={eta} t={t}: got {}, want {want}",
                r.value
            );
            assert!(r.truncation_tail <= 2.03e-4);
        }
    }

    #[test]
    fn kernel_area_equals_eta() {
        // integral over R of K_eta equals fejer_hat(eta, 0) = eta
        for eta in [0.1, 0.5, 1.0] {
            let trunc = 4.0 / (PI * PI * 1e-4 * eta); // tail below 1e-4 relative, halved
            let r = fourier_pair_check(eta, 0.0, trunc).unwrap();
            assert_relative_eq!(r.value, eta, max_relative = 1e-4);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(fourier_pair_check(-1.0, 0.0, 10.0).is_err());
        assert!(fourier_pair_check(0.5, 0.0, 0.0).is_err());
    }
}
