//! The generating functions S_k, U_k, T_k and the minor-arc minimum V.
//!
//! S_k sums log p * e(p^k alpha) over primes with delta X <= p^k <= X; U_k is
//! the unweighted integer analogue; T_k the continuous approximation. Powers
//! are computed once per range and cached; phases are reduced mod 1 before
//! any trigonometry.

use crate::error::{Error, Result};
use crate::form::FormParams;
use crate::primes::PrimeTable;
use crate::quad::{integrate_fn, unit_phase, ComplexQuadratureResult, FreqSum};
use num::complex::Complex64;
use std::f64::consts::TAU;

/// Complex amplitude of an exponential sum.
pub type Amplitude = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumKind {
    S,
    U,
    T,
}

/// Which sum, at which exponent, scale and window.
#[derive(Debug, Clone, Copy)]
pub struct SumSpec {
    pub kind: SumKind,
    pub k: f64,
    pub x: f64,
    pub delta: f64,
}

impl SumSpec {
    pub fn new(kind: SumKind, k: f64, x: f64, delta: f64) -> Result<Self> {
        if !(k >= 1.0) {
            return Err(Error::Precondition(format!("k = {k} must be >= 1")));
        }
        if !(x >= 10.0) {
            return Err(Error::Precondition(format!("X = {x} must be >= 10")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Precondition(format!("delta = {delta} not in (0,1)")));
        }
        Ok(Self { kind, k, x, delta })
    }
}

/// A range of values v with delta X <= v^k <= X, powers cached.
#[derive(Debug, Clone)]
pub struct PowerRange {
    pub values: Vec<u64>,
    pub powers: Vec<f64>,
    pub weights: Vec<f64>,
    /// All powers are integers (k = 1), so the sum is 1-periodic in alpha.
    pub integer_frequencies: bool,
}

impl PowerRange {
    /// Membership is decided by the predicate delta X <= v^k <= X itself so
    /// that every module draws identical boundaries.
    fn keep(v: f64, k: f64, x: f64, delta: f64) -> Option<f64> {
        let pow = if k == 1.0 { v } else { v.powf(k) };
        (delta * x <= pow && pow <= x).then_some(pow)
    }

    pub fn primes(table: &PrimeTable, k: f64, x: f64, delta: f64) -> Result<Self> {
        let hi = if k == 1.0 { x } else { x.powf(1.0 / k) };
        if hi > table.limit() as f64 {
            return Err(Error::OutOfTable {
                x: hi,
                limit: table.limit(),
            });
        }
        let lo = if k == 1.0 {
            delta * x
        } else {
            (delta * x).powf(1.0 / k)
        };
        // guarded candidate window, exact predicate filter
        let r = table.range((lo * (1.0 - 1e-12) - 1.0).max(0.0), hi)?;
        let mut values = Vec::new();
        let mut powers = Vec::new();
        let mut weights = Vec::new();
        for (&p, &w) in r.members.iter().zip(r.weights) {
            if let Some(pow) = Self::keep(p as f64, k, x, delta) {
                values.push(p);
                powers.push(pow);
                weights.push(w);
            }
        }
        Ok(Self {
            values,
            powers,
            weights,
            integer_frequencies: k == 1.0,
        })
    }

    pub fn integers(k: f64, x: f64, delta: f64) -> Self {
        let lo = (delta * x).powf(1.0 / k);
        let hi = x.powf(1.0 / k);
        let start = (lo.floor() as i64 - 2).max(1) as u64;
        let end = hi.ceil() as u64 + 2;
        let mut values = Vec::new();
        let mut powers = Vec::new();
        for n in start..=end {
            if let Some(pow) = Self::keep(n as f64, k, x, delta) {
                values.push(n);
                powers.push(pow);
            }
        }
        let weights = vec![1.0; values.len()];
        Self {
            values,
            powers,
            weights,
            integer_frequencies: k == 1.0,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Evaluates sum of w e(pow * alpha). For integer frequencies alpha is
    /// reduced mod 1 first, making 1-periodicity exact.
    pub fn eval(&self, alpha: f64) -> Amplitude {
        let a = if self.integer_frequencies {
            alpha - alpha.round()
        } else {
            alpha
        };
        let mut re = 0.0;
        let mut im = 0.0;
        for (pow, w) in self.powers.iter().zip(&self.weights) {
            let z = unit_phase(pow * a);
            re += w * z.re;
            im += w * z.im;
        }
        Amplitude::new(re, im)
    }

    /// The frequency/weight view for the panel integrators, with every
    /// frequency scaled by `lambda` (i.e. the map alpha -> sum(lambda alpha)).
    pub fn freq_sum(&self, lambda: f64) -> FreqSum {
        FreqSum::new(
            self.powers.iter().map(|p| p * lambda).collect(),
            self.weights.clone(),
        )
    }
}

/// S_k(alpha): prime sum with log weights.
pub fn eval_s(spec: &SumSpec, alpha: f64, table: &PrimeTable) -> Result<Amplitude> {
    Ok(PowerRange::primes(table, spec.k, spec.x, spec.delta)?.eval(alpha))
}

/// U_k(alpha): unweighted integer sum.
pub fn eval_u(spec: &SumSpec, alpha: f64) -> Amplitude {
    PowerRange::integers(spec.k, spec.x, spec.delta).eval(alpha)
}

/// T_k(0) = the plain interval length X^(1/k) - (delta X)^(1/k).
pub fn t_interval(k: f64, x: f64, delta: f64) -> (f64, f64) {
    ((delta * x).powf(1.0 / k), x.powf(1.0 / k))
}

/// Panel quadrature for T_k at k > 1 (and as an oracle for k = 1): panels
/// short enough that each sees at most 1/16 of an oscillation, refined
/// further until the error estimate meets the 1e-8 relative contract
/// (the phase map's curvature near the lower endpoint can dominate the
/// oscillation count).
pub fn eval_t_quadrature(k: f64, x: f64, delta: f64, alpha: f64) -> Result<ComplexQuadratureResult> {
    let (lo, hi) = t_interval(k, x, delta);
    let len = hi - lo;
    let max_rate = k * hi.powf(k - 1.0) * alpha.abs();
    let mut n = ((len * 16.0 * max_rate).ceil() as usize).clamp(16, 50_000_000);
    let scale = len.max(1.0);
    loop {
        let r = integrate_fn(lo, hi, n, |t| unit_phase(t.powf(k) * alpha));
        if r.value.re.is_finite() && r.abs_error_est <= 1e-8 * scale {
            return Ok(r);
        }
        if n >= 50_000_000 {
            return Err(Error::Quadrature(format!(
                "T_k quadrature: error estimate {} over T_k(0) = {len} at k={k}, X={x}, alpha={alpha} ({} samples)",
                r.abs_error_est, r.samples
            )));
        }
        n = (n * 4).min(50_000_000);
    }
}

/// T_k(alpha): closed form for k = 1, oscillation-resolving quadrature
/// otherwise.
pub fn eval_t(spec: &SumSpec, alpha: f64) -> Result<Amplitude> {
    let (lo, hi) = t_interval(spec.k, spec.x, spec.delta);
    if alpha == 0.0 {
        return Ok(Amplitude::new(hi - lo, 0.0));
    }
    if spec.k == 1.0 {
        let num = unit_phase(hi * alpha) - unit_phase(lo * alpha);
        let den = Complex64::new(0.0, TAU * alpha);
        return Ok(num / den);
    }
    Ok(eval_t_quadrature(spec.k, spec.x, spec.delta, alpha)?.value)
}

/// Dispatch on the spec's kind.
pub fn eval(spec: &SumSpec, alpha: f64, table: &PrimeTable) -> Result<Amplitude> {
    match spec.kind {
        SumKind::S => eval_s(spec, alpha, table),
        SumKind::U => Ok(eval_u(spec, alpha)),
        SumKind::T => eval_t(spec, alpha),
    }
}

/// V(alpha) = min(|S_1(lambda1 alpha)|, |S_1(lambda2 alpha)|).
pub fn eval_v(alpha: f64, params: &FormParams, x: f64, table: &PrimeTable) -> Result<f64> {
    let range = PowerRange::primes(table, 1.0, x, params.delta)?;
    let s1 = range.eval(params.lambda[0] * alpha).norm();
    let s2 = range.eval(params.lambda[1] * alpha).norm();
    Ok(s1.min(s2))
}

/// Mean of |S_1|^2 over [0, 1) by the rectangle rule on `n_nodes` equispaced
/// nodes. For n_nodes exceeding the frequency spread this is exact for the
/// underlying trigonometric polynomial, recovering sum (log p)^2.
pub fn unit_mean_square_s1(x: f64, delta: f64, n_nodes: usize, table: &PrimeTable) -> Result<f64> {
    let range = PowerRange::primes(table, 1.0, x, delta)?;
    let mut acc = crate::util::Neumaier::new();
    let n = n_nodes as f64;
    for j in 0..n_nodes {
        let v = range.eval(j as f64 / n);
        acc.add(v.norm_sqr());
    }
    Ok(acc.total() / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn table() -> PrimeTable {
        PrimeTable::sieve(2000).unwrap()
    }

    #[test]
    fn s_at_zero_is_theta_range() {
        let t = table();
        let spec = SumSpec::new(SumKind::S, 1.0, 10.0, 0.1).unwrap();
        let v = eval_s(&spec, 0.0, &t).unwrap();
        assert_relative_eq!(v.re, 5.34710753071747, max_relative = 1e-12);
        assert_eq!(v.im, 0.0);
        // any k: S_k(0) = sum of log p over the range, imaginary part zero
        let spec = SumSpec::new(SumKind::S, 1.2, 500.0, 0.1).unwrap();
        let v = eval_s(&spec, 0.0, &t).unwrap();
        let range = PowerRange::primes(&t, 1.2, 500.0, 0.1).unwrap();
        let direct: f64 = range.weights.iter().sum();
        assert_relative_eq!(v.re, direct, max_relative = 1e-13);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn s_triangle_inequality() {
        let t = table();
        let spec = SumSpec::new(SumKind::S, 1.0, 1000.0, 0.1).unwrap();
        let at_zero = eval_s(&spec, 0.0, &t).unwrap().norm();
        for alpha in [0.37, 0.011, 2.9, -1.3] {
            assert!(eval_s(&spec, alpha, &t).unwrap().norm() <= at_zero);
        }
    }

    #[test]
    fn s_conjugate_symmetry_exact() {
        let t = table();
        for (k, x) in [(1.0, 900.0), (1.2, 700.0), (1.3, 1500.0)] {
            let spec = SumSpec::new(SumKind::S, k, x, 0.1).unwrap();
            for i in 0..100 {
                let alpha = (i as f64 + 0.5) * 0.0371;
                let plus = eval_s(&spec, alpha, &t).unwrap();
                let minus = eval_s(&spec, -alpha, &t).unwrap();
                assert_eq!(minus, plus.conj(), "k={k}, alpha={alpha}");
            }
        }
    }

    #[test]
    fn s1_periodicity_exact() {
        let t = table();
        let spec = SumSpec::new(SumKind::S, 1.0, 1000.0, 0.1).unwrap();
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            // dyadic alpha so that alpha + 1 is exactly representable
            let alpha = rng.gen_range(0u32..u32::MAX) as f64 / 2f64.powi(32);
            let base = eval_s(&spec, alpha, &t).unwrap();
            let shifted = eval_s(&spec, alpha + 1.0, &t).unwrap();
            assert_eq!(base, shifted, "alpha = {alpha}");
        }
    }

    #[test]
    fn u_examples() {
        // U_2(0) with X=100, delta=1e-4: integers 1..10
        let spec = SumSpec::new(SumKind::U, 2.0, 100.0, 1e-4).unwrap();
        assert_eq!(eval_u(&spec, 0.0), Amplitude::new(10.0, 0.0));
        // U_1(1) = count of [10, 100] = 91 exactly (integer alpha)
        let spec = SumSpec::new(SumKind::U, 1.0, 100.0, 0.1).unwrap();
        let v = eval_u(&spec, 1.0);
        assert_eq!(v, Amplitude::new(91.0, 0.0));
        // U_2(1/2) = sum (-1)^n over n=1..10 = 0
        let spec = SumSpec::new(SumKind::U, 2.0, 100.0, 1e-4).unwrap();
        let v = eval_u(&spec, 0.5);
        assert!(v.norm() < 1e-12, "got {v}");
    }

    #[test]
    fn t_closed_form_and_quadrature_agree() {
        // k = 1 closed form is the oracle for the panel quadrature
        let spec = SumSpec::new(SumKind::T, 1.0, 100.0, 0.25).unwrap();
        assert_eq!(eval_t(&spec, 0.0).unwrap(), Amplitude::new(75.0, 0.0));
        for alpha in [0.01, -0.17, 0.9] {
            let closed = eval_t(&spec, alpha).unwrap();
            let quad = eval_t_quadrature(1.0, 100.0, 0.25, alpha).unwrap().value;
            assert!(
                (closed - quad).norm() < 1e-9,
                "alpha={alpha}: {closed} vs {quad}"
            );
        }
    }

    #[test]
    fn t_conjugate_symmetry() {
        for k in [1.0, 1.2] {
            let spec = SumSpec::new(SumKind::T, k, 100.0, 0.1).unwrap();
            let plus = eval_t(&spec, 0.3).unwrap();
            let minus = eval_t(&spec, -0.3).unwrap();
            assert!((minus - plus.conj()).norm() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn v_collapses_at_zero() {
        let t = table();
        let params = FormParams::new([2.0_f64.sqrt(), -1.0, 1.0], 1.2, 0.0, 0.1, 0.01);
        let x = 500.0;
        let v0 = eval_v(0.0, &params, x, &t).unwrap();
        let range = PowerRange::primes(&t, 1.0, x, 0.1).unwrap();
        let theta_range: f64 = range.weights.iter().sum();
        assert_relative_eq!(v0, theta_range, max_relative = 1e-12);
        // pointwise: V <= |S_1(lambda_1 alpha)|
        let alpha = 0.2;
        let s1 = range.eval(params.lambda[0] * alpha).norm();
        assert!(eval_v(alpha, &params, x, &t).unwrap() <= s1);
    }

    #[test]
    fn prepared_range_rejects_small_table() {
        let t = PrimeTable::sieve(50).unwrap();
        let spec = SumSpec::new(SumKind::S, 1.0, 1000.0, 0.1).unwrap();
        assert!(matches!(
            eval_s(&spec, 0.0, &t),
            Err(Error::OutOfTable { .. })
        ));
    }

    #[test]
    fn unit_mean_square_matches_parseval() {
        let t = table();
        let x = 200.0;
        let range = PowerRange::primes(&t, 1.0, x, 0.1).unwrap();
        let anchor: f64 = range.weights.iter().map(|w| w * w).sum();
        let mean = unit_mean_square_s1(x, 0.1, 4 * x as usize, &t).unwrap();
        assert_relative_eq!(mean, anchor, max_relative = 1e-10);
    }
}
