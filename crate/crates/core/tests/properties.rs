//! Cross-module properties: the paper-shaped bounds as fitted-constant
//! checks, randomized invariants, and the measured-then-frozen margins.

use dioph_core::arcs::*;
use dioph_core::expsum::*;
use dioph_core::form::{CircleParams, FormParams};
use dioph_core::kernel;
use dioph_core::lp;
use dioph_core::primes::PrimeTable;
use dioph_core::quad::{integrate_sum_product, unit_phase};
use dioph_core::rational::*;
use num::complex::Complex64;
use num::ToPrimitive;
use proptest::prelude::*;
use std::f64::consts::PI;

fn sqrt2_params() -> FormParams {
    FormParams::new(
        [2.0_f64.sqrt(), -1.0, 1.0],
        1.2,
        std::f64::consts::PI,
        0.1,
        0.05,
    )
    .with_irrational_ratio()
}

// ---------------------------------------------------------------- T_k bounds

/// (bd-Ti): |T_k(alpha)| <= C X^{1/k - 1} min(X, 1/|alpha|). Measured
/// fitted constant stays below 0.99 on the full grid; frozen margin 2.
#[test]
fn t_bound_fitted_constant() {
    let mut worst: f64 = 0.0;
    for k in [1.0, 1.2, 1.3] {
        for x in [1e2, 1e4] {
            let mut alpha = 1e-6;
            while alpha <= 10.0 {
                let spec = SumSpec::new(SumKind::T, k, x, 0.1).unwrap();
                let t = eval_t(&spec, alpha).unwrap().norm();
                let bound = x.powf(1.0 / k - 1.0) * x.min(1.0 / alpha);
                worst = worst.max(t / bound);
                alpha *= 10f64.powf(0.2);
            }
        }
    }
    println!("(bd-Ti) fitted constant at delta = 0.1: {worst:.4}");
    assert!(worst <= 2.0, "fitted constant {worst} above 2");
}

/// The window constant never fixes itself in the source material, so the
/// fitted constant is reported per delta; all stay below 2.
#[test]
fn t_bound_fitted_constant_delta_sweep() {
    for delta in [0.01, 0.1, 0.25] {
        let mut worst: f64 = 0.0;
        for k in [1.0, 1.2, 1.3] {
            let mut alpha = 1e-6;
            while alpha <= 10.0 {
                let spec = SumSpec::new(SumKind::T, k, 1e2, delta).unwrap();
                let t = eval_t(&spec, alpha).unwrap().norm();
                let bound = 1e2f64.powf(1.0 / k - 1.0) * 1e2f64.min(1.0 / alpha);
                worst = worst.max(t / bound);
                alpha *= 10f64.powf(0.2);
            }
        }
        println!("(bd-Ti) fitted constant at delta = {delta}: {worst:.4}");
        assert!(worst <= 2.0);
    }
}

/// (bd-T-U): |T_k - U_k| <= C (1 + |alpha| X); Euler summation puts the
/// true constant near 1, frozen margin 10.
#[test]
fn t_minus_u_fitted_constant() {
    for delta in [0.01, 0.1, 0.25] {
        let mut worst: f64 = 0.0;
        for k in [1.0, 1.2, 1.3] {
            for x in [1e2, 1e4] {
                let mut alpha = 1e-6;
                while alpha <= 10.0 {
                    let spec = SumSpec::new(SumKind::T, k, x, delta).unwrap();
                    let d = (eval_t(&spec, alpha).unwrap() - eval_u(&spec, alpha)).norm();
                    worst = worst.max(d / (1.0 + alpha * x));
                    alpha *= 10f64.powf(0.2);
                }
            }
        }
        println!("(bd-T-U) fitted constant at delta = {delta}: {worst:.4}");
        assert!(worst <= 10.0);
    }
}

// ------------------------------------------------------------- mean values

/// Replacement for the cited mean-value lemma: the average of |S_k|^2 over
/// [-T, T] approaches sum (log p)^2 for k non-integer, checked against the
/// exact sinc-pair expansion of the same average.
#[test]
fn mean_value_of_s_squared() {
    let table = PrimeTable::sieve(1000).unwrap();
    let x = 1000.0;
    let range = PowerRange::primes(&table, 1.2, x, 0.1).unwrap();
    let anchor: f64 = range.weights.iter().map(|w| w * w).sum();
    let t_half = 50.0;
    let s = range.freq_sum(1.0);
    let quad = integrate_sum_product(
        0.0,
        t_half,
        1.0 / (8.0 * x),
        &[&s],
        |_a, sv| Complex64::new(sv[0].norm_sqr(), 0.0),
        u64::MAX,
    )
    .unwrap()
    .value
    .re
        / t_half;
    // independent oracle: (1/2T) int e(theta a) da = sinc(2 pi theta T)
    let mut oracle = 0.0;
    for (i, (pi_pow, wi)) in range.powers.iter().zip(&range.weights).enumerate() {
        for (pj_pow, wj) in range.powers.iter().zip(&range.weights).skip(i + 1) {
            let theta = 2.0 * PI * (pi_pow - pj_pow) * t_half;
            oracle += 2.0 * wi * wj * (theta.sin() / theta);
        }
        oracle += wi * wi;
    }
    println!("mean |S_k|^2: quadrature {quad:.6}, sinc oracle {oracle:.6}, anchor {anchor:.6}");
    assert!((quad - oracle).abs() <= 1e-6 * anchor);
    assert!((quad - anchor).abs() <= 0.05 * anchor);
}

// --------------------------------------------------- minor arc and trivial

/// Minor-arc L^2 bounds with fitted constants over X in {1e3, 1e4}:
/// eta X log X for the linear variables, eta X^{1/k} (log X)^3 for the
/// k-th power. Measured 0.70 / 0.011; frozen margins 2 and 0.5.
#[test]
fn minor_arc_l2_fitted_constants() {
    let table = PrimeTable::sieve(11000).unwrap();
    let params = sqrt2_params();
    let opts = IntegrateOpts::default();
    for x in [1e3, 1e4] {
        let cp = CircleParams::derive(&params, x).unwrap();
        for which in [1usize, 2, 3] {
            let r = minor_arc_l2(&params, &cp, &table, which, &opts).unwrap();
            let (bound, cap) = match which {
                1 | 2 => (cp.eta * x * x.ln(), 2.0),
                _ => (cp.eta * x.powf(1.0 / params.k) * x.ln().powi(3), 0.5),
            };
            let fitted = r.value / bound;
            println!("minor L2 X={x} j={which}: fitted {fitted:.4}");
            assert!(fitted <= cap, "fitted {fitted} above {cap}");
            assert!(r.value >= 0.0);
        }
    }
}

/// Trivial-arc tail: C_j <= C X log X / (|l_j| R) with fitted constant,
/// plus the certified |I(trivial)| bound against the actual quadrature.
#[test]
fn trivial_arc_fitted_and_certified() {
    let table = PrimeTable::sieve(1100).unwrap();
    let params = sqrt2_params();
    let opts = IntegrateOpts::default();
    let x = 1e3;
    let cp = CircleParams::derive(&params, x).unwrap();
    let tt = trivial_arc_tail(&params, &cp, &table, &opts).unwrap();
    for j in 0..2 {
        println!("trivial C_{} fitted {:.4}", j + 1, tt.fitted[j]);
        assert!(tt.fitted[j] <= 2.0);
    }
    // the full trivial-arc bound has the shape X^{1+1/k} log X / R
    let shape = x.powf(1.0 + 1.0 / params.k) * x.ln() / cp.r;
    let shape_fitted = tt.i_trivial_bound / shape;
    println!("|I(trivial)| bound / shape: {shape_fitted:.4}");
    assert!(shape_fitted <= 1.0);
    // the bound is certified: the measured trivial integral sits below it
    let (trunc, _) = auto_truncation(&params, &cp, &table, &opts).unwrap();
    let trunc = trunc.min(max_truncation_for_budget(&params, &cp, &opts));
    let trivial = integrate_i(
        &params,
        &cp,
        dioph_core::form::ArcPiece::TrivialTruncated,
        &table,
        trunc,
        &opts,
    )
    .unwrap();
    assert!(
        trivial.value.norm() <= tt.i_trivial_bound + trivial.abs_error_est,
        "trivial integral {} above certified bound {}",
        trivial.value.norm(),
        tt.i_trivial_bound
    );
}

// ------------------------------------------------------------- major arc

/// At desk scale the error terms already sit below the main term, the
/// four-way splitting telescopes, and the two J1 routes agree within the
/// documented bound.
#[test]
fn major_arc_error_terms_behave() {
    let table = PrimeTable::sieve(1000).unwrap();
    let params = sqrt2_params();
    let cp = CircleParams::derive(&params, 500.0).unwrap();
    let opts = IntegrateOpts::default();
    let et = major_arc_error_terms(&params, &cp, &table, &opts).unwrap();
    let n = et.normalizer;
    println!(
        "J1..J4 / norm: {:.5} {:.5} {:.5} {:.5}; A2 B2 A4 B4 / norm: {:.5} {:.5} {:.5} {:.5}",
        et.j1.value.re / n,
        et.j2.value.re / n,
        et.j3.value.re / n,
        et.j4.value.re / n,
        et.a2.value / n,
        et.b2.value / n,
        et.a4.value / n,
        et.b4.value / n
    );
    assert!(et.j2.value.norm() < et.j1.value.norm());
    assert!(et.telescoping_gap <= 1e-9 * et.j1.value.norm().max(1.0));
    for v in [et.a2.value, et.b2.value, et.a4.value, et.b4.value] {
        assert!(v.is_finite() && v >= 0.0);
    }
    // the splitting telescopes against the direct major-arc integral
    assert!((et.i_major.value.re - (et.j1.value.re + et.j2.value.re + et.j3.value.re + et.j4.value.re)).abs() <= 1e-9 * et.i_major.value.re.abs().max(1.0));
}

#[test]
fn j1_routes_agree_within_documented_bound() {
    let params = sqrt2_params();
    let cp = CircleParams::derive(&params, 500.0).unwrap();
    let j1 = major_arc_j1(&params, &cp, &IntegrateOpts::default(), true).unwrap();
    let gap = j1.route_gap.unwrap();
    println!(
        "J1 route gap {gap:.6} vs documented bound {:.4} (fitted {:.2e})",
        j1.documented_gap_bound,
        gap / j1.documented_gap_bound
    );
    assert!(gap <= j1.documented_gap_bound);
    // lower-bound flavour of the main term: the major-arc integral carries
    // at least half of J1 at this configuration
    let table = PrimeTable::sieve(600).unwrap();
    let major = integrate_i(
        &params,
        &cp,
        dioph_core::form::ArcPiece::Major,
        &table,
        0.0,
        &IntegrateOpts::default(),
    )
    .unwrap();
    assert!(major.value.re >= 0.5 * j1.three_d.value);
}

// ---------------------------------------------------- Vaughan and Lemma V

/// The cited pointwise bound on S_1 near rationals, as a fitted constant
/// over q <= 50 (no attempt at the log^4 constant).
#[test]
fn vaughan_bound_fitted_constant() {
    let table = PrimeTable::sieve(1100).unwrap();
    let x = 1000.0;
    let range = PowerRange::primes(&table, 1.0, x, 0.1).unwrap();
    let mut worst: f64 = 0.0;
    for q in 1..=50u64 {
        for a in 1..=q {
            if num::integer::gcd(a, q) != 1 {
                continue;
            }
            for th in [-0.7, 0.0, 0.4] {
                let alpha = a as f64 / q as f64 + th / (q * q) as f64;
                let s = range.eval(alpha).norm();
                let bound =
                    (x / (q as f64).sqrt() + (x * q as f64).sqrt() + x.powf(0.8)) * x.ln().powi(4);
                worst = worst.max(s / bound);
            }
        }
    }
    println!("Vaughan-shape fitted constant: {worst:.6}");
    assert!(worst <= 1.0);
}

/// sup over the minor arc of V = min(|S_1(l1 a)|, |S_1(l2 a)|) against
/// X^{4/5 + 1/(10k)} log^4 X at the convergent-driven scale q = 29.
#[test]
fn minor_arc_v_sup_recorded() {
    let table = PrimeTable::sieve(600).unwrap();
    let params = sqrt2_params();
    let convs = convergents(&QuadraticReal::sqrt_of(2), 8).unwrap();
    let conv = convs.iter().find(|c| c.q_f64() == 29.0).unwrap();
    let x = scale_sequence(params.k, conv).unwrap().x;
    let cp = CircleParams::derive(&params, x).unwrap();
    let mut vmax: f64 = 0.0;
    let n = 400;
    for i in 0..n {
        let frac = i as f64 / (n - 1) as f64;
        let alpha = cp.major_halfwidth() * (cp.r / cp.major_halfwidth()).powf(frac) * 1.00001;
        vmax = vmax.max(eval_v(alpha, &params, x, &table).unwrap());
    }
    let bound = x.powf(0.8 + 1.0 / (10.0 * params.k)) * x.ln().powi(4);
    println!("sup V over minor-arc grid at q=29: {vmax:.3}; bound {bound:.3}; fitted {:.6}", vmax / bound);
    assert!(vmax > 0.0 && vmax / bound < 1.0);
}

// ------------------------------------------------------------- dichotomy

#[test]
fn dichotomy_report_at_canonical_point() {
    let table_unused = ();
    let _ = table_unused;
    let params = sqrt2_params();
    let convs = convergents(&QuadraticReal::sqrt_of(2), 8).unwrap();
    let conv = convs.iter().find(|c| c.q_f64() == 29.0).unwrap();
    let x = scale_sequence(params.k, conv).unwrap().x;
    let cp = CircleParams::derive(&params, x).unwrap();
    let alpha = 2.0 * cp.major_halfwidth();
    let rep = dichotomy_check(alpha, &params, &cp, conv).unwrap();
    println!("dichotomy at 2P/X: {rep:?}");
    assert!(rep.approx1.q >= 1 && rep.approx2.q >= 1);
    assert!((rep.approx1.q as f64) <= rep.tau && (rep.approx2.q as f64) <= rep.tau);
    assert!(rep.approx1.quality <= 1.0 / rep.tau * 1.0000001);
    assert!(rep.bd1_threshold == 1.0 / (2.0 * 29.0));
    // outside the minor arc: precondition error
    assert!(dichotomy_check(cp.major_halfwidth() * 0.5, &params, &cp, conv).is_err());
}

#[test]
fn dichotomy_flags_major_arc_like_points() {
    // small tau and a small second coefficient force a (0, 1) approximant
    let params = FormParams::new([2.0_f64.sqrt(), -0.025, 1.0], 1.2, 0.0, 0.1, 0.05)
        .with_irrational_ratio();
    let cp = CircleParams::derive(&params, 20.0).unwrap();
    let conv = Convergent {
        a: num::BigInt::from(-17),
        q: num::BigInt::from(3),
        index: 2,
        certified: true,
    };
    let alpha = 0.4;
    let rep = dichotomy_check(alpha, &params, &cp, &conv).unwrap();
    assert!(rep.major_arc_like, "{rep:?}");
}

#[test]
fn dichotomy_sweep_runs_and_reports() {
    let params = sqrt2_params();
    let convs = convergents(&QuadraticReal::sqrt_of(2), 8).unwrap();
    let conv = convs.iter().find(|c| c.q_f64() == 29.0).unwrap();
    let x = scale_sequence(params.k, conv).unwrap().x;
    let cp = CircleParams::derive(&params, x).unwrap();
    let sweep = dichotomy_sweep(&params, &cp, conv, 100, 42).unwrap();
    println!(
        "dichotomy sweep: {} samples, {} major-like, {} with both q <= Q, bd1 effective: {}",
        sweep.samples, sweep.major_arc_like, sweep.both_q_small, sweep.bd1_effective
    );
    assert_eq!(sweep.samples, 100);
    // the smallest convergent index where (bd-1) becomes effective is
    // reported rather than assumed
    let rho = 2.0_f64.sqrt();
    let first = bd1_first_effective(params.k, rho, &convs);
    println!("first effective convergent index: {first:?}");
}

// ------------------------------------------------------------- scan knobs

#[test]
fn scan_counts_monotone_in_eps() {
    let table = PrimeTable::sieve(700).unwrap();
    let mut params = sqrt2_params();
    let convs = convergents(&QuadraticReal::sqrt_of(2), 6).unwrap();
    let base = dioph_core::search::theorem_scan(&params, &convs, &table).unwrap();
    params.eps = 0.08;
    let wider = dioph_core::search::theorem_scan(&params, &convs, &table).unwrap();
    for (a, b) in base.rows.iter().zip(&wider.rows) {
        assert!(b.eta > a.eta);
        assert!(b.count >= a.count, "q = {}", a.q);
    }
}

// ------------------------------------------------------------- proptest

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_envelope_random(eta in 1e-3f64..10.0, alpha in -1e4f64..1e4) {
        let k = kernel::fejer(eta, alpha);
        prop_assert!(k >= 0.0);
        prop_assert!(k <= eta * eta);
        if alpha != 0.0 {
            let r = 1.0 / (PI * alpha.abs());
            prop_assert!(k <= r * r);
        }
        prop_assert_eq!(k, kernel::fejer(eta, -alpha));
    }

    #[test]
    fn unit_phase_conjugate_random(t in -1e6f64..1e6) {
        prop_assert_eq!(unit_phase(-t), unit_phase(t).conj());
        let z = unit_phase(t);
        prop_assert!((z.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_contract_random(alpha in -100.0f64..100.0, tau in 1.0f64..1e7) {
        let d = dirichlet(alpha, tau).unwrap();
        prop_assert!(d.q >= 1);
        prop_assert!((d.q as f64) <= tau);
        // exact verification over the dyadic value of alpha
        use num::{BigInt, BigRational, Signed};
        let exact = BigRational::from_float(alpha).unwrap();
        let defect = (&exact * BigInt::from(d.q)
            - BigRational::from_integer(BigInt::from(d.a)))
        .abs();
        let tau_exact = BigRational::from_float(tau).unwrap();
        prop_assert!(defect <= tau_exact.recip());
    }

    #[test]
    fn lp_matches_closed_form_random(num_ in 101i64..133, den in 100i64..=100) {
        let k = num::BigRational::new(num_.into(), den.into());
        let sol = lp::solve_lp(&lp::build_lp_rational(k.clone()).unwrap());
        let want = lp::closed_form(&k);
        prop_assert_eq!(sol.exact.unwrap(), want);
    }

    #[test]
    fn scale_round_trip_random(q in 2u64..1_000_000, kmil in 1001u64..1333) {
        let k = kmil as f64 / 1000.0;
        let conv = Convergent {
            a: num::BigInt::from(1),
            q: num::BigInt::from(q),
            index: 1,
            certified: false,
        };
        let s = scale_sequence(k, &conv).unwrap();
        prop_assert!((s.q_round_trip - q as f64).abs() <= 1e-9 * q as f64);
    }

    #[test]
    fn windowed_count_equals_naive_random(seed in 0u64..256) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let table = PrimeTable::sieve(400).unwrap();
        let params = FormParams::new(
            [
                rng.gen_range(0.5..2.0),
                -rng.gen_range(0.5..2.0),
                if rng.gen_bool(0.5) { 1.0 } else { -1.0 } * rng.gen_range(0.5..2.0),
            ],
            rng.gen_range(1.0..1.35),
            rng.gen_range(-5.0..5.0),
            rng.gen_range(0.05..0.3),
            0.01,
        );
        let x = rng.gen_range(60.0..350.0);
        let eta = rng.gen_range(0.05..2.0);
        let fast = dioph_core::search::count_solutions(&params, x, eta, &table).unwrap();
        // naive oracle with identical window expressions
        let r1 = PowerRange::primes(&table, 1.0, x, params.delta).unwrap();
        let r3 = PowerRange::primes(&table, params.k, x, params.delta).unwrap();
        let mut slow = 0u64;
        for &p2 in &r1.values {
            for pow3 in &r3.powers {
                let shift = params.varpi - params.lambda[1] * p2 as f64 - params.lambda[2] * pow3;
                let (lo, hi) = (shift - eta, shift + eta);
                for &p1 in &r1.values {
                    let v = params.lambda[0] * p1 as f64;
                    if lo <= v && v <= hi {
                        slow += 1;
                    }
                }
            }
        }
        prop_assert_eq!(fast, slow);
        // and the weighted sum never exceeds its coarse majorant
        let sum = dioph_core::search::exact_weighted_sum(&params, x, eta, &table).unwrap();
        prop_assert!(sum <= eta * x.ln().powi(3) * fast as f64 * (1.0 + 1e-12) + 1e-12);
    }
}

// --------------------------------------------------------- prime anchors

/// The Parseval anchor is read through one function, so every consumer
/// sees bit-identical values.
#[test]
fn parseval_anchor_bit_identical() {
    let table = PrimeTable::sieve(1100).unwrap();
    let a = table.range(100.0, 1000.0).unwrap().sum_log_sq();
    let b = table.range(100.0, 1000.0).unwrap().sum_log_sq();
    assert_eq!(a.to_bits(), b.to_bits());
    let mean = unit_mean_square_s1(1000.0, 0.1, 4000, &table).unwrap();
    assert!((mean - a).abs() <= 1e-8 * a);
}

/// Certified convergents of the (negated) coefficient ratio drive the scan;
/// their certificates re-verified here in exact arithmetic.
#[test]
fn negative_ratio_convergents_certified() {
    let ratio = parse_ratio("-sqrt(2)").unwrap();
    let convs = convergents(&ratio, 12).unwrap();
    assert!(convs.iter().all(|c| c.certified));
    for c in &convs {
        // |x - a/q| <= 1/q^2 exactly
        let defect = ratio.mul_int(&c.q).sub_int(&c.a);
        let bound = QuadraticReal::from_rational(1.into(), c.q.clone()).unwrap();
        assert!(defect.abs_cmp(&bound) != std::cmp::Ordering::Greater);
    }
    // denominators eventually match sqrt(2)'s: 1, 1, 2, 5, 12, 29, 70
    let qs: Vec<i64> = convs.iter().map(|c| c.q.to_i64().unwrap()).collect();
    assert_eq!(&qs[..7], &[1, 1, 2, 5, 12, 29, 70]);
}
