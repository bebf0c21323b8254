//! Problem definition and derived circle-method parameters.

use crate::error::{Error, Result};
use crate::rational::{parse_ratio, QuadraticReal};
use serde::{Deserialize, Serialize};

/// The form lambda1 p1 + lambda2 p2 + lambda3 p3^k, the target varpi, and
/// the fixed window/slack constants.
#[derive(Debug, Clone, Serialize)]
pub struct FormParams {
    pub lambda: [f64; 3],
    pub k: f64,
    pub varpi: f64,
    pub delta: f64,
    pub eps: f64,
    /// Irrationality of lambda1/lambda2 cannot be inferred from floats; the
    /// user asserts it (or supplies an exact ratio that proves it).
    pub assert_ratio_irrational: bool,
    /// Include the (log X)^6 factor in eta instead of absorbing it into eps.
    pub eta_log6: bool,
}

impl FormParams {
    pub fn new(lambda: [f64; 3], k: f64, varpi: f64, delta: f64, eps: f64) -> Self {
        Self {
            lambda,
            k,
            varpi,
            delta,
            eps,
            assert_ratio_irrational: false,
            eta_log6: false,
        }
    }

    pub fn with_irrational_ratio(mut self) -> Self {
        self.assert_ratio_irrational = true;
        self
    }
}

/// Validation mode: the theorem hypotheses in full, or a flagged
/// exploratory run (k = 1, k >= 4/3, unasserted ratio, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    Theorem,
    Exploratory,
    Invalid,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Hard checks invalidate the configuration; soft ones only demote it
    /// to exploratory mode or record a warning.
    pub hard: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
    pub mode: Mode,
    pub valid: bool,
}

/// Checks every hypothesis and reports pass/fail per invariant.
pub fn validate(params: &FormParams) -> ValidationReport {
    let mut checks = Vec::new();
    let l = params.lambda;

    let nonzero = l.iter().all(|&x| x != 0.0 && x.is_finite());
    checks.push(CheckResult {
        name: "nonzero_coefficients",
        passed: nonzero,
        hard: true,
        detail: format!("lambda = {l:?}"),
    });

    let pos = l.iter().filter(|&&x| x > 0.0).count();
    let mixed = nonzero && pos >= 1 && pos <= 2;
    checks.push(CheckResult {
        name: "not_all_same_sign",
        passed: mixed,
        hard: true,
        detail: format!("{pos} positive of 3"),
    });

    let k_ok = params.k >= 1.0 && params.k.is_finite();
    checks.push(CheckResult {
        name: "k_at_least_one",
        passed: k_ok,
        hard: true,
        detail: format!("k = {}", params.k),
    });

    let delta_ok = params.delta > 0.0 && params.delta < 1.0;
    checks.push(CheckResult {
        name: "delta_in_unit_interval",
        passed: delta_ok,
        hard: true,
        detail: format!("delta = {}", params.delta),
    });

    let eps_ok = params.eps > 0.0 && params.eps < 1.0;
    checks.push(CheckResult {
        name: "eps_positive",
        passed: eps_ok,
        hard: true,
        detail: format!("eps = {}", params.eps),
    });

    checks.push(CheckResult {
        name: "eps_below_recommended",
        passed: params.eps < 0.01,
        hard: false,
        detail: format!("eps = {} (recommended < 1/100)", params.eps),
    });

    let theorem_window = params.k > 1.0 && params.k < 4.0 / 3.0;
    checks.push(CheckResult {
        name: "theorem_exponent_window",
        passed: theorem_window,
        hard: false,
        detail: format!("k = {} in (1, 4/3)?", params.k),
    });

    checks.push(CheckResult {
        name: "ratio_irrationality_asserted",
        passed: params.assert_ratio_irrational,
        hard: false,
        detail: "lambda1/lambda2 irrational per user assertion".into(),
    });

    let valid = checks.iter().filter(|c| c.hard).all(|c| c.passed);
    let mode = if !valid {
        Mode::Invalid
    } else if theorem_window && params.assert_ratio_irrational {
        Mode::Theorem
    } else {
        Mode::Exploratory
    };
    ValidationReport {
        checks,
        mode,
        valid,
    }
}

/// The three arcs: major [-P/X, P/X], minor +-(P/X, R), and the trivial
/// tail beyond +-R. Disjoint by construction, union the whole line.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ArcDecomposition {
    pub major_halfwidth: f64,
    pub minor_hi: f64,
}

/// Piece of the line over which I(eta, varpi, .) is integrated. The trivial
/// arc and the full line carry an explicit truncation point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ArcPiece {
    Major,
    Minor,
    TrivialTruncated,
    FullTruncated,
}

/// Derived circle-method quantities at scale X.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CircleParams {
    pub x: f64,
    pub p: f64,
    /// Detection width in force: X^(3/10 - 2/(5k) + eps), times (log X)^6
    /// when the configuration asks for that normalisation.
    pub eta: f64,
    /// The other normalisation of eta, reported alongside: the two differ
    /// by the (log X)^6 factor the theorem absorbs into eps.
    pub eta_other_norm: f64,
    pub r: f64,
    /// Minor-arc approximation scale Q = X^(2/5 - 1/(5k)).
    pub q_approx: f64,
    pub arcs: ArcDecomposition,
}

pub fn eta_exponent(k: f64, eps: f64) -> f64 {
    0.3 - 2.0 / (5.0 * k) + eps
}

pub fn p_exponent(k: f64, eps: f64) -> f64 {
    5.0 / (6.0 * k) - eps
}

pub fn q_exponent(k: f64) -> f64 {
    0.4 - 1.0 / (5.0 * k)
}

impl CircleParams {
    /// Derives P, eta, R, Q and the arc decomposition at scale X.
    pub fn derive(params: &FormParams, x: f64) -> Result<Self> {
        let report = validate(params);
        if !report.valid {
            return Err(Error::InvalidConfig(format!(
                "invalid parameters: {:?}",
                report
                    .checks
                    .iter()
                    .filter(|c| c.hard && !c.passed)
                    .map(|c| c.name)
                    .collect::<Vec<_>>()
            )));
        }
        if x < 10.0 {
            return Err(Error::ScaleTooSmall {
                x,
                reason: "X must be at least 10".into(),
            });
        }
        let log_x = x.ln();
        let p = x.powf(p_exponent(params.k, params.eps));
        let eta_plain = x.powf(eta_exponent(params.k, params.eps));
        let (eta, eta_other_norm) = if params.eta_log6 {
            (eta_plain * log_x.powi(6), eta_plain)
        } else {
            (eta_plain, eta_plain * log_x.powi(6))
        };
        let r = log_x.powf(1.5) / (eta * eta);
        let q_approx = x.powf(q_exponent(params.k));
        if q_approx > p {
            return Err(Error::ScaleTooSmall {
                x,
                reason: format!("Q = {q_approx} exceeds P = {p}"),
            });
        }
        if p / x >= r {
            return Err(Error::ScaleTooSmall {
                x,
                reason: format!("P/X = {} is not below R = {r}", p / x),
            });
        }
        Ok(Self {
            x,
            p,
            eta,
            eta_other_norm,
            r,
            q_approx,
            arcs: ArcDecomposition {
                major_halfwidth: p / x,
                minor_hi: r,
            },
        })
    }

    pub fn major_halfwidth(&self) -> f64 {
        self.arcs.major_halfwidth
    }

    /// Positive-side intervals of an arc piece; by conjugate symmetry every
    /// integrand of interest satisfies f(-a) = conj(f(a)), so integrals over
    /// the symmetric arcs are twice the real part over these.
    pub fn positive_intervals(&self, piece: ArcPiece, trunc: f64) -> Vec<(f64, f64)> {
        let a = self.arcs.major_halfwidth;
        match piece {
            ArcPiece::Major => vec![(0.0, a)],
            ArcPiece::Minor => vec![(a, self.r)],
            ArcPiece::TrivialTruncated => vec![(self.r, trunc.max(self.r))],
            ArcPiece::FullTruncated => vec![(0.0, trunc)],
        }
    }
}

fn default_delta() -> f64 {
    0.1
}

fn default_eps() -> f64 {
    0.01
}

/// JSON configuration. Unknown keys are rejected.
///
/// ```json
/// {"lambda": [1.4142135623730951, -1.0, 1.0], "k": 1.2, "varpi": 3.141592653589793,
///  "delta": 0.1, "eps": 0.05, "q": 29, "ratio": "-sqrt(2)"}
/// ```
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FormConfig {
    pub lambda: [f64; 3],
    pub k: f64,
    #[serde(default)]
    pub varpi: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// Scale given directly ...
    #[serde(rename = "X", default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    /// ... or through a convergent denominator via X = q^(5k/(k+2)).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    /// Exact ratio lambda1/lambda2 in the mini-grammar, e.g. "-sqrt(2)".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assert_irrational: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_log6: Option<bool>,
}

impl FormConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: FormConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        if cfg.x.is_some() && cfg.q.is_some() {
            return Err(Error::InvalidConfig(
                "give either X or q, not both".into(),
            ));
        }
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Exact ratio lambda1/lambda2, when one was supplied. Checked for
    /// consistency with the floating coefficients.
    pub fn exact_ratio(&self) -> Result<Option<QuadraticReal>> {
        let Some(text) = &self.ratio else {
            return Ok(None);
        };
        let value = parse_ratio(text)?;
        let have = self.lambda[0] / self.lambda[1];
        let want = value.to_f64();
        if (have - want).abs() > 1e-9 * want.abs().max(1.0) {
            return Err(Error::InvalidConfig(format!(
                "ratio expression {text} = {want} disagrees with lambda1/lambda2 = {have}"
            )));
        }
        Ok(Some(value))
    }

    pub fn to_params(&self) -> Result<FormParams> {
        let exact = self.exact_ratio()?;
        let asserted = self
            .assert_irrational
            .unwrap_or_else(|| exact.as_ref().is_some_and(|x| x.certified_irrational()));
        Ok(FormParams {
            lambda: self.lambda,
            k: self.k,
            varpi: self.varpi,
            delta: self.delta,
            eps: self.eps,
            assert_ratio_irrational: asserted,
            eta_log6: self.eta_log6.unwrap_or(false),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_theorem_configuration() {
        let p = FormParams::new([1.0, -1.0, 1.0], 1.2, 0.0, 0.1, 0.01).with_irrational_ratio();
        let r = validate(&p);
        assert!(r.valid);
        assert_eq!(r.mode, Mode::Theorem);
    }

    #[test]
    fn rejects_all_same_sign() {
        let p = FormParams::new([1.0, 2.0, 3.0], 1.2, 0.0, 0.1, 0.01);
        let r = validate(&p);
        assert!(!r.valid);
        assert_eq!(r.mode, Mode::Invalid);
        assert!(r
            .checks
            .iter()
            .any(|c| c.name == "not_all_same_sign" && !c.passed));
    }

    #[test]
    fn k_outside_window_is_exploratory() {
        let p = FormParams::new([1.0, -1.0, 1.0], 1.5, 0.0, 0.1, 0.01).with_irrational_ratio();
        let r = validate(&p);
        assert!(r.valid);
        assert_eq!(r.mode, Mode::Exploratory);
    }

    #[test]
    fn rejects_zero_coefficient_and_bad_delta() {
        let p = FormParams::new([0.0, -1.0, 1.0], 1.2, 0.0, 0.1, 0.01);
        assert!(!validate(&p).valid);
        let p = FormParams::new([1.0, -1.0, 1.0], 1.2, 0.0, 1.5, 0.01);
        assert!(!validate(&p).valid);
        let p = FormParams::new([1.0, -1.0, 1.0], 0.9, 0.0, 0.1, 0.01);
        assert!(!validate(&p).valid);
    }

    #[test]
    fn eta_exponent_values() {
        // k = 1, eps = 0: 3/10 - 2/5 = -1/10, Vaughan's exponent
        assert!((eta_exponent(1.0, 0.0) + 0.1).abs() < 1e-15);
        // k = 4/3, eps = 0: boundary, exponent 0
        assert!(eta_exponent(4.0 / 3.0, 0.0).abs() < 1e-15);
        // shrinking window across the admissible range
        for i in 1..100 {
            let k = 1.0 + (i as f64 / 100.0) * (4.0 / 3.0 - 1.0);
            if k < 4.0 / 3.0 {
                assert!(eta_exponent(k, 0.0) < 0.0, "k = {k}");
            }
        }
    }

    #[test]
    fn derive_circle_params_closed_forms() {
        let p = FormParams::new([1.0, -1.0, 1.0], 1.2, 0.0, 0.1, 0.01).with_irrational_ratio();
        let cp = CircleParams::derive(&p, 1e4).unwrap();
        let expected_p = 10f64.powf(4.0 * (5.0 / 7.2 - 0.01));
        assert!((cp.p - expected_p).abs() < 1e-6 * expected_p);
        assert!((cp.eta - 1e4f64.powf(eta_exponent(1.2, 0.01))).abs() < 1e-12);
        assert!((cp.r - 1e4f64.ln().powf(1.5) / (cp.eta * cp.eta)).abs() < 1e-9);
        assert!(cp.q_approx <= cp.p);
        assert!(cp.major_halfwidth() < cp.r);
    }

    #[test]
    fn derive_is_monotone_in_x() {
        let p = FormParams::new([1.0, -1.0, 1.0], 1.2, 0.0, 0.1, 0.01).with_irrational_ratio();
        let mut prev: Option<CircleParams> = None;
        for exp in 1..8 {
            let cp = CircleParams::derive(&p, 10f64.powi(exp + 1)).unwrap();
            if let Some(prior) = prev {
                assert!(cp.p > prior.p);
                assert!(cp.r > prior.r);
            }
            prev = Some(cp);
        }
    }

    #[test]
    fn derive_rejects_tiny_x() {
        let p = FormParams::new([1.0, -1.0, 1.0], 1.2, 0.0, 0.1, 0.01).with_irrational_ratio();
        assert!(matches!(
            CircleParams::derive(&p, 5.0),
            Err(Error::ScaleTooSmall { .. })
        ));
    }

    #[test]
    fn q_below_p_across_window() {
        let p0 = FormParams::new([1.0, -1.0, 1.0], 1.0, 0.0, 0.1, 0.001).with_irrational_ratio();
        for i in 0..=32 {
            let k = 1.0 + (i as f64 / 32.0) * (4.0 / 3.0 - 1.0);
            let params = FormParams { k, ..p0.clone() };
            for x in [10.0, 1e3, 1e6] {
                let cp = CircleParams::derive(&params, x).unwrap();
                assert!(cp.q_approx <= cp.p, "k = {k}, X = {x}");
            }
        }
    }

    #[test]
    fn config_parses_and_rejects_unknown_keys() {
        let cfg = FormConfig::from_json(
            r#"{"lambda":[1.4142135623730951,-1.0,1.0],"k":1.2,"varpi":3.141592653589793,
                "delta":0.1,"eps":0.05,"q":29,"ratio":"-sqrt(2)"}"#,
        )
        .unwrap();
        let params = cfg.to_params().unwrap();
        assert!(params.assert_ratio_irrational);
        assert!(cfg.exact_ratio().unwrap().unwrap().certified_irrational());

        let bad = FormConfig::from_json(r#"{"lambda":[1,-1,1],"k":1.2,"bogus":3}"#);
        assert!(bad.is_err());
        let both = FormConfig::from_json(r#"{"lambda":[1,-1,1],"k":1.2,"X":100,"q":12}"#);
        assert!(both.is_err());
    }

    #[test]
    fn config_catches_inconsistent_ratio() {
        let cfg = FormConfig::from_json(r#"{"lambda":[1.0,-1.0,1.0],"k":1.2,"ratio":"sqrt(2)"}"#)
            .unwrap();
        assert!(cfg.exact_ratio().is_err());
    }

    #[test]
    fn eta_log6_flag() {
        let mut p = FormParams::new([1.0, -1.0, 1.0], 1.2, 0.0, 0.1, 0.01).with_irrational_ratio();
        let plain = CircleParams::derive(&p, 1e4).unwrap();
        // both normalisations reported, differing by (log X)^6
        let ratio = plain.eta_other_norm / plain.eta;
        assert!((ratio - 1e4f64.ln().powi(6)).abs() < 1e-6 * ratio);
        // asking for the (log X)^6 normalisation at desk scale degenerates
        // the decomposition (R collapses below P/X): an informative error
        p.eta_log6 = true;
        assert!(matches!(
            CircleParams::derive(&p, 1e4),
            Err(Error::ScaleTooSmall { .. })
        ));
    }
}
