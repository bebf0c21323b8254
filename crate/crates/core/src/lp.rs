//! The exponent linear program in (1/a, b, c).
//!
//! Writing X = q^a, Q = X^b, eta = X^-c, the admissible exponents satisfy
//! six constraint families; the strongest detection width at a given k is
//! the vertex maximising c. Everything runs in exact rational arithmetic
//! (any f64 input is itself a rational), so the closed-form comparison is
//! exact rather than a tolerance check.

use crate::error::{Error, Result};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{FromPrimitive, One, ToPrimitive, Zero};

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// One inequality coeffs . x <= rhs over x = (inv_a, b, c).
#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: [BigRational; 3],
    pub rhs: BigRational,
    pub label: &'static str,
}

#[derive(Debug, Clone)]
pub struct ExponentLP {
    pub k: BigRational,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub inv_a: f64,
    pub b: f64,
    pub c: f64,
    pub status: LpStatus,
    pub active_set: Vec<usize>,
    /// The exact optimum, when one exists.
    pub exact: Option<[BigRational; 3]>,
}

/// Builds the six constraint families (seven scalar inequalities) at
/// exponent k.
pub fn build_lp_rational(k: BigRational) -> Result<ExponentLP> {
    if k < BigRational::one() {
        return Err(Error::Precondition(format!("k = {k} must be >= 1")));
    }
    let zero = BigRational::zero;
    let one = BigRational::one;
    let constraints = vec![
        Constraint {
            coeffs: [one(), zero(), zero()],
            rhs: one(),
            label: "inv_a <= 1",
        },
        Constraint {
            coeffs: [zero(), -one(), zero()],
            rhs: zero(),
            label: "b >= 0",
        },
        Constraint {
            coeffs: [zero(), one(), zero()],
            rhs: ratio(5, 6) / k.clone(),
            label: "b <= 5/(6k)",
        },
        Constraint {
            coeffs: [zero(), zero(), -one()],
            rhs: zero(),
            label: "c >= 0",
        },
        Constraint {
            coeffs: [one(), ratio(2, 1), zero()],
            rhs: one(),
            label: "bd-1: 2b - 1 <= -inv_a",
        },
        Constraint {
            coeffs: [-one(), ratio(2, 1), ratio(2, 1)],
            rhs: zero(),
            label: "bd-2: 2b + 2c <= inv_a",
        },
        Constraint {
            coeffs: [zero(), ratio(-1, 2), one()],
            rhs: (one() - k.clone()) / (ratio(2, 1) * k.clone()),
            label: "eta-choice: -c >= 1/2 - 1/(2k) - b/2",
        },
    ];
    Ok(ExponentLP { k, constraints })
}

/// f64 entry point; the float is converted exactly.
pub fn build_lp(k: f64) -> Result<ExponentLP> {
    let exact = BigRational::from_f64(k)
        .ok_or_else(|| Error::Precondition(format!("k = {k} is not finite")))?;
    build_lp_rational(exact)
}

fn det3(m: &[[BigRational; 3]; 3]) -> BigRational {
    let [a, b, c] = &m[0];
    let [d, e, f] = &m[1];
    let [g, h, i] = &m[2];
    a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
}

/// Vertex enumeration over all constraint triples, exact feasibility test,
/// objective: maximise c, tie-break: maximise inv_a.
pub fn solve_lp(lp: &ExponentLP) -> LpSolution {
    let n = lp.constraints.len();
    let mut best: Option<[BigRational; 3]> = None;
    for i in 0..n {
        for j in (i + 1)..n {
            for l in (j + 1)..n {
                let rows = [&lp.constraints[i], &lp.constraints[j], &lp.constraints[l]];
                let m = [
                    rows[0].coeffs.clone(),
                    rows[1].coeffs.clone(),
                    rows[2].coeffs.clone(),
                ];
                let det = det3(&m);
                if det.is_zero() {
                    continue;
                }
                // Cramer
                let mut x = [
                    BigRational::zero(),
                    BigRational::zero(),
                    BigRational::zero(),
                ];
                for col in 0..3 {
                    let mut mc = m.clone();
                    for (row, rc) in mc.iter_mut().zip(&rows) {
                        row[col] = rc.rhs.clone();
                    }
                    x[col] = det3(&mc) / det.clone();
                }
                let feasible = lp.constraints.iter().all(|c| {
                    let lhs: BigRational = c
                        .coeffs
                        .iter()
                        .zip(&x)
                        .map(|(a, v)| a * v)
                        .fold(BigRational::zero(), |s, t| s + t);
                    lhs <= c.rhs
                });
                if !feasible {
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some(cur) => x[2] > cur[2] || (x[2] == cur[2] && x[0] > cur[0]),
                };
                if better {
                    best = Some(x);
                }
            }
        }
    }
    match best {
        None => LpSolution {
            inv_a: f64::NAN,
            b: f64::NAN,
            c: f64::NAN,
            status: LpStatus::Infeasible,
            active_set: Vec::new(),
            exact: None,
        },
        Some(x) => {
            let active_set = lp
                .constraints
                .iter()
                .enumerate()
                .filter(|(_, c)| {
                    let lhs: BigRational = c
                        .coeffs
                        .iter()
                        .zip(&x)
                        .map(|(a, v)| a * v)
                        .fold(BigRational::zero(), |s, t| s + t);
                    lhs == c.rhs
                })
                .map(|(idx, _)| idx)
                .collect();
            LpSolution {
                inv_a: x[0].to_f64().unwrap(),
                b: x[1].to_f64().unwrap(),
                c: x[2].to_f64().unwrap(),
                status: LpStatus::Optimal,
                active_set,
                exact: Some(x),
            }
        }
    }
}

/// Closed form 1/a = (k+2)/(5k), b = (2k-1)/(5k), c = (4-3k)/(10k).
pub fn closed_form(k: &BigRational) -> [BigRational; 3] {
    let five_k = ratio(5, 1) * k.clone();
    [
        (k.clone() + ratio(2, 1)) / five_k.clone(),
        (ratio(2, 1) * k.clone() - BigRational::one()) / five_k,
        (ratio(4, 1) - ratio(3, 1) * k.clone()) / (ratio(10, 1) * k.clone()),
    ]
}

#[derive(Debug, Clone)]
pub struct VerificationRow {
    pub k: f64,
    pub matches: bool,
    pub max_componentwise_gap: f64,
    pub eta_exponent_consistent: bool,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub rows: Vec<VerificationRow>,
    pub all_pass: bool,
}

/// Solves the LP on a k-grid and checks the solver against the closed form
/// (exactly) and against the detection-width exponent used by the circle
/// parameters: c(k) = -(3/10 - 2/(5k)).
pub fn verify_closed_form(k_grid: &[f64]) -> Result<VerificationReport> {
    let mut rows = Vec::with_capacity(k_grid.len());
    for &k in k_grid {
        let lp = build_lp(k)?;
        let sol = solve_lp(&lp);
        let want = closed_form(&lp.k);
        let (matches, gap) = match (&sol.exact, sol.status) {
            (Some(got), LpStatus::Optimal) => {
                let exact_match = got == &want;
                let gap = got
                    .iter()
                    .zip(&want)
                    .map(|(g, w)| (g.to_f64().unwrap() - w.to_f64().unwrap()).abs())
                    .fold(0.0f64, f64::max);
                (exact_match, gap)
            }
            _ => (false, f64::INFINITY),
        };
        let eta_ok = (sol.c + crate::form::eta_exponent(k, 0.0)).abs() <= 1e-12;
        rows.push(VerificationRow {
            k,
            matches,
            max_componentwise_gap: gap,
            eta_exponent_consistent: eta_ok,
        });
    }
    let all_pass = rows
        .iter()
        .all(|r| r.matches && r.max_componentwise_gap <= 1e-9 && r.eta_exponent_consistent);
    Ok(VerificationReport { rows, all_pass })
}
