//! Exact brute-force ground truth: counting and enumerating prime triples
//! with |lambda1 p1 + lambda2 p2 + lambda3 p3^k - varpi| <= eta, and the
//! exact weighted sum that the full-line integral represents.
//!
//! The window predicate is fixed once here (sorted lambda1 p1 values,
//! half-open binary searches with ties kept on both ends) and the naive
//! oracle in the tests applies the same expressions, so agreement is exact.

use crate::error::Result;
use crate::expsum::PowerRange;
use crate::form::{validate, CircleParams, FormParams, Mode};
use crate::primes::PrimeTable;
use crate::rational::{scale_sequence, Convergent};
use crate::util::{par_chunked, Neumaier};
use serde::Serialize;
use std::collections::BinaryHeap;

/// One triple with its form value, miss and log-weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolutionRecord {
    pub p1: u64,
    pub p2: u64,
    pub p3: u64,
    pub form_value: f64,
    pub miss: f64,
    pub weight: f64,
}

impl SolutionRecord {
    /// Within 4 ulps of the detection boundary; such records are fragile
    /// under any reordering of the arithmetic.
    pub fn near_boundary(&self, eta: f64) -> bool {
        (self.miss - eta).abs() <= 4.0 * f64::EPSILON * eta.abs()
    }
}

struct SearchContext {
    /// lambda1 * p1, ascending, with the prime and its log alongside.
    sorted: Vec<(f64, u64, f64)>,
    r2: PowerRange,
    r3: PowerRange,
    lambda2: f64,
    lambda3: f64,
    varpi: f64,
}

impl SearchContext {
    fn new(params: &FormParams, x: f64, table: &PrimeTable) -> Result<Self> {
        let r1 = PowerRange::primes(table, 1.0, x, params.delta)?;
        let r2 = PowerRange::primes(table, 1.0, x, params.delta)?;
        let r3 = PowerRange::primes(table, params.k, x, params.delta)?;
        let mut sorted: Vec<(f64, u64, f64)> = r1
            .values
            .iter()
            .zip(&r1.weights)
            .map(|(&p, &w)| (params.lambda[0] * p as f64, p, w))
            .collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Ok(Self {
            sorted,
            r2,
            r3,
            lambda2: params.lambda[1],
            lambda3: params.lambda[2],
            varpi: params.varpi,
        })
    }

    /// Canonical window centre for a (p2, p3) pair.
    #[inline]
    fn shift(&self, p2: f64, pow3: f64) -> f64 {
        self.varpi - self.lambda2 * p2 - self.lambda3 * pow3
    }

    /// Index range of sorted values in [shift - eta, shift + eta],
    /// boundaries included.
    #[inline]
    fn window(&self, shift: f64, eta: f64) -> (usize, usize) {
        let lo = shift - eta;
        let hi = shift + eta;
        let start = self.sorted.partition_point(|t| t.0 < lo);
        let end = self.sorted.partition_point(|t| t.0 <= hi);
        (start, end)
    }
}

/// Exact number of triples with miss <= eta, by sorted-window search in
/// O(n2 n3 log n1). The outer loop is chunked over p2 with a fixed layout,
/// so the count is independent of the worker count.
pub fn count_solutions(params: &FormParams, x: f64, eta: f64, table: &PrimeTable) -> Result<u64> {
    let ctx = SearchContext::new(params, x, table)?;
    if ctx.sorted.is_empty() || ctx.r2.is_empty() || ctx.r3.is_empty() {
        return Ok(0);
    }
    let mut total = 0u64;
    par_chunked(
        ctx.r2.len(),
        8,
        |range| {
            let mut count = 0u64;
            for i2 in range {
                let p2 = ctx.r2.values[i2] as f64;
                for pow3 in &ctx.r3.powers {
                    let (start, end) = ctx.window(ctx.shift(p2, *pow3), eta);
                    count += (end - start) as u64;
                }
            }
            count
        },
        |c| total += c,
    );
    Ok(total)
}

/// Exact value of the full-line integral: sum over triples of
/// log p1 log p2 log p3 * max(0, eta - miss).
pub fn exact_weighted_sum(params: &FormParams, x: f64, eta: f64, table: &PrimeTable) -> Result<f64> {
    let ctx = SearchContext::new(params, x, table)?;
    if ctx.sorted.is_empty() || ctx.r2.is_empty() || ctx.r3.is_empty() {
        return Ok(0.0);
    }
    let mut total = Neumaier::new();
    par_chunked(
        ctx.r2.len(),
        8,
        |range| {
            let mut acc = Neumaier::new();
            for i2 in range {
                let p2 = ctx.r2.values[i2] as f64;
                let w2 = ctx.r2.weights[i2];
                for (pow3, w3) in ctx.r3.powers.iter().zip(&ctx.r3.weights) {
                    let shift = ctx.shift(p2, *pow3);
                    let (start, end) = ctx.window(shift, eta);
                    for (v, _, w1) in &ctx.sorted[start..end] {
                        let miss = (v - shift).abs();
                        let gain = eta - miss;
                        if gain > 0.0 {
                            acc.add(w1 * w2 * w3 * gain);
                        }
                    }
                }
            }
            acc.total()
        },
        |v| total.add(v),
    );
    Ok(total.total())
}

#[derive(PartialEq)]
struct HeapEntry(SolutionRecord);

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // max-heap keyed on miss, ties broken so that lexicographically
        // larger triples are evicted first
        self.0
            .miss
            .total_cmp(&other.0.miss)
            .then_with(|| (self.0.p1, self.0.p2, self.0.p3).cmp(&(other.0.p1, other.0.p2, other.0.p3)))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// The `top` smallest-miss triples in the box, ties by (p1, p2, p3).
pub fn best_miss(
    params: &FormParams,
    x: f64,
    table: &PrimeTable,
    top: usize,
) -> Result<Vec<SolutionRecord>> {
    let ctx = SearchContext::new(params, x, table)?;
    if top == 0 || ctx.sorted.is_empty() || ctx.r2.is_empty() || ctx.r3.is_empty() {
        return Ok(Vec::new());
    }
    let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::with_capacity(top + 1);
    for (i2, &p2) in ctx.r2.values.iter().enumerate() {
        let p2f = p2 as f64;
        let w2 = ctx.r2.weights[i2];
        for (i3, pow3) in ctx.r3.powers.iter().enumerate() {
            let p3 = ctx.r3.values[i3];
            let w3 = ctx.r3.weights[i3];
            let shift = ctx.shift(p2f, *pow3);
            let split = ctx.sorted.partition_point(|t| t.0 < shift);
            // expand outwards from the insertion point; misses grow
            // monotonically in each direction
            let (mut left, mut right) = (split, split);
            loop {
                let worst_full = if heap.len() == top {
                    heap.peek().map(|e| e.0.miss)
                } else {
                    None
                };
                let lv = left.checked_sub(1).map(|i| (shift - ctx.sorted[i].0, i));
                let rv = (right < ctx.sorted.len()).then(|| (ctx.sorted[right].0 - shift, right));
                let (miss, idx, is_right) = match (lv, rv) {
                    (None, None) => break,
                    (Some((lm, li)), None) => (lm, li, false),
                    (None, Some((rm, ri))) => (rm, ri, true),
                    (Some((lm, li)), Some((rm, ri))) => {
                        if lm <= rm {
                            (lm, li, false)
                        } else {
                            (rm, ri, true)
                        }
                    }
                };
                if let Some(w) = worst_full {
                    if miss > w {
                        break;
                    }
                }
                let (v, p1, w1) = ctx.sorted[idx];
                let record = SolutionRecord {
                    p1,
                    p2,
                    p3,
                    form_value: v - shift + ctx.varpi,
                    miss: (v - shift).abs(),
                    weight: w1 * w2 * w3,
                };
                heap.push(HeapEntry(record));
                if heap.len() > top {
                    heap.pop();
                }
                if is_right {
                    right += 1;
                } else {
                    left -= 1;
                }
            }
        }
    }
    let mut out: Vec<SolutionRecord> = heap.into_iter().map(|e| e.0).collect();
    out.sort_by(|a, b| {
        a.miss
            .total_cmp(&b.miss)
            .then_with(|| (a.p1, a.p2, a.p3).cmp(&(b.p1, b.p2, b.p3)))
    });
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub q: f64,
    pub x: f64,
    pub eta: f64,
    pub count: u64,
    pub best_miss: Option<f64>,
    pub best_over_eta: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    /// Set when the table could not cover the largest scales.
    pub cutoff: Option<String>,
}

/// Walks the convergent-driven scale sequence, counting detections at each
/// X_n = q_n^(5k/(k+2)) with eta from the derived circle parameters.
pub fn theorem_scan(
    params: &FormParams,
    convs: &[Convergent],
    table: &PrimeTable,
) -> Result<ScanReport> {
    let report = validate(params);
    if report.mode != Mode::Theorem {
        return Err(crate::error::Error::Precondition(format!(
            "theorem scan requires theorem mode, got {:?}",
            report.mode
        )));
    }
    let mut rows = Vec::new();
    let mut cutoff = None;
    for conv in convs {
        let x = scale_sequence(params.k, conv)?.x;
        if x < 10.0 {
            continue;
        }
        let cp = match CircleParams::derive(params, x) {
            Ok(cp) => cp,
            Err(e) => {
                cutoff = Some(format!("q = {}: {e}", conv.q));
                continue;
            }
        };
        match count_solutions(params, x, cp.eta, table) {
            Ok(count) => {
                let best = best_miss(params, x, table, 1)?;
                let best_miss = best.first().map(|r| r.miss);
                rows.push(ScanRow {
                    q: conv.q_f64(),
                    x,
                    eta: cp.eta,
                    count,
                    best_miss,
                    best_over_eta: best_miss.map(|m| m / cp.eta),
                });
            }
            Err(e) => {
                cutoff = Some(format!("q = {}: {e}", conv.q));
                break;
            }
        }
    }
    Ok(ScanReport { rows, cutoff })
}
