//! The end-to-end report pipeline for one convergent-driven scale.

use crate::manifest::RunManifest;
use crate::output::{sci, Csv};
use anyhow::{bail, Context};
use dioph_core::arcs::{
    auto_truncation, integrate_i, major_arc_error_terms, major_arc_j1, max_truncation_for_budget,
    minor_arc_l2, trivial_arc_tail, IntegrateOpts,
};
use dioph_core::form::{validate, ArcPiece, CircleParams, FormConfig};
use dioph_core::primes::PrimeTable;
use dioph_core::rational::{bd1_first_effective, convergents, dichotomy_sweep, scale_sequence};
use dioph_core::search::{best_miss, count_solutions, exact_weighted_sum};
use std::path::Path;

/// Resolves the scale from the config: X directly, or q through the
/// convergent-driven sequence X = q^(5k/(k+2)).
pub fn resolve_scale(cfg: &FormConfig) -> anyhow::Result<f64> {
    if let Some(x) = cfg.x {
        return Ok(x);
    }
    if let Some(q) = cfg.q {
        return Ok((q as f64).powf(5.0 * cfg.k / (cfg.k + 2.0)));
    }
    bail!("config must set either X or q")
}

/// Sieve with an optional bitset cache on disk.
pub fn load_table(limit: u64, cache: Option<&Path>) -> dioph_core::Result<PrimeTable> {
    if let Some(path) = cache {
        if path.exists() {
            if let Ok(t) = PrimeTable::read_cache(path) {
                if t.limit() >= limit {
                    return Ok(t);
                }
            }
        }
        let t = PrimeTable::sieve(limit)?;
        t.write_cache(path)?;
        return Ok(t);
    }
    PrimeTable::sieve(limit)
}

/// Table limit required at scale X for exponent k (covers the linear
/// variables and the p3 range, with headroom for theta at X).
pub fn table_limit(x: f64, k: f64) -> u64 {
    (x.max(x.powf(1.0 / k)).ceil() as u64) + 1
}

pub struct ReportBundle {
    pub json: String,
    pub csv: String,
}

/// Full pipeline: derive parameters, integrate all arcs, compare with the
/// exact weighted sum, and assemble the comparison table.
pub fn run_report(
    cfg: &FormConfig,
    manifest: &RunManifest,
    cache: Option<&Path>,
) -> anyhow::Result<ReportBundle> {
    let params = cfg.to_params().context("invalid configuration")?;
    let report = validate(&params);
    if !report.valid {
        bail!("configuration fails validation");
    }
    let x = resolve_scale(cfg)?;
    let cp = CircleParams::derive(&params, x)?;
    let table = load_table(table_limit(x, params.k), cache)?;
    let opts = IntegrateOpts::default();

    let (t_auto, _) = auto_truncation(&params, &cp, &table, &opts)?;
    let trunc = t_auto.min(max_truncation_for_budget(&params, &cp, &opts));

    let major = integrate_i(&params, &cp, ArcPiece::Major, &table, trunc, &opts)?;
    let minor = integrate_i(&params, &cp, ArcPiece::Minor, &table, trunc, &opts)?;
    let trivial = integrate_i(&params, &cp, ArcPiece::TrivialTruncated, &table, trunc, &opts)?;
    let full = integrate_i(&params, &cp, ArcPiece::FullTruncated, &table, trunc, &opts)?;

    let exact = exact_weighted_sum(&params, x, cp.eta, &table)?;
    let count = count_solutions(&params, x, cp.eta, &table)?;
    let records = best_miss(&params, x, &table, 5)?;
    let identity_gap = if exact != 0.0 {
        (full.value.re - exact).abs() / exact.abs()
    } else {
        full.value.re.abs()
    };

    let j1 = major_arc_j1(&params, &cp, &opts, x <= 2000.0)?;
    let error_terms = if x <= 2000.0 {
        Some(major_arc_error_terms(&params, &cp, &table, &opts)?)
    } else {
        None
    };
    let minor_l2: Vec<_> = (1..=3)
        .map(|j| minor_arc_l2(&params, &cp, &table, j, &opts))
        .collect::<Result<_, _>>()?;
    let tail_report = trivial_arc_tail(&params, &cp, &table, &opts)?;

    // minor-arc rational structure, when an exact ratio is available
    let dichotomy = match cfg.exact_ratio()? {
        Some(ratio) if ratio.certified_irrational() => {
            let convs = convergents(&ratio, 20)?;
            let rho = (params.lambda[0] / params.lambda[1]).abs();
            let first_eff = bd1_first_effective(params.k, rho, &convs);
            let nearest = convs
                .iter()
                .min_by(|a, b| {
                    let da = (scale_sequence(params.k, a).map(|s| s.x).unwrap_or(f64::MAX) - x).abs();
                    let db = (scale_sequence(params.k, b).map(|s| s.x).unwrap_or(f64::MAX) - x).abs();
                    da.total_cmp(&db)
                })
                .cloned();
            match nearest {
                Some(conv) => {
                    let sweep = dichotomy_sweep(&params, &cp, &conv, 100, manifest.seed)?;
                    Some(serde_json::json!({
                        "convergent_q": conv.q_f64(),
                        "samples": sweep.samples,
                        "major_arc_like": sweep.major_arc_like,
                        "both_q_small": sweep.both_q_small,
                        "bd1_effective": sweep.bd1_effective,
                        "bd1_first_effective_index": first_eff,
                    }))
                }
                None => None,
            }
        }
        _ => None,
    };

    let norm = cp.eta * cp.eta * x.powf(1.0 + 1.0 / params.k);
    let arc_json = |r: &dioph_core::quad::ComplexQuadratureResult| {
        serde_json::json!({
            "value_re": sci(r.value.re),
            "value_im": sci(r.value.im),
            "abs_error_est": sci(r.abs_error_est),
            "samples": r.samples,
            "truncation_tail": sci(r.truncation_tail),
        })
    };

    let json = serde_json::json!({
        "manifest": manifest.json(),
        "config": serde_json::to_value(cfg)?,
        "scale": {
            "X": sci(x),
            "P": sci(cp.p),
            "eta": sci(cp.eta),
            "eta_other_normalization": sci(cp.eta_other_norm),
            "R": sci(cp.r),
            "Q": sci(cp.q_approx),
            "truncation": sci(trunc),
        },
        "arcs": {
            "major": arc_json(&major),
            "minor": arc_json(&minor),
            "trivial": arc_json(&trivial),
            "full": arc_json(&full),
        },
        "oracle": {
            "exact_weighted_sum": sci(exact),
            "count_solutions": count,
            "identity_gap_rel": sci(identity_gap),
            "best_miss": records.iter().map(|r| serde_json::json!({
                "p1": r.p1, "p2": r.p2, "p3": r.p3,
                "miss": sci(r.miss),
                "near_boundary": r.near_boundary(cp.eta),
            })).collect::<Vec<_>>(),
        },
        "major_term": {
            "j1_three_d": sci(j1.three_d.value),
            "j1_one_d": j1.one_d.map(|r| sci(r.value.re)),
            "j1_over_eta2_x": sci(j1.ratio_to_scale),
            "route_gap": j1.route_gap.map(sci),
            "route_gap_bound": sci(j1.documented_gap_bound),
            "error_terms_over_norm": error_terms.as_ref().map(|et| serde_json::json!({
                "j2": sci(et.j2.value.re / et.normalizer),
                "j3": sci(et.j3.value.re / et.normalizer),
                "j4": sci(et.j4.value.re / et.normalizer),
                "a2": sci(et.a2.value / et.normalizer),
                "b2": sci(et.b2.value / et.normalizer),
                "a4": sci(et.a4.value / et.normalizer),
                "b4": sci(et.b4.value / et.normalizer),
                "telescoping_gap": sci(et.telescoping_gap),
            })),
        },
        "shares": {
            "major_over_full": sci(major.value.re / full.value.re),
            "minor_over_full": sci(minor.value.re / full.value.re),
            "trivial_over_full": sci(trivial.value.re / full.value.re),
            "minor_l2": minor_l2.iter().map(|r| sci(r.value)).collect::<Vec<_>>(),
            "trivial_c": [sci(tail_report.c[0].value), sci(tail_report.c[1].value)],
            "trivial_fitted": [sci(tail_report.fitted[0]), sci(tail_report.fitted[1])],
            "i_trivial_bound": sci(tail_report.i_trivial_bound),
        },
        "dichotomy": dichotomy,
        "normalizer_eta2_x": sci(norm),
    });

    let mut csv = Csv::new(&manifest.hash(), "quantity,value");
    let mut put = |name: &str, v: f64| {
        csv.row(&[name.to_string(), crate::output::fmt_sci(v)]);
    };
    put("X", x);
    put("P", cp.p);
    put("eta", cp.eta);
    put("eta_other_normalization", cp.eta_other_norm);
    put("R", cp.r);
    put("Q", cp.q_approx);
    put("truncation", trunc);
    put("I_major", major.value.re);
    put("I_minor", minor.value.re);
    put("I_trivial", trivial.value.re);
    put("I_full", full.value.re);
    put("exact_weighted_sum", exact);
    put("count_solutions", count as f64);
    put("identity_gap_rel", identity_gap);
    put("j1_three_d", j1.three_d.value);
    put("j1_over_eta2_x", j1.ratio_to_scale);
    put("major_share", major.value.re / full.value.re);
    put("minor_share", minor.value.re / full.value.re);
    put("trivial_share", trivial.value.re / full.value.re);

    Ok(ReportBundle {
        json: serde_json::to_string_pretty(&json)? + "\n",
        csv: csv.finish(),
    })
}
