//! Subcommand implementations. Each builds a deterministic CSV/JSON
//! document headed by the run-manifest hash.

use crate::manifest::RunManifest;
use crate::output::{emit, fmt_sci, sci, Csv};
use crate::report::{load_table, resolve_scale, table_limit};
use anyhow::{bail, Context};
use dioph_core::arcs::{
    auto_truncation, integrate_i, max_truncation_for_budget, selberg_j, IntegrateOpts, SelbergSpec,
};
use dioph_core::expsum::{eval, SumKind, SumSpec};
use dioph_core::form::{validate, ArcPiece, CircleParams, FormConfig};
use dioph_core::kernel::{fejer_hat, fourier_pair_check};
use dioph_core::lp::{build_lp, solve_lp, LpStatus};
use dioph_core::rational::{convergents, convergents_f64, parse_ratio};
use dioph_core::search::{best_miss, count_solutions, theorem_scan};
use std::path::Path;

/// `lo:hi:n` inclusive grid.
pub fn parse_grid(text: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        bail!("grid must be lo:hi:n, got {text:?}");
    }
    let lo: f64 = parts[0].parse().context("grid lo")?;
    let hi: f64 = parts[1].parse().context("grid hi")?;
    let n: usize = parts[2].parse().context("grid n")?;
    if n == 0 {
        bail!("grid needs at least one point");
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect())
}

pub fn cmd_validate(config: &Path) -> anyhow::Result<i32> {
    let cfg = FormConfig::from_path(config)?;
    let params = cfg.to_params()?;
    let report = validate(&params);
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if report.valid { 0 } else { 2 })
}

pub fn cmd_primes(
    limit: u64,
    csv_rows: bool,
    out: Option<&Path>,
    cache: Option<&Path>,
    manifest: &RunManifest,
) -> anyhow::Result<()> {
    let table = load_table(limit, cache)?;
    if csv_rows {
        let mut csv = Csv::new(&manifest.hash(), "p,log_p");
        for (&p, &w) in table.primes().iter().zip(table.logs()) {
            csv.row(&[p.to_string(), fmt_sci(w)]);
        }
        emit(out, &csv.finish())?;
    } else {
        let summary = serde_json::json!({
            "manifest": manifest.json(),
            "limit": table.limit(),
            "count": table.len(),
            "theta": sci(table.theta(table.limit() as f64)?),
            "last_prime": table.primes().last(),
        });
        emit(out, &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_expsum(
    kind: &str,
    k: f64,
    x: f64,
    delta: f64,
    grid: &str,
    out: Option<&Path>,
    cache: Option<&Path>,
    manifest: &RunManifest,
) -> anyhow::Result<()> {
    let kind = match kind {
        "S" | "s" => SumKind::S,
        "U" | "u" => SumKind::U,
        "T" | "t" => SumKind::T,
        other => bail!("unknown sum kind {other:?} (expected S, U or T)"),
    };
    let spec = SumSpec::new(kind, k, x, delta)?;
    let table = load_table(table_limit(x, k), cache)?;
    let mut csv = Csv::new(&manifest.hash(), "alpha,re,im,abs");
    for alpha in parse_grid(grid)? {
        let v = eval(&spec, alpha, &table)?;
        csv.row(&[fmt_sci(alpha), fmt_sci(v.re), fmt_sci(v.im), fmt_sci(v.norm())]);
    }
    emit(out, &csv.finish())?;
    Ok(())
}

pub fn cmd_kernel_check(
    etas: &[f64],
    trunc: f64,
    out: Option<&Path>,
    manifest: &RunManifest,
) -> anyhow::Result<()> {
    let mut csv = Csv::new(&manifest.hash(), "eta,t,hat,numeric,abs_diff,tail_bound");
    for &eta in etas {
        for i in 0..=20 {
            let t = eta * 0.1 * i as f64;
            let hat = fejer_hat(eta, t);
            let num = fourier_pair_check(eta, t, trunc)?;
            csv.row(&[
                fmt_sci(eta),
                fmt_sci(t),
                fmt_sci(hat),
                fmt_sci(num.value),
                fmt_sci((num.value - hat).abs()),
                fmt_sci(num.truncation_tail),
            ]);
        }
    }
    emit(out, &csv.finish())?;
    Ok(())
}

pub fn cmd_convergents(
    ratio: &str,
    count: usize,
    out: Option<&Path>,
    manifest: &RunManifest,
) -> anyhow::Result<()> {
    let convs = match parse_ratio(ratio) {
        Ok(exact) => convergents(&exact, count)?,
        Err(parse_err) => {
            let x: f64 = ratio.parse().map_err(|_| parse_err)?;
            eprintln!(
                "warning: {ratio:?} is not an exact expression; emitting uncertified approximants"
            );
            convergents_f64(x, count)
        }
    };
    let mut csv = Csv::new(&manifest.hash(), "a,q,certified");
    for c in &convs {
        csv.row(&[c.a.to_string(), c.q.to_string(), c.certified.to_string()]);
    }
    emit(out, &csv.finish())?;
    Ok(())
}

pub fn cmd_arcs(
    config: &Path,
    arc: &str,
    out: Option<&Path>,
    cache: Option<&Path>,
    manifest: &RunManifest,
) -> anyhow::Result<()> {
    let cfg = FormConfig::from_path(config)?;
    let params = cfg.to_params()?;
    let x = resolve_scale(&cfg)?;
    let cp = CircleParams::derive(&params, x)?;
    let table = load_table(table_limit(x, params.k), cache)?;
    let opts = IntegrateOpts::default();
    let (t_auto, _) = auto_truncation(&params, &cp, &table, &opts)?;
    let trunc = t_auto.min(max_truncation_for_budget(&params, &cp, &opts));
    let pieces: Vec<(&str, ArcPiece)> = match arc {
        "major" => vec![("major", ArcPiece::Major)],
        "minor" => vec![("minor", ArcPiece::Minor)],
        "trivial" => vec![("trivial", ArcPiece::TrivialTruncated)],
        "full" => vec![("full", ArcPiece::FullTruncated)],
        "all" => vec![
            ("major", ArcPiece::Major),
            ("minor", ArcPiece::Minor),
            ("trivial", ArcPiece::TrivialTruncated),
            ("full", ArcPiece::FullTruncated),
        ],
        other => bail!("unknown arc {other:?} (expected major|minor|trivial|full|all)"),
    };
    let mut arcs = serde_json::Map::new();
    for (name, piece) in pieces {
        let r = integrate_i(&params, &cp, piece, &table, trunc, &opts)?;
        arcs.insert(
            name.to_string(),
            serde_json::json!({
                "value": {"re": sci(r.value.re), "im": sci(r.value.im)},
                "error": sci(r.abs_error_est),
                "samples": r.samples,
                "tail": sci(r.truncation_tail),
            }),
        );
    }
    let doc = serde_json::json!({
        "manifest": manifest.json(),
        "X": sci(x),
        "eta": sci(cp.eta),
        "truncation": sci(trunc),
        "arcs": arcs,
    });
    emit(out, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
    Ok(())
}

pub fn cmd_selberg(
    k: f64,
    x: f64,
    hs: &[f64],
    out: Option<&Path>,
    cache: Option<&Path>,
    manifest: &RunManifest,
) -> anyhow::Result<()> {
    let limit = ((3.0 * x).powf(1.0 / k).ceil() as u64) + 1;
    let table = load_table(limit, cache)?;
    let mut csv = Csv::new(&manifest.hash(), "k,X,h,value,abs_error_est,samples");
    for &h in hs {
        let spec = SelbergSpec::new(k, x, h)?;
        let r = selberg_j(&spec, &table)?;
        csv.row(&[
            fmt_sci(k),
            fmt_sci(x),
            fmt_sci(h),
            fmt_sci(r.value),
            fmt_sci(r.abs_error_est),
            r.samples.to_string(),
        ]);
    }
    emit(out, &csv.finish())?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_search(
    config: &Path,
    x_override: Option<f64>,
    eta_override: Option<f64>,
    top: usize,
    out: Option<&Path>,
    cache: Option<&Path>,
    manifest: &RunManifest,
) -> anyhow::Result<()> {
    let cfg = FormConfig::from_path(config)?;
    let params = cfg.to_params()?;
    let x = match x_override {
        Some(x) => x,
        None => resolve_scale(&cfg)?,
    };
    let eta = match eta_override {
        Some(eta) => eta,
        None => CircleParams::derive(&params, x)?.eta,
    };
    let table = load_table(table_limit(x, params.k), cache)?;
    let count = count_solutions(&params, x, eta, &table)?;
    let records = best_miss(&params, x, &table, top)?;
    let mut csv = Csv::new(&manifest.hash(), "p1,p2,p3,form,miss,weight");
    for r in &records {
        csv.row(&[
            r.p1.to_string(),
            r.p2.to_string(),
            r.p3.to_string(),
            fmt_sci(r.form_value),
            fmt_sci(r.miss),
            fmt_sci(r.weight),
        ]);
    }
    let summary = serde_json::json!({
        "manifest": manifest.json(),
        "count": count,
        "eta": sci(eta),
        "X": sci(x),
    });
    match out {
        Some(path) => {
            emit(Some(path), &csv.finish())?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        None => {
            emit(None, &csv.finish())?;
            eprintln!("{}", serde_json::to_string_pretty(&summary)?);
        }
    }
    Ok(())
}

pub fn cmd_scan(
    config: &Path,
    count: usize,
    out: Option<&Path>,
    cache: Option<&Path>,
    manifest: &RunManifest,
) -> anyhow::Result<()> {
    let cfg = FormConfig::from_path(config)?;
    let params = cfg.to_params()?;
    let Some(ratio) = cfg.exact_ratio()? else {
        bail!("scan needs an exact `ratio` in the config to drive the convergents");
    };
    let convs = convergents(&ratio, count)?;
    // size the table for the largest reachable scale, capped to keep the
    // sieve affordable; the scan reports the cutoff if it bites
    let limit_cap = 50_000_000u64;
    let largest = convs
        .iter()
        .map(|c| c.q_f64().powf(5.0 * params.k / (params.k + 2.0)))
        .filter(|x| x.is_finite())
        .fold(10.0f64, f64::max);
    let limit = (table_limit(largest, params.k)).min(limit_cap);
    let table = load_table(limit, cache)?;
    let report = theorem_scan(&params, &convs, &table)?;
    let mut csv = Csv::new(&manifest.hash(), "q,X,eta,count,best_miss,best_over_eta");
    for row in &report.rows {
        csv.row(&[
            fmt_sci(row.q),
            fmt_sci(row.x),
            fmt_sci(row.eta),
            row.count.to_string(),
            row.best_miss.map(fmt_sci).unwrap_or_default(),
            row.best_over_eta.map(fmt_sci).unwrap_or_default(),
        ]);
    }
    if let Some(cut) = &report.cutoff {
        csv.comment(&format!("cutoff: {cut}"));
    }
    emit(out, &csv.finish())?;
    Ok(())
}

pub fn cmd_lp(
    k: Option<f64>,
    grid: Option<&str>,
    out: Option<&Path>,
    manifest: &RunManifest,
) -> anyhow::Result<()> {
    let ks = match (k, grid) {
        (Some(k), None) => vec![k],
        (None, Some(g)) => parse_grid(g)?,
        _ => bail!("give exactly one of --k or --k-grid"),
    };
    let mut csv = Csv::new(&manifest.hash(), "k,inv_a,b,c,status,active_set");
    for k in ks {
        let sol = solve_lp(&build_lp(k)?);
        let (status, active) = match sol.status {
            LpStatus::Optimal => (
                "optimal",
                sol.active_set
                    .iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(";"),
            ),
            LpStatus::Infeasible => ("infeasible", String::new()),
        };
        let f = |v: f64| if v.is_nan() { String::new() } else { fmt_sci(v) };
        csv.row(&[
            fmt_sci(k),
            f(sol.inv_a),
            f(sol.b),
            f(sol.c),
            status.to_string(),
            active,
        ]);
    }
    emit(out, &csv.finish())?;
    Ok(())
}
