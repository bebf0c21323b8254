//! `dioph`: numerical laboratory for the ternary prime form
//! l1 p1 + l2 p2 + l3 p3^k near a real target.

use anyhow::Context;
use clap::{Parser, Subcommand};
use dioph_cli::commands::*;
use dioph_cli::manifest::RunManifest;
use dioph_cli::output::emit;
use dioph_cli::report::run_report;
use dioph_core::error::Error as CoreError;
use dioph_core::form::FormConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dioph", version, about = "circle-method laboratory for a ternary prime inequality")]
struct Cli {
    /// Worker threads for the integrators (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Bitset sieve cache file (falls back to $DIOPH_CACHE_DIR/sieve.dlpt).
    #[arg(long, global = true)]
    sieve_cache: Option<PathBuf>,
    /// Seed for any sampling the command performs.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a configuration against every hypothesis.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Sieve primes and report (or dump) the table.
    Primes {
        #[arg(long)]
        limit: u64,
        /// Emit p,log_p rows instead of the JSON summary.
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate S, U or T on an alpha grid.
    Expsum {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        k: f64,
        #[arg(long = "X")]
        x: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        /// lo:hi:n
        #[arg(long = "alpha-grid")]
        alpha_grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the kernel transform with its truncated Fourier integral.
    KernelCheck {
        /// Comma-separated kernel widths.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 0.5, 1.0])]
        eta: Vec<f64>,
        #[arg(long, default_value_t = 1e3)]
        trunc: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Continued-fraction convergents of an exact ratio expression.
    Convergents {
        #[arg(long)]
        ratio: String,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate I(eta, varpi, .) over the arcs.
    Arcs {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "all")]
        arc: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generalized Selberg integral J_k(X, h).
    Selberg {
        #[arg(long)]
        k: f64,
        #[arg(long = "X")]
        x: f64,
        /// Comma-separated windows.
        #[arg(long = "h", value_delimiter = ',')]
        h: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count near-solutions and list the best misses.
    Search {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "X")]
        x: Option<f64>,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long, default_value_t = 10)]
        top: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Walk the convergent-driven scale sequence.
    Scan {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 12)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the exponent linear program.
    Lp {
        #[arg(long)]
        k: Option<f64>,
        /// lo:hi:n
        #[arg(long = "k-grid")]
        k_grid: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full pipeline: arcs, oracle comparison, shares, dichotomy.
    Report {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
    },
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    if let Some(core) = err.downcast_ref::<CoreError>() {
        return match core {
            CoreError::InvalidConfig(_) | CoreError::RatioParse(_) | CoreError::SieveLimit(_) => 2,
            CoreError::BudgetExceeded { .. }
            | CoreError::ScaleTooSmall { .. }
            | CoreError::OutOfTable { .. } => 3,
            _ => 1,
        };
    }
    if err.to_string().contains("config") {
        2
    } else {
        1
    }
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("thread pool")?;
    }
    let cache: Option<PathBuf> = cli.sieve_cache.clone().or_else(|| {
        std::env::var_os("DIOPH_CACHE_DIR").map(|d| PathBuf::from(d).join("sieve.dlpt"))
    });
    let cache = cache.as_deref();

    match &cli.command {
        Command::Validate { config } => cmd_validate(config),
        Command::Primes { limit, csv, out } => {
            let manifest = RunManifest::new("primes")
                .with_seed(cli.seed)
                .with_override("limit", limit.to_string());
            cmd_primes(*limit, *csv, out.as_deref(), cache, &manifest)?;
            Ok(0)
        }
        Command::Expsum {
            kind,
            k,
            x,
            delta,
            alpha_grid,
            out,
        } => {
            let manifest = RunManifest::new("expsum")
                .with_seed(cli.seed)
                .with_override("kind", kind.clone())
                .with_override("k", k.to_string())
                .with_override("X", x.to_string())
                .with_override("delta", delta.to_string())
                .with_override("alpha-grid", alpha_grid.clone());
            cmd_expsum(kind, *k, *x, *delta, alpha_grid, out.as_deref(), cache, &manifest)?;
            Ok(0)
        }
        Command::KernelCheck { eta, trunc, out } => {
            let manifest = RunManifest::new("kernel-check")
                .with_seed(cli.seed)
                .with_override("eta", format!("{eta:?}"))
                .with_override("trunc", trunc.to_string());
            cmd_kernel_check(eta, *trunc, out.as_deref(), &manifest)?;
            Ok(0)
        }
        Command::Convergents { ratio, count, out } => {
            let manifest = RunManifest::new("convergents")
                .with_seed(cli.seed)
                .with_override("ratio", ratio.clone())
                .with_override("count", count.to_string());
            cmd_convergents(ratio, *count, out.as_deref(), &manifest)?;
            Ok(0)
        }
        Command::Arcs { config, arc, out } => {
            let manifest = RunManifest::new("arcs")
                .with_config(config)?
                .with_seed(cli.seed)
                .with_override("arc", arc.clone());
            cmd_arcs(config, arc, out.as_deref(), cache, &manifest)?;
            Ok(0)
        }
        Command::Selberg { k, x, h, out } => {
            let manifest = RunManifest::new("selberg")
                .with_seed(cli.seed)
                .with_override("k", k.to_string())
                .with_override("X", x.to_string())
                .with_override("h", format!("{h:?}"));
            cmd_selberg(*k, *x, h, out.as_deref(), cache, &manifest)?;
            Ok(0)
        }
        Command::Search {
            config,
            x,
            eta,
            top,
            out,
        } => {
            let mut manifest = RunManifest::new("search")
                .with_config(config)?
                .with_seed(cli.seed)
                .with_override("top", top.to_string());
            if let Some(x) = x {
                manifest = manifest.with_override("X", x.to_string());
            }
            if let Some(eta) = eta {
                manifest = manifest.with_override("eta", eta.to_string());
            }
            cmd_search(config, *x, *eta, *top, out.as_deref(), cache, &manifest)?;
            Ok(0)
        }
        Command::Scan { config, count, out } => {
            let manifest = RunManifest::new("scan")
                .with_config(config)?
                .with_seed(cli.seed)
                .with_override("count", count.to_string());
            cmd_scan(config, *count, out.as_deref(), cache, &manifest)?;
            Ok(0)
        }
        Command::Lp { k, k_grid, out } => {
            let mut manifest = RunManifest::new("lp").with_seed(cli.seed);
            if let Some(k) = k {
                manifest = manifest.with_override("k", k.to_string());
            }
            if let Some(g) = k_grid {
                manifest = manifest.with_override("k-grid", g.clone());
            }
            cmd_lp(*k, k_grid.as_deref(), out.as_deref(), &manifest)?;
            Ok(0)
        }
        Command::Report { config, out_dir } => {
            let started = std::time::Instant::now();
            let manifest = RunManifest::new("report")
                .with_config(config)?
                .with_seed(cli.seed);
            let cfg = FormConfig::from_path(config)?;
            let bundle = run_report(&cfg, &manifest, cache)?;
            std::fs::create_dir_all(out_dir)?;
            emit(Some(&out_dir.join("report.json")), &bundle.json)?;
            emit(Some(&out_dir.join("report.csv")), &bundle.csv)?;
            eprintln!(
                "report {} written to {} in {:.1}s",
                manifest.hash(),
                out_dir.display(),
                started.elapsed().as_secs_f64()
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
