//! `polartri` — experiment driver for triorthogonal codes built from
//! decreasing monomial (polar) codes.
//!
//! Subcommands: `reliability`, `search`, `build-css`, `simulate`,
//! `sweep-dim`, `sweep-err`, `fit`. Exit codes: 0 success, 2 usage errors
//! or partial (budget-limited) output, 1 runtime failure.

mod cache;
mod config;
mod fit;
mod sweep;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use config::{ConfigOverrides, ExperimentConfig};
use polartri::channel::{ChannelSpec, ReliabilityTable};
use polartri::triortho::{
    build_css, build_css_random, build_css_with_punctures, smallest_triply_even_code,
    SearchReport, VerifyMode, DEFAULT_PUNCTURE_TRIES,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "polartri", version, about = "Polar-code magic-state distillation experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// Puncture coordinate selection for `build-css`.
#[derive(Clone, Copy, clap::ValueEnum)]
enum PunctureRule {
    /// k coordinates drawn from the run seed, redrawn while the punctured
    /// block is rank-deficient.
    Random,
    /// The first k coordinates (may fail when they are not independent).
    First,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute one reliability table fresh, cache it, optionally dump CSV.
    Reliability {
        #[command(flatten)]
        flags: ConfigOverrides,
        /// Polarization exponent (block length 2^n).
        #[arg(long)]
        n: usize,
        /// Also write the table as CSV to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Find the smallest code whose dual supports the construction.
    Search {
        #[command(flatten)]
        flags: ConfigOverrides,
        /// Polarization exponent (block length 2^n).
        #[arg(long)]
        n: usize,
    },
    /// Build, verify, and serialize a punctured tri-orthogonal code.
    BuildCss {
        #[command(flatten)]
        flags: ConfigOverrides,
        /// Polarization exponent (block length 2^n).
        #[arg(long)]
        n: usize,
        /// Number of punctured (output) qubits; defaults to the k rule.
        #[arg(long)]
        k: Option<usize>,
        /// How the punctured coordinates are chosen.
        #[arg(long, value_enum, default_value_t = PunctureRule::Random)]
        puncture_rule: PunctureRule,
        /// Explicit comma-separated puncture coordinates; overrides --k and
        /// --puncture-rule.
        #[arg(long, value_delimiter = ',')]
        punctures: Option<Vec<u32>>,
        /// Output file; defaults to css_<channel>_p<p>_n<n>_k<k>.trio
        /// under the output directory.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Monte Carlo distillation error rates over the configured grid.
    Simulate {
        #[command(flatten)]
        flags: ConfigOverrides,
    },
    /// Dual-dimension scaling sweep with log-log fit.
    SweepDim {
        #[command(flatten)]
        flags: ConfigOverrides,
    },
    /// Union-bound error-figure sweep.
    SweepErr {
        #[command(flatten)]
        flags: ConfigOverrides,
    },
    /// Ordinary least squares on log2-transformed CSV columns.
    Fit {
        /// CSV file (comment lines starting with '#' are skipped).
        #[arg(long)]
        input: PathBuf,
        /// Column holding the abscissa.
        #[arg(long)]
        x_col: String,
        /// Column holding the ordinate.
        #[arg(long)]
        y_col: String,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(partial) => {
            if partial {
                eprintln!("note: some points exceeded the sampling budget; partial output");
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Runs a subcommand; `Ok(true)` flags partial (budget-limited) output.
fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Reliability { flags, n, csv } => {
            let (cfg, p) = single_point(&flags, n)?;
            let channel = cfg.channel_spec(p)?;
            let table = fresh_table(channel, n, &cfg)?;
            let dir = cache::resolve_dir(cfg.cache.as_deref());
            std::fs::create_dir_all(&dir)?;
            let path = dir.join(cache::file_name(channel, n, cfg.samples, cfg.seed));
            cache::write_table(&table, &path)?;
            if let Some(csv_path) = csv {
                let mut buf = Vec::new();
                table.write_csv(&mut buf)?;
                std::fs::write(&csv_path, buf)
                    .with_context(|| format!("writing {}", csv_path.display()))?;
            }
            let order = table.ascending_indices();
            println!(
                "{}",
                serde_json::json!({
                    "channel": cfg.channel,
                    "p": p,
                    "n": n,
                    "samples": table.samples(),
                    "seed": table.seed(),
                    "best_log2_z": table.log2_z_at(order[0] as usize),
                    "worst_log2_z": table.log2_z_at(order[order.len() - 1] as usize),
                    "digest": format!("{:016x}", cache::table_digest(&table)),
                    "file": path.display().to_string(),
                })
            );
            Ok(false)
        }
        Cmd::Search { flags, n } => {
            let (cfg, p) = single_point(&flags, n)?;
            let (report, _) = search_point(&cfg, p, n)?;
            println!("{}", report_json(&cfg, p, n, &report));
            Ok(false)
        }
        Cmd::BuildCss { flags, n, k, puncture_rule, punctures, file } => {
            let (cfg, p) = single_point(&flags, n)?;
            let (report, _) = search_point(&cfg, p, n)?;
            let k = punctures
                .as_ref()
                .map(Vec::len)
                .or(k)
                .unwrap_or_else(|| cfg.k_rule().apply(report.dual_dim));
            let css = match (&punctures, puncture_rule) {
                (Some(list), _) => build_css_with_punctures(&report.code, list),
                (None, PunctureRule::First) => build_css(&report.code, k),
                (None, PunctureRule::Random) => {
                    build_css_random(&report.code, k, cfg.seed, DEFAULT_PUNCTURE_TRIES)
                }
            }
            .with_context(|| format!("building css code with k={k}"))?;
            css.verify(VerifyMode::Auto)?;
            let path = file.unwrap_or_else(|| {
                cfg.out.join(format!("css_{}_p{p}_n{n}_k{k}.trio", cfg.channel))
            });
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            let mut buf = Vec::new();
            css.write(&mut buf)?;
            std::fs::write(&path, buf).with_context(|| format!("writing {}", path.display()))?;
            println!(
                "{}",
                serde_json::json!({
                    "block_len": css.block_len(),
                    "k": css.k(),
                    "h1_rows": css.h1().num_rows(),
                    "h0_rows": css.h0().num_rows(),
                    "g_rows": css.g().num_rows(),
                    "digest": format!("{:016x}", css.digest()),
                    "file": path.display().to_string(),
                })
            );
            Ok(false)
        }
        Cmd::Simulate { flags } => {
            let cfg = ExperimentConfig::resolve(&flags)?;
            let out = sweep::run_simulation(&cfg)?;
            announce(&out);
            Ok(out.partial)
        }
        Cmd::SweepDim { flags } => {
            let cfg = ExperimentConfig::resolve(&flags)?;
            let out = sweep::run_dimension_sweep(&cfg)?;
            announce(&out);
            Ok(out.partial)
        }
        Cmd::SweepErr { flags } => {
            let cfg = ExperimentConfig::resolve(&flags)?;
            let out = sweep::run_error_sweep(&cfg)?;
            announce(&out);
            Ok(out.partial)
        }
        Cmd::Fit { input, x_col, y_col } => {
            let points = read_columns(&input, &x_col, &y_col)?;
            let fit = fit::fit_loglog(&points)?;
            println!("{}", serde_json::to_string(&fit)?);
            Ok(false)
        }
    }
}

fn announce(out: &sweep::SweepOutcome) {
    for f in &out.files {
        eprintln!("wrote {}", f.display());
    }
}

/// Resolves config for the single-point subcommands, which take exactly one
/// noise rate and one exponent.
fn single_point(flags: &ConfigOverrides, n: usize) -> Result<(ExperimentConfig, f64)> {
    let mut flags = flags.clone();
    flags.n_min = Some(n);
    flags.n_max = Some(n);
    let cfg = ExperimentConfig::resolve(&flags)?;
    if cfg.ps.len() != 1 {
        bail!("this subcommand takes exactly one --p");
    }
    Ok((cfg.clone(), cfg.ps[0]))
}

fn fresh_table(channel: ChannelSpec, n: usize, cfg: &ExperimentConfig) -> Result<ReliabilityTable> {
    Ok(match channel {
        ChannelSpec::Bec { p } => ReliabilityTable::exact_bec(p, n)?,
        ChannelSpec::Bsc { p } => ReliabilityTable::mc_bsc(p, n, cfg.samples, cfg.seed)?,
    })
}

fn search_point(
    cfg: &ExperimentConfig,
    p: f64,
    n: usize,
) -> Result<(SearchReport, ReliabilityTable)> {
    let dir = cache::resolve_dir(cfg.cache.as_deref());
    let channel = cfg.channel_spec(p)?;
    let (table, _) = cache::load_or_build(&dir, channel, n, cfg.samples, cfg.seed)?;
    let report = smallest_triply_even_code(&table)?;
    Ok((report, table))
}

fn report_json(cfg: &ExperimentConfig, p: f64, n: usize, report: &SearchReport) -> String {
    serde_json::json!({
        "channel": cfg.channel,
        "p": p,
        "n": n,
        "N": 1usize << n,
        "prefix_len": report.prefix_len,
        "dim": report.code.dimension(),
        "dual_dim": report.dual_dim,
        "dual_rate": report.dual_dim as f64 / (1usize << n) as f64,
        "union_bound_log2": report.union_bound_log2,
        "worst_info_log2_z": report.worst_info_log2_z,
        "capacity_ok": report.capacity_ok,
    })
    .to_string()
}

/// Reads two named numeric columns from a CSV, skipping comment lines and
/// rows with empty cells (e.g. union-bound-only simulation rows).
fn read_columns(path: &PathBuf, x_col: &str, y_col: &str) -> Result<Vec<(f64, f64)>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| anyhow::anyhow!("no column '{name}' in {}", path.display()))
    };
    let (xi, yi) = (col(x_col)?, col(y_col)?);
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record?;
        let (x, y) = (&record[xi], &record[yi]);
        if x.is_empty() || y.is_empty() {
            continue;
        }
        points.push((
            x.parse::<f64>().with_context(|| format!("bad {x_col} value '{x}'"))?,
            y.parse::<f64>().with_context(|| format!("bad {y_col} value '{y}'"))?,
        ));
    }
    Ok(points)
}
