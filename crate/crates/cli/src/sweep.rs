//! Sweep runners: dimension scaling, error-figure scaling, and Monte Carlo
//! distillation simulation over an (noise rate × block size) grid.
//!
//! Each runner renders its whole CSV into memory and writes it once, so a
//! file regenerated from the same configuration is byte-identical. Search
//! and simulation for the grid points run in the worker pool; rows are
//! assembled in deterministic point order regardless of completion order.

use crate::cache;
use crate::config::ExperimentConfig;
use crate::fit::{fit_loglog, FitResult};
use anyhow::{Context, Result};
use polartri::channel::ReliabilityTable;
use polartri::distill::{
    effective_channel, llr_figure_point, simulate, wilson_interval, NoiseRun, DEFAULT_EARLY_STOP,
};
use polartri::triortho::{
    build_css_random, smallest_triply_even_code, SearchReport, DEFAULT_PUNCTURE_TRIES,
};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::PathBuf;

pub struct SweepOutcome {
    pub files: Vec<PathBuf>,
    /// True when some requested points could not be simulated and only
    /// their union bounds were emitted.
    pub partial: bool,
}

/// One grid point with its reliability table and search result.
struct Point {
    p: f64,
    n: usize,
    table: ReliabilityTable,
    table_file: String,
    table_digest: u64,
    report: SearchReport,
}

fn grid(cfg: &ExperimentConfig) -> Vec<(f64, usize)> {
    let mut pts = Vec::new();
    for &p in &cfg.ps {
        for n in cfg.n_min..=cfg.n_max {
            pts.push((p, n));
        }
    }
    pts
}

/// Builds tables (through the cache) and runs the code search for every
/// grid point. Table construction is sequential — entries may share cache
/// files — while the searches run in the worker pool.
fn load_points(cfg: &ExperimentConfig) -> Result<Vec<Point>> {
    let dir = cache::resolve_dir(cfg.cache.as_deref());
    let mut loaded = Vec::new();
    for (p, n) in grid(cfg) {
        let channel = cfg.channel_spec(p)?;
        let (table, path) = cache::load_or_build(&dir, channel, n, cfg.samples, cfg.seed)
            .with_context(|| format!("table for p={p}, n={n}"))?;
        let file = path.file_name().unwrap().to_string_lossy().into_owned();
        loaded.push((p, n, table, file));
    }
    loaded
        .into_par_iter()
        .map(|(p, n, table, table_file)| {
            let report = smallest_triply_even_code(&table)
                .with_context(|| format!("search failed at p={p}, n={n}"))?;
            let table_digest = cache::table_digest(&table);
            Ok(Point { p, n, table, table_file, table_digest, report })
        })
        .collect()
}

fn digest_lines(points: &[Point]) -> String {
    let mut out = String::new();
    let mut seen = std::collections::BTreeSet::new();
    for pt in points {
        if seen.insert(&pt.table_file) {
            let _ = writeln!(out, "# digest: {} {:016x}", pt.table_file, pt.table_digest);
        }
    }
    out
}

fn write_output(path: &PathBuf, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("creating {}", parent.display()))?;
    }
    std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))
}

fn gnuplot_preamble(ylabel: &str, logy: bool) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set datafile commentschars '#'\n");
    s.push_str("set key autotitle columnhead\n");
    s.push_str("set logscale x 2\n");
    if logy {
        s.push_str("set logscale y 2\n");
    }
    s.push_str("set xlabel 'block length N'\n");
    let _ = writeln!(s, "set ylabel '{ylabel}'");
    s.push_str("set key left bottom\n");
    s
}

/// Dimension sweep: for each (p, n), the smallest code whose dual supports
/// the construction, its dual rate, and a log-log fit of rate versus N.
pub fn run_dimension_sweep(cfg: &ExperimentConfig) -> Result<SweepOutcome> {
    let points = load_points(cfg)?;
    let mut csv = cfg.embedded_header("sweep-dim");
    csv.push_str(&digest_lines(&points));
    csv.push_str("p,n,N,info_dim,dual_dim,dual_rate,eps_log2,capacity_ok\n");
    for pt in &points {
        let nn = 1usize << pt.n;
        let r = &pt.report;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            pt.p,
            pt.n,
            nn,
            r.code.dimension(),
            r.dual_dim,
            r.dual_dim as f64 / nn as f64,
            r.union_bound_log2,
            r.capacity_ok
        );
    }

    let mut fits: Vec<(f64, FitResult)> = Vec::new();
    for &p in &cfg.ps {
        let data: Vec<(f64, f64)> = points
            .iter()
            .filter(|pt| pt.p == p)
            .map(|pt| {
                let nn = (1usize << pt.n) as f64;
                (nn, pt.report.dual_dim as f64 / nn)
            })
            .collect();
        fits.push((p, fit_loglog(&data).with_context(|| format!("fit for p={p}"))?));
    }
    let mut fit_csv = cfg.embedded_header("sweep-dim");
    fit_csv.push_str("p,slope,intercept,r_squared,points\n");
    for (p, f) in &fits {
        let _ =
            writeln!(fit_csv, "{},{},{},{},{}", p, f.slope, f.intercept, f.r_squared, f.points);
    }

    let stem = format!("dim_sweep_{}", cfg.channel);
    let csv_path = cfg.out.join(format!("{stem}.csv"));
    let fit_path = cfg.out.join(format!("dim_fit_{}.csv", cfg.channel));
    let gp_path = cfg.out.join(format!("{stem}.gp"));
    let mut gp = gnuplot_preamble("dual rate dim/N", true);
    gp.push_str("plot \\\n");
    let series: Vec<String> = cfg
        .ps
        .iter()
        .map(|p| format!("  '{stem}.csv' using 3:($1=={p}?$6:1/0) with linespoints title 'p={p}'"))
        .collect();
    gp.push_str(&series.join(", \\\n"));
    gp.push('\n');

    write_output(&csv_path, &csv)?;
    write_output(&fit_path, &fit_csv)?;
    write_output(&gp_path, &gp)?;
    Ok(SweepOutcome { files: vec![csv_path, fit_path, gp_path], partial: false })
}

/// Error-figure sweep: the union-bound error figure of the smallest
/// qualifying code at every grid point. Erasure sweeps report the output
/// log-likelihood ratio figure; dephasing sweeps report −log2 ε.
pub fn run_error_sweep(cfg: &ExperimentConfig) -> Result<SweepOutcome> {
    let points = load_points(cfg)?;
    let metric = match cfg.channel.as_str() {
        "bec" => "llr",
        _ => "minus_log2_eps",
    };
    let mut csv = cfg.embedded_header("sweep-err");
    csv.push_str(&digest_lines(&points));
    csv.push_str("p,n,N,dual_dim,metric,figure\n");
    for pt in &points {
        let figure = match metric {
            "llr" => llr_figure_point(pt.report.union_bound_log2),
            _ => -pt.report.union_bound_log2,
        };
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            pt.p,
            pt.n,
            1usize << pt.n,
            pt.report.dual_dim,
            metric,
            figure
        );
    }

    let stem = format!("err_sweep_{}", cfg.channel);
    let csv_path = cfg.out.join(format!("{stem}.csv"));
    let gp_path = cfg.out.join(format!("{stem}.gp"));
    let ylabel = if metric == "llr" { "output LLR" } else { "-log2 error rate" };
    let mut gp = gnuplot_preamble(ylabel, false);
    gp.push_str("plot \\\n");
    let series: Vec<String> = cfg
        .ps
        .iter()
        .map(|p| format!("  '{stem}.csv' using 3:($1=={p}?$6:1/0) with linespoints title 'p={p}'"))
        .collect();
    gp.push_str(&series.join(", \\\n"));
    gp.push('\n');

    write_output(&csv_path, &csv)?;
    write_output(&gp_path, &gp)?;
    Ok(SweepOutcome { files: vec![csv_path, gp_path], partial: false })
}

/// A single simulated CSV row; `None` estimate means the point was too
/// rare-event to observe and only its union bound is reported.
struct SimRow {
    nn: usize,
    k: usize,
    p: f64,
    trials: u64,
    seed: u64,
    union_bound_log2: f64,
    outcome: Option<(f64, f64, f64, f64)>,
}

/// Decorrelates the puncture draw from the trial noise stream, which is
/// seeded with the bare per-point seed.
const PUNCTURE_SEED_SALT: u64 = 0x50C4_D2AF;

fn simulate_point(cfg: &ExperimentConfig, pt: &Point, seed: u64) -> Result<SimRow> {
    let channel = cfg.channel_spec(pt.p)?;
    let mut k = cfg.k_rule().apply(pt.report.dual_dim);
    // Puncture coordinates are drawn from the seed, redrawn while the
    // punctured block is rank-deficient. When no draw succeeds, k exceeds
    // the rank of the dual's column matroid (or is extraordinarily
    // unlucky); fall back to the largest workable count.
    let css = loop {
        match build_css_random(&pt.report.code, k, seed ^ PUNCTURE_SEED_SALT, DEFAULT_PUNCTURE_TRIES)
        {
            Ok(css) => break css,
            Err(polartri::Error::PunctureRank { .. }) if k > 1 => {
                eprintln!(
                    "warning: p={}, n={}: no full-rank puncture set of size {k} found, trying {}",
                    pt.p,
                    pt.n,
                    k - 1
                );
                k -= 1;
            }
            Err(e) => return Err(e).with_context(|| format!("css at p={}, n={}", pt.p, pt.n)),
        }
    };
    let ub = pt.table.union_bound_log2(pt.report.code.info_indices().iter().map(|&b| b as usize));

    let p_eff = effective_channel(channel, cfg.q)?.p();
    if p_eff == 0.0 {
        // Noiseless: failure is impossible; report the exact zero row.
        let (_, hi) = wilson_interval(0, cfg.trials);
        return Ok(SimRow {
            nn: css.block_len() + k,
            k,
            p: pt.p,
            trials: cfg.trials,
            seed,
            union_bound_log2: ub,
            outcome: Some((0.0, 0.0, hi, 0.0)),
        });
    }
    // Rare-event guard: when even the union bound promises fewer than 1e-3
    // expected failures over the whole budget, skip sampling.
    if ub < (1e-3 / cfg.trials as f64).log2() {
        return Ok(SimRow {
            nn: css.block_len() + k,
            k,
            p: pt.p,
            trials: 0,
            seed,
            union_bound_log2: ub,
            outcome: None,
        });
    }
    let out = simulate(&NoiseRun {
        css: &css,
        channel,
        q: cfg.q,
        trials: cfg.trials,
        seed,
        early_stop_failures: Some(DEFAULT_EARLY_STOP),
    })?;
    let e = out.estimate;
    Ok(SimRow {
        nn: css.block_len() + k,
        k,
        p: pt.p,
        trials: e.trials,
        seed,
        union_bound_log2: ub,
        outcome: Some((e.bit_error, e.bit_ci.0, e.bit_ci.1, e.word_error)),
    })
}

/// Monte Carlo distillation sweep. Every emitted code has passed the
/// tri-orthogonality verification during construction.
pub fn run_simulation(cfg: &ExperimentConfig) -> Result<SweepOutcome> {
    let points = load_points(cfg)?;
    let rows: Vec<SimRow> = points
        .par_iter()
        .enumerate()
        .map(|(idx, pt)| simulate_point(cfg, pt, cfg.seed.wrapping_add(idx as u64)))
        .collect::<Result<_>>()?;

    let mut csv = cfg.embedded_header("simulate");
    csv.push_str(&digest_lines(&points));
    csv.push_str(
        "N,k,p,q,trials,bit_error,ci_lo,ci_hi,word_error,union_bound_log2,seed,status\n",
    );
    let mut partial = false;
    for r in &rows {
        match r.outcome {
            Some((bit, lo, hi, word)) => {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{},{},{},{},ok",
                    r.nn, r.k, r.p, cfg.q, r.trials, bit, lo, hi, word, r.union_bound_log2, r.seed
                );
            }
            None => {
                partial = true;
                let _ = writeln!(
                    csv,
                    "{},{},{},{},0,,,,,{},{},union_bound_only",
                    r.nn, r.k, r.p, cfg.q, r.union_bound_log2, r.seed
                );
            }
        }
    }

    let stem = format!("sim_{}", cfg.channel);
    let csv_path = cfg.out.join(format!("{stem}.csv"));
    let gp_path = cfg.out.join(format!("{stem}.gp"));
    let mut gp = gnuplot_preamble("output bit error rate", true);
    gp.push_str("plot \\\n");
    let series: Vec<String> = cfg
        .ps
        .iter()
        .map(|p| {
            format!("  '{stem}.csv' using 1:($3=={p}?$6:1/0) with linespoints title 'p={p}'")
        })
        .collect();
    gp.push_str(&series.join(", \\\n"));
    gp.push('\n');

    write_output(&csv_path, &csv)?;
    write_output(&gp_path, &gp)?;
    Ok(SweepOutcome { files: vec![csv_path, gp_path], partial })
}
