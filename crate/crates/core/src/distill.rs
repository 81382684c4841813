//! Noise simulation for punctured tri-orthogonal codes.
//!
//! The distillation protocol consumes one noisy magic state per unpunctured
//! coordinate and produces one output state per punctured coordinate. Under
//! the all-zero-codeword convention used throughout, a trial draws a noise
//! realization on the unpunctured coordinates (the punctured ones are never
//! observed), decodes the parent polar code by successive cancellation, and
//! declares output `i` failed when the re-encoded value at puncture `i` is
//! wrong (dephasing) or undetermined (erasure).
//!
//! Input states carry preparation noise `q` on top of the measurement
//! channel `p`; the two compose into a single effective channel per
//! coordinate (see [`effective_channel`]).

use crate::channel::{compose_bsc, compose_erasure, degrade_erasure_to_bsc, ChannelSpec};
use crate::error::{Error, Result};
use crate::polar::{polar_transform, PolarCode, ScDecoder, ERASED};
use crate::triortho::TriorthogonalCode;
use rand::distributions::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Composes preparation noise `q` (an erasure-type defect rate on the input
/// states) with the measurement channel: erasures compose directly, while
/// for the bit-flip channel the defect degrades to a flip with probability
/// `q/2`.
pub fn effective_channel(channel: ChannelSpec, q: f64) -> Result<ChannelSpec> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter { what: "input noise rate", value: q });
    }
    match channel {
        ChannelSpec::Bec { p } => ChannelSpec::bec(compose_erasure(p, q)),
        ChannelSpec::Bsc { p } => ChannelSpec::bsc(compose_bsc(p, degrade_erasure_to_bsc(q))),
    }
}

/// Output quality figure `log₂((1−ε)/ε)` for an output error rate given as
/// `log₂ ε`; numerically exact even for `ε` far below `f64` resolution.
pub fn llr_figure_point(eps_log2: f64) -> f64 {
    if eps_log2 >= 0.0 {
        return 0.0;
    }
    if eps_log2 < -60.0 {
        // log₂(1−ε) vanishes below f64 resolution.
        return -eps_log2;
    }
    let eps = eps_log2.exp2();
    (-eps).ln_1p() * std::f64::consts::LOG2_E - eps_log2
}

/// 95% Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054f64;
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = phat + z2 / (2.0 * n);
    let margin = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    (((center - margin) / denom).max(0.0), ((center + margin) / denom).min(1.0))
}

/// One simulation request.
pub struct NoiseRun<'a> {
    pub css: &'a TriorthogonalCode,
    /// Measurement channel (its kind selects erasure or dephasing decoding).
    pub channel: ChannelSpec,
    /// Preparation noise rate on the input magic states.
    pub q: f64,
    pub trials: u64,
    pub seed: u64,
    /// Stop early once this many failed words have been seen.
    pub early_stop_failures: Option<u64>,
}

pub const DEFAULT_EARLY_STOP: u64 = 100;

/// Empirical error rates of the distilled outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRateEstimate {
    /// Trials actually run (early stopping may cut the request short).
    pub trials: u64,
    pub seed: u64,
    /// Failed outputs over `trials · k`.
    pub bit_error: f64,
    pub bit_ci: (f64, f64),
    /// Trials with at least one failed output.
    pub word_error: f64,
    pub word_ci: (f64, f64),
    pub failed_words: u64,
    /// Mean fraction of information positions left undecided per trial
    /// (zero in dephasing mode).
    pub undecided_rate: f64,
}

/// Simulation result: the aggregate estimate plus per-information-position
/// failure counts (undecided counts for erasures, decision errors for
/// dephasing), indexed like `PolarCode::info_indices`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    pub estimate: ErrorRateEstimate,
    pub info_failures: Vec<u64>,
}

/// Runs the trial loop. Per-trial randomness comes from an independent
/// ChaCha stream `(seed, trial)`, so results are reproducible and
/// independent of any batching.
pub fn simulate(run: &NoiseRun) -> Result<SimOutcome> {
    if run.trials == 0 {
        return Err(Error::InvalidParameter { what: "trial count", value: 0.0 });
    }
    let code = PolarCode::new(run.css.source().clone())?;
    let punctures = run.css.punctures();
    let k = punctures.len();
    let nn = code.block_len();
    let effective = effective_channel(run.channel, run.q)?;
    let p_eff = effective.p();
    let stop_at = run.early_stop_failures.unwrap_or(DEFAULT_EARLY_STOP);

    let mut decoder = ScDecoder::new(&code);
    let mut info_failures = vec![0u64; code.dimension()];
    let mut bit_failures = 0u64;
    let mut failed_words = 0u64;
    let mut undecided_total = 0u64;
    let mut trials_run = 0u64;

    let mut received = vec![0u8; nn];
    let mut llrs = vec![0.0f64; nn];
    let mut x_hat = vec![0u8; nn];
    let is_punctured = {
        let mut v = vec![false; nn];
        for &p in punctures {
            v[p as usize] = true;
        }
        v
    };

    for trial in 0..run.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
        rng.set_stream(trial);
        let failures_this_trial = match effective {
            ChannelSpec::Bec { .. } => {
                let noise = Bernoulli::new(p_eff).expect("validated probability");
                for (i, r) in received.iter_mut().enumerate() {
                    *r = if is_punctured[i] || noise.sample(&mut rng) { ERASED } else { 0 };
                }
                let (_, undecided) = decoder.decode_erasure(&code, &received)?;
                undecided_total += undecided.len() as u64;
                for &b in undecided {
                    let slot = code
                        .info_indices()
                        .binary_search(&b)
                        .expect("undecided positions are information positions");
                    info_failures[slot] += 1;
                }
                // Output i is undetermined exactly when some undecided input
                // feeds coordinate p_i, i.e. its monomial mask contains p_i
                // (re-encoding over the erasure alphabet never cancels an
                // unknown: each input appears at most once per coordinate).
                punctures
                    .iter()
                    .filter(|&&p| undecided.iter().any(|&b| p & !b == 0))
                    .count() as u64
            }
            ChannelSpec::Bsc { p } => {
                let llr0 = ((1.0 - p) / p).log2();
                let noise = Bernoulli::new(p).expect("validated probability");
                for (i, l) in llrs.iter_mut().enumerate() {
                    *l = if is_punctured[i] {
                        0.0
                    } else if noise.sample(&mut rng) {
                        -llr0
                    } else {
                        llr0
                    };
                }
                let u_hat = decoder.decode_llr(&code, &llrs)?;
                for (slot, &b) in code.info_indices().iter().enumerate() {
                    info_failures[slot] += u_hat[b as usize] as u64;
                }
                x_hat.copy_from_slice(u_hat);
                polar_transform(&mut x_hat);
                punctures.iter().filter(|&&p| x_hat[p as usize] == 1).count() as u64
            }
        };
        bit_failures += failures_this_trial;
        if failures_this_trial > 0 {
            failed_words += 1;
        }
        trials_run = trial + 1;
        if failed_words >= stop_at {
            break;
        }
    }

    let t = trials_run as f64;
    let estimate = ErrorRateEstimate {
        trials: trials_run,
        seed: run.seed,
        bit_error: bit_failures as f64 / (t * k as f64),
        bit_ci: wilson_interval(bit_failures, trials_run * k as u64),
        word_error: failed_words as f64 / t,
        word_ci: wilson_interval(failed_words, trials_run),
        failed_words,
        undecided_rate: undecided_total as f64 / (t * code.dimension() as f64),
    };
    Ok(SimOutcome { estimate, info_failures })
}
