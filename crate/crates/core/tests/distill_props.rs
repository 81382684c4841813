//! Calibration of the distillation simulator against exact expectations.
//!
//! For erasure noise the exact output error rates are computed by a fully
//! independent route: every erasure pattern is enumerated, undetermined
//! inputs come from the rank oracle, and outputs are re-encoded over the
//! erasure alphabet with an absorbing transform. For dephasing noise the
//! exact expectation enumerates every flip pattern through the decoder, so
//! the Monte Carlo sampling machinery is validated against the exact
//! weighted sum.

mod common;

use common::{encoder_row, undetermined_channels};
use polartri::channel::{ChannelSpec, ReliabilityTable};
use polartri::distill::{effective_channel, simulate, NoiseRun};
use polartri::polar::{CodeTarget, PolarCode, ScDecoder};
use polartri::triortho::{build_css, smallest_triply_even_code, TriorthogonalCode};

const TERN_ERASED: u8 = 2;

/// Erasure-alphabet polar transform: unknowns absorb. Each input feeds any
/// coordinate at most once, so no unknown can cancel against itself and
/// absorption is exact.
fn ternary_transform(x: &mut [u8]) {
    let len = x.len();
    let mut half = 1;
    while half < len {
        let size = half * 2;
        let mut seg = 0;
        while seg < len {
            for j in seg..seg + half {
                x[j] = if x[j] == TERN_ERASED || x[j + half] == TERN_ERASED {
                    TERN_ERASED
                } else {
                    x[j] ^ x[j + half]
                };
            }
            seg += size;
        }
        half = size;
    }
}

fn smallest_css(n: usize, punctures: usize) -> TriorthogonalCode {
    let table = ReliabilityTable::exact_bec(1.0, n).unwrap();
    let report = smallest_triply_even_code(&table).unwrap();
    build_css(&report.code, punctures).unwrap()
}

/// Exact (enumerated) word and bit error rates for erasure noise.
fn exact_erasure_rates(css: &TriorthogonalCode, p_eff: f64) -> (f64, f64) {
    let code = PolarCode::new(css.source().clone()).unwrap();
    let n = code.n();
    let nn = code.block_len();
    let rows: Vec<u64> = (0..nn).map(|i| encoder_row(i, n)).collect();
    let k = css.punctures().len();
    let punctured_mask: u64 = css.punctures().iter().map(|&p| 1u64 << p).sum();
    let free: Vec<usize> = (0..nn).filter(|&c| punctured_mask >> c & 1 == 0).collect();

    let mut word = 0.0;
    let mut bit = 0.0;
    for pattern in 0u64..1 << free.len() {
        let mut erased = punctured_mask;
        for (idx, &c) in free.iter().enumerate() {
            if pattern >> idx & 1 == 1 {
                erased |= 1 << c;
            }
        }
        let undetermined = undetermined_channels(&rows, erased);
        let mut u = vec![0u8; nn];
        for &b in code.info_indices() {
            if undetermined >> b & 1 == 1 {
                u[b as usize] = TERN_ERASED;
            }
        }
        ternary_transform(&mut u);
        let fails = css
            .punctures()
            .iter()
            .filter(|&&p| u[p as usize] == TERN_ERASED)
            .count();
        let e = pattern.count_ones() as i32;
        let weight = p_eff.powi(e) * (1.0 - p_eff).powi(free.len() as i32 - e);
        if fails > 0 {
            word += weight;
        }
        bit += weight * fails as f64 / k as f64;
    }
    (word, bit)
}

#[test]
fn erasure_simulation_matches_exhaustive_expectation() {
    for (n, k, p, q) in [(4usize, 1usize, 0.15, 0.10), (4, 2, 0.20, 0.05), (3, 1, 0.25, 0.0)] {
        let css = smallest_css(n, k);
        let channel = ChannelSpec::bec(p).unwrap();
        let p_eff = effective_channel(channel, q).unwrap().p();
        let (word_exact, bit_exact) = exact_erasure_rates(&css, p_eff);

        let trials = 30_000u64;
        let out = simulate(&NoiseRun {
            css: &css,
            channel,
            q,
            trials,
            seed: 0xE5A,
            early_stop_failures: Some(u64::MAX),
        })
        .unwrap();
        let e = &out.estimate;
        let sigma_word = (word_exact * (1.0 - word_exact) / trials as f64).sqrt();
        assert!(
            (e.word_error - word_exact).abs() <= 4.0 * sigma_word + 1e-9,
            "n={n} k={k}: word {} vs exact {word_exact}",
            e.word_error
        );
        // Per-trial bit fraction is bounded by the word indicator, so its
        // sampling deviation is as well.
        let sigma_bit = (word_exact / trials as f64).sqrt();
        assert!(
            (e.bit_error - bit_exact).abs() <= 4.0 * sigma_bit + 1e-9,
            "n={n} k={k}: bit {} vs exact {bit_exact}",
            e.bit_error
        );
    }
}

#[test]
fn dephasing_simulation_matches_exhaustive_expectation() {
    let css = smallest_css(3, 1);
    let p = 0.08;
    let q = 0.10;
    let channel = ChannelSpec::bsc(p).unwrap();
    let p_eff = effective_channel(channel, q).unwrap().p();

    // Exact expectation: enumerate all flip patterns on the 7 unpunctured
    // coordinates through the decoder.
    let code = PolarCode::new(css.source().clone()).unwrap();
    let nn = code.block_len();
    let llr0 = ((1.0 - p_eff) / p_eff).log2();
    let free: Vec<usize> = (0..nn).filter(|&c| c != css.punctures()[0] as usize).collect();
    let mut decoder = ScDecoder::new(&code);
    let mut word_exact = 0.0;
    for pattern in 0u64..1 << free.len() {
        let mut llrs = vec![0.0f64; nn];
        for (idx, &c) in free.iter().enumerate() {
            llrs[c] = if pattern >> idx & 1 == 1 { -llr0 } else { llr0 };
        }
        let u_hat = decoder.decode_llr(&code, &llrs).unwrap();
        let mut x_hat = u_hat.to_vec();
        polartri::polar::polar_transform(&mut x_hat);
        if x_hat[css.punctures()[0] as usize] == 1 {
            let e = pattern.count_ones() as i32;
            word_exact += p_eff.powi(e) * (1.0 - p_eff).powi(free.len() as i32 - e);
        }
    }

    let trials = 40_000u64;
    let out = simulate(&NoiseRun {
        css: &css,
        channel,
        q,
        trials,
        seed: 0xB5C,
        early_stop_failures: Some(u64::MAX),
    })
    .unwrap();
    let sigma = (word_exact * (1.0 - word_exact) / trials as f64).sqrt();
    assert!(
        (out.estimate.word_error - word_exact).abs() <= 4.0 * sigma + 1e-9,
        "word {} vs exact {word_exact}",
        out.estimate.word_error
    );
}

#[test]
fn per_channel_undecided_rates_match_exact_reliabilities() {
    // Unpunctured successive cancellation over the erasure channel: the
    // undecided rate of information position b is exactly Z(W_b).
    let p = 0.25;
    let n = 7;
    let table = ReliabilityTable::exact_bec(p, n).unwrap();
    let code = PolarCode::construct(&table, CodeTarget::Dimension(40)).unwrap();
    let mut decoder = ScDecoder::new(&code);
    let trials = 4000u64;
    let mut counts = vec![0u64; code.dimension()];
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
    let mut received = vec![0u8; code.block_len()];
    for _ in 0..trials {
        for r in received.iter_mut() {
            *r = if rng.gen_bool(p) { polartri::polar::ERASED } else { 0 };
        }
        let (_, undecided) = decoder.decode_erasure(&code, &received).unwrap();
        for &b in undecided {
            let slot = code.info_indices().binary_search(&b).unwrap();
            counts[slot] += 1;
        }
    }
    for (slot, &b) in code.info_indices().iter().enumerate() {
        let z = table.z_at(b as usize);
        let est = counts[slot] as f64 / trials as f64;
        let sigma = (z * (1.0 - z) / trials as f64).sqrt();
        assert!(
            (est - z).abs() <= 4.0 * sigma + 5e-3,
            "channel {b}: est {est}, exact {z}"
        );
    }
}
