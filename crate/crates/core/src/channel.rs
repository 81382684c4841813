//! Channel models and synthetic-channel reliability tables.
//!
//! The two memoryless channels used throughout are the binary erasure
//! channel `BEC(p)` and the binary symmetric (bit-flip) channel `BSC(p)`.
//! Reliability of the `2ⁿ` synthetic channels produced by the polar
//! transform is measured by the Bhattacharyya parameter `Z`, normalized so
//! that `Z = 1` means totally unreliable and `Z = 0` noiseless; for the
//! erasure channel `Z = p` and for the bit-flip channel `Z = 2√(p(1−p))`.
//!
//! Two constructions are provided:
//!
//! * [`ReliabilityTable::exact_bec`] — the erasure recursion
//!   `z⁻ = 2z − z²`, `z⁺ = z²` evaluated exactly in the log₂ domain, so
//!   tables stay finite and strictly ordered far below `Z = 2^{-2000}`;
//! * [`ReliabilityTable::mc_bsc`] — genie-aided Monte Carlo estimation:
//!   the all-zero codeword is transmitted, the successive-cancellation
//!   recursion is run with true prior bits, and each synthetic channel
//!   accumulates the unbiased sample `2^{−λ/2}` of its Bhattacharyya
//!   parameter.
//!
//! Channel indices map to monomials with complemented digits (see
//! [`crate::monomial`]); reliability tables therefore order monomials, and
//! ties are broken degree-first so that a uniform table reproduces the
//! degree (Reed–Muller) ordering.

use crate::error::{Error, Result};
use crate::llr::{check_node, clamp, var_node, LLR_CLAMP};
use crate::monomial::{full_mask, Monomial, MAX_VARS};
use rand::distributions::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

/// A memoryless binary-input channel with one noise parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelSpec {
    /// Binary erasure channel with erasure probability `p`.
    Bec { p: f64 },
    /// Binary symmetric channel with crossover probability `p ≤ 1/2`.
    Bsc { p: f64 },
}

impl ChannelSpec {
    pub fn bec(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter { what: "erasure probability", value: p });
        }
        Ok(ChannelSpec::Bec { p })
    }

    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&p) {
            return Err(Error::InvalidParameter { what: "crossover probability", value: p });
        }
        Ok(ChannelSpec::Bsc { p })
    }

    pub fn p(&self) -> f64 {
        match *self {
            ChannelSpec::Bec { p } | ChannelSpec::Bsc { p } => p,
        }
    }

    pub fn kind_str(&self) -> &'static str {
        match self {
            ChannelSpec::Bec { .. } => "bec",
            ChannelSpec::Bsc { .. } => "bsc",
        }
    }
}

/// Bhattacharyya parameter of the single-use channel.
pub fn bhattacharyya(channel: ChannelSpec) -> f64 {
    match channel {
        ChannelSpec::Bec { p } => p,
        ChannelSpec::Bsc { p } => 2.0 * (p * (1.0 - p)).sqrt(),
    }
}

/// Binary entropy in bits, `h₂(p) = −p log₂ p − (1−p) log₂(1−p)`.
fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x == 0.0 { 0.0 } else { -x * x.log2() };
    term(p) + term(1.0 - p)
}

/// Channel capacity in bits per use.
pub fn capacity(channel: ChannelSpec) -> f64 {
    match channel {
        ChannelSpec::Bec { p } => 1.0 - p,
        ChannelSpec::Bsc { p } => 1.0 - binary_entropy(p),
    }
}

/// Serial composition of two erasure channels: `BEC(p)∘BEC(q) = BEC(p + q − pq)`.
pub fn compose_erasure(p: f64, q: f64) -> f64 {
    p + q - p * q
}

/// Serial composition of two bit-flip channels: `BSC(p)∘BSC(q) = BSC(p + q − 2pq)`.
pub fn compose_bsc(p: f64, q: f64) -> f64 {
    p + q - 2.0 * p * q
}

/// The bit-flip channel `BSC(p/2)` is a degradation of `BEC(p)` (mapping
/// an erasure to a fair coin). Returns the crossover probability.
pub fn degrade_erasure_to_bsc(p: f64) -> f64 {
    p / 2.0
}

/// Markov bound on the fraction of derandomized puncturing patterns whose
/// per-position error exceeds `eps0`, given average error `eps`.
pub fn markov_puncture_bound(eps: f64, eps0: f64) -> Result<f64> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter { what: "average error", value: eps });
    }
    if !(eps0 > 0.0) {
        return Err(Error::InvalidParameter { what: "error threshold", value: eps0 });
    }
    Ok((eps / eps0).min(1.0))
}

/// How a reliability table was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExactBec,
    MonteCarloBsc,
}

impl Method {
    fn code(self) -> u32 {
        match self {
            Method::ExactBec => 0,
            Method::MonteCarloBsc => 1,
        }
    }

    fn from_code(code: u32) -> Result<Self> {
        match code {
            0 => Ok(Method::ExactBec),
            1 => Ok(Method::MonteCarloBsc),
            other => Err(Error::Format(format!("unknown reliability method code {other}"))),
        }
    }
}

/// Z-samples are floored at `2^{-1000}` so that plain `f64` accumulation
/// never underflows; channels beyond that tie at the floor.
const SAMPLE_EXP_FLOOR: f64 = -1000.0;
/// Cap on a single Z-sample's exponent (samples above `Z = 1` only occur
/// through estimator noise on hopeless channels).
const SAMPLE_EXP_CEIL: f64 = 16.0;
/// Trials per deterministic reduction chunk (fixed so that results do not
/// depend on worker count).
const MC_CHUNK: u64 = 512;

/// Per-synthetic-channel reliabilities `log₂ Z(W⁽ᵃ⁾)` for `a < 2ⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityTable {
    channel: ChannelSpec,
    n: usize,
    method: Method,
    samples: u64,
    seed: u64,
    log2_z: Vec<f64>,
    log2_stderr: Option<Vec<f64>>,
}

impl ReliabilityTable {
    /// Exact erasure-channel table via the log-domain recursion.
    ///
    /// `BEC(1)` gives the uniform (all `Z = 1`) table whose ordering is
    /// purely degree-then-mask, i.e. the Reed–Muller ordering.
    pub fn exact_bec(p: f64, n: usize) -> Result<Self> {
        let channel = ChannelSpec::bec(p)?;
        check_table_vars(n)?;
        let mut vals = vec![p.log2()];
        for _ in 0..n {
            let mut next = vec![0.0; vals.len() * 2];
            for (i, &lz) in vals.iter().enumerate() {
                next[i << 1] = bec_minus_log2(lz);
                next[(i << 1) | 1] = 2.0 * lz;
            }
            vals = next;
        }
        Ok(ReliabilityTable {
            channel,
            n,
            method: Method::ExactBec,
            samples: 0,
            seed: 0,
            log2_z: vals,
            log2_stderr: None,
        })
    }

    /// Genie-aided Monte Carlo table for the bit-flip channel.
    ///
    /// Each trial transmits the all-zero codeword, runs the
    /// successive-cancellation recursion with true prior bits (all zero),
    /// and accumulates the unbiased Bhattacharyya sample `2^{−λ_a/2}` per
    /// channel. Trial `t` draws from an independent ChaCha stream `(seed, t)`,
    /// and trials are reduced over a fixed chunk tree, so the output is
    /// identical regardless of how many worker threads run.
    pub fn mc_bsc(p: f64, n: usize, samples: u64, seed: u64) -> Result<Self> {
        let channel = ChannelSpec::bsc(p)?;
        check_table_vars(n)?;
        if samples == 0 {
            return Err(Error::InvalidParameter { what: "sample count", value: 0.0 });
        }
        let len = 1usize << n;
        if p == 0.0 {
            // Noiseless: every synthetic channel is noiseless, Z exactly 0.
            return Ok(ReliabilityTable {
                channel,
                n,
                method: Method::MonteCarloBsc,
                samples,
                seed,
                log2_z: vec![f64::NEG_INFINITY; len],
                log2_stderr: Some(vec![f64::NEG_INFINITY; len]),
            });
        }

        let chunks = samples.div_ceil(MC_CHUNK);
        let acc = mc_accumulate(p, n, samples, seed, 0, chunks);
        let trials = samples as f64;
        let mut log2_z = Vec::with_capacity(len);
        let mut log2_stderr = Vec::with_capacity(len);
        for a in 0..len {
            let mean = (acc.sum[a] / trials).min(1.0);
            log2_z.push(mean.log2());
            let var = ((acc.sum_sq[a] - acc.sum[a] * acc.sum[a] / trials)
                / (trials - 1.0).max(1.0))
            .max(0.0);
            log2_stderr.push((var / trials).sqrt().log2());
        }
        Ok(ReliabilityTable {
            channel,
            n,
            method: Method::MonteCarloBsc,
            samples,
            seed,
            log2_z,
            log2_stderr: Some(log2_stderr),
        })
    }

    pub fn channel(&self) -> ChannelSpec {
        self.channel
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Block length `2ⁿ`.
    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `log₂ Z` per synthetic channel index.
    pub fn log2_z(&self) -> &[f64] {
        &self.log2_z
    }

    pub fn log2_z_at(&self, index: usize) -> f64 {
        self.log2_z[index]
    }

    /// Linear-domain `Z` (may underflow to zero for extremely good channels).
    pub fn z_at(&self, index: usize) -> f64 {
        self.log2_z[index].exp2()
    }

    /// `log₂` of the standard error per channel (Monte Carlo tables only).
    pub fn log2_stderr(&self) -> Option<&[f64]> {
        self.log2_stderr.as_deref()
    }

    /// Channel indices sorted by ascending `Z`, ties broken by monomial
    /// degree then exponent mask. The tie-break respects the strong order,
    /// so prefixes of exact erasure tables are decreasing monomial sets.
    pub fn ascending_indices(&self) -> Vec<u32> {
        let full = full_mask(self.n);
        let mut order: Vec<u32> = (0..self.len() as u32).collect();
        order.sort_by(|&a, &b| {
            let key = |i: u32| {
                let mask = !i & full;
                (self.log2_z[i as usize], mask.count_ones(), mask)
            };
            key(a).partial_cmp(&key(b)).expect("reliabilities are never NaN")
        });
        order
    }

    /// `log₂ Σ_{a ∈ indices} Z_a` (the union bound over an information set).
    pub fn union_bound_log2(&self, indices: impl IntoIterator<Item = usize>) -> f64 {
        let vals: Vec<f64> = indices.into_iter().map(|a| self.log2_z[a]).collect();
        log2_sum_exp2(&vals)
    }

    /// Serializes to the `PRT1` binary format:
    /// magic, `n`, method code, sample count, seed, then `2ⁿ` little-endian
    /// `f64` values of `log₂ Z`.
    pub fn write_binary(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(b"PRT1")?;
        w.write_all(&(self.n as u32).to_le_bytes())?;
        w.write_all(&self.method.code().to_le_bytes())?;
        w.write_all(&self.samples.to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        for &v in &self.log2_z {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads the `PRT1` binary format. The channel parameter is not part of
    /// the format; the caller supplies it (it keys the cache file name) and
    /// it must agree with the stored method.
    pub fn read_binary(r: &mut impl Read, channel: ChannelSpec) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != b"PRT1" {
            return Err(Error::Format("bad reliability table magic".into()));
        }
        let mut u32buf = [0u8; 4];
        r.read_exact(&mut u32buf)?;
        let n = u32::from_le_bytes(u32buf) as usize;
        check_table_vars(n)?;
        r.read_exact(&mut u32buf)?;
        let method = Method::from_code(u32::from_le_bytes(u32buf))?;
        let mut u64buf = [0u8; 8];
        r.read_exact(&mut u64buf)?;
        let samples = u64::from_le_bytes(u64buf);
        r.read_exact(&mut u64buf)?;
        let seed = u64::from_le_bytes(u64buf);
        let kind_ok = matches!(
            (method, channel),
            (Method::ExactBec, ChannelSpec::Bec { .. }) | (Method::MonteCarloBsc, ChannelSpec::Bsc { .. })
        );
        if !kind_ok {
            return Err(Error::Format(format!(
                "stored method {method:?} does not match channel kind {}",
                channel.kind_str()
            )));
        }
        let mut log2_z = Vec::with_capacity(1 << n);
        for _ in 0..1usize << n {
            r.read_exact(&mut u64buf)?;
            log2_z.push(f64::from_le_bytes(u64buf));
        }
        if log2_z.iter().any(|v| v.is_nan() || *v > 0.0) {
            return Err(Error::Format("reliability values must satisfy log2 Z <= 0".into()));
        }
        Ok(ReliabilityTable { channel, n, method, samples, seed, log2_z, log2_stderr: None })
    }

    /// Writes the `index,log2_z,log2_stderr` CSV (stderr blank for exact
    /// tables).
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "index,log2_z,log2_stderr")?;
        for a in 0..self.len() {
            match &self.log2_stderr {
                Some(se) => writeln!(w, "{},{},{}", a, self.log2_z[a], se[a])?,
                None => writeln!(w, "{},{},", a, self.log2_z[a])?,
            }
        }
        Ok(())
    }

    /// The monomial labeling channel `index`.
    pub fn monomial_at(&self, index: usize) -> Monomial {
        Monomial::from_channel_index(index, self.n).expect("index in range")
    }
}

fn check_table_vars(n: usize) -> Result<()> {
    if n == 0 || n > MAX_VARS {
        return Err(Error::InvalidVariableCount(n));
    }
    Ok(())
}

/// One erasure polarization step in the log₂ domain:
/// `log₂(2z − z²) = log₂ z + 1 + log₂(1 − z/2)`.
fn bec_minus_log2(lz: f64) -> f64 {
    if lz == f64::NEG_INFINITY {
        return lz;
    }
    if lz == 0.0 {
        // z = 1 is a fixed point; keep it exact so uniform tables tie.
        return 0.0;
    }
    let z = lz.exp2();
    // 2z − z² ≤ 1, but the rounded sum can land a few ulps above log₂ 1
    // for z near 1; clamp so the Z ≤ 1 invariant survives serialization.
    (lz + 1.0 + (-z / 2.0).ln_1p() * std::f64::consts::LOG2_E).min(0.0)
}

/// `log₂ Σ 2^{vᵢ}` with empty/-∞ inputs collapsing to -∞.
pub fn log2_sum_exp2(vals: &[f64]) -> f64 {
    let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = vals.iter().map(|v| (v - max).exp2()).sum();
    max + sum.log2()
}

struct McAccumulator {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

impl McAccumulator {
    fn zeros(len: usize) -> Self {
        McAccumulator { sum: vec![0.0; len], sum_sq: vec![0.0; len] }
    }

    fn merge(mut self, other: McAccumulator) -> McAccumulator {
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.sum_sq.iter_mut().zip(&other.sum_sq) {
            *a += b;
        }
        self
    }
}

/// Reduces chunks `[chunk_lo, chunk_hi)` over a fixed binary tree; the tree
/// shape depends only on the chunk count, so the floating-point reduction
/// order is deterministic under any parallel schedule.
fn mc_accumulate(p: f64, n: usize, samples: u64, seed: u64, chunk_lo: u64, chunk_hi: u64) -> McAccumulator {
    if chunk_hi - chunk_lo > 1 {
        let mid = chunk_lo + (chunk_hi - chunk_lo) / 2;
        let (left, right) = rayon::join(
            || mc_accumulate(p, n, samples, seed, chunk_lo, mid),
            || mc_accumulate(p, n, samples, seed, mid, chunk_hi),
        );
        return left.merge(right);
    }

    let len = 1usize << n;
    let mut acc = McAccumulator::zeros(len);
    let mut llrs = vec![0.0f64; len];
    let llr0 = ((1.0 - p) / p).log2().min(LLR_CLAMP);
    let noise = Bernoulli::new(p).expect("validated probability");
    let lo = chunk_lo * MC_CHUNK;
    let hi = (chunk_lo * MC_CHUNK + MC_CHUNK).min(samples);
    for trial in lo..hi {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        for l in llrs.iter_mut() {
            *l = if noise.sample(&mut rng) { -llr0 } else { llr0 };
        }
        genie_transform(&mut llrs);
        for (a, &lambda) in llrs.iter().enumerate() {
            let sample = (-lambda / 2.0).clamp(SAMPLE_EXP_FLOOR, SAMPLE_EXP_CEIL).exp2();
            acc.sum[a] += sample;
            acc.sum_sq[a] += sample * sample;
        }
    }
    acc
}

/// In-place genie-aided LLR transform: with all true bits zero, every
/// partial sum vanishes, so the whole tree reduces to check-node combines
/// into the first half and variable-node sums into the second half,
/// recursively. Afterwards `llrs[a]` is the decision LLR of synthetic
/// channel `a`.
fn genie_transform(llrs: &mut [f64]) {
    let len = llrs.len();
    let mut size = len;
    while size > 1 {
        let half = size / 2;
        let mut seg = 0;
        while seg < len {
            for j in seg..seg + half {
                let a = llrs[j];
                let b = llrs[j + half];
                llrs[j] = check_node(a, b);
                llrs[j + half] = var_node(a, b);
            }
            seg += size;
        }
        size = half;
    }
    for l in llrs.iter_mut() {
        *l = clamp(*l);
    }
}
