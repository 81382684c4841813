//! Polar codes over the `2ⁿ`-point Boolean cube: encoding, successive
//! cancellation decoding, and code construction from reliability tables.
//!
//! A code is specified by a decreasing monomial set `I`; the information
//! positions are the channel indices of the members of `I` (a monomial with
//! exponent mask `m` occupies channel `!m`). The encoder is the `n`-fold
//! Kronecker power of `[[1,1],[0,1]]` acting on the input vector, whose
//! column space over a decreasing `I` equals the span of the monomial
//! evaluation vectors, so the code really is the evaluation code of `I`.
//!
//! Successive cancellation works for two observation alphabets:
//!
//! * erasures (`0`, `1`, unknown) — exact for the erasure channel: an
//!   information bit comes out undecided exactly when it is not linearly
//!   determined by the unerased outputs and the earlier inputs;
//! * soft base-2 log-likelihood ratios, used for dephasing noise.
//!
//! Undecided or tied bits commit to `0`. All error-rate experiments in this
//! crate transmit the all-zero codeword, for which that commitment is
//! always the transmitted value, so failures are exactly the undecided or
//! miscommitted positions.

use crate::channel::ReliabilityTable;
use crate::error::{Error, Result};
use crate::llr::{check_node, clamp};
use crate::monomial::{full_mask, MonomialSet};

/// Erasure-alphabet symbol: `0`, `1`, or [`ERASED`].
pub const ERASED: u8 = 2;

/// In-place application of the n-fold Kronecker power of `[[1,1],[0,1]]`
/// to a `{0,1}` vector whose length is a power of two. The transform is an
/// involution.
pub fn polar_transform(bits: &mut [u8]) {
    let len = bits.len();
    assert!(len.is_power_of_two(), "transform length must be a power of two");
    let mut half = 1;
    while half < len {
        let size = half * 2;
        let mut seg = 0;
        while seg < len {
            for j in seg..seg + half {
                bits[j] ^= bits[j + half];
            }
            seg += size;
        }
        half = size;
    }
}

/// How many information positions a constructed code should have.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CodeTarget {
    /// Exactly this many information positions.
    Dimension(usize),
    /// `⌊rate · 2ⁿ⌋` information positions.
    Rate(f64),
    /// The largest code whose union bound on block error stays at or below
    /// this probability.
    Threshold(f64),
}

/// A polar code given by a decreasing monomial information set.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarCode {
    info: MonomialSet,
    info_indices: Vec<u32>,
    frozen: Vec<bool>,
}

impl PolarCode {
    /// Builds a code from a decreasing monomial set.
    pub fn new(info: MonomialSet) -> Result<Self> {
        if !info.is_decreasing() {
            return Err(Error::NotDecreasing);
        }
        let n = info.n();
        let full = full_mask(n);
        let mut info_indices: Vec<u32> = info.iter_masks().map(|m| !m & full).collect();
        info_indices.sort_unstable();
        let mut frozen = vec![true; 1 << n];
        for &a in &info_indices {
            frozen[a as usize] = false;
        }
        Ok(PolarCode { info, info_indices, frozen })
    }

    /// Selects the `target` most reliable channels from `table`, closes the
    /// prefix downward under the monomial order, and — for exact dimension
    /// targets — trims worst-reliability maximal elements until the size is
    /// exact. Prefixes of exact erasure tables are already decreasing, so
    /// the closure is a no-op there; the repair only matters for sampled
    /// tables whose ordering noise violates the order.
    pub fn construct(table: &ReliabilityTable, target: CodeTarget) -> Result<Self> {
        let len = table.len();
        let order = table.ascending_indices();
        match target {
            CodeTarget::Dimension(k) => {
                if k == 0 || k > len {
                    return Err(Error::InvalidParameter {
                        what: "code dimension",
                        value: k as f64,
                    });
                }
                let mut set = closed_prefix(table, &order, k);
                trim_to_dimension(table, &mut set, k);
                PolarCode::new(set)
            }
            CodeTarget::Rate(r) => {
                if !(0.0..=1.0).contains(&r) {
                    return Err(Error::InvalidParameter { what: "code rate", value: r });
                }
                let k = ((r * len as f64).floor() as usize).max(1);
                Self::construct(table, CodeTarget::Dimension(k))
            }
            CodeTarget::Threshold(t) => {
                if !(t > 0.0) {
                    return Err(Error::InvalidParameter { what: "error threshold", value: t });
                }
                let bound = t.log2();
                // Union bound of the closed prefix grows with the prefix, so
                // binary search for the largest admissible prefix length.
                let (mut lo, mut hi) = (0usize, len);
                while lo < hi {
                    let mid = lo + (hi - lo + 1) / 2;
                    let set = closed_prefix(table, &order, mid);
                    let indices = set.iter_masks().map(|m| (!m & full_mask(table.n())) as usize);
                    if table.union_bound_log2(indices) <= bound {
                        lo = mid;
                    } else {
                        hi = mid - 1;
                    }
                }
                if lo == 0 {
                    return Err(Error::Infeasible(format!(
                        "no nonempty code meets block error threshold {t}"
                    )));
                }
                PolarCode::new(closed_prefix(table, &order, lo))
            }
        }
    }

    pub fn n(&self) -> usize {
        self.info.n()
    }

    /// Code length `2ⁿ`.
    pub fn block_len(&self) -> usize {
        1 << self.n()
    }

    /// Number of information positions.
    pub fn dimension(&self) -> usize {
        self.info.len()
    }

    pub fn rate(&self) -> f64 {
        self.dimension() as f64 / self.block_len() as f64
    }

    /// The decreasing monomial set defining the code.
    pub fn info_set(&self) -> &MonomialSet {
        &self.info
    }

    /// Information channel indices in increasing order.
    pub fn info_indices(&self) -> &[u32] {
        &self.info_indices
    }

    pub fn is_frozen(&self, index: usize) -> bool {
        self.frozen[index]
    }

    /// `log₂ Σ Z` over the information set: union bound on block error.
    pub fn union_bound_log2(&self, table: &ReliabilityTable) -> f64 {
        table.union_bound_log2(self.info_indices.iter().map(|&a| a as usize))
    }

    /// Largest `log₂ Z` over the information set (the weakest used channel).
    pub fn worst_info_log2_z(&self, table: &ReliabilityTable) -> f64 {
        self.info_indices
            .iter()
            .map(|&a| table.log2_z_at(a as usize))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Encodes `message` (one bit per information position, in increasing
    /// channel order) into a codeword of length `2ⁿ`.
    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        if message.len() != self.dimension() {
            return Err(Error::LengthMismatch {
                expected: self.dimension(),
                got: message.len(),
            });
        }
        let mut x = vec![0u8; self.block_len()];
        for (&a, &bit) in self.info_indices.iter().zip(message) {
            x[a as usize] = bit & 1;
        }
        polar_transform(&mut x);
        Ok(x)
    }

    /// Extracts the information bits from a full input vector `u`.
    pub fn message_of(&self, u: &[u8]) -> Vec<u8> {
        self.info_indices.iter().map(|&a| u[a as usize]).collect()
    }

    /// One-shot erasure decode; see [`ScDecoder::decode_erasure`].
    pub fn sc_decode_erasure(&self, received: &[u8]) -> Result<ErasureDecode> {
        let mut dec = ScDecoder::new(self);
        let (u, undecided) = {
            let out = dec.decode_erasure(self, received)?;
            (out.0.to_vec(), out.1.to_vec())
        };
        Ok(ErasureDecode { u, undecided })
    }

    /// One-shot LLR decode; see [`ScDecoder::decode_llr`].
    pub fn sc_decode_llr(&self, llrs: &[f64]) -> Result<Vec<u8>> {
        let mut dec = ScDecoder::new(self);
        let u = dec.decode_llr(self, llrs)?.to_vec();
        Ok(u)
    }
}

/// Result of an erasure-channel decode: the full input vector (frozen
/// positions included) and the information positions that were undecided
/// and committed to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErasureDecode {
    pub u: Vec<u8>,
    pub undecided: Vec<u32>,
}

/// Reusable successive-cancellation decoder; buffers are allocated once,
/// so repeated decodes of the same block length are allocation-free.
pub struct ScDecoder {
    n: usize,
    /// `llr_levels[l]` holds the `2^(n-l)` soft values active at tree level `l`.
    llr_levels: Vec<Vec<f64>>,
    /// Erasure-alphabet counterpart of `llr_levels`.
    sym_levels: Vec<Vec<u8>>,
    /// `bit_levels[l]` holds re-encoded (partial-sum) bits at level `l`.
    bit_levels: Vec<Vec<u8>>,
    u: Vec<u8>,
    undecided: Vec<u32>,
}

impl ScDecoder {
    pub fn new(code: &PolarCode) -> Self {
        let n = code.n();
        let level = |l: usize| 1usize << (n - l);
        ScDecoder {
            n,
            llr_levels: (0..=n).map(|l| vec![0.0; level(l)]).collect(),
            sym_levels: (0..=n).map(|l| vec![0; level(l)]).collect(),
            bit_levels: (0..=n).map(|l| vec![0; level(l)]).collect(),
            u: vec![0; 1 << n],
            undecided: Vec::new(),
        }
    }

    /// Decodes a received word over the erasure alphabet (`0`, `1`,
    /// [`ERASED`]). Returns the decoded input vector and the undecided
    /// information positions (committed to zero), in increasing order.
    pub fn decode_erasure(&mut self, code: &PolarCode, received: &[u8]) -> Result<(&[u8], &[u32])> {
        self.check(code, received.len())?;
        if received.iter().any(|&s| s > ERASED) {
            return Err(Error::Format("erasure symbols must be 0, 1, or 2".into()));
        }
        self.sym_levels[0].copy_from_slice(received);
        self.undecided.clear();
        self.rec_erasure(code, 0, 0);
        Ok((&self.u, &self.undecided))
    }

    /// Decodes a received word given per-position base-2 LLRs (positive
    /// favors bit 0). Ties commit to zero. Returns the decoded input vector.
    pub fn decode_llr(&mut self, code: &PolarCode, llrs: &[f64]) -> Result<&[u8]> {
        self.check(code, llrs.len())?;
        for (i, &l) in llrs.iter().enumerate() {
            if l.is_nan() {
                return Err(Error::NonFiniteLlr(i));
            }
            self.llr_levels[0][i] = clamp(l);
        }
        self.rec_llr(code, 0, 0);
        Ok(&self.u)
    }

    fn check(&self, code: &PolarCode, len: usize) -> Result<()> {
        if code.n() != self.n {
            return Err(Error::VariableMismatch { expected: self.n, got: code.n() });
        }
        if len != 1 << self.n {
            return Err(Error::LengthMismatch { expected: 1 << self.n, got: len });
        }
        Ok(())
    }

    fn rec_llr(&mut self, code: &PolarCode, level: usize, a0: usize) {
        if level == self.n {
            let lambda = self.llr_levels[self.n][0];
            let bit = if code.frozen[a0] {
                0
            } else if lambda >= 0.0 {
                0
            } else {
                1
            };
            self.u[a0] = bit;
            self.bit_levels[self.n][0] = bit;
            return;
        }
        let half = 1 << (self.n - level - 1);
        for j in 0..half {
            let a = self.llr_levels[level][j];
            let b = self.llr_levels[level][j + half];
            self.llr_levels[level + 1][j] = check_node(a, b);
        }
        self.rec_llr(code, level + 1, a0);
        // Stash the left child's re-encoded bits; the right recursion reuses
        // its buffer.
        let (upper, lower) = self.bit_levels.split_at_mut(level + 1);
        upper[level][..half].copy_from_slice(&lower[0][..half]);
        for j in 0..half {
            let a = self.llr_levels[level][j];
            let b = self.llr_levels[level][j + half];
            let s = self.bit_levels[level][j];
            let shifted = if s == 0 { a } else { -a };
            self.llr_levels[level + 1][j] = clamp(shifted + b);
        }
        self.rec_llr(code, level + 1, a0 + half);
        for j in 0..half {
            let xr = self.bit_levels[level + 1][j];
            self.bit_levels[level][j] ^= xr;
            self.bit_levels[level][j + half] = xr;
        }
    }

    fn rec_erasure(&mut self, code: &PolarCode, level: usize, a0: usize) {
        if level == self.n {
            let sym = self.sym_levels[self.n][0];
            let bit = if code.frozen[a0] {
                0
            } else if sym == ERASED {
                self.undecided.push(a0 as u32);
                0
            } else {
                sym
            };
            self.u[a0] = bit;
            self.bit_levels[self.n][0] = bit;
            return;
        }
        let half = 1 << (self.n - level - 1);
        for j in 0..half {
            let a = self.sym_levels[level][j];
            let b = self.sym_levels[level][j + half];
            self.sym_levels[level + 1][j] = if a == ERASED || b == ERASED { ERASED } else { a ^ b };
        }
        self.rec_erasure(code, level + 1, a0);
        let (upper, lower) = self.bit_levels.split_at_mut(level + 1);
        upper[level][..half].copy_from_slice(&lower[0][..half]);
        for j in 0..half {
            let a = self.sym_levels[level][j];
            let b = self.sym_levels[level][j + half];
            let s = self.bit_levels[level][j];
            // Two independent looks at the right sub-bit: the left
            // observation shifted by the known partial sum, or the direct
            // right observation.
            self.sym_levels[level + 1][j] = if a != ERASED { a ^ s } else { b };
        }
        self.rec_erasure(code, level + 1, a0 + half);
        for j in 0..half {
            let xr = self.bit_levels[level + 1][j];
            self.bit_levels[level][j] ^= xr;
            self.bit_levels[level][j + half] = xr;
        }
    }
}

/// Decreasing closure of the first `k` entries of `order`.
fn closed_prefix(table: &ReliabilityTable, order: &[u32], k: usize) -> MonomialSet {
    let n = table.n();
    let full = full_mask(n);
    let masks: Vec<u32> = order[..k].iter().map(|&a| !a & full).collect();
    MonomialSet::from_masks(n, &masks).expect("masks in range").decreasing_closure()
}

/// Removes worst-reliability maximal elements until `set` has exactly `k`
/// members. Removing a maximal element keeps the set decreasing.
fn trim_to_dimension(table: &ReliabilityTable, set: &mut MonomialSet, k: usize) {
    let full = full_mask(table.n());
    while set.len() > k {
        let worst = set
            .maximal_elements()
            .into_iter()
            .max_by(|f, g| {
                let key = |m: &crate::monomial::Monomial| {
                    let a = (!m.mask() & full) as usize;
                    (table.log2_z_at(a), m.degree(), m.mask())
                };
                key(f).partial_cmp(&key(g)).expect("reliabilities are never NaN")
            })
            .expect("set is nonempty while larger than k");
        set.remove(&worst);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monomial::Monomial;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_bits(rng: &mut impl Rng, len: usize) -> Vec<u8> {
        (0..len).map(|_| rng.gen_range(0..2u8)).collect()
    }

    #[test]
    fn transform_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=6 {
            let original = random_bits(&mut rng, 1 << n);
            let mut x = original.clone();
            polar_transform(&mut x);
            polar_transform(&mut x);
            assert_eq!(x, original);
        }
    }

    #[test]
    fn transform_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let a = random_bits(&mut rng, 16);
            let b = random_bits(&mut rng, 16);
            let mut sum: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
            let (mut ea, mut eb) = (a, b);
            polar_transform(&mut ea);
            polar_transform(&mut eb);
            polar_transform(&mut sum);
            let direct: Vec<u8> = ea.iter().zip(&eb).map(|(x, y)| x ^ y).collect();
            assert_eq!(sum, direct);
        }
    }

    #[test]
    fn transform_columns_evaluate_complemented_monomials() {
        // Column b of the transform is the evaluation vector of the
        // monomial with mask !b, read at complemented points.
        for n in 1..=4 {
            let nn = 1usize << n;
            let full = full_mask(n);
            for b in 0..nn {
                let mut x = vec![0u8; nn];
                x[b] = 1;
                polar_transform(&mut x);
                let mono = Monomial::from_channel_index(b, n).unwrap();
                let ev = mono.evaluate();
                for (i, &bit) in x.iter().enumerate() {
                    let complemented = !(i as u32) & full;
                    assert_eq!(bit == 1, ev.get(complemented as usize), "n={n} b={b} i={i}");
                }
            }
        }
    }

    #[test]
    fn decreasing_code_equals_monomial_evaluation_span() {
        use crate::gf2::{BitMatrix, BitVector};
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=4 {
            let nn = 1usize << n;
            for _ in 0..30 {
                let masks: Vec<u32> = (0..nn as u32).filter(|_| rng.gen_bool(0.4)).collect();
                let set =
                    MonomialSet::from_masks(n, &masks).unwrap().decreasing_closure();
                if set.len() == 0 {
                    continue;
                }
                let code = PolarCode::new(set.clone()).unwrap();
                let encoder_rows: Vec<BitVector> = code
                    .info_indices()
                    .iter()
                    .map(|&a| {
                        let mut x = vec![0u8; nn];
                        x[a as usize] = 1;
                        polar_transform(&mut x);
                        BitVector::from_fn(nn, |i| x[i] == 1)
                    })
                    .collect();
                let eval_rows: Vec<BitVector> = set.iter().map(|m| m.evaluate()).collect();
                let rank_a = BitMatrix::from_rows(nn, encoder_rows.clone()).rank();
                let rank_b = BitMatrix::from_rows(nn, eval_rows.clone()).rank();
                let mut both = encoder_rows;
                both.extend(eval_rows);
                let rank_union = BitMatrix::from_rows(nn, both).rank();
                assert_eq!(rank_a, set.len());
                assert_eq!(rank_a, rank_b);
                assert_eq!(rank_a, rank_union, "spans differ for {set:?}");
            }
        }
    }

    #[test]
    fn dual_set_spans_gf2_nullspace_exhaustively() {
        // For every decreasing set I with n ≤ 4, the evaluation vectors of
        // dual_set(I) span exactly the GF(2) nullspace of the code spanned
        // by the evaluation vectors of I.
        use crate::gf2::{BitMatrix, BitVector};
        for n in 1..=4 {
            let nn = 1usize << n;
            for subset in 0u32..1 << nn {
                let masks: Vec<u32> = (0..nn as u32).filter(|&m| subset >> m & 1 == 1).collect();
                let set = MonomialSet::from_masks(n, &masks).unwrap();
                if !set.is_decreasing() {
                    continue;
                }
                let dual = set.dual_set();
                assert_eq!(dual.len(), nn - set.len());
                let gen_rows: Vec<BitVector> = set.iter().map(|m| m.evaluate()).collect();
                let dual_rows: Vec<BitVector> = dual.iter().map(|m| m.evaluate()).collect();
                for g in &gen_rows {
                    for d in &dual_rows {
                        assert!(!g.dot(d), "dual rows must be orthogonal to the code");
                    }
                }
                let null = BitMatrix::from_rows(nn, gen_rows).nullspace();
                assert_eq!(null.num_rows(), dual.len());
                let mut stacked: Vec<BitVector> = dual_rows.clone();
                stacked.extend(null.rows().iter().cloned());
                assert_eq!(BitMatrix::from_rows(nn, dual_rows).rank(), dual.len());
                assert_eq!(
                    BitMatrix::from_rows(nn, stacked).rank(),
                    dual.len(),
                    "nullspace and dual-set span differ at n={n} masks={masks:?}"
                );
            }
        }
    }

    #[test]
    fn non_decreasing_sets_are_rejected() {
        let set = MonomialSet::from_masks(3, &[0b110u32]).unwrap();
        assert!(matches!(PolarCode::new(set), Err(Error::NotDecreasing)));
    }

    #[test]
    fn construct_hits_exact_dimension_and_stays_decreasing() {
        let table = ReliabilityTable::exact_bec(0.5, 4).unwrap();
        for k in 1..=16 {
            let code = PolarCode::construct(&table, CodeTarget::Dimension(k)).unwrap();
            assert_eq!(code.dimension(), k);
            assert!(code.info_set().is_decreasing());
        }
        // The single most reliable channel is the all-plus one, i.e. the
        // constant monomial.
        let code = PolarCode::construct(&table, CodeTarget::Dimension(1)).unwrap();
        assert_eq!(code.info_indices(), &[15]);
    }

    #[test]
    fn construct_rate_and_threshold_targets() {
        let table = ReliabilityTable::exact_bec(0.3, 5).unwrap();
        let code = PolarCode::construct(&table, CodeTarget::Rate(0.25)).unwrap();
        assert_eq!(code.dimension(), 8);

        let threshold = 1e-3;
        let code = PolarCode::construct(&table, CodeTarget::Threshold(threshold)).unwrap();
        assert!(code.union_bound_log2(&table) <= threshold.log2());
        // Maximality: one more channel in the prefix must break the bound.
        let bigger = PolarCode::construct(&table, CodeTarget::Dimension(code.dimension() + 1));
        if let Ok(bigger) = bigger {
            assert!(bigger.union_bound_log2(&table) > threshold.log2());
        }
    }

    #[test]
    fn noiseless_round_trip_both_decoders() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let table = ReliabilityTable::exact_bec(0.4, 5).unwrap();
        let code = PolarCode::construct(&table, CodeTarget::Dimension(12)).unwrap();
        for _ in 0..25 {
            let message = random_bits(&mut rng, code.dimension());
            let x = code.encode(&message).unwrap();

            let received: Vec<u8> = x.clone();
            let decode = code.sc_decode_erasure(&received).unwrap();
            assert!(decode.undecided.is_empty());
            assert_eq!(code.message_of(&decode.u), message);

            let llrs: Vec<f64> = x.iter().map(|&b| if b == 0 { 8.0 } else { -8.0 }).collect();
            let u = code.sc_decode_llr(&llrs).unwrap();
            assert_eq!(code.message_of(&u), message);
        }
    }

    #[test]
    fn all_erased_word_leaves_every_info_bit_undecided() {
        let table = ReliabilityTable::exact_bec(0.4, 4).unwrap();
        let code = PolarCode::construct(&table, CodeTarget::Dimension(6)).unwrap();
        let received = vec![ERASED; code.block_len()];
        let decode = code.sc_decode_erasure(&received).unwrap();
        assert_eq!(decode.undecided, code.info_indices());
        assert!(decode.u.iter().all(|&b| b == 0));
    }

    #[test]
    fn decoder_validates_inputs() {
        let table = ReliabilityTable::exact_bec(0.4, 3).unwrap();
        let code = PolarCode::construct(&table, CodeTarget::Dimension(4)).unwrap();
        assert!(code.sc_decode_erasure(&[0, 1, 2]).is_err());
        assert!(code.sc_decode_erasure(&[3; 8]).is_err());
        assert!(code.sc_decode_llr(&[f64::NAN; 8]).is_err());
        let message_too_long = vec![0u8; 5];
        assert!(code.encode(&message_too_long).is_err());
    }
}
