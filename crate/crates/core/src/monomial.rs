//! Multilinear monomials over `F₂[x₀,…,x_{n−1}]/(x_i² − x_i)` and sets thereof.
//!
//! A monomial is stored as an n-bit exponent mask (bit `t` set means `x_t`
//! divides the monomial), with `n ≤ 24` variables. Evaluation vectors index
//! the point `u ∈ F₂ⁿ` as `u = Σ u_t 2^t`, so `ev(m)[u] = 1` exactly when
//! the support of `u` contains the exponent mask.
//!
//! Two partial orders drive everything here:
//!
//! * the *weak* order `f ≼_w g`: `f` divides `g` (mask inclusion);
//! * the *strong* order `f ≼ g`: for monomials of equal degree, the sorted
//!   variable indices of `f` are dominated elementwise by those of `g`; for
//!   `deg f < deg g`, some divisor of `g` of degree `deg f` dominates `f`.
//!
//! Both are equivalent to a suffix-count test: `f ≼ g` iff for every
//! threshold `t`, `f` uses at most as many variables with index `≥ t` as
//! `g` does (matching `f`'s indices greedily against the largest available
//! indices of `g`). That is what [`Monomial::strong_leq`] implements; the
//! test suite checks it against the definitional divisor enumeration.
//!
//! Synthetic-channel indices map to monomials with *complemented* digits:
//! channel `a` corresponds to the monomial with exponent bits `1 − a_t`.
//! The most reliable channel `a = 2ⁿ − 1` is the constant monomial `1`,
//! and channel `0` is the full monomial `x₀⋯x_{n−1}`.

use crate::error::{Error, Result};
use crate::gf2::BitVector;
use serde::{Deserialize, Serialize};

/// Largest supported variable count.
pub const MAX_VARS: usize = 24;

fn check_vars(n: usize) -> Result<()> {
    if n == 0 || n > MAX_VARS {
        return Err(Error::InvalidVariableCount(n));
    }
    Ok(())
}

/// A multilinear monomial in `n` variables, stored as an exponent mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    n: u8,
    mask: u32,
}

impl Monomial {
    /// Builds a monomial from an exponent mask.
    pub fn new(n: usize, mask: u32) -> Result<Self> {
        check_vars(n)?;
        if mask >> n != 0 {
            return Err(Error::Format(format!("exponent mask {mask:#x} exceeds {n} variables")));
        }
        Ok(Monomial { n: n as u8, mask })
    }

    /// The constant monomial `1`.
    pub fn one(n: usize) -> Result<Self> {
        Monomial::new(n, 0)
    }

    /// The full monomial `x₀⋯x_{n−1}`.
    pub fn full(n: usize) -> Result<Self> {
        check_vars(n)?;
        Ok(Monomial { n: n as u8, mask: full_mask(n) })
    }

    /// Builds `x_{i₁}⋯x_{i_r}` from variable indices.
    pub fn from_vars(n: usize, vars: &[usize]) -> Result<Self> {
        check_vars(n)?;
        let mut mask = 0u32;
        for &v in vars {
            if v >= n {
                return Err(Error::Format(format!("variable x{v} out of range for n = {n}")));
            }
            mask |= 1 << v;
        }
        Ok(Monomial { n: n as u8, mask })
    }

    /// The monomial read off a synthetic-channel index (complemented digits).
    pub fn from_channel_index(index: usize, n: usize) -> Result<Self> {
        check_vars(n)?;
        if index >> n != 0 {
            return Err(Error::Format(format!("channel index {index} exceeds block length 2^{n}")));
        }
        Ok(Monomial { n: n as u8, mask: !(index as u32) & full_mask(n) })
    }

    /// The synthetic-channel index this monomial labels.
    pub fn channel_index(&self) -> usize {
        (!self.mask & full_mask(self.n())) as usize
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    /// Number of variables dividing the monomial.
    pub fn degree(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// Variable indices in ascending order.
    pub fn vars(&self) -> Vec<usize> {
        (0..self.n()).filter(|&t| self.mask >> t & 1 == 1).collect()
    }

    /// The complementary monomial `m̄` on the unused variables.
    pub fn complement(&self) -> Monomial {
        Monomial { n: self.n, mask: !self.mask & full_mask(self.n()) }
    }

    fn check_compat(&self, other: &Monomial) -> Result<()> {
        if self.n != other.n {
            return Err(Error::VariableMismatch { expected: self.n(), got: other.n() });
        }
        Ok(())
    }

    /// Product in the quotient ring: union of exponent masks.
    pub fn product(&self, other: &Monomial) -> Result<Monomial> {
        self.check_compat(other)?;
        Ok(Monomial { n: self.n, mask: self.mask | other.mask })
    }

    /// Weak order: does `self` divide `other`?
    pub fn weak_leq(&self, other: &Monomial) -> Result<bool> {
        self.check_compat(other)?;
        Ok(self.mask & !other.mask == 0)
    }

    /// Strong order `self ≼ other` (suffix-count test, see module docs).
    pub fn strong_leq(&self, other: &Monomial) -> Result<bool> {
        self.check_compat(other)?;
        Ok(strong_leq_masks(self.mask, other.mask))
    }

    /// Evaluation vector over all `2ⁿ` points.
    pub fn evaluate(&self) -> BitVector {
        let mask = self.mask;
        BitVector::from_fn(1 << self.n(), |u| u as u32 & mask == mask)
    }
}

impl std::fmt::Display for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.mask == 0 {
            return write!(f, "1");
        }
        for t in 0..self.n() {
            if self.mask >> t & 1 == 1 {
                write!(f, "x{t}")?;
            }
        }
        Ok(())
    }
}

impl std::fmt::Debug for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Display::fmt(self, f)
    }
}

#[inline]
pub(crate) fn full_mask(n: usize) -> u32 {
    (1u32 << n) - 1
}

/// Strong order on raw exponent masks (same variable count assumed).
#[inline]
pub(crate) fn strong_leq_masks(f: u32, g: u32) -> bool {
    let mut f = f;
    let mut g = g;
    // Suffix counts compare equal-length tails; shifting both masks keeps
    // the remaining (high) parts aligned.
    loop {
        if f.count_ones() > g.count_ones() {
            return false;
        }
        if f == 0 {
            return true;
        }
        f >>= 1;
        g >>= 1;
    }
}

/// Down-steps of `mask` in the strong order: divisor steps (remove one
/// variable) and index decrements (`x_j → x_{j−1}` when free). These single
/// steps generate the whole order, which is what makes closure and
/// decreasing checks linear in `n` per element.
fn for_each_down_step(mask: u32, mut visit: impl FnMut(u32)) {
    let mut rest = mask;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        visit(mask & !(1 << j));
        if j > 0 && mask >> (j - 1) & 1 == 0 {
            visit(mask & !(1 << j) | 1 << (j - 1));
        }
    }
}

/// Up-steps: the inverses of [`for_each_down_step`].
fn for_each_up_step(mask: u32, n: usize, mut visit: impl FnMut(u32)) {
    for j in 0..n as u32 {
        if mask >> j & 1 == 0 {
            visit(mask | 1 << j);
            if j > 0 && mask >> (j - 1) & 1 == 1 {
                visit(mask & !(1 << (j - 1)) | 1 << j);
            }
        }
    }
}

/// A subset of the `2ⁿ` monomials, stored as a bitset over exponent masks.
#[derive(Clone, PartialEq, Eq)]
pub struct MonomialSet {
    n: u8,
    bits: Vec<u64>,
    len: usize,
}

impl MonomialSet {
    /// The empty set over `n` variables.
    pub fn empty(n: usize) -> Result<Self> {
        check_vars(n)?;
        Ok(MonomialSet { n: n as u8, bits: vec![0; (1usize << n).div_ceil(64)], len: 0 })
    }

    /// All `2ⁿ` monomials.
    pub fn all(n: usize) -> Result<Self> {
        let mut s = MonomialSet::empty(n)?;
        for w in &mut s.bits {
            *w = u64::MAX;
        }
        // n < 6 leaves a partial final word.
        let total = 1usize << n;
        if total % 64 != 0 {
            *s.bits.last_mut().unwrap() = (1u64 << (total % 64)) - 1;
        }
        s.len = total;
        Ok(s)
    }

    pub fn from_masks(n: usize, masks: &[u32]) -> Result<Self> {
        let mut s = MonomialSet::empty(n)?;
        for &m in masks {
            s.insert(Monomial::new(n, m)?)?;
        }
        Ok(s)
    }

    pub fn from_monomials(n: usize, monomials: impl IntoIterator<Item = Monomial>) -> Result<Self> {
        let mut s = MonomialSet::empty(n)?;
        for m in monomials {
            s.insert(m)?;
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub(crate) fn contains_mask(&self, mask: u32) -> bool {
        self.bits[mask as usize / 64] >> (mask % 64) & 1 == 1
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        m.n() == self.n() && self.contains_mask(m.mask())
    }

    fn insert_mask(&mut self, mask: u32) -> bool {
        let word = &mut self.bits[mask as usize / 64];
        let bit = 1u64 << (mask % 64);
        if *word & bit == 0 {
            *word |= bit;
            self.len += 1;
            true
        } else {
            false
        }
    }

    /// Inserts a monomial; returns whether it was new.
    pub fn insert(&mut self, m: Monomial) -> Result<bool> {
        if m.n() != self.n() {
            return Err(Error::VariableMismatch { expected: self.n(), got: m.n() });
        }
        Ok(self.insert_mask(m.mask()))
    }

    /// Removes a monomial; returns whether it was present.
    pub fn remove(&mut self, m: &Monomial) -> bool {
        if m.n() != self.n() || !self.contains_mask(m.mask()) {
            return false;
        }
        self.bits[m.mask() as usize / 64] &= !(1u64 << (m.mask() % 64));
        self.len -= 1;
        true
    }

    /// Exponent masks in ascending order.
    pub fn iter_masks(&self) -> impl Iterator<Item = u32> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let b = word.trailing_zeros();
                word &= word - 1;
                Some(w as u32 * 64 + b)
            })
        })
    }

    /// Member monomials in ascending mask order.
    pub fn iter(&self) -> impl Iterator<Item = Monomial> + '_ {
        let n = self.n;
        self.iter_masks().map(move |mask| Monomial { n, mask })
    }

    /// Is the set downward closed under the strong order?
    pub fn is_decreasing(&self) -> bool {
        for mask in self.iter_masks() {
            let mut ok = true;
            for_each_down_step(mask, |d| ok &= self.contains_mask(d));
            if !ok {
                return false;
            }
        }
        true
    }

    /// The smallest decreasing superset.
    pub fn decreasing_closure(&self) -> MonomialSet {
        let mut out = self.clone();
        let mut queue: Vec<u32> = self.iter_masks().collect();
        while let Some(mask) = queue.pop() {
            for_each_down_step(mask, |d| {
                if out.insert_mask(d) {
                    queue.push(d);
                }
            });
        }
        out
    }

    /// The dual description `M_n \ {ḡ : g ∈ self}`.
    ///
    /// For a decreasing `I` this is the decreasing set generating `C(I)^⊥`;
    /// it always has `2ⁿ − |I|` elements.
    pub fn dual_set(&self) -> MonomialSet {
        let n = self.n();
        let full = full_mask(n);
        let mut out = MonomialSet::empty(n).expect("validated variable count");
        for mask in 0..=full {
            if !self.contains_mask(!mask & full) {
                out.insert_mask(mask);
            }
        }
        out
    }

    /// The strong-order maximal members.
    ///
    /// For decreasing sets this scans each member's up-steps (linear in
    /// `n·|S|`), which is what the triply-even checks rely on; for arbitrary
    /// sets it falls back to a pairwise scan.
    pub fn maximal_elements(&self) -> Vec<Monomial> {
        let n = self.n();
        if self.is_decreasing() {
            // In a decreasing set, any strictly larger member is reachable
            // by up-steps that stay inside the set, so it suffices to look
            // one step up.
            self.iter()
                .filter(|m| {
                    let mut maximal = true;
                    for_each_up_step(m.mask(), n, |u| maximal &= !self.contains_mask(u));
                    maximal
                })
                .collect()
        } else {
            let members: Vec<Monomial> = self.iter().collect();
            members
                .iter()
                .filter(|m| {
                    members
                        .iter()
                        .all(|o| o.mask() == m.mask() || !strong_leq_masks(m.mask(), o.mask()))
                })
                .copied()
                .collect()
        }
    }

    /// The members maximal under mask inclusion (divisibility), a superset
    /// of the strong-order maximal members.
    ///
    /// Divisibility implies the strong order, so a decreasing set is also
    /// closed downward under inclusion and one-variable extensions suffice;
    /// arbitrary sets fall back to a pairwise scan.
    pub fn weak_maximal_elements(&self) -> Vec<Monomial> {
        let n = self.n();
        let full = full_mask(n);
        if self.is_decreasing() {
            self.iter()
                .filter(|m| {
                    let mut rest = full & !m.mask();
                    while rest != 0 {
                        let var = rest & rest.wrapping_neg();
                        if self.contains_mask(m.mask() | var) {
                            return false;
                        }
                        rest ^= var;
                    }
                    true
                })
                .collect()
        } else {
            let members: Vec<Monomial> = self.iter().collect();
            members
                .iter()
                .filter(|m| {
                    members
                        .iter()
                        .all(|o| o.mask() == m.mask() || o.mask() & m.mask() != m.mask())
                })
                .copied()
                .collect()
        }
    }

    /// Sorted exponent masks (the serialized representation).
    pub fn to_masks(&self) -> Vec<u32> {
        self.iter_masks().collect()
    }
}

impl std::fmt::Debug for MonomialSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Serialize, Deserialize)]
struct MonomialSetRepr {
    n: usize,
    masks: Vec<u32>,
}

impl Serialize for MonomialSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MonomialSetRepr { n: self.n(), masks: self.to_masks() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MonomialSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = MonomialSetRepr::deserialize(deserializer)?;
        MonomialSet::from_masks(repr.n, &repr.masks).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(n: usize, vars: &[usize]) -> Monomial {
        Monomial::from_vars(n, vars).unwrap()
    }

    #[test]
    fn channel_index_map_round_trips() {
        for n in 1..=6 {
            for a in 0..1usize << n {
                let mono = Monomial::from_channel_index(a, n).unwrap();
                assert_eq!(mono.channel_index(), a);
            }
        }
        // Complemented digits: channel 0 is the full monomial, the top
        // channel is the constant.
        assert_eq!(Monomial::from_channel_index(0, 3).unwrap(), m(3, &[0, 1, 2]));
        assert_eq!(Monomial::from_channel_index(7, 3).unwrap(), m(3, &[]));
        assert_eq!(Monomial::from_channel_index(5, 3).unwrap(), m(3, &[1]));
    }

    #[test]
    fn strong_order_examples() {
        assert!(!m(3, &[2]).strong_leq(&m(3, &[0, 1])).unwrap());
        assert!(m(3, &[1]).strong_leq(&m(3, &[0, 1])).unwrap());
        assert!(m(3, &[]).strong_leq(&m(3, &[2])).unwrap());
        assert!(m(4, &[0, 1]).strong_leq(&m(4, &[0, 2])).unwrap());
        assert!(!m(4, &[0, 3]).strong_leq(&m(4, &[1, 2])).unwrap());
        assert!(m(4, &[1, 2]).strong_leq(&m(4, &[0, 1, 3])).unwrap());
    }

    #[test]
    fn mismatched_variable_counts_are_rejected() {
        let a = m(3, &[0]);
        let b = m(4, &[0]);
        assert!(matches!(a.strong_leq(&b), Err(Error::VariableMismatch { .. })));
        assert!(matches!(a.product(&b), Err(Error::VariableMismatch { .. })));
    }

    /// Definitional strong order: enumerate divisors of `g` with the degree
    /// of `f` and compare sorted indices elementwise.
    fn strong_leq_definition(f: &Monomial, g: &Monomial) -> bool {
        let (df, dg) = (f.degree(), g.degree());
        if df > dg {
            return false;
        }
        let fv = f.vars();
        let subsets = |mask: u32, size: usize| -> Vec<u32> {
            (0..=mask)
                .filter(|s| s & !mask == 0 && s.count_ones() as usize == size)
                .collect()
        };
        subsets(g.mask(), df).into_iter().any(|b| {
            let bv = Monomial::new(g.n(), b).unwrap().vars();
            fv.iter().zip(&bv).all(|(i, j)| i <= j)
        })
    }

    #[test]
    fn strong_order_matches_definition_exhaustively() {
        for n in 1..=4 {
            for fm in 0..1u32 << n {
                for gm in 0..1u32 << n {
                    let f = Monomial::new(n, fm).unwrap();
                    let g = Monomial::new(n, gm).unwrap();
                    assert_eq!(
                        f.strong_leq(&g).unwrap(),
                        strong_leq_definition(&f, &g),
                        "disagreement at n={n} f={f} g={g}"
                    );
                }
            }
        }
    }

    #[test]
    fn order_axioms_and_weak_implies_strong() {
        // Reflexivity, antisymmetry, transitivity of both orders, and the
        // containment weak ⊆ strong, checked exhaustively for n ≤ 5.
        for n in 1..=5 {
            let all: Vec<Monomial> =
                (0..1u32 << n).map(|mask| Monomial::new(n, mask).unwrap()).collect();
            for f in &all {
                assert!(f.weak_leq(f).unwrap());
                assert!(f.strong_leq(f).unwrap());
                for g in &all {
                    let wfg = f.weak_leq(g).unwrap();
                    let sfg = f.strong_leq(g).unwrap();
                    if wfg {
                        assert!(sfg, "weak must imply strong: n={n} f={f} g={g}");
                    }
                    if wfg && g.weak_leq(f).unwrap() {
                        assert_eq!(f.mask(), g.mask());
                    }
                    if sfg && g.strong_leq(f).unwrap() {
                        assert_eq!(f.mask(), g.mask());
                    }
                    for h in &all {
                        if wfg && g.weak_leq(h).unwrap() {
                            assert!(f.weak_leq(h).unwrap());
                        }
                        if sfg && g.strong_leq(h).unwrap() {
                            assert!(f.strong_leq(h).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn evaluation_weight_and_product_homomorphism() {
        for n in 1..=4 {
            for fm in 0..1u32 << n {
                let f = Monomial::new(n, fm).unwrap();
                assert_eq!(f.evaluate().weight(), 1 << (n - f.degree()));
                for gm in 0..1u32 << n {
                    let g = Monomial::new(n, gm).unwrap();
                    let prod = f.product(&g).unwrap().evaluate();
                    let ef = f.evaluate();
                    let eg = g.evaluate();
                    for u in 0..1usize << n {
                        assert_eq!(prod.get(u), ef.get(u) && eg.get(u));
                    }
                }
            }
        }
    }

    #[test]
    fn closure_examples() {
        let s = MonomialSet::from_masks(3, &[0b011]).unwrap();
        let c = s.decreasing_closure();
        assert_eq!(c.to_masks(), vec![0b000, 0b001, 0b010, 0b011]);
        assert!(c.is_decreasing());
        assert!(!s.is_decreasing());
    }

    /// Definitional closure: all monomials below some member.
    fn closure_definition(s: &MonomialSet) -> MonomialSet {
        let n = s.n();
        let members: Vec<u32> = s.to_masks();
        let masks: Vec<u32> = (0..1u32 << n)
            .filter(|&f| members.iter().any(|&g| strong_leq_masks(f, g)))
            .collect();
        MonomialSet::from_masks(n, &masks).unwrap()
    }

    #[test]
    fn closure_matches_definition_on_random_sets() {
        use rand::prelude::*;
        let mut rng = StdRng::seed_from_u64(3);
        for n in 1..=6 {
            for _ in 0..40 {
                let masks: Vec<u32> =
                    (0..rng.gen_range(0..8)).map(|_| rng.gen_range(0..1u32 << n)).collect();
                let s = MonomialSet::from_masks(n, &masks).unwrap();
                let c = s.decreasing_closure();
                assert_eq!(c.to_masks(), closure_definition(&s).to_masks());
                assert!(c.is_decreasing());
            }
        }
    }

    #[test]
    fn dual_set_examples() {
        let i = MonomialSet::from_masks(2, &[0b00, 0b01, 0b10]).unwrap();
        assert_eq!(i.dual_set().to_masks(), vec![0b00]);
        // Involution and size on decreasing sets.
        assert_eq!(i.dual_set().dual_set().to_masks(), i.to_masks());
        assert_eq!(i.dual_set().len(), (1 << 2) - i.len());
    }

    #[test]
    fn maximal_elements_examples() {
        let s = MonomialSet::from_masks(3, &[0b000, 0b001, 0b010]).unwrap();
        let max = s.maximal_elements();
        assert_eq!(max, vec![m(3, &[1])]);

        // Degree-bounded sets have a single maximum: the top monomial.
        let deg_le_2: Vec<u32> = (0..1u32 << 4).filter(|m| m.count_ones() <= 2).collect();
        let s = MonomialSet::from_masks(4, &deg_le_2).unwrap();
        assert!(s.is_decreasing());
        assert_eq!(s.maximal_elements(), vec![m(4, &[2, 3])]);
    }

    #[test]
    fn maximal_elements_agree_with_pairwise_scan_on_decreasing_sets() {
        use rand::prelude::*;
        let mut rng = StdRng::seed_from_u64(9);
        for n in 2..=6 {
            for _ in 0..30 {
                let seeds: Vec<u32> =
                    (0..rng.gen_range(1..5)).map(|_| rng.gen_range(0..1u32 << n)).collect();
                let s = MonomialSet::from_masks(n, &seeds).unwrap().decreasing_closure();
                let fast: Vec<u32> = s.maximal_elements().iter().map(|m| m.mask()).collect();
                let members: Vec<u32> = s.to_masks();
                let slow: Vec<u32> = members
                    .iter()
                    .filter(|&&f| {
                        members.iter().all(|&g| g == f || !strong_leq_masks(f, g))
                    })
                    .copied()
                    .collect();
                assert_eq!(fast, slow, "n={n} set={:?}", s);
            }
        }
    }

    #[test]
    fn weak_maximal_elements_examples_and_pairwise_agreement() {
        use rand::prelude::*;
        // All three variables are inclusion-maximal in the degree <= 1 set,
        // even though only x2 is maximal in the strong order.
        let s = MonomialSet::from_masks(3, &[0b000, 0b001, 0b010, 0b100]).unwrap();
        let weak: Vec<u32> = s.weak_maximal_elements().iter().map(|m| m.mask()).collect();
        assert_eq!(weak, vec![0b001, 0b010, 0b100]);
        let strong: Vec<u32> = s.maximal_elements().iter().map(|m| m.mask()).collect();
        assert_eq!(strong, vec![0b100]);

        let mut rng = StdRng::seed_from_u64(10);
        for n in 2..=6 {
            for _ in 0..30 {
                let seeds: Vec<u32> =
                    (0..rng.gen_range(1..5)).map(|_| rng.gen_range(0..1u32 << n)).collect();
                let s = MonomialSet::from_masks(n, &seeds).unwrap().decreasing_closure();
                let fast: Vec<u32> =
                    s.weak_maximal_elements().iter().map(|m| m.mask()).collect();
                let members: Vec<u32> = s.to_masks();
                let slow: Vec<u32> = members
                    .iter()
                    .filter(|&&f| members.iter().all(|&g| g == f || g & f != f))
                    .copied()
                    .collect();
                assert_eq!(fast, slow, "n={n} set={:?}", s);
            }
        }
    }

    #[test]
    fn json_round_trip_is_sorted() {
        let s = MonomialSet::from_masks(3, &[0b101, 0b001, 0b100]).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"n":3,"masks":[1,4,5]}"#);
        let back: MonomialSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
