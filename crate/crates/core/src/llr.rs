//! Log-likelihood-ratio arithmetic shared by the decoder and the
//! Monte Carlo reliability estimator.
//!
//! LLRs are base-2 throughout: `λ = log₂(W(y|0) / W(y|1))`, so a clean
//! channel observation of a zero bit has `λ = log₂((1−p)/p)`.

/// Saturation magnitude for LLRs in the successive-cancellation recursion.
pub(crate) const LLR_CLAMP: f64 = 4096.0;

#[inline]
pub(crate) fn clamp(l: f64) -> f64 {
    l.clamp(-LLR_CLAMP, LLR_CLAMP)
}

/// Exact check-node combination of two base-2 LLRs,
/// `f(a, b) = log₂((1 + 2^{a+b}) / (2^a + 2^b))`.
///
/// Evaluated in the numerically stable form
/// `sign(a)·sign(b)·min(|a|,|b|) + log₂(1 + 2^{−|a+b|}) − log₂(1 + 2^{−|a−b|})`.
/// The correction terms fall below `f64` resolution once both exponents
/// exceed 64, so that common case short-circuits to the min-sum value.
#[inline]
pub(crate) fn check_node(a: f64, b: f64) -> f64 {
    let lead = a.abs().min(b.abs()).copysign(a * b);
    let sum = (a + b).abs();
    let diff = (a - b).abs();
    if sum > 64.0 && diff > 64.0 {
        return lead;
    }
    lead + log2_1p_exp2(-sum) - log2_1p_exp2(-diff)
}

/// `log₂(1 + 2^x)` for `x ≤ 0`.
#[inline]
fn log2_1p_exp2(x: f64) -> f64 {
    x.exp2().ln_1p() * std::f64::consts::LOG2_E
}

/// Variable-node combination: LLRs of independent looks add.
#[inline]
pub(crate) fn var_node(a: f64, b: f64) -> f64 {
    clamp(a + b)
}
