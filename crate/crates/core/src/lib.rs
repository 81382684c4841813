//! Polar-code construction of triorthogonal CSS codes for magic-state
//! distillation.
//!
//! A polar code over `n` variables is a decreasing monomial code: its
//! information set is a set of monomials in `x0..x_{n-1}` closed downward
//! under a partial order that channel polarization respects
//! ([`monomial`]). Channel reliabilities — exact density evolution for
//! erasures, Monte Carlo estimates for dephasing — rank the `2^n`
//! synthetic channels ([`channel`]). Taking the most reliable channels,
//! closing the corresponding monomial set downward, and growing the prefix
//! until the dual code spans a triply-even space yields the smallest such
//! polar code; puncturing `k` coordinates then produces an `[[N - k, k]]`
//! triorthogonal CSS code whose magic-state distillation error is governed
//! by the classical decoder ([`triortho`]). Successive-cancellation
//! decoding and the distillation Monte Carlo live in [`polar`] and
//! [`distill`]; GF(2) linear algebra in [`gf2`].
//!
//! The classic 15-qubit Reed–Muller distillation code falls out of the
//! construction at `n = 4` with a flat reliability table:
//!
//! ```
//! use polartri::channel::ReliabilityTable;
//! use polartri::triortho::{build_css, smallest_triply_even_code, VerifyMode};
//!
//! // Uniform reliabilities: the search sees the plain degree order.
//! let table = ReliabilityTable::exact_bec(1.0, 4)?;
//! let report = smallest_triply_even_code(&table)?;
//! assert_eq!(report.code.dimension(), 11);
//! assert_eq!(report.dual_dim, 5);
//!
//! // Puncture one coordinate: a [[15, 1]] triorthogonal code.
//! let css = build_css(&report.code, 1)?;
//! assert_eq!((css.block_len(), css.k()), (15, 1));
//! css.verify(VerifyMode::Exhaustive)?;
//! # Ok::<(), polartri::Error>(())
//! ```

pub mod channel;
pub mod distill;
pub mod error;
pub mod gf2;
mod llr;
pub mod monomial;
pub mod polar;
pub mod triortho;

pub use error::{Error, Result};
