//! Construction and verification of coefficient-1 permutation polynomials over
//! GF(2^{2m}), fractional permutations of the order-(2^m+1) subgroup, and the
//! algebraic-degree analysis that separates the new families from known ones.
//!
//! Module map:
//!
//! * [`gf2n`]: field contexts and element arithmetic.
//! * [`polyexp`]: canonical sparse polynomials and algebraic degree.
//! * [`subgroup`]: roots of unity, fractional polynomials over them.
//! * [`families`]: builders for every family, condition checks, known catalog.
//! * [`verify`]: brute force, Zieve-form and exponential-sum permutation tests.
//! * [`analysis`]: degree tables and separation verdicts.
//! * [`cli`]: grid scans, report records and the command implementations.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod families;
pub mod gf2n;
pub mod numtheory;
pub mod polyexp;
pub mod subgroup;
pub mod verify;

pub use error::{Error, Result};
pub use gf2n::{make_ctx, FieldCtx, FieldElement};
pub use polyexp::{norm_exp, SparsePoly};
