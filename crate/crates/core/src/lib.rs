//! Construction and instance-level analysis of valuation-lifting integer
//! sequences: sequences `(a_n)` where every odd prime `p | a_k` satisfies
//! `v_p(a_{kn}) = v_p(a_k) + v_p(n)`.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function over immutable values; parallelism is injected by the caller
//! through [`exec::Executor`] and factorization memoization through
//! [`arith::FactorCache`].
//!
//! - [`arith`]: valuations, gcd/lcm, bounded factorization, squarefree verdicts
//! - [`seq`]: sequence families and term generation
//! - [`bseq`]: the prefix-lcm quotient sequence and its structure checks
//! - [`analysis`]: ranks, primitive divisors, and the theorem checks
//! - [`conjectures`]: falsification scans
//! - [`verify`]: standalone re-verification of emitted witnesses

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod arith;
pub mod bseq;
pub mod conjectures;
mod error;
pub mod exec;
pub mod report;
pub mod seq;
pub mod serde_dec;
pub mod verify;

pub use error::{Error, Result};
pub use num_bigint::BigUint;

/// Arbitrary-precision nonnegative integer.
pub type Nat = BigUint;
