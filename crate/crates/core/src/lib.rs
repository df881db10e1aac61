//! Exact analysis of partial Boolean functions in the quantum 1-query model.
//!
//! A non-constant partial function `f: D -> {0,1}` on `n` bits admits an exact
//! quantum algorithm with a single oracle call precisely when a small linear
//! feasibility system over the differences `x ^ y` (with `f(x) = 0`,
//! `f(y) = 1`) has a nonnegative solution. This crate decides that system in
//! exact rational arithmetic, produces checkable witnesses or Farkas
//! certificates, builds and simulates the corresponding algorithm, and runs
//! exhaustive censuses over small `n`.
//!
//! Module map:
//!
//! - [`pbf`]: partial Boolean functions, parsing, restriction, enumeration.
//! - [`linalg`]: rationals, dense rational matrices, rank, solving, and the
//!   phase-one simplex feasibility kernel.
//! - [`representation`]: polynomial/Fourier basis vectors, `G` matrices,
//!   degree and the number of bits a function depends on.
//! - [`decider`]: the rank filter and the exact 1-query decision.
//! - [`algorithm`]: the witnessing algorithm, its simulation and its
//!   sum-of-squares representation matrix.
//! - [`census`]: exhaustive counting and theorem verification.

pub mod algorithm;
pub mod census;
pub mod decider;
mod error;
pub mod linalg;
pub mod pbf;
pub mod representation;

pub use error::{Error, Result};
pub use linalg::{Rational, RationalMatrix};
pub use pbf::{DifferenceSet, PartialBooleanFunction, Trit};
