//! Exact factorization of birational monomial maps between regular local
//! rings, in the rank-one rationally independent case.
//!
//! The state object is a triple `(A, v, w)`: a nonnegative unimodular integer
//! matrix `A`, positive rationally independent valuation values `v`, and
//! `w = A^{-1} v` positive. The factorizer reduces `A` to the identity by a
//! two-phase script of permissible column additions and row interchanges
//! followed by permissible row subtractions; the geometry layer turns such a
//! script into the two towers of blowups meeting at a common ring.
//!
//! Core arithmetic is generic over the scalar type through the
//! [`scalar::Valuation`] trait. Two implementations ship: exact combinations
//! of square roots of squarefree integers, and rationals with a declared
//! comparison tolerance. Floating-point scalars are deliberately absent: the
//! algorithms require a decidable exact sign for every comparison they make.

pub mod error;
pub mod factorizer;
pub mod geometry;
pub mod matrix;
pub mod scalar;
pub mod testkit;
pub mod triple;

pub use error::{Error, Result};
pub use scalar::{DecimalScalar, RadicalScalar, Sign, Valuation};
pub use triple::{ElementaryOp, OpScript, Phase2Kind, Triple};

/// Triple over exact radical scalars: the primary mode.
pub type RadicalTriple = Triple<RadicalScalar>;

/// Triple over tolerance-checked decimal scalars: the secondary mode.
pub type DecimalTriple = Triple<DecimalScalar>;
