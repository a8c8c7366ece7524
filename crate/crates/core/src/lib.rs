//! Typability of finite partial groupoids.
//!
//! A *pargoid* is a finite set with a partial binary product, read as a
//! partial applicative algebra. This crate decides whether a pargoid admits
//! an assignment of simple arrow types such that whenever `ab` is defined the
//! type of `a` is `α -> β`, the type of `b` is `α` and `ab` has type `β`, and
//! the elements of each type form one block of a partition of the carrier.
//!
//! The decision runs in stages:
//!
//! 1. [`polyclone`] closes the identity and constant maps under pointwise
//!    product, producing every unary polynomial operation together with a
//!    smallest witness term, and classifies operations as trivial, constant
//!    and definite.
//! 2. [`congruence`] refines the carrier by operation domains into the
//!    Leibniz congruence (elements that no polynomial tells apart).
//! 3. [`typability`] checks that the "is applied to / is a value of"
//!    relation is acyclic (this needs no clone, so it runs first) and that
//!    definite operations never converge on two inequivalent elements. If
//!    both hold it builds a typing, otherwise it returns a checkable
//!    certificate.
//! 4. [`verifier`] re-checks typings against the typed-algebra axioms without
//!    relying on any of the above.

pub mod congruence;
pub mod error;
pub mod generators;
pub mod pargoid;
pub mod polyclone;
pub mod typability;
pub mod types;
pub mod verifier;

pub use congruence::Partition;
pub use error::{Error, ParseError, Result};
pub use generators::{GenConfig, GenMode};
pub use pargoid::{ElementId, Format, Pargoid};
pub use polyclone::{CloneResult, ConstantReading, OpIndex, PolyTerm, UnaryPolyOp};
pub use typability::{Certificate, Decision, Stage};
pub use types::{GroundName, TypeTerm, Typing};
pub use verifier::{VerifyMode, VerifyReport};

/// Default cap on the number of operations in a computed clone.
pub const DEFAULT_BUDGET: usize = 100_000;
