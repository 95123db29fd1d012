//! Exact symbolic engine for algebra factorisations X(B,A) and their formal
//! deformations.
//!
//! A factorisation is a unital algebra X with subalgebras B and A such that
//! multiplication B (x) A -> X is a linear isomorphism; its structure is
//! carried by the two products and a twisting map Psi: A (x) B -> B (x) A.
//! This crate constructs twisting maps from generator rules, evaluates the
//! double cochain complex attached to a factorisation, verifies deformations
//! order by order in the formal parameter t, computes the obstruction
//! 3-cocycles and removes them by exact linear solves, and computes cohomology
//! dimensions by fraction-free elimination. All arithmetic is exact.

pub mod error;
pub mod jsonio;
pub mod cohomology;
pub mod complex;
pub mod corpus;
pub mod deformation;
pub mod twist;
pub mod algebra;
pub mod scalar;

pub use error::{Error, Result};
