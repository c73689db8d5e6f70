//! Exact computations with atomic measures on finite abelian groups:
//! annihilator subgroups and transversals, the Radon–Nikodym tables that
//! classify a measure as regular or singular relative to a subgroup, the
//! Wold-type decomposition into such parts, orthogonality of the coset
//! polynomial subspaces, and the closed-form orthogonal projection onto
//! them with an independent least-squares oracle.
//!
//! All measure weights are exact rationals; the classification
//! predicates are tolerance-free. Floating point enters only through
//! character values and L^α norms.

pub mod classify;
pub mod cli;
pub mod error;
pub mod group;
pub mod lp;
pub mod measure;
pub mod testkit;

pub use error::{Error, Result};
