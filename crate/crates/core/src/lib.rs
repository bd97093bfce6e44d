//! Coadjoint orbits, polynomial invariants and quadratic overgroups of
//! low-dimensional real Lie algebras, with sampled convex-hull experiments.

pub mod catalog;
pub mod coadjoint;
pub mod convexity;
pub mod error;
pub mod invariants;
pub mod lie;
pub mod linalg;
pub mod overgroup;
pub mod polynomial;
pub mod scalar;
pub mod seed;

pub use error::{Error, Result};
pub use lie::{LieAlgebra, ModuleAction, Subspace};
pub use scalar::{Rational, Regime, Scalar};
