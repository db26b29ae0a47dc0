//! Clifford+T synthesis of multi-qubit unitaries.
//!
//! Unitaries with entries in ℤ[i, 1/√2] are synthesized exactly; arbitrary
//! unitaries are approximated to a requested Frobenius distance by rounding
//! each reflection of a structure-preserving Householder decomposition onto
//! the ring. Every circuit can be checked by exact simulation over the ring.

pub mod circuit;
pub mod error;
pub mod linalg;
pub mod multicontrol;
pub mod numtheory;
pub mod reflections;
pub mod ring;
pub mod rounding;
pub mod stateprep;
pub mod synth;

pub use error::{Error, Result};
