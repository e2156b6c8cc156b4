//! Exact finite models of multiple recurrence.
//!
//! Everything is generic over [`Scalar`]; the aliases at the crate root fix
//! the scalar to [`Rational`], which is what all verification paths use.

pub mod dhj;
pub mod error;
pub mod fberg;
pub mod json;
pub mod measure;
pub mod perm;
pub mod removal;
pub mod scalar;
pub mod zd;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};

pub type Space = measure::ExactProbabilitySpace<Rational>;
pub type RationalCoupling = measure::Coupling<Rational>;
pub type RationalFunction = measure::SimpleFunction<Rational>;
pub type RationalSystem = zd::FiniteZdSystem<Rational>;
