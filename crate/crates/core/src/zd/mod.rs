//! Finite probability-preserving ℤᴰ-systems, partially invariant factors,
//! group rotations and joining predicates.

pub mod catalog;
mod factor;
mod joining;
pub mod lattice;
pub mod random;
mod rotation;
mod system;

pub use factor::FactorMap;
pub use joining::{joint_distribution_predicate, two_fold_joining_check, JointDistributionReport};
pub use lattice::check_direct_sum;
pub use rotation::GroupRotationSystem;
pub use system::{FiniteZdSystem, SubgroupSpec};
