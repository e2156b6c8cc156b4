//! Finite probability spaces, partitions standing in for σ-algebras,
//! conditional expectation, couplings and relative independence.

mod coupling;
mod function;
mod independence;
mod partition;
mod product;
mod space;

pub use coupling::Coupling;
pub use function::{conditional_expectation, SimpleFunction};
pub use independence::{
    relative_independence, relative_independence_weights, IndependenceReport, IndependenceWitness,
};
pub use partition::Partition;
pub use product::{ae_equal, relatively_independent_product};
pub use space::{ExactProbabilitySpace, FiniteMeasure};
