//! Small named systems used in tests, examples and the CLI.

use crate::scalar::Scalar;
use crate::zd::rotation::GroupRotationSystem;
use crate::zd::system::FiniteZdSystem;

/// `Z_n` with uniform weights and generators `x ↦ x + steps[i]`.
pub fn cyclic<S: Scalar>(n: u64, steps: &[i64]) -> FiniteZdSystem<S> {
    GroupRotationSystem::new(vec![n], steps.iter().map(|&s| vec![s]).collect())
        .expect("valid cyclic rotation")
        .to_system()
}

/// `Z_n²` with two translations; point `(t1, t2)` has index `n·t1 + t2`.
pub fn torus2<S: Scalar>(n: u64, a: [i64; 2], b: [i64; 2]) -> FiniteZdSystem<S> {
    GroupRotationSystem::new(vec![n, n], vec![a.to_vec(), b.to_vec()])
        .expect("valid torus rotation")
        .to_system()
}

/// `Z_n²` with the three translations `+(1,0)`, `+(0,1)`, `+(1,1)`.
pub fn three_directions(n: u64) -> GroupRotationSystem {
    GroupRotationSystem::new(vec![n, n], vec![vec![1, 0], vec![0, 1], vec![1, 1]]).expect("valid torus rotation")
}
