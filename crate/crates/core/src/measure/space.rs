use std::collections::HashSet;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::measure::partition::Partition;
use crate::scalar::{total, Scalar};

/// A finite probability space: labelled points with nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactProbabilitySpace<S> {
    points: Vec<String>,
    weights: Vec<S>,
}

impl<S: Scalar> ExactProbabilitySpace<S> {
    pub fn new(points: Vec<String>, weights: Vec<S>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                what: "point labels vs weights",
                expected: points.len(),
                found: weights.len(),
            });
        }
        let mut seen = HashSet::new();
        for p in &points {
            if !seen.insert(p.as_str()) {
                return Err(Error::InvalidMeasure(format!("duplicate point label {p:?}")));
            }
        }
        if let Some(i) = weights.iter().position(|w| *w < S::zero()) {
            return Err(Error::InvalidMeasure(format!("weight at index {i} is negative")));
        }
        let sum = total(&weights);
        if !sum.near(&S::one()) {
            return Err(Error::InvalidMeasure(format!("weights sum to {sum}, not 1")));
        }
        Ok(Self { points, weights })
    }

    /// Points labelled `"0"`, `"1"`, ... with the given weights.
    pub fn with_weights(weights: Vec<S>) -> Result<Self> {
        let points = (0..weights.len()).map(|i| i.to_string()).collect();
        Self::new(points, weights)
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform space needs at least one point");
        let w = S::one() / S::from_count(n);
        Self::with_weights(vec![w; n]).expect("uniform weights are valid")
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> &S {
        &self.weights[i]
    }

    pub fn in_support(&self, i: usize) -> bool {
        !self.weights[i].is_null()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.in_support(i)).collect()
    }

    /// Measure of a set given as a membership mask.
    pub fn measure(&self, set: &[bool]) -> S {
        self.weights
            .iter()
            .zip(set)
            .filter(|(_, &m)| m)
            .map(|(w, _)| w.clone())
            .sum()
    }

    /// Measure of a set given by indices.
    pub fn measure_of(&self, indices: &[usize]) -> S {
        indices.iter().map(|&i| self.weights[i].clone()).sum()
    }

    /// Pushforward of the weights through `map` into `0..target_len`.
    pub fn pushforward(&self, map: &[usize], target_len: usize) -> Vec<S> {
        let mut out = vec![S::zero(); target_len];
        for (i, &y) in map.iter().enumerate() {
            out[y] = out[y].clone() + self.weights[i].clone();
        }
        out
    }

    /// Block masses of a partition of this space.
    pub fn block_masses(&self, p: &Partition) -> Vec<S> {
        self.pushforward(p.labels(), p.num_blocks())
    }

    pub fn weights_equal(&self, other: &[S]) -> bool {
        self.weights.len() == other.len() && self.weights.iter().zip(other).all(|(a, b)| a.near(b))
    }
}

/// Anything that carries a finite list of atom weights: a probability space
/// (atoms = points) or a coupling (atoms = support tuples).
pub trait FiniteMeasure<S> {
    fn atom_weights(&self) -> Vec<S>;
}

impl<S: Scalar> FiniteMeasure<S> for ExactProbabilitySpace<S> {
    fn atom_weights(&self) -> Vec<S> {
        self.weights.clone()
    }
}

impl<S: Scalar> FiniteMeasure<S> for Vec<S> {
    fn atom_weights(&self) -> Vec<S> {
        self.clone()
    }
}

/// Zero-filled helper used across modules.
pub(crate) fn zeros<S: Zero + Clone>(n: usize) -> Vec<S> {
    vec![S::zero(); n]
}
