use crate::error::{Error, Result};
use crate::measure::partition::Partition;
use crate::measure::space::{zeros, ExactProbabilitySpace};
use crate::scalar::Scalar;

/// A real function on a finite space, one value per point.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleFunction<S> {
    values: Vec<S>,
}

impl<S: Scalar> SimpleFunction<S> {
    pub fn new(values: Vec<S>) -> Self {
        Self { values }
    }

    pub fn constant(n: usize, c: S) -> Self {
        Self { values: vec![c; n] }
    }

    pub fn indicator(set: &[bool]) -> Self {
        Self {
            values: set.iter().map(|&b| if b { S::one() } else { S::zero() }).collect(),
        }
    }

    pub fn indicator_of(n: usize, indices: &[usize]) -> Self {
        let mut set = vec![false; n];
        for &i in indices {
            set[i] = true;
        }
        Self::indicator(&set)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &S {
        &self.values[i]
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }

    pub fn integral(&self, space: &ExactProbabilitySpace<S>) -> Result<S> {
        check_len(space.len(), self.len())?;
        Ok(self
            .values
            .iter()
            .zip(space.weights())
            .map(|(f, w)| f.clone() * w.clone())
            .sum())
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len());
        Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a.clone() * b.clone()).collect(),
        }
    }

    /// `f ∘ perm`, i.e. `x ↦ f(perm[x])`.
    pub fn compose(&self, perm: &[usize]) -> Self {
        Self {
            values: perm.iter().map(|&y| self.values[y].clone()).collect(),
        }
    }

    pub fn near(&self, other: &Self) -> bool {
        self.len() == other.len() && self.values.iter().zip(&other.values).all(|(a, b)| a.near(b))
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            what: "function length vs point count",
            expected,
            found,
        });
    }
    Ok(())
}

/// `E_μ(f | P)`: on each block of positive measure, the μ-weighted average of
/// `f` over the block; blocks of measure zero get the value 0.
pub fn conditional_expectation<S: Scalar>(
    f: &SimpleFunction<S>,
    partition: &Partition,
    space: &ExactProbabilitySpace<S>,
) -> Result<SimpleFunction<S>> {
    check_len(space.len(), f.len())?;
    check_len(space.len(), partition.len())?;
    let mut mass: Vec<S> = zeros(partition.num_blocks());
    let mut weighted: Vec<S> = zeros(partition.num_blocks());
    for i in 0..space.len() {
        let b = partition.block_of(i);
        mass[b] = mass[b].clone() + space.weight(i).clone();
        weighted[b] = weighted[b].clone() + space.weight(i).clone() * f.value(i).clone();
    }
    let block_value: Vec<S> = mass
        .iter()
        .zip(&weighted)
        .map(|(m, w)| if m.is_null() { S::zero() } else { w.clone() / m.clone() })
        .collect();
    Ok(SimpleFunction::new(
        partition.labels().iter().map(|&b| block_value[b].clone()).collect(),
    ))
}
