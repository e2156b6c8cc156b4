use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::measure::partition::Partition;
use crate::measure::space::{ExactProbabilitySpace, FiniteMeasure};
use crate::scalar::{total, Scalar};

/// A measure on a finite product `X_1 × … × X_d` with prescribed marginals.
///
/// Only tuples of positive mass are stored; iteration order over atoms is the
/// lexicographic order of the tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling<S> {
    marginals: Vec<ExactProbabilitySpace<S>>,
    mass: BTreeMap<Vec<usize>, S>,
}

impl<S: Scalar> Coupling<S> {
    /// Accumulates the given weighted tuples and validates the result.
    pub fn new(
        marginals: Vec<ExactProbabilitySpace<S>>,
        masses: impl IntoIterator<Item = (Vec<usize>, S)>,
    ) -> Result<Self> {
        let c = Self::accumulate(marginals, masses)?;
        c.validate()?;
        Ok(c)
    }

    /// Self-coupling of `base` with the given arity.
    pub fn self_coupling(
        base: &ExactProbabilitySpace<S>,
        arity: usize,
        masses: impl IntoIterator<Item = (Vec<usize>, S)>,
    ) -> Result<Self> {
        Self::new(vec![base.clone(); arity], masses)
    }

    pub(crate) fn accumulate(
        marginals: Vec<ExactProbabilitySpace<S>>,
        masses: impl IntoIterator<Item = (Vec<usize>, S)>,
    ) -> Result<Self> {
        if marginals.is_empty() {
            return Err(Error::InvalidMeasure("coupling needs arity at least 1".into()));
        }
        let mut mass: BTreeMap<Vec<usize>, S> = BTreeMap::new();
        for (tuple, m) in masses {
            if tuple.len() != marginals.len() {
                return Err(Error::DimensionMismatch {
                    what: "coupling tuple length",
                    expected: marginals.len(),
                    found: tuple.len(),
                });
            }
            for (c, (&x, sp)) in tuple.iter().zip(&marginals).enumerate() {
                if x >= sp.len() {
                    return Err(Error::InvalidMeasure(format!(
                        "coordinate {c} index {x} out of range ({} points)",
                        sp.len()
                    )));
                }
            }
            let slot = mass.entry(tuple).or_insert_with(S::zero);
            *slot = slot.clone() + m;
        }
        mass.retain(|_, m| !m.is_null());
        Ok(Self { marginals, mass })
    }

    fn validate(&self) -> Result<()> {
        if let Some((t, _)) = self.mass.iter().find(|(_, m)| **m < S::zero()) {
            return Err(Error::InvalidMeasure(format!("negative mass at {t:?}")));
        }
        let sum: S = self.mass.values().cloned().sum();
        if !sum.near(&S::one()) {
            return Err(Error::InvalidMeasure(format!("coupling mass sums to {sum}, not 1")));
        }
        for i in 0..self.arity() {
            if !self.marginals[i].weights_equal(&self.coordinate_pushforward(i)) {
                return Err(Error::InconsistentPushforward(format!(
                    "coordinate {i} pushforward differs from its marginal"
                )));
            }
        }
        Ok(())
    }

    /// `μ^{Δd}`: all mass on constant tuples.
    pub fn diagonal(base: &ExactProbabilitySpace<S>, arity: usize) -> Self {
        let masses = (0..base.len()).map(|x| (vec![x; arity], base.weight(x).clone()));
        Self::self_coupling(base, arity, masses).expect("diagonal coupling is valid")
    }

    /// Independent product of the given spaces.
    pub fn product(spaces: &[ExactProbabilitySpace<S>]) -> Self {
        let mut masses: Vec<(Vec<usize>, S)> = vec![(Vec::new(), S::one())];
        for sp in spaces {
            let mut next = Vec::new();
            for (t, m) in &masses {
                for x in sp.support() {
                    let mut t2 = t.clone();
                    t2.push(x);
                    next.push((t2, m.clone() * sp.weight(x).clone()));
                }
            }
            masses = next;
        }
        Self::new(spaces.to_vec(), masses).expect("product coupling is valid")
    }

    pub fn arity(&self) -> usize {
        self.marginals.len()
    }

    pub fn marginals(&self) -> &[ExactProbabilitySpace<S>] {
        &self.marginals
    }

    pub fn marginal(&self, i: usize) -> &ExactProbabilitySpace<S> {
        &self.marginals[i]
    }

    /// The first marginal; for self-couplings this is the common base space.
    pub fn base(&self) -> &ExactProbabilitySpace<S> {
        &self.marginals[0]
    }

    pub fn mass(&self) -> &BTreeMap<Vec<usize>, S> {
        &self.mass
    }

    pub fn num_atoms(&self) -> usize {
        self.mass.len()
    }

    /// Support tuples in lexicographic order.
    pub fn atoms(&self) -> Vec<Vec<usize>> {
        self.mass.keys().cloned().collect()
    }

    pub fn mass_of(&self, tuple: &[usize]) -> S {
        self.mass.get(tuple).cloned().unwrap_or_else(S::zero)
    }

    pub fn coordinate_pushforward(&self, i: usize) -> Vec<S> {
        let mut out = vec![S::zero(); self.marginals[i].len()];
        for (t, m) in &self.mass {
            out[t[i]] = out[t[i]].clone() + m.clone();
        }
        out
    }

    /// Pushforward onto the listed coordinates (in the given order).
    pub fn project(&self, coords: &[usize]) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Precondition("projection onto no coordinates".into()));
        }
        if let Some(&c) = coords.iter().find(|&&c| c >= self.arity()) {
            return Err(Error::DimensionMismatch {
                what: "projection coordinate",
                expected: self.arity(),
                found: c,
            });
        }
        let marginals = coords.iter().map(|&c| self.marginals[c].clone()).collect();
        let masses = self
            .mass
            .iter()
            .map(|(t, m)| (coords.iter().map(|&c| t[c]).collect(), m.clone()));
        Self::new(marginals, masses)
    }

    /// `λ(A_1 × … × A_d)` for membership masks `A_i`.
    pub fn product_mass(&self, sets: &[Vec<bool>]) -> S {
        assert_eq!(sets.len(), self.arity());
        self.mass
            .iter()
            .filter(|(t, _)| t.iter().zip(sets).all(|(&x, s)| s[x]))
            .map(|(_, m)| m.clone())
            .sum()
    }

    /// Pullback of a partition of coordinate `coord` to a partition of the atoms.
    pub fn pullback(&self, coord: usize, partition: &Partition) -> Partition {
        let map: Vec<usize> = self.mass.keys().map(|t| t[coord]).collect();
        partition.pullback(&map)
    }

    /// Whether coordinates `i` and `j` land in the same block of `partition`
    /// on every atom.
    pub fn coordinates_agree(&self, i: usize, j: usize, partition: &Partition) -> bool {
        self.mass
            .keys()
            .all(|t| partition.block_of(t[i]) == partition.block_of(t[j]))
    }

    /// Pushforward under the product map `(x_i) ↦ (maps[i][x_i])`, returned as a
    /// mass table on the same marginals (the maps must preserve the marginals).
    pub fn pushforward_by(&self, maps: &[&[usize]]) -> BTreeMap<Vec<usize>, S> {
        assert_eq!(maps.len(), self.arity());
        let mut out: BTreeMap<Vec<usize>, S> = BTreeMap::new();
        for (t, m) in &self.mass {
            let image: Vec<usize> = t.iter().zip(maps).map(|(&x, p)| p[x]).collect();
            let slot = out.entry(image).or_insert_with(S::zero);
            *slot = slot.clone() + m.clone();
        }
        out
    }

    /// Whether the mass table equals `other` exactly (up to [`Scalar::near`]).
    pub fn mass_equals(&self, other: &BTreeMap<Vec<usize>, S>) -> bool {
        let a: Vec<_> = self.mass.iter().filter(|(_, m)| !m.is_null()).collect();
        let b: Vec<_> = other.iter().filter(|(_, m)| !m.is_null()).collect();
        a.len() == b.len() && a.iter().zip(&b).all(|((ta, ma), (tb, mb))| ta == tb && ma.near(mb))
    }

    pub fn total_mass(&self) -> S {
        total(&self.mass.values().cloned().collect::<Vec<_>>())
    }
}

impl<S: Scalar> FiniteMeasure<S> for Coupling<S> {
    fn atom_weights(&self) -> Vec<S> {
        self.mass.values().cloned().collect()
    }
}
