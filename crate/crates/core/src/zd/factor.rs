use crate::error::{Error, Result};
use crate::measure::Partition;
use crate::scalar::Scalar;
use crate::zd::system::FiniteZdSystem;

/// An equivariant, measure-preserving point map between two systems.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorMap<S> {
    source: FiniteZdSystem<S>,
    target: FiniteZdSystem<S>,
    map: Vec<usize>,
}

impl<S: Scalar> FactorMap<S> {
    pub fn new(source: FiniteZdSystem<S>, target: FiniteZdSystem<S>, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.len() {
            return Err(Error::DimensionMismatch {
                what: "factor map length vs source points",
                expected: source.len(),
                found: map.len(),
            });
        }
        if source.dim() != target.dim() {
            return Err(Error::DimensionMismatch {
                what: "source vs target rank",
                expected: source.dim(),
                found: target.dim(),
            });
        }
        if let Some(x) = map.iter().position(|&y| y >= target.len()) {
            return Err(Error::InvalidFactorMap(format!("point {x} maps outside the target")));
        }
        let pushed = source.space().pushforward(&map, target.len());
        if let Some(y) = (0..target.len()).find(|&y| !pushed[y].near(target.space().weight(y))) {
            return Err(Error::InvalidFactorMap(format!(
                "pushforward gives target point {y} mass {} instead of {}",
                pushed[y],
                target.space().weight(y)
            )));
        }
        for i in 0..source.dim() {
            let (t, s) = (source.generator(i), target.generator(i));
            if let Some(x) = (0..source.len())
                .filter(|&x| source.space().in_support(x))
                .find(|&x| map[t.apply(x)] != s.apply(map[x]))
            {
                return Err(Error::InvalidFactorMap(format!("not equivariant for generator {i} at point {x}")));
            }
        }
        Ok(Self { source, target, map })
    }

    /// Quotient of `sys` by an invariant partition, with its quotient map.
    pub fn quotient(sys: &FiniteZdSystem<S>, p: &Partition) -> Result<Self> {
        let (target, map) = sys.quotient(p)?;
        Self::new(sys.clone(), target, map)
    }

    pub fn source(&self) -> &FiniteZdSystem<S> {
        &self.source
    }

    pub fn target(&self) -> &FiniteZdSystem<S> {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    /// `π⁻¹(P)` for a partition `P` of the target.
    pub fn pullback(&self, p: &Partition) -> Partition {
        p.pullback(&self.map)
    }

    /// The factor `π⁻¹(Σ_target)` as a partition of the source.
    pub fn factor(&self) -> Partition {
        Partition::from_labels(&self.map)
    }
}
