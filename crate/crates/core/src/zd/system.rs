use crate::error::{Error, Result};
use crate::measure::{ExactProbabilitySpace, Partition};
use crate::perm::{orbit_labels, Permutation};
use crate::scalar::Scalar;

/// A finitely generated subgroup of ℤᴰ, given by generating vectors.
/// The empty list is the trivial subgroup.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SubgroupSpec {
    vectors: Vec<Vec<i64>>,
}

impl SubgroupSpec {
    pub fn new(vectors: Vec<Vec<i64>>) -> Self {
        Self { vectors }
    }

    pub fn trivial() -> Self {
        Self::default()
    }

    /// `ℤ e_i` inside ℤᴰ.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        Self::new(vec![unit(dim, i)])
    }

    /// Subgroup generated by `{e_i - e_j : i, j ∈ e}`.
    pub fn differences(dim: usize, e: &[usize]) -> Self {
        let vectors = e
            .iter()
            .skip(1)
            .map(|&j| {
                let mut v = unit(dim, e[0]);
                v[j] -= 1;
                v
            })
            .collect();
        Self::new(vectors)
    }

    pub fn vectors(&self) -> &[Vec<i64>] {
        &self.vectors
    }

    /// `self + other`.
    pub fn sum(&self, other: &SubgroupSpec) -> SubgroupSpec {
        let mut vectors = self.vectors.clone();
        vectors.extend(other.vectors.iter().cloned());
        Self::new(vectors)
    }

    pub fn sum_all<'a>(specs: impl IntoIterator<Item = &'a SubgroupSpec>) -> SubgroupSpec {
        specs.into_iter().fold(Self::trivial(), |acc, s| acc.sum(s))
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match self.vectors.iter().find(|v| v.len() != dim) {
            Some(v) => Err(Error::DimensionMismatch {
                what: "subgroup generator length",
                expected: dim,
                found: v.len(),
            }),
            None => Ok(()),
        }
    }
}

pub(crate) fn unit(dim: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; dim];
    v[i] = 1;
    v
}

/// A finite probability space with `D` commuting weight-preserving permutations.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteZdSystem<S> {
    space: ExactProbabilitySpace<S>,
    generators: Vec<Permutation>,
}

impl<S: Scalar> FiniteZdSystem<S> {
    pub fn new(space: ExactProbabilitySpace<S>, generators: Vec<Permutation>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidSystem("a system needs at least one generator".into()));
        }
        for (i, g) in generators.iter().enumerate() {
            if g.len() != space.len() {
                return Err(Error::DimensionMismatch {
                    what: "generator length vs point count",
                    expected: space.len(),
                    found: g.len(),
                });
            }
            if let Some(x) = (0..g.len()).find(|&x| !space.weight(g.apply(x)).near(space.weight(x))) {
                return Err(Error::InvalidSystem(format!(
                    "generator {i} moves point {x} to {} with a different weight",
                    g.apply(x)
                )));
            }
        }
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                if !generators[i].commutes_with(&generators[j]) {
                    return Err(Error::NonCommuting(i, j));
                }
            }
        }
        Ok(Self { space, generators })
    }

    /// Builds a system from raw image tables.
    pub fn from_images(space: ExactProbabilitySpace<S>, images: Vec<Vec<usize>>) -> Result<Self> {
        let gens = images
            .into_iter()
            .enumerate()
            .map(|(i, im)| {
                Permutation::from_images(im)
                    .ok_or_else(|| Error::InvalidSystem(format!("generator {i} is not a permutation")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, gens)
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn space(&self) -> &ExactProbabilitySpace<S> {
        &self.space
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &Permutation {
        &self.generators[i]
    }

    /// `T^n = ∏ T_i^{n_i}`.
    ///
    /// # Panics
    /// If `n.len() != self.dim()`.
    pub fn act(&self, n: &[i64]) -> Permutation {
        assert_eq!(n.len(), self.dim(), "action vector length");
        self.generators
            .iter()
            .zip(n)
            .fold(Permutation::identity(self.len()), |acc, (g, &e)| acc.compose(&g.pow(e)))
    }

    /// Σ^{T↾Λ}: orbits of `⟨T^v : v ∈ Λ⟩` on the support, null points as singletons.
    ///
    /// # Panics
    /// If a generating vector of `lambda` has the wrong length.
    pub fn invariant_factor(&self, lambda: &SubgroupSpec) -> Partition {
        let perms: Vec<Permutation> = lambda.vectors().iter().map(|v| self.act(v)).collect();
        let labels = orbit_labels(self.len(), &perms, |x| self.space.in_support(x));
        Partition::from_labels(&labels)
    }

    /// The maximal factor in the class of Λ-trivial systems; equal to
    /// [`Self::invariant_factor`].
    pub fn maximal_partially_trivial_factor(&self, lambda: &SubgroupSpec) -> Partition {
        self.invariant_factor(lambda)
    }

    /// Whether every `T^v`, `v ∈ Λ`, fixes the support pointwise.
    pub fn is_trivial_on(&self, lambda: &SubgroupSpec) -> bool {
        lambda.vectors().iter().all(|v| {
            let p = self.act(v);
            self.space.support().into_iter().all(|x| p.apply(x) == x)
        })
    }

    /// Whether each block of `p`, restricted to the support, is carried into a
    /// single block by every generator.
    pub fn is_invariant_partition(&self, p: &Partition) -> bool {
        self.generators.iter().all(|g| {
            (0..self.len())
                .filter(|&x| self.space.in_support(x))
                .all(|x| {
                    let b = p.block_of(x);
                    let target = p.block_of(g.apply(p.blocks()[b].iter().copied().find(|&y| self.space.in_support(y)).unwrap()));
                    p.block_of(g.apply(x)) == target
                })
        })
    }

    /// The quotient system on the blocks of an invariant partition together
    /// with the quotient map.
    pub fn quotient(&self, p: &Partition) -> Result<(FiniteZdSystem<S>, Vec<usize>)> {
        if p.len() != self.len() {
            return Err(Error::DimensionMismatch {
                what: "partition size vs point count",
                expected: self.len(),
                found: p.len(),
            });
        }
        let nb = p.num_blocks();
        let mut gens = Vec::with_capacity(self.dim());
        for (i, g) in self.generators.iter().enumerate() {
            let mut images = vec![usize::MAX; nb];
            for (b, block) in p.blocks().iter().enumerate() {
                let rep = block.iter().copied().find(|&x| self.space.in_support(x)).unwrap_or(block[0]);
                images[b] = p.block_of(g.apply(rep));
                let consistent = block
                    .iter()
                    .filter(|&&x| self.space.in_support(x))
                    .all(|&x| p.block_of(g.apply(x)) == images[b]);
                if !consistent {
                    return Err(Error::InvalidFactorMap(format!(
                        "partition block {b} is split by generator {i}"
                    )));
                }
            }
            gens.push(Permutation::from_images(images).ok_or_else(|| {
                Error::InvalidFactorMap(format!("generator {i} does not permute the blocks"))
            })?);
        }
        let labels = p
            .blocks()
            .iter()
            .map(|b| {
                let names: Vec<&str> = b.iter().map(|&x| self.space.points()[x].as_str()).collect();
                format!("[{}]", names.join(","))
            })
            .collect();
        let space = ExactProbabilitySpace::new(labels, self.space.block_masses(p))?;
        Ok((FiniteZdSystem::new(space, gens)?, p.labels().to_vec()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use crate::zd::catalog;
    use proptest::prelude::*;

    #[test]
    fn act_examples() {
        let z4 = catalog::cyclic::<Rational>(4, &[1]);
        assert!(z4.act(&[0]).is_identity());
        assert_eq!(z4.act(&[3]), Permutation::rotation(4, 3));
        let z5 = catalog::cyclic::<Rational>(5, &[1, 2]);
        assert_eq!(z5.act(&[1, 1]), Permutation::rotation(5, 3));
    }

    #[test]
    fn rejects_bad_generators() {
        let sp = ExactProbabilitySpace::<Rational>::uniform(3);
        let r = FiniteZdSystem::from_images(sp.clone(), vec![vec![1, 2, 0], vec![0, 2, 1]]);
        assert!(matches!(r, Err(Error::NonCommuting(0, 1))));
        let w = ExactProbabilitySpace::with_weights(vec![
            <Rational as Scalar>::ratio(1, 2),
            <Rational as Scalar>::ratio(1, 4),
            <Rational as Scalar>::ratio(1, 4),
        ])
        .unwrap();
        let r = FiniteZdSystem::from_images(w, vec![vec![1, 0, 2]]);
        assert!(matches!(r, Err(Error::InvalidSystem(_))));
        assert!(FiniteZdSystem::from_images(sp, vec![vec![0, 0, 1]]).is_err());
    }

    #[test]
    fn invariant_factor_examples() {
        let t = catalog::torus2::<Rational>(5, [1, 0], [0, 1]);
        assert_eq!(t.invariant_factor(&SubgroupSpec::trivial()), Partition::singletons(25));
        let p = t.invariant_factor(&SubgroupSpec::coordinate(2, 0));
        assert_eq!(p.num_blocks(), 5);
        // point (t1, t2) has index 5*t1 + t2
        for x in 0..25 {
            assert_eq!(p.block_of(x), p.block_of(x % 5));
        }
        // with T^{e2} = +(0,-1) the difference action e1 - e2 is +(1,1)
        let t = catalog::torus2::<Rational>(5, [1, 0], [0, 4]);
        let p = t.invariant_factor(&SubgroupSpec::differences(2, &[0, 1]));
        assert_eq!(p.num_blocks(), 5);
        for x in 0..25 {
            let (a, b) = (x / 5, x % 5);
            let (a2, b2) = ((a + 1) % 5, (b + 1) % 5);
            assert_eq!(p.block_of(x), p.block_of(5 * a2 + b2));
        }
        // with T^{e2} = +(0,1) the orbits are the level sets of t1 + t2
        let t = catalog::torus2::<Rational>(5, [1, 0], [0, 1]);
        let p = t.invariant_factor(&SubgroupSpec::differences(2, &[0, 1]));
        for x in 0..25 {
            for y in 0..25 {
                let same = (x / 5 + x % 5) % 5 == (y / 5 + y % 5) % 5;
                assert_eq!(p.block_of(x) == p.block_of(y), same);
            }
        }
    }

    #[test]
    fn maximal_factor_alias() {
        let id = catalog::cyclic::<Rational>(3, &[0]);
        let l = SubgroupSpec::coordinate(1, 0);
        assert_eq!(id.maximal_partially_trivial_factor(&l), Partition::singletons(3));
        let z2 = catalog::cyclic::<Rational>(2, &[1]);
        assert_eq!(z2.maximal_partially_trivial_factor(&l), Partition::trivial(2));
    }

    #[test]
    fn null_points_are_singletons() {
        let w = vec![
            <Rational as Scalar>::ratio(1, 2),
            <Rational as Scalar>::ratio(1, 2),
            <Rational as Scalar>::ratio(0, 1),
            <Rational as Scalar>::ratio(0, 1),
        ];
        let sys = FiniteZdSystem::from_images(ExactProbabilitySpace::with_weights(w).unwrap(), vec![vec![1, 0, 3, 2]]).unwrap();
        let p = sys.invariant_factor(&SubgroupSpec::coordinate(1, 0));
        assert_eq!(p.num_blocks(), 3);
        assert_ne!(p.block_of(2), p.block_of(3));
    }

    #[test]
    fn quotient_by_orbits() {
        let t = catalog::torus2::<Rational>(3, [1, 0], [0, 1]);
        let p = t.invariant_factor(&SubgroupSpec::coordinate(2, 0));
        let (q, map) = t.quotient(&p).unwrap();
        assert_eq!(q.len(), 3);
        assert!(q.is_trivial_on(&SubgroupSpec::coordinate(2, 0)));
        assert!(!q.is_trivial_on(&SubgroupSpec::coordinate(2, 1)));
        assert_eq!(map.len(), 9);
        assert!(t.quotient(&Partition::from_labels(&[0, 0, 1, 1, 1, 1, 1, 1, 1])).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(120))]
        #[test]
        fn act_is_a_homomorphism(seed in any::<u64>(), m in prop::collection::vec(-7i64..8, 3), n in prop::collection::vec(-7i64..8, 3)) {
            let sys = crate::zd::random::random_system::<Rational>(seed, 10, 3);
            let sum: Vec<i64> = m.iter().zip(&n).map(|(a, b)| a + b).collect();
            prop_assert_eq!(sys.act(&sum), sys.act(&m).compose(&sys.act(&n)));
        }

        #[test]
        fn invariant_factor_is_finest_invariant(seed in any::<u64>(), v in prop::collection::vec(-3i64..4, 2)) {
            let sys = crate::zd::random::random_system::<Rational>(seed, 12, 2);
            let lambda = SubgroupSpec::new(vec![v.clone()]);
            let p = sys.invariant_factor(&lambda);
            let t = sys.act(&v);
            let supp = |x: usize| sys.space().in_support(x);
            // invariant: T^v maps each block into itself on the support
            for x in (0..sys.len()).filter(|&x| supp(x)) {
                prop_assert_eq!(p.block_of(t.apply(x)), p.block_of(x));
            }
            // no block can be split: each support block is a single orbit
            for b in p.blocks() {
                let s: Vec<usize> = b.iter().copied().filter(|&x| supp(x)).collect();
                if let Some(&x0) = s.first() {
                    let mut orbit = vec![x0];
                    let mut y = t.apply(x0);
                    while y != x0 {
                        orbit.push(y);
                        y = t.apply(y);
                    }
                    orbit.sort_unstable();
                    prop_assert_eq!(orbit, s);
                }
            }
        }

        #[test]
        fn partially_trivial_sum_identity(seed in any::<u64>()) {
            // for a Γ2-trivial system the Γ1 and Γ1+Γ2 invariant factors agree
            let y = crate::zd::random::random_system::<Rational>(seed, 12, 2);
            let g1 = SubgroupSpec::coordinate(2, 0);
            let g2 = SubgroupSpec::coordinate(2, 1);
            let (x, _) = y.quotient(&y.invariant_factor(&g2)).unwrap();
            prop_assert!(x.is_trivial_on(&g2));
            prop_assert_eq!(x.invariant_factor(&g1), x.invariant_factor(&g1.sum(&g2)));
        }
    }
}
