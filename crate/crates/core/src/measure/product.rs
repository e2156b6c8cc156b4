use crate::error::{Error, Result};
use crate::measure::coupling::Coupling;
use crate::measure::partition::Partition;
use crate::measure::space::ExactProbabilitySpace;
use crate::scalar::Scalar;

/// Relatively independent product of `spaces` over a common quotient.
///
/// `maps[i][x]` is the base point of `x ∈ X_i`. Every map must push its
/// weights to the same base measure ν. The mass of `(x_1, …, x_k)` is
/// `Σ_y ν(y) ∏ μ_{i,y}(x_i)` with `μ_{i,y} = μ_i(· ∩ π_i^{-1}(y)) / ν(y)`;
/// fibres of zero base mass contribute nothing.
pub fn relatively_independent_product<S: Scalar>(
    spaces: &[ExactProbabilitySpace<S>],
    maps: &[Vec<usize>],
) -> Result<Coupling<S>> {
    if spaces.is_empty() || spaces.len() != maps.len() {
        return Err(Error::DimensionMismatch {
            what: "spaces vs maps",
            expected: spaces.len(),
            found: maps.len(),
        });
    }
    for (sp, m) in spaces.iter().zip(maps) {
        if sp.len() != m.len() {
            return Err(Error::DimensionMismatch {
                what: "map length vs space size",
                expected: sp.len(),
                found: m.len(),
            });
        }
    }
    let base_len = maps.iter().flat_map(|m| m.iter().copied()).max().map_or(0, |m| m + 1);
    let nu = spaces[0].pushforward(&maps[0], base_len);
    for (i, (sp, m)) in spaces.iter().zip(maps).enumerate().skip(1) {
        let other = sp.pushforward(m, base_len);
        if let Some(y) = (0..base_len).find(|&y| !other[y].near(&nu[y])) {
            return Err(Error::InconsistentPushforward(format!(
                "space {i} gives base point {y} mass {} but space 0 gives {}",
                other[y], nu[y]
            )));
        }
    }

    let k = spaces.len();
    let mut masses: Vec<(Vec<usize>, S)> = Vec::new();
    for (y, ny) in nu.iter().enumerate() {
        if ny.is_null() {
            continue;
        }
        let fibres: Vec<Vec<usize>> = spaces
            .iter()
            .zip(maps)
            .map(|(sp, m)| (0..sp.len()).filter(|&x| m[x] == y && sp.in_support(x)).collect())
            .collect();
        let mut partial: Vec<(Vec<usize>, S)> = vec![(Vec::with_capacity(k), ny.clone())];
        for (i, fibre) in fibres.iter().enumerate() {
            let mut next = Vec::with_capacity(partial.len() * fibre.len());
            for (t, m) in &partial {
                for &x in fibre {
                    let mut t2 = t.clone();
                    t2.push(x);
                    next.push((t2, m.clone() * spaces[i].weight(x).clone() / ny.clone()));
                }
            }
            partial = next;
        }
        masses.extend(partial);
    }
    Coupling::new(spaces.to_vec(), masses)
}

/// Whether `p` and `q` agree after restricting both to the support of `space`.
pub fn ae_equal<S: Scalar>(p: &Partition, q: &Partition, space: &ExactProbabilitySpace<S>) -> bool {
    if p.len() != q.len() || p.len() != space.len() {
        return false;
    }
    let keep = |i: usize| space.in_support(i);
    p.refines_on(q, keep) && q.refines_on(p, keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::independence::relative_independence;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        <Rational as Scalar>::ratio(n, d)
    }

    #[test]
    fn trivial_base_gives_product() {
        let a = ExactProbabilitySpace::with_weights(vec![q(1, 3), q(2, 3)]).unwrap();
        let b = ExactProbabilitySpace::<Rational>::uniform(3);
        let c = relatively_independent_product(&[a.clone(), b.clone()], &[vec![0; 2], vec![0; 3]]).unwrap();
        assert_eq!(c, Coupling::product(&[a, b]));
    }

    #[test]
    fn identity_maps_give_diagonal() {
        let a = ExactProbabilitySpace::with_weights(vec![q(1, 4), q(3, 4)]).unwrap();
        let c = relatively_independent_product(&[a.clone(), a.clone()], &[vec![0, 1], vec![0, 1]]).unwrap();
        assert_eq!(c, Coupling::diagonal(&a, 2));
    }

    #[test]
    fn parity_fibre_product_on_z4() {
        let z4 = ExactProbabilitySpace::<Rational>::uniform(4);
        let parity = vec![0, 1, 0, 1];
        let c = relatively_independent_product(&[z4.clone(), z4.clone()], &[parity.clone(), parity.clone()]).unwrap();
        assert_eq!(c.num_atoms(), 8);
        for (t, m) in c.mass() {
            assert_eq!(t[0] % 2, t[1] % 2);
            assert_eq!(*m, q(1, 8));
        }
        // coordinates are relatively independent over the common parity factor
        let base = Partition::from_labels(&parity);
        let f = [c.pullback(0, &Partition::singletons(4)), c.pullback(1, &Partition::singletons(4))];
        let h = [c.pullback(0, &base), c.pullback(1, &base)];
        assert!(relative_independence(&f, &h, &c).unwrap().holds);
    }

    #[test]
    fn inconsistent_pushforwards_rejected() {
        let a = ExactProbabilitySpace::with_weights(vec![q(1, 4), q(3, 4)]).unwrap();
        let b = ExactProbabilitySpace::<Rational>::uniform(2);
        let r = relatively_independent_product(&[a, b], &[vec![0, 1], vec![0, 1]]);
        assert!(matches!(r, Err(Error::InconsistentPushforward(_))));
    }

    #[test]
    fn ae_equality() {
        let s = ExactProbabilitySpace::with_weights(vec![q(1, 2), q(1, 2), q(0, 1)]).unwrap();
        let p = Partition::from_labels(&[0, 1, 1]);
        let r = Partition::from_labels(&[0, 1, 2]);
        assert!(ae_equal(&p, &p, &s));
        assert!(ae_equal(&p, &r, &s));
        assert!(!ae_equal(&Partition::singletons(3), &Partition::trivial(3), &s));
    }
}
