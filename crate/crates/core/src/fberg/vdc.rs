use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A finite sequence `u_1, …, u_len` of vectors of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSequence<S> {
    entries: Vec<Vec<S>>,
}

impl<S: Scalar> VectorSequence<S> {
    pub fn new(entries: Vec<Vec<S>>) -> Result<Self> {
        let Some(first) = entries.first() else {
            return Err(Error::Precondition("vector sequence must be nonempty".into()));
        };
        let dim = first.len();
        if let Some(v) = entries.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                what: "vector dimension",
                expected: dim,
                found: v.len(),
            });
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.entries[0].len()
    }

    pub fn entries(&self) -> &[Vec<S>] {
        &self.entries
    }

    /// `u_n`, 1-based.
    pub fn get(&self, n: usize) -> &[S] {
        &self.entries[n - 1]
    }
}

fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).map(|(x, y)| x.clone() * y.clone()).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct VdcReport<S> {
    pub lhs: S,
    pub rhs: S,
    pub holds: bool,
}

/// `‖(1/N) Σ_n (1/H) Σ_h u_{n+h}‖² ≤ (1/H²) Σ_{h₁,h₂} (1/N) Σ_n ⟨u_{n+h₁}, u_{n+h₂}⟩`
/// with `n = 1..N`, `h = 1..H`.
pub fn vdc_inequality<S: Scalar>(seq: &VectorSequence<S>, n_terms: usize, h_terms: usize) -> Result<VdcReport<S>> {
    if n_terms == 0 || h_terms == 0 {
        return Err(Error::Precondition("N and H must be positive".into()));
    }
    if n_terms + h_terms > seq.len() {
        return Err(Error::IndexOverflow {
            needed: n_terms + h_terms,
            available: seq.len(),
        });
    }
    let nn = S::from_count(n_terms);
    let hh = S::from_count(h_terms);
    let mut mean = vec![S::zero(); seq.dim()];
    for n in 1..=n_terms {
        for h in 1..=h_terms {
            for (m, u) in mean.iter_mut().zip(seq.get(n + h)) {
                *m = m.clone() + u.clone();
            }
        }
    }
    let mean: Vec<S> = mean.into_iter().map(|m| m / (nn.clone() * hh.clone())).collect();
    let lhs = dot(&mean, &mean);
    let mut rhs = S::zero();
    for h1 in 1..=h_terms {
        for h2 in 1..=h_terms {
            for n in 1..=n_terms {
                rhs = rhs + dot(seq.get(n + h1), seq.get(n + h2));
            }
        }
    }
    let rhs = rhs / (nn * hh.clone() * hh);
    let holds = lhs <= rhs || lhs.near(&rhs);
    Ok(VdcReport { lhs, rhs, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        <Rational as Scalar>::ratio(n, d)
    }

    #[test]
    fn constant_sequence_is_equality() {
        let v = vec![q(1, 2), q(-3, 1), q(2, 3)];
        let seq = VectorSequence::new(vec![v.clone(); 6]).unwrap();
        let r = vdc_inequality(&seq, 4, 2).unwrap();
        assert_eq!(r.lhs, dot(&v, &v));
        assert_eq!(r.lhs, r.rhs);
        assert!(r.holds);
    }

    #[test]
    fn alternating_sequence() {
        let v = vec![q(1, 1), q(2, 1)];
        let neg: Vec<Rational> = v.iter().map(|x| -x.clone()).collect();
        let seq = VectorSequence::new((0..8).map(|i| if i % 2 == 0 { v.clone() } else { neg.clone() }).collect()).unwrap();
        let r = vdc_inequality(&seq, 4, 2).unwrap();
        assert_eq!(r.lhs, q(0, 1));
        assert_eq!(r.rhs, q(0, 1));
    }

    #[test]
    fn bounds_checked() {
        let seq = VectorSequence::new(vec![vec![q(1, 1)]; 5]).unwrap();
        assert!(matches!(vdc_inequality(&seq, 3, 3), Err(Error::IndexOverflow { needed: 6, available: 5 })));
        assert!(VectorSequence::<Rational>::new(vec![]).is_err());
        assert!(VectorSequence::new(vec![vec![q(1, 1)], vec![]]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]
        #[test]
        fn always_holds(
            dim in 1usize..5,
            len in 2usize..33,
            seed in prop::collection::vec((-9i64..10, 1i64..5), 128),
            nh in (1usize..32, 1usize..32),
        ) {
            let entries: Vec<Vec<Rational>> = (0..len)
                .map(|i| (0..dim).map(|j| { let (a, b) = seed[(i * dim + j) % seed.len()]; q(a + i as i64 % 3, b) }).collect())
                .collect();
            let seq = VectorSequence::new(entries).unwrap();
            let n = 1 + nh.0 % (len - 1);
            let h = 1 + nh.1 % (len - n).max(1);
            prop_assume!(n + h <= len);
            let r = vdc_inequality(&seq, n, h).unwrap();
            prop_assert!(r.holds);
            prop_assert!(r.lhs <= r.rhs);
        }
    }
}
