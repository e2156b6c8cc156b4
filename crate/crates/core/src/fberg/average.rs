use crate::error::{Error, Result};
use crate::fberg::joining::furstenberg_joining;
use crate::measure::SimpleFunction;
use crate::perm::{joint_order, Permutation};
use crate::scalar::Scalar;
use crate::zd::FiniteZdSystem;

fn check_arity<S: Scalar>(sys: &FiniteZdSystem<S>, got: usize, what: &'static str) -> Result<()> {
    if got != sys.dim() {
        return Err(Error::DimensionMismatch {
            what,
            expected: sys.dim(),
            found: got,
        });
    }
    Ok(())
}

fn check_sets<S: Scalar>(sys: &FiniteZdSystem<S>, sets: &[Vec<bool>]) -> Result<()> {
    check_arity(sys, sets.len(), "number of sets vs rank")?;
    if let Some(s) = sets.iter().find(|s| s.len() != sys.len()) {
        return Err(Error::DimensionMismatch {
            what: "set mask length",
            expected: sys.len(),
            found: s.len(),
        });
    }
    Ok(())
}

/// `(1/N) Σ_{n=1}^{N} ∏_i f_i ∘ T^{n e_i}`.
pub fn nonconventional_average<S: Scalar>(
    sys: &FiniteZdSystem<S>,
    fs: &[SimpleFunction<S>],
    n_terms: usize,
) -> Result<SimpleFunction<S>> {
    check_arity(sys, fs.len(), "number of functions vs rank")?;
    if let Some(f) = fs.iter().find(|f| f.len() != sys.len()) {
        return Err(Error::DimensionMismatch {
            what: "function length",
            expected: sys.len(),
            found: f.len(),
        });
    }
    if n_terms == 0 {
        return Err(Error::Precondition("average needs N >= 1".into()));
    }
    let len = sys.len();
    let mut acc = vec![S::zero(); len];
    let mut powers: Vec<Permutation> = sys.generators().to_vec();
    for _ in 1..=n_terms {
        for (x, slot) in acc.iter_mut().enumerate() {
            let term = fs
                .iter()
                .zip(&powers)
                .fold(S::one(), |p, (f, t)| p * f.value(t.apply(x)).clone());
            *slot = slot.clone() + term;
        }
        for (p, g) in powers.iter_mut().zip(sys.generators()) {
            *p = g.compose(p);
        }
    }
    let scale = S::from_count(n_terms);
    Ok(SimpleFunction::new(acc.into_iter().map(|v| v / scale.clone()).collect()))
}

/// `μ(T^{-n e_1} A_1 ∩ … ∩ T^{-n e_d} A_d)`.
fn correlation<S: Scalar>(sys: &FiniteZdSystem<S>, powers: &[Permutation], sets: &[Vec<bool>]) -> S {
    sys.space()
        .support()
        .into_iter()
        .filter(|&x| powers.iter().zip(sets).all(|(p, a)| a[p.apply(x)]))
        .map(|x| sys.space().weight(x).clone())
        .sum()
}

/// Period of the tuple of all generators.
pub fn period<S: Scalar>(sys: &FiniteZdSystem<S>) -> u64 {
    joint_order(sys.generators())
}

/// The exact Cesàro limit of `μ(⋂ T^{-n e_i} A_i)`, as the average over one period.
pub fn cesaro_limit_scalar<S: Scalar>(sys: &FiniteZdSystem<S>, sets: &[Vec<bool>]) -> Result<S> {
    check_sets(sys, sets)?;
    let l = period(sys);
    let mut acc = S::zero();
    let mut powers: Vec<Permutation> = vec![Permutation::identity(sys.len()); sys.dim()];
    for _ in 0..l {
        acc = acc + correlation(sys, &powers, sets);
        for (p, g) in powers.iter_mut().zip(sys.generators()) {
            *p = g.compose(p);
        }
    }
    Ok(acc / S::from_count(l as usize))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceCertificate<S> {
    pub limit: S,
    /// Least `n ≥ 1` with `μ(⋂ T^{-n e_i} A) > 0`, searched up to the period.
    pub witness_n: Option<u64>,
    pub period: u64,
}

pub fn recurrence_certificate<S: Scalar>(sys: &FiniteZdSystem<S>, a: &[bool]) -> Result<RecurrenceCertificate<S>> {
    let sets = vec![a.to_vec(); sys.dim()];
    let limit = cesaro_limit_scalar(sys, &sets)?;
    let l = period(sys);
    let mut powers: Vec<Permutation> = sys.generators().to_vec();
    let mut witness_n = None;
    for n in 1..=l {
        if !correlation(sys, &powers, &sets).is_null() {
            witness_n = Some(n);
            break;
        }
        for (p, g) in powers.iter_mut().zip(sys.generators()) {
            *p = g.compose(p);
        }
    }
    Ok(RecurrenceCertificate { limit, witness_n, period: l })
}

/// `μ^F(∏ A_i) = 0 ⇒ μ(⋂ A_i) = 0`.
pub fn multirec2_check<S: Scalar>(sys: &FiniteZdSystem<S>, sets: &[Vec<bool>]) -> Result<bool> {
    check_sets(sys, sets)?;
    let all: Vec<usize> = (0..sys.dim()).collect();
    let fj = furstenberg_joining(sys, &all)?;
    if !fj.coupling().product_mass(sets).is_null() {
        return Ok(true);
    }
    let meet: Vec<bool> = (0..sys.len()).map(|x| sets.iter().all(|s| s[x])).collect();
    Ok(sys.space().measure(&meet).is_null())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use crate::zd::{catalog, random::random_system};

    fn q(n: i64, d: i64) -> Rational {
        <Rational as Scalar>::ratio(n, d)
    }

    #[test]
    fn z3_average_and_limit() {
        let sys = catalog::cyclic::<Rational>(3, &[1, 2]);
        let f = SimpleFunction::indicator_of(3, &[0]);
        let avg = nonconventional_average(&sys, &[f.clone(), f], 3).unwrap();
        assert_eq!(avg.values(), &[q(1, 3), q(0, 1), q(0, 1)]);
        let a = vec![true, false, false];
        assert_eq!(cesaro_limit_scalar(&sys, &[a.clone(), a.clone()]).unwrap(), q(1, 9));
        let c = recurrence_certificate(&sys, &a).unwrap();
        assert_eq!(c.limit, q(1, 9));
        assert_eq!(c.witness_n, Some(3));
    }

    #[test]
    fn trivial_averages() {
        let id = catalog::cyclic::<Rational>(4, &[0]);
        let f = SimpleFunction::new(vec![q(1, 2), q(3, 1), q(0, 1), q(-1, 1)]);
        for n in 1..6 {
            assert_eq!(nonconventional_average(&id, &[f.clone()], n).unwrap(), f);
        }
        let sys = catalog::cyclic::<Rational>(5, &[1, 3]);
        let one = SimpleFunction::constant(5, q(1, 1));
        assert_eq!(nonconventional_average(&sys, &[one.clone(), one.clone()], 7).unwrap(), one);
        let rot = catalog::cyclic::<Rational>(6, &[1]);
        let a = vec![true, true, false, false, true, false];
        assert_eq!(cesaro_limit_scalar(&rot, &[a]).unwrap(), q(1, 2));
    }

    #[test]
    fn recurrence_edge_cases() {
        let w = vec![q(1, 2), q(1, 2), q(0, 1)];
        let sys = FiniteZdSystem::from_images(crate::measure::ExactProbabilitySpace::with_weights(w).unwrap(), vec![vec![1, 0, 2]]).unwrap();
        let null = recurrence_certificate(&sys, &[false, false, true]).unwrap();
        assert_eq!(null.limit, q(0, 1));
        assert_eq!(null.witness_n, None);
        let full = recurrence_certificate(&sys, &[true, true, true]).unwrap();
        assert_eq!(full.limit, q(1, 1));
        assert_eq!(full.witness_n, Some(1));
    }

    #[test]
    fn limit_matches_joining_and_lower_bound() {
        for seed in 0..60 {
            let sys = random_system::<Rational>(seed, 6, 2);
            let fj = furstenberg_joining(&sys, &[0, 1]).unwrap();
            let n = sys.len();
            for a in 0..1u32 << n {
                let b = (a.wrapping_mul(2654435761) >> 7) & ((1 << n) - 1);
                let sets = vec![(0..n).map(|x| a >> x & 1 == 1).collect::<Vec<_>>(), (0..n).map(|x| b >> x & 1 == 1).collect()];
                let lim = cesaro_limit_scalar(&sys, &sets).unwrap();
                assert_eq!(lim, fj.coupling().product_mass(&sets));
                let meet: Vec<bool> = (0..n).map(|x| sets[0][x] && sets[1][x]).collect();
                let bound = sys.space().measure(&meet) / q(fj.period() as i64, 1);
                assert!(lim >= bound);
                assert!(multirec2_check(&sys, &sets).unwrap());
            }
        }
    }

    #[test]
    fn averages_are_eventually_periodic() {
        for seed in 0..30 {
            let sys = random_system::<Rational>(seed, 8, 2);
            let l = period(&sys) as usize;
            let n = sys.len();
            let fs: Vec<SimpleFunction<Rational>> = (0..2)
                .map(|k| SimpleFunction::new((0..n).map(|x| q(((x * 7 + k * 3 + seed as usize) % 4) as i64, 1)).collect()))
                .collect();
            let mu = sys.space();
            // N·S_N(x) grows by the same increment every period
            let sums: Vec<Vec<Rational>> = (1..=3 * l)
                .map(|big_n| {
                    let v = nonconventional_average(&sys, &fs, big_n).unwrap();
                    v.values().iter().map(|y| y.clone() * q(big_n as i64, 1)).collect()
                })
                .collect();
            for big_n in 1..=2 * l {
                for x in 0..n {
                    let d1 = sums[big_n + l - 1][x].clone() - sums[big_n - 1][x].clone();
                    let d0 = sums[l - 1][x].clone();
                    assert_eq!(d1, d0);
                }
            }
            // the per-period average integrates to the joining's value
            let fj = furstenberg_joining(&sys, &[0, 1]).unwrap();
            let avg = nonconventional_average(&sys, &fs, l).unwrap();
            let via_joining: Rational = fj
                .coupling()
                .mass()
                .iter()
                .map(|(t, m)| m.clone() * fs[0].value(t[0]).clone() * fs[1].value(t[1]).clone())
                .sum();
            assert_eq!(avg.integral(mu).unwrap(), via_joining);
        }
    }
}
