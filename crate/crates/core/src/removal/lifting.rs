//! Finite checks of the reduction steps used to lift the removal statement:
//! merging duplicated up-sets, replacing a set by a level set of its
//! conditional expectation, and thresholding against a conditional
//! expectation. Each runs on seeded random `d = 3` structures satisfying
//! [i]–[iii].

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::measure::{conditional_expectation, Coupling, ExactProbabilitySpace, Partition, SimpleFunction};
use crate::removal::instance::{check_structure_hypotheses, psi_join};
use crate::removal::search::{random_structure, CouplingKind};
use crate::removal::upset::{full_mask, UpSet};
use crate::scalar::{Rational, Scalar};

const D: usize = 3;
const MAX_POINTS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioResult {
    pub instances: usize,
    pub passed: usize,
    /// Description of the first failing instance.
    pub failure: Option<String>,
}

impl ScenarioResult {
    fn new() -> Self {
        Self {
            instances: 0,
            passed: 0,
            failure: None,
        }
    }

    fn record(&mut self, seed: u64, outcome: std::result::Result<(), String>) {
        self.instances += 1;
        match outcome {
            Ok(()) => self.passed += 1,
            Err(msg) => {
                if self.failure.is_none() {
                    self.failure = Some(format!("instance {seed}: {msg}"));
                }
            }
        }
    }

    pub fn holds(&self) -> bool {
        self.instances > 0 && self.passed == self.instances
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftingReport {
    pub duplicate_merge: ScenarioResult,
    pub level_set: ScenarioResult,
    pub threshold: ScenarioResult,
}

impl LiftingReport {
    pub fn holds(&self) -> bool {
        self.duplicate_merge.holds() && self.level_set.holds() && self.threshold.holds()
    }
}

struct Structure {
    space: ExactProbabilitySpace<Rational>,
    lambda: Coupling<Rational>,
    psi: BTreeMap<u32, Partition>,
}

fn valid_structure(rng: &mut ChaCha8Rng) -> Structure {
    loop {
        let (space, lambda, psi) = random_structure(rng, MAX_POINTS, D, &CouplingKind::ALL);
        if check_structure_hypotheses(&space, &lambda, &psi).is_ok_and(|h| h.all()) {
            return Structure { space, lambda, psi };
        }
    }
}

fn random_measurable(rng: &mut ChaCha8Rng, p: &Partition) -> Vec<bool> {
    let chosen: Vec<bool> = (0..p.num_blocks()).map(|_| rng.gen_bool(0.6)).collect();
    p.labels().iter().map(|&b| chosen[b]).collect()
}

fn generated(gens: &[u32]) -> UpSet {
    UpSet::generate(D, gens).expect("valid generators")
}

fn meet(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| *x && *y).collect()
}

fn indicator(a: &[bool]) -> SimpleFunction<Rational> {
    SimpleFunction::indicator(a)
}

fn cond(a: &[bool], p: &Partition, space: &ExactProbabilitySpace<Rational>) -> SimpleFunction<Rational> {
    conditional_expectation(&indicator(a), p, space).expect("matching lengths")
}

fn intersection_mass(space: &ExactProbabilitySpace<Rational>, sets: &[Vec<bool>]) -> Rational {
    let all: Vec<bool> = (0..space.len()).map(|x| sets.iter().all(|s| s[x])).collect();
    space.measure(&all)
}

/// Two sets on the same up-set may be merged into one coordinate.
fn duplicate_merge(rng: &mut ChaCha8Rng, s: &Structure) -> std::result::Result<(), String> {
    let n = s.space.len();
    let shared = psi_join(&s.psi, &generated(&[0b011]), n);
    let a0 = random_measurable(rng, &shared);
    let a1 = random_measurable(rng, &shared);
    let a2 = random_measurable(rng, &psi_join(&s.psi, &UpSet::star(D, 2), n));
    let before = vec![a0.clone(), a1.clone(), a2.clone()];
    let after = vec![meet(&a0, &a1), vec![true; n], a2];
    let (lb, la) = (s.lambda.product_mass(&before), s.lambda.product_mass(&after));
    if lb != la {
        return Err(format!("λ changed from {lb} to {la}"));
    }
    let (mb, ma) = (intersection_mass(&s.space, &before), intersection_mass(&s.space, &after));
    if mb != ma {
        return Err(format!("μ changed from {mb} to {ma}"));
    }
    Ok(())
}

/// `A'₀ = {E(1_{A₀} | Ψ_{[3]}) > 0}` keeps the product mass's null set.
fn level_set(rng: &mut ChaCha8Rng, s: &Structure) -> std::result::Result<(), String> {
    let n = s.space.len();
    let top = &s.psi[&full_mask(D)];
    let ups = [generated(&[0b011]), generated(&[0b110]), generated(&[0b101])];
    let a: Vec<Vec<bool>> = ups.iter().map(|u| random_measurable(rng, &psi_join(&s.psi, u, n))).collect();
    let e = cond(&a[0], top, &s.space);
    let a0p: Vec<bool> = e.values().iter().map(|v| v > &Rational::zero()).collect();

    let lost: Vec<bool> = (0..n).map(|x| a[0][x] && !a0p[x]).collect();
    if !s.space.measure(&lost).is_null() {
        return Err("μ(A₀ ∖ A'₀) > 0".into());
    }
    let lhs = s.lambda.product_mass(&a);
    let rhs: Rational = s
        .lambda
        .mass()
        .iter()
        .filter(|(t, _)| a[1][t[1]] && a[2][t[2]])
        .map(|(t, m)| m.clone() * e.value(t[0]).clone())
        .sum();
    if lhs != rhs {
        return Err(format!("λ(∏A) = {lhs} but the conditioned integral is {rhs}"));
    }
    let replaced = vec![a0p.clone(), a[1].clone(), a[2].clone()];
    if lhs.is_null() && !s.lambda.product_mass(&replaced).is_null() {
        return Err("level set gained product mass".into());
    }
    // conditioning on the finest partition recovers the set on the support
    let fine = cond(&a[0], &Partition::singletons(n), &s.space);
    for x in 0..n {
        let expected = a[0][x] && s.space.in_support(x);
        if (fine.value(x) > &Rational::zero()) != expected {
            return Err(format!("finest conditioning disagrees with A₀ at {x}"));
        }
    }
    Ok(())
}

/// Thresholding at `1 − δ` with `δ = 1/4` against the top factor, then
/// against each coordinate's own factor.
fn threshold(rng: &mut ChaCha8Rng, s: &Structure) -> std::result::Result<(), String> {
    let n = s.space.len();
    let delta = Rational::ratio(1, 4);
    let cut = Rational::one() - delta.clone();
    let own: Vec<Partition> = (0..D).map(|i| psi_join(&s.psi, &UpSet::star(D, i), n)).collect();
    let a: Vec<Vec<bool>> = own.iter().map(|p| random_measurable(rng, p)).collect();
    let product = s.lambda.product_mass(&a);
    let top = s.psi[&full_mask(D)].clone();

    for (stage, xi) in [("top", vec![top; D]), ("own", own)] {
        let b: Vec<Vec<bool>> = (0..D)
            .map(|i| cond(&a[i], &xi[i], &s.space).values().iter().map(|v| v > &cut).collect())
            .collect();
        let f = s.lambda.product_mass(&b);
        let mut total_bad = Rational::zero();
        for i in 0..D {
            let mut sets = b.clone();
            sets[i] = (0..n).map(|x| b[i][x] && !a[i][x]).collect();
            let bad = s.lambda.product_mass(&sets);
            if bad > delta.clone() * f.clone() {
                return Err(format!("{stage}: λ(F ∖ π_{i}⁻¹A_{i}) = {bad} exceeds δλ(F) = {}", delta.clone() * f.clone()));
            }
            total_bad += bad;
        }
        let inside: Vec<Vec<bool>> = (0..D).map(|i| meet(&b[i], &a[i])).collect();
        let good = s.lambda.product_mass(&inside);
        if f.clone() - good > total_bad {
            return Err(format!("{stage}: union bound fails"));
        }
        if product.is_null() && !f.is_null() {
            return Err(format!("{stage}: λ(F) = {f} with λ(∏A) = 0"));
        }
        if stage == "own" {
            for i in 0..D {
                let diff: Vec<bool> = (0..n).map(|x| a[i][x] != b[i][x]).collect();
                if !s.space.measure(&diff).is_null() {
                    return Err(format!("own stage: B_{i} differs from A_{i} on a positive set"));
                }
            }
        }
    }
    Ok(())
}

/// Runs each scenario on `count` random structures drawn from `seed`.
pub fn lifting_scenario_tests(seed: u64, count: usize) -> LiftingReport {
    let mut report = LiftingReport {
        duplicate_merge: ScenarioResult::new(),
        level_set: ScenarioResult::new(),
        threshold: ScenarioResult::new(),
    };
    for k in 0..count as u64 {
        let instance_seed = seed.wrapping_add(k);
        let mut rng = ChaCha8Rng::seed_from_u64(instance_seed);
        let s = valid_structure(&mut rng);
        report.duplicate_merge.record(instance_seed, duplicate_merge(&mut rng, &s));
        report.level_set.record(instance_seed, level_set(&mut rng, &s));
        report.threshold.record(instance_seed, threshold(&mut rng, &s));
    }
    report
}
