use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fberg::joining::{furstenberg_joining, FurstenbergJoining};
use crate::measure::{relative_independence, IndependenceReport, IndependenceWitness, Partition};
use crate::removal::upset::{all_upsets, big_subsets, elements, principal_upsets, UpSet};
use crate::scalar::Scalar;
use crate::zd::FiniteZdSystem;

#[derive(Debug, Clone, PartialEq)]
pub struct UpsetPairFailure<S> {
    pub first: UpSet,
    pub second: UpSet,
    pub witness: Option<IndependenceWitness<S>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FbergStructureReport<S> {
    /// Coordinate factors relatively independent over pullbacks of `Φ_{⟨i⟩}`.
    pub coordinates: IndependenceReport<S>,
    /// Oblique factors of every up-set pair relatively independent over the
    /// oblique factor of the intersection.
    pub oblique_holds: bool,
    pub oblique_failure: Option<UpsetPairFailure<S>>,
    pub upset_pairs_checked: usize,
    /// Whether every up-set was enumerated (false when only principal ones are).
    pub all_upsets: bool,
}

/// Up-sets used for pair checks: all of them for `d ≤ 4`, principal ones beyond.
pub fn upsets_for_predicates(d: usize) -> (Vec<UpSet>, bool) {
    match all_upsets(d) {
        Ok(all) => (all, true),
        Err(_) => (principal_upsets(d), false),
    }
}

/// `Φ^F_I = ⋁_{e∈I} Φ^F_e` on the atoms of `μ^F`, from precomputed oblique copies.
pub(crate) fn oblique_join(upset: &UpSet, oblique: &BTreeMap<u32, Partition>, atoms: usize) -> Partition {
    Partition::join_all(atoms, upset.members().iter().map(|e| &oblique[e]))
}

pub fn fberg_structure_predicates<S: Scalar>(sys: &FiniteZdSystem<S>) -> Result<FbergStructureReport<S>> {
    let d = sys.dim();
    if d < 2 {
        return Err(Error::Precondition("structure predicates need rank at least 2".into()));
    }
    let all: Vec<usize> = (0..d).collect();
    let fj = furstenberg_joining(sys, &all)?;
    structure_of(&fj)
}

pub fn structure_of<S: Scalar>(fj: &FurstenbergJoining<S>) -> Result<FbergStructureReport<S>> {
    let d = fj.index_set().len();
    let sys = fj.base();
    let lam = fj.coupling();
    let n = sys.len();

    let pair_factor = |i: usize, j: usize| fj.partially_invariant_factor(&[i.min(j), i.max(j)]);
    let mut factors = Vec::with_capacity(d);
    let mut subs = Vec::with_capacity(d);
    for i in 0..d {
        let phi_star = Partition::join_all(n, (0..d).filter(|&j| j != i).map(|j| pair_factor(i, j)).collect::<Vec<_>>().iter());
        factors.push(lam.pullback(i, &Partition::singletons(n)));
        subs.push(lam.pullback(i, &phi_star));
    }
    let coordinates = relative_independence(&factors, &subs, lam)?;

    let oblique: BTreeMap<u32, Partition> = big_subsets(d)
        .into_iter()
        .map(|e| fj.oblique_copy(&elements(e)).map(|p| (e, p)))
        .collect::<Result<_>>()?;
    let atoms = lam.num_atoms();
    let (upsets, complete) = upsets_for_predicates(d);
    let joined: Vec<Partition> = upsets.iter().map(|u| oblique_join(u, &oblique, atoms)).collect();
    let mut checked = 0;
    for a in 0..upsets.len() {
        for b in a + 1..upsets.len() {
            let meet = oblique_join(&upsets[a].intersect(&upsets[b]), &oblique, atoms);
            let r = relative_independence(&[joined[a].clone(), joined[b].clone()], &[meet.clone(), meet], lam)?;
            checked += 1;
            if !r.holds {
                return Ok(FbergStructureReport {
                    coordinates,
                    oblique_holds: false,
                    oblique_failure: Some(UpsetPairFailure {
                        first: upsets[a].clone(),
                        second: upsets[b].clone(),
                        witness: r.witness,
                    }),
                    upset_pairs_checked: checked,
                    all_upsets: complete,
                });
            }
        }
    }
    Ok(FbergStructureReport {
        coordinates,
        oblique_holds: true,
        oblique_failure: None,
        upset_pairs_checked: checked,
        all_upsets: complete,
    })
}
