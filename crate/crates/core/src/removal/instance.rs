use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::measure::{relative_independence, Coupling, ExactProbabilitySpace, IndependenceWitness, Partition};
use crate::removal::upset::{all_upsets, big_subsets, elements, full_mask, pair_generated_upsets, principal_upsets, UpSet};
use crate::scalar::Scalar;

/// One set `A_{i,j}` together with its up-set `I_{i,j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyEntry {
    pub upset: UpSet,
    /// Point indices of `A_{i,j}`, sorted.
    pub set: Vec<usize>,
}

/// A `d`-fold coupling `λ` of `μ`, partitions `Ψ_e` for `|e| ≥ 2`, and the
/// families `(I_{i,j}, A_{i,j})`.
#[derive(Debug, Clone, PartialEq)]
pub struct RemovalInstance<S> {
    space: ExactProbabilitySpace<S>,
    lambda: Coupling<S>,
    psi: BTreeMap<u32, Partition>,
    families: Vec<Vec<FamilyEntry>>,
}

/// Validates `λ` and `Ψ` against `μ` and returns the arity.
fn check_structure<S: Scalar>(
    space: &ExactProbabilitySpace<S>,
    lambda: &Coupling<S>,
    psi: &BTreeMap<u32, Partition>,
) -> Result<usize> {
    let d = lambda.arity();
    if !(2..=crate::removal::upset::MAX_ARITY).contains(&d) {
        return Err(Error::Precondition(format!("coupling arity {d} outside supported range")));
    }
    for (i, m) in lambda.marginals().iter().enumerate() {
        if m.len() != space.len() || !m.weights_equal(space.weights()) {
            return Err(Error::InconsistentPushforward(format!("marginal {i} of λ differs from μ")));
        }
    }
    let expected = big_subsets(d);
    if psi.keys().copied().collect::<Vec<_>>() != expected {
        return Err(Error::Precondition(format!(
            "Ψ must be indexed by exactly the {} subsets of [{d}] of size at least 2",
            expected.len()
        )));
    }
    if let Some(p) = psi.values().find(|p| p.len() != space.len()) {
        return Err(Error::DimensionMismatch {
            what: "Ψ_e partition size",
            expected: space.len(),
            found: p.len(),
        });
    }
    Ok(d)
}

/// `Φ_I = ⋁_{e∈I} Ψ_e` on the base space.
pub fn psi_join(psi: &BTreeMap<u32, Partition>, upset: &UpSet, n: usize) -> Partition {
    Partition::join_all(n, upset.members().iter().map(|e| &psi[e]))
}

/// `Ψ†_e`: the pullback of `Ψ_e` through the least coordinate of `e`.
pub fn lifted(lambda: &Coupling<impl Scalar>, psi: &BTreeMap<u32, Partition>) -> BTreeMap<u32, Partition> {
    psi.iter()
        .map(|(&e, p)| (e, lambda.pullback(e.trailing_zeros() as usize, p)))
        .collect()
}

/// Up-sets used for hypothesis [iii]: all for `d ≤ 3`, pair-generated and
/// principal ones for `d = 4`, principal ones beyond.
pub fn upsets_for_hypotheses(d: usize) -> (Vec<UpSet>, bool) {
    match d {
        2 | 3 => (all_upsets(d).expect("small arity"), true),
        4 => (pair_generated_upsets(d), false),
        _ => (principal_upsets(d), false),
    }
}

impl<S: Scalar> RemovalInstance<S> {
    pub fn new(
        space: ExactProbabilitySpace<S>,
        lambda: Coupling<S>,
        psi: BTreeMap<u32, Partition>,
        families: Vec<Vec<FamilyEntry>>,
    ) -> Result<Self> {
        let d = check_structure(&space, &lambda, &psi)?;
        if families.len() != d {
            return Err(Error::DimensionMismatch {
                what: "families vs arity",
                expected: d,
                found: families.len(),
            });
        }
        let full = full_mask(d);
        let keep = |x: usize| space.in_support(x);
        for (i, fam) in families.iter().enumerate() {
            if fam.is_empty() {
                return Err(Error::Precondition(format!("coordinate {i} has no sets")));
            }
            let star = UpSet::star(d, i);
            for (j, entry) in fam.iter().enumerate() {
                if entry.upset.arity() != d || !entry.upset.contains(full) || !entry.upset.is_subset(&star) {
                    return Err(Error::Precondition(format!("I[{i}][{j}] must contain [d] and lie in ⟨{i}⟩")));
                }
                if let Some(&x) = entry.set.iter().find(|&&x| x >= space.len()) {
                    return Err(Error::Precondition(format!("A[{i}][{j}] contains point {x} outside the space")));
                }
                let mask = to_mask(space.len(), &entry.set);
                if !psi_join(&psi, &entry.upset, space.len()).measurable_on(&mask, keep) {
                    return Err(Error::Precondition(format!("A[{i}][{j}] is not measurable for Φ of its up-set")));
                }
            }
        }
        Ok(Self { space, lambda, psi, families })
    }

    pub fn space(&self) -> &ExactProbabilitySpace<S> {
        &self.space
    }

    pub fn lambda(&self) -> &Coupling<S> {
        &self.lambda
    }

    pub fn psi(&self) -> &BTreeMap<u32, Partition> {
        &self.psi
    }

    pub fn families(&self) -> &[Vec<FamilyEntry>] {
        &self.families
    }

    pub fn arity(&self) -> usize {
        self.lambda.arity()
    }

    /// `B_i = ⋂_j A_{i,j}` as masks.
    pub fn coordinate_sets(&self) -> Vec<Vec<bool>> {
        let n = self.space.len();
        self.families
            .iter()
            .map(|fam| {
                let mut b = vec![true; n];
                for entry in fam {
                    let m = to_mask(n, &entry.set);
                    b.iter_mut().zip(&m).for_each(|(x, y)| *x &= y);
                }
                b
            })
            .collect()
    }
}

pub(crate) fn to_mask(n: usize, set: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &x in set {
        m[x] = true;
    }
    m
}

pub(crate) fn from_mask(mask: &[bool]) -> Vec<usize> {
    (0..mask.len()).filter(|&x| mask[x]).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport<S> {
    pub i: bool,
    pub ii: bool,
    pub iii: bool,
    /// `(e, e')` with `e ⊆ e'` and `Ψ_e` not refining `Ψ_{e'}`.
    pub witness_i: Option<(Vec<usize>, Vec<usize>)>,
    /// `(e, i, j)` with coordinates `i, j ∈ e` in different `Ψ_e` blocks on some atom.
    pub witness_ii: Option<(Vec<usize>, usize, usize)>,
    pub witness_iii: Option<(UpSet, UpSet, Option<IndependenceWitness<S>>)>,
    pub upset_pairs_checked: usize,
    /// Whether every up-set pair was checked for [iii].
    pub iii_exhaustive: bool,
}

impl<S> HypothesisReport<S> {
    pub fn all(&self) -> bool {
        self.i && self.ii && self.iii
    }
}

/// Hypotheses [i]–[iii] for a coupling and a family `Ψ`.
pub fn check_structure_hypotheses<S: Scalar>(
    space: &ExactProbabilitySpace<S>,
    lambda: &Coupling<S>,
    psi: &BTreeMap<u32, Partition>,
) -> Result<HypothesisReport<S>> {
    let d = check_structure(space, lambda, psi)?;
    let keep = |x: usize| space.in_support(x);

    let mut witness_i = None;
    'outer: for (&e, p) in psi {
        for (&f, q) in psi {
            if e != f && e & f == e && !p.refines_on(q, keep) {
                witness_i = Some((elements(e), elements(f)));
                break 'outer;
            }
        }
    }

    let mut witness_ii = None;
    'outer2: for (&e, p) in psi {
        let el = elements(e);
        for &j in &el[1..] {
            if !lambda.coordinates_agree(el[0], j, p) {
                witness_ii = Some((el.clone(), el[0], j));
                break 'outer2;
            }
        }
    }

    let lifted = lifted(lambda, psi);
    let atoms = lambda.num_atoms();
    let (upsets, exhaustive) = upsets_for_hypotheses(d);
    let joined: Vec<Partition> = upsets
        .iter()
        .map(|u| Partition::join_all(atoms, u.members().iter().map(|e| &lifted[e])))
        .collect();
    let mut witness_iii = None;
    let mut checked = 0;
    'outer3: for a in 0..upsets.len() {
        for b in a + 1..upsets.len() {
            let meet_set = upsets[a].intersect(&upsets[b]);
            let meet = Partition::join_all(atoms, meet_set.members().iter().map(|e| &lifted[e]));
            let r = relative_independence(&[joined[a].clone(), joined[b].clone()], &[meet.clone(), meet], lambda)?;
            checked += 1;
            if !r.holds {
                witness_iii = Some((upsets[a].clone(), upsets[b].clone(), r.witness));
                break 'outer3;
            }
        }
    }

    Ok(HypothesisReport {
        i: witness_i.is_none(),
        ii: witness_ii.is_none(),
        iii: witness_iii.is_none(),
        witness_i,
        witness_ii,
        witness_iii,
        upset_pairs_checked: checked,
        iii_exhaustive: exhaustive,
    })
}

pub fn check_hypotheses<S: Scalar>(inst: &RemovalInstance<S>) -> Result<HypothesisReport<S>> {
    check_structure_hypotheses(&inst.space, &inst.lambda, &inst.psi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConclusionReport<S> {
    /// `λ(∏_i ⋂_j A_{i,j})`.
    pub product_mass: S,
    /// `μ(⋂_{i,j} A_{i,j})`.
    pub intersection_mass: S,
    pub holds: bool,
}

/// Evaluates `λ(∏ B_i) = 0 ⇒ μ(⋂ B_i) = 0` for given coordinate sets.
pub fn conclusion_for_sets<S: Scalar>(space: &ExactProbabilitySpace<S>, lambda: &Coupling<S>, sets: &[Vec<bool>]) -> ConclusionReport<S> {
    let product_mass = lambda.product_mass(sets);
    let meet: Vec<bool> = (0..space.len()).map(|x| sets.iter().all(|s| s[x])).collect();
    let intersection_mass = space.measure(&meet);
    let holds = !product_mass.is_null() || intersection_mass.is_null();
    ConclusionReport {
        product_mass,
        intersection_mass,
        holds,
    }
}

/// The conclusion; refuses to evaluate unless [i]–[iii] hold.
pub fn check_conclusion<S: Scalar>(inst: &RemovalInstance<S>) -> Result<ConclusionReport<S>> {
    let h = check_hypotheses(inst)?;
    if !h.all() {
        return Err(Error::Hypotheses(format!(
            "hypotheses not satisfied: [i]={} [ii]={} [iii]={}",
            h.i, h.ii, h.iii
        )));
    }
    Ok(conclusion_for_sets(&inst.space, &inst.lambda, &inst.coordinate_sets()))
}
