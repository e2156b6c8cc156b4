//! Relative-independence structure of joinings of partially trivial systems.

use crate::error::{Error, Result};
use crate::measure::{relative_independence, IndependenceReport, Partition};
use crate::scalar::Scalar;
use crate::zd::factor::FactorMap;
use crate::zd::lattice::check_direct_sum;
use crate::zd::system::{FiniteZdSystem, SubgroupSpec};

fn check_maps<S: Scalar>(y: &FiniteZdSystem<S>, maps: &[FactorMap<S>], gammas: &[SubgroupSpec]) -> Result<()> {
    if maps.len() != gammas.len() {
        return Err(Error::DimensionMismatch {
            what: "factor maps vs subgroups",
            expected: maps.len(),
            found: gammas.len(),
        });
    }
    for (i, (pi, g)) in maps.iter().zip(gammas).enumerate() {
        g.check_dim(y.dim())?;
        if pi.source() != y {
            return Err(Error::Precondition(format!("factor map {i} does not start at the joining")));
        }
        if !pi.target().is_trivial_on(g) {
            return Err(Error::Precondition(format!("target {i} is not trivial on its subgroup")));
        }
    }
    Ok(())
}

/// For a joining `Y` of a `Γ₁`-trivial and a `Γ₂`-trivial system, checks that
/// the two coordinate factors are relatively independent over the pullbacks of
/// their `(Γ₁+Γ₂)`-invariant factors. A failure is an internal error.
pub fn two_fold_joining_check<S: Scalar>(
    y: &FiniteZdSystem<S>,
    maps: &[FactorMap<S>; 2],
    gammas: &[SubgroupSpec; 2],
) -> Result<IndependenceReport<S>> {
    check_maps(y, maps, gammas)?;
    let both = gammas[0].sum(&gammas[1]);
    let factors: Vec<Partition> = maps.iter().map(FactorMap::factor).collect();
    let subfactors: Vec<Partition> = maps
        .iter()
        .map(|pi| pi.pullback(&pi.target().invariant_factor(&both)))
        .collect();
    let report = relative_independence(&factors, &subfactors, y.space())?;
    if !report.holds {
        return Err(Error::Invariant(format!("two-fold joining not relatively independent: {:?}", report.witness)));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointDistributionReport<S> {
    /// Entry `i` compares `π_i` against the join of the other coordinates.
    pub per_coordinate: Vec<IndependenceReport<S>>,
}

impl<S> JointDistributionReport<S> {
    pub fn holds(&self) -> bool {
        self.per_coordinate.iter().all(|r| r.holds)
    }

    pub fn first_failure(&self) -> Option<usize> {
        self.per_coordinate.iter().position(|r| !r.holds)
    }
}

/// For each `i`, whether `π_i⁻¹(Σ_i)` and `⋁_{j≠i} π_j⁻¹(Σ_j)` are relatively
/// independent over `π_i⁻¹(⋁_{j≠i} Σ_i^{T_i↾(Γ_i+Γ_j)})`.
///
/// Requires `Γ_1 ⊕ … ⊕ Γ_r ⊕ Λ = ℤᴰ` and each target `Γ_i`-trivial.
pub fn joint_distribution_predicate<S: Scalar>(
    y: &FiniteZdSystem<S>,
    maps: &[FactorMap<S>],
    gammas: &[SubgroupSpec],
    lambda: &SubgroupSpec,
) -> Result<JointDistributionReport<S>> {
    let mut parts: Vec<&SubgroupSpec> = gammas.iter().collect();
    parts.push(lambda);
    check_direct_sum(y.dim(), &parts)?;
    check_maps(y, maps, gammas)?;
    let n = y.len();
    let factors: Vec<Partition> = maps.iter().map(FactorMap::factor).collect();
    let mut per_coordinate = Vec::with_capacity(maps.len());
    for (i, pi) in maps.iter().enumerate() {
        let others = (0..maps.len()).filter(|&j| j != i);
        let rest = Partition::join_all(n, others.clone().map(|j| &factors[j]));
        let xi = Partition::join_all(
            pi.target().len(),
            others.map(|j| pi.target().invariant_factor(&gammas[i].sum(&gammas[j]))).collect::<Vec<_>>().iter(),
        );
        let report = relative_independence(
            &[factors[i].clone(), rest.clone()],
            &[pi.pullback(&xi), rest],
            y.space(),
        )?;
        per_coordinate.push(report);
    }
    Ok(JointDistributionReport { per_coordinate })
}
