use crate::error::{Error, Result};
use crate::measure::{Coupling, Partition};
use crate::perm::{joint_order, Permutation};
use crate::scalar::Scalar;
use crate::zd::{FiniteZdSystem, SubgroupSpec};

/// The average over one period of the off-diagonal joinings
/// `∫ δ_{(T^{n e_i} x)_{i∈e}} dμ(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FurstenbergJoining<S> {
    base: FiniteZdSystem<S>,
    index_set: Vec<usize>,
    coupling: Coupling<S>,
    period: u64,
}

pub(crate) fn check_index_set(dim: usize, e: &[usize]) -> Result<()> {
    if e.is_empty() {
        return Err(Error::Precondition("index set must be nonempty".into()));
    }
    if e.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition(format!("index set {e:?} must be strictly increasing")));
    }
    if let Some(&i) = e.iter().find(|&&i| i >= dim) {
        return Err(Error::DimensionMismatch {
            what: "index set coordinate",
            expected: dim,
            found: i,
        });
    }
    Ok(())
}

/// `μ^F_e` for a strictly increasing index set `e` of 0-based generator indices.
pub fn furstenberg_joining<S: Scalar>(sys: &FiniteZdSystem<S>, e: &[usize]) -> Result<FurstenbergJoining<S>> {
    check_index_set(sys.dim(), e)?;
    let gens: Vec<&Permutation> = e.iter().map(|&i| sys.generator(i)).collect();
    let period = joint_order(gens.iter().copied());
    let n = sys.len();
    let scale = S::one() / S::from_count(period as usize);
    let mut powers: Vec<Permutation> = vec![Permutation::identity(n); e.len()];
    let mut masses = Vec::with_capacity(period as usize * n);
    for _ in 0..period {
        for x in sys.space().support() {
            let t: Vec<usize> = powers.iter().map(|p| p.apply(x)).collect();
            masses.push((t, sys.space().weight(x).clone() * scale.clone()));
        }
        for (p, g) in powers.iter_mut().zip(&gens) {
            *p = g.compose(p);
        }
    }
    let coupling = Coupling::self_coupling(sys.space(), e.len(), masses)?;
    Ok(FurstenbergJoining {
        base: sys.clone(),
        index_set: e.to_vec(),
        coupling,
        period,
    })
}

impl<S: Scalar> FurstenbergJoining<S> {
    pub fn base(&self) -> &FiniteZdSystem<S> {
        &self.base
    }

    pub fn index_set(&self) -> &[usize] {
        &self.index_set
    }

    pub fn coupling(&self) -> &Coupling<S> {
        &self.coupling
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    fn position(&self, i: usize) -> Result<usize> {
        self.index_set
            .iter()
            .position(|&j| j == i)
            .ok_or_else(|| Error::Precondition(format!("coordinate {i} is not in the index set {:?}", self.index_set)))
    }

    /// Invariance under `T^{e_{i_1}} × … × T^{e_{i_k}}`.
    pub fn check_offdiag_invariance(&self) -> bool {
        let maps: Vec<&[usize]> = self.index_set.iter().map(|&i| self.base.generator(i).images()).collect();
        self.coupling.mass_equals(&self.coupling.pushforward_by(&maps))
    }

    /// Invariance under the diagonal action `T^{e_j} × … × T^{e_j}` for every `j`.
    pub fn check_diagonal_invariance(&self) -> bool {
        self.base.generators().iter().all(|g| {
            let maps = vec![g.images(); self.index_set.len()];
            self.coupling.mass_equals(&self.coupling.pushforward_by(&maps))
        })
    }

    /// Pushforward onto the coordinates of `sub ⊆ e`.
    pub fn project_joining(&self, sub: &[usize]) -> Result<Coupling<S>> {
        check_index_set(self.base.dim(), sub)?;
        let pos = sub.iter().map(|&i| self.position(i)).collect::<Result<Vec<_>>>()?;
        self.coupling.project(&pos)
    }

    /// `Φ_e = Σ^{T↾⟨e_i - e_j : i,j ∈ e⟩}` as a partition of the base space.
    pub fn partially_invariant_factor(&self, e: &[usize]) -> Partition {
        self.base.invariant_factor(&SubgroupSpec::differences(self.base.dim(), e))
    }

    /// The oblique copy `Φ^F_e`: the pullback of `Φ_e` through any coordinate
    /// of `e`, as a partition of the atoms. Disagreement across coordinates is
    /// an internal error.
    pub fn oblique_copy(&self, e: &[usize]) -> Result<Partition> {
        if e.len() < 2 {
            return Err(Error::Precondition("oblique copies need |e| >= 2".into()));
        }
        check_index_set(self.base.dim(), e)?;
        let phi = self.partially_invariant_factor(e);
        let mut pulled = e.iter().map(|&i| self.position(i).map(|p| self.coupling.pullback(p, &phi)));
        let first = pulled.next().expect("e is nonempty")?;
        for (k, other) in pulled.enumerate() {
            if other? != first {
                return Err(Error::Invariant(format!(
                    "pullbacks of Φ_e through coordinates {} and {} differ",
                    e[0],
                    e[k + 1]
                )));
            }
        }
        Ok(first)
    }

    /// Restricted to `Φ_e`, the joining is diagonal: any two coordinates in `e`
    /// land in the same `Φ_e` block on every atom.
    pub fn check_diag_lemma(&self) -> bool {
        if self.index_set.len() < 2 {
            return true;
        }
        let phi = self.partially_invariant_factor(&self.index_set);
        (1..self.index_set.len()).all(|k| self.coupling.coordinates_agree(0, k, &phi))
    }
}
