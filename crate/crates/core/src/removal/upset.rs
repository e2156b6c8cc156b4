//! Up-sets in the poset of subsets of `[d]` of size at least two.
//!
//! Subsets are bitmasks: bit `i` stands for coordinate `i` (0-based).

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

pub const MAX_ARITY: usize = 16;

/// An upward-closed family of subsets of `[d]`, each of size at least 2.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UpSet {
    d: usize,
    members: BTreeSet<u32>,
}

pub fn full_mask(d: usize) -> u32 {
    if d >= 32 {
        u32::MAX
    } else {
        (1u32 << d) - 1
    }
}

/// All subsets of `[d]` of size at least 2, ordered by mask value.
pub fn big_subsets(d: usize) -> Vec<u32> {
    (0..=full_mask(d)).filter(|m| m.count_ones() >= 2).collect()
}

/// Coordinates of a mask in increasing order.
pub fn elements(mask: u32) -> Vec<usize> {
    (0..32).filter(|&i| mask >> i & 1 == 1).collect()
}

pub fn mask_of(elements: &[usize]) -> u32 {
    elements.iter().fold(0, |m, &i| m | 1 << i)
}

impl UpSet {
    pub fn empty(d: usize) -> Self {
        Self { d, members: BTreeSet::new() }
    }

    /// Upward closure of the given subsets.
    pub fn generate(d: usize, generators: &[u32]) -> Result<Self> {
        if !(2..=MAX_ARITY).contains(&d) {
            return Err(Error::Precondition(format!("arity {d} outside 2..={MAX_ARITY}")));
        }
        for &g in generators {
            if g.count_ones() < 2 || g & !full_mask(d) != 0 {
                return Err(Error::Precondition(format!(
                    "generator {:?} is not a subset of [{d}] of size at least 2",
                    elements(g)
                )));
            }
        }
        let members = big_subsets(d)
            .into_iter()
            .filter(|&m| generators.iter().any(|&g| g & m == g))
            .collect();
        Ok(Self { d, members })
    }

    /// `⟨e⟩ = {u ⊇ e}`.
    pub fn principal(d: usize, e: u32) -> Result<Self> {
        Self::generate(d, &[e])
    }

    /// `⟨i⟩ = {e : i ∈ e, |e| ≥ 2}`.
    pub fn star(d: usize, i: usize) -> Self {
        let members = big_subsets(d).into_iter().filter(|m| m >> i & 1 == 1).collect();
        Self { d, members }
    }

    /// Members of size at least `k`.
    pub fn at_least(&self, k: usize) -> Self {
        let members = self.members.iter().copied().filter(|m| m.count_ones() as usize >= k).collect();
        Self { d: self.d, members }
    }

    pub fn arity(&self) -> usize {
        self.d
    }

    pub fn members(&self) -> &BTreeSet<u32> {
        &self.members
    }

    pub fn contains(&self, e: u32) -> bool {
        self.members.contains(&e)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn intersect(&self, other: &UpSet) -> UpSet {
        UpSet {
            d: self.d,
            members: self.members.intersection(&other.members).copied().collect(),
        }
    }

    pub fn union(&self, other: &UpSet) -> UpSet {
        UpSet {
            d: self.d,
            members: self.members.union(&other.members).copied().collect(),
        }
    }

    pub fn is_subset(&self, other: &UpSet) -> bool {
        self.members.is_subset(&other.members)
    }

    /// Smallest member size; `None` for the empty up-set.
    pub fn depth(&self) -> Option<usize> {
        self.members.iter().map(|m| m.count_ones() as usize).min()
    }

    /// The antichain of minimal members.
    pub fn minimal_members(&self) -> Vec<u32> {
        self.members
            .iter()
            .copied()
            .filter(|&m| !self.members.iter().any(|&o| o != m && o & m == o))
            .collect()
    }

    pub fn is_principal(&self) -> bool {
        self.minimal_members().len() == 1
    }

    pub fn is_upward_closed(&self) -> bool {
        self.members
            .iter()
            .all(|&m| big_subsets(self.d).into_iter().filter(|&v| v & m == m).all(|v| self.members.contains(&v)))
    }
}

impl fmt::Debug for UpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mins: Vec<Vec<usize>> = self.minimal_members().into_iter().map(elements).collect();
        write!(f, "UpSet(d={}, min={:?})", self.d, mins)
    }
}

/// Every nonempty up-set, by filtering all subfamilies. Feasible for `d ≤ 4`.
pub fn all_upsets(d: usize) -> Result<Vec<UpSet>> {
    if !(2..=4).contains(&d) {
        return Err(Error::Precondition(format!("exhaustive up-set enumeration needs 2 <= d <= 4, got {d}")));
    }
    let poset = big_subsets(d);
    let mut out = Vec::new();
    for bits in 1u32..(1 << poset.len()) {
        let members: BTreeSet<u32> = (0..poset.len()).filter(|&k| bits >> k & 1 == 1).map(|k| poset[k]).collect();
        let u = UpSet { d, members };
        if u.is_upward_closed() {
            out.push(u);
        }
    }
    out.sort();
    Ok(out)
}

/// All principal up-sets `⟨e⟩`.
pub fn principal_upsets(d: usize) -> Vec<UpSet> {
    big_subsets(d)
        .into_iter()
        .map(|e| UpSet::principal(d, e).expect("size-2 subsets are valid generators"))
        .collect()
}

/// Up-sets generated by nonempty sets of 2-element subsets, plus the principal ones.
pub fn pair_generated_upsets(d: usize) -> Vec<UpSet> {
    let pairs: Vec<u32> = big_subsets(d).into_iter().filter(|m| m.count_ones() == 2).collect();
    let mut out: BTreeSet<UpSet> = principal_upsets(d).into_iter().collect();
    if pairs.len() <= 20 {
        for bits in 1u32..(1 << pairs.len()) {
            let gens: Vec<u32> = (0..pairs.len()).filter(|&k| bits >> k & 1 == 1).map(|k| pairs[k]).collect();
            out.insert(UpSet::generate(d, &gens).expect("pairs are valid generators"));
        }
    }
    out.into_iter().collect()
}
