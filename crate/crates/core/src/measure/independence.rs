//! Exhaustive relative-independence checking.
//!
//! A tuple of factors `(F_1, …, F_d)` is relatively independent over
//! subfactors `(H_1, …, H_d)` under ν when
//! `∫ ∏ f_i dν = ∫ ∏ E(f_i | H_i) dν` for all `F_i`-measurable `f_i`.
//! Both sides are multilinear, so it suffices to test indicator functions of
//! blocks. Because each `H_i` coarsens `F_i` on the support, the conditional
//! expectation of a block indicator `1_B` is `ν(B)/ν(H(B))` on the `H_i`-block
//! `H(B)` containing `B` and zero elsewhere, which gives the closed form
//! `∏ ν(B_i)/ν(H(B_i)) · ν(⋂ H(B_i))` for the right-hand side.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::measure::partition::Partition;
use crate::measure::space::FiniteMeasure;
use crate::scalar::Scalar;

/// A block tuple on which the two integrals differ.
#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceWitness<S> {
    /// One block index per factor.
    pub blocks: Vec<usize>,
    /// `∫ ∏ 1_{B_i}`.
    pub joint: S,
    /// `∫ ∏ E(1_{B_i} | H_i)`.
    pub conditional: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceReport<S> {
    pub holds: bool,
    pub witness: Option<IndependenceWitness<S>>,
    pub tuples_checked: usize,
}

impl<S> IndependenceReport<S> {
    fn holds(tuples_checked: usize) -> Self {
        Self {
            holds: true,
            witness: None,
            tuples_checked,
        }
    }
}

/// Checks relative independence of `factors` over `subfactors` under the atom
/// weights of `nu`. All partitions must be partitions of the atoms of `nu`.
pub fn relative_independence<S: Scalar, M: FiniteMeasure<S> + ?Sized>(
    factors: &[Partition],
    subfactors: &[Partition],
    nu: &M,
) -> Result<IndependenceReport<S>> {
    relative_independence_weights(factors, subfactors, &nu.atom_weights())
}

pub fn relative_independence_weights<S: Scalar>(
    factors: &[Partition],
    subfactors: &[Partition],
    weights: &[S],
) -> Result<IndependenceReport<S>> {
    if factors.len() != subfactors.len() {
        return Err(Error::DimensionMismatch {
            what: "factor vs subfactor count",
            expected: factors.len(),
            found: subfactors.len(),
        });
    }
    for p in factors.iter().chain(subfactors) {
        if p.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                what: "partition size vs atom count",
                expected: weights.len(),
                found: p.len(),
            });
        }
    }
    let support: Vec<usize> = (0..weights.len()).filter(|&a| !weights[a].is_null()).collect();

    // For each factor: block masses and the subfactor block containing each
    // positive-mass block.
    let mut block_mass: Vec<Vec<S>> = Vec::with_capacity(factors.len());
    let mut parent: Vec<Vec<Option<usize>>> = Vec::with_capacity(factors.len());
    let mut sub_mass: Vec<Vec<S>> = Vec::with_capacity(factors.len());
    for (i, (f, h)) in factors.iter().zip(subfactors).enumerate() {
        let mut bm = vec![S::zero(); f.num_blocks()];
        let mut hm = vec![S::zero(); h.num_blocks()];
        let mut par: Vec<Option<usize>> = vec![None; f.num_blocks()];
        for &a in &support {
            let b = f.block_of(a);
            let c = h.block_of(a);
            bm[b] = bm[b].clone() + weights[a].clone();
            hm[c] = hm[c].clone() + weights[a].clone();
            match par[b] {
                None => par[b] = Some(c),
                Some(p) if p != c => return Err(Error::NotCoarsening { factor: i, block: b }),
                _ => {}
            }
        }
        block_mass.push(bm);
        parent.push(par);
        sub_mass.push(hm);
    }

    let mut joint: HashMap<Vec<usize>, S> = HashMap::new();
    let mut sub_joint: HashMap<Vec<usize>, S> = HashMap::new();
    for &a in &support {
        let key: Vec<usize> = factors.iter().map(|f| f.block_of(a)).collect();
        let e = joint.entry(key).or_insert_with(S::zero);
        *e = e.clone() + weights[a].clone();
        let key: Vec<usize> = subfactors.iter().map(|h| h.block_of(a)).collect();
        let e = sub_joint.entry(key).or_insert_with(S::zero);
        *e = e.clone() + weights[a].clone();
    }

    let live: Vec<Vec<usize>> = parent
        .iter()
        .map(|par| (0..par.len()).filter(|&b| par[b].is_some()).collect())
        .collect();
    if live.iter().any(|l| l.is_empty()) {
        return Ok(IndependenceReport::holds(0));
    }

    let mut checked = 0usize;
    let mut cursor = vec![0usize; factors.len()];
    loop {
        let blocks: Vec<usize> = cursor.iter().zip(&live).map(|(&c, l)| l[c]).collect();
        let lhs = joint.get(&blocks).cloned().unwrap_or_else(S::zero);
        let subs: Vec<usize> = blocks.iter().enumerate().map(|(i, &b)| parent[i][b].unwrap()).collect();
        let mut rhs = sub_joint.get(&subs).cloned().unwrap_or_else(S::zero);
        if !rhs.is_null() {
            for (i, &b) in blocks.iter().enumerate() {
                rhs = rhs * block_mass[i][b].clone() / sub_mass[i][subs[i]].clone();
            }
        }
        checked += 1;
        if !lhs.near(&rhs) {
            return Ok(IndependenceReport {
                holds: false,
                witness: Some(IndependenceWitness {
                    blocks,
                    joint: lhs,
                    conditional: rhs,
                }),
                tuples_checked: checked,
            });
        }
        // odometer over the cartesian product, last factor fastest
        let mut k = factors.len();
        loop {
            if k == 0 {
                return Ok(IndependenceReport::holds(checked));
            }
            k -= 1;
            cursor[k] += 1;
            if cursor[k] < live[k].len() {
                break;
            }
            cursor[k] = 0;
        }
    }
}
