use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};

/// A σ-algebra on a finite set, stored by its atoms.
///
/// Canonical form: blocks are numbered in order of their smallest element and
/// each block is sorted, so two partitions of the same set are equal exactly
/// when they are structurally equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds a partition of `0..n` from explicit blocks.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {b} is empty")));
            }
            for &i in block {
                if i >= n {
                    return Err(Error::InvalidPartition(format!("index {i} out of range for {n} points")));
                }
                if labels[i] != usize::MAX {
                    return Err(Error::InvalidPartition(format!("index {i} appears in two blocks")));
                }
                labels[i] = b;
            }
        }
        if let Some(i) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidPartition(format!("index {i} is not covered")));
        }
        Ok(Self::from_labels(&labels))
    }

    /// Partition whose blocks are the level sets of `labels`.
    pub fn from_labels<L: Eq + Hash + Clone>(labels: &[L]) -> Self {
        let mut seen: HashMap<L, usize> = HashMap::new();
        let mut canon = Vec::with_capacity(labels.len());
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (i, l) in labels.iter().enumerate() {
            let next = seen.len();
            let b = *seen.entry(l.clone()).or_insert(next);
            if b == blocks.len() {
                blocks.push(Vec::new());
            }
            blocks[b].push(i);
            canon.push(b);
        }
        Self { labels: canon, blocks }
    }

    pub fn singletons(n: usize) -> Self {
        Self::from_labels(&(0..n).collect::<Vec<_>>())
    }

    /// The trivial σ-algebra: one block holding everything.
    pub fn trivial(n: usize) -> Self {
        Self::from_labels(&vec![0u8; n])
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.labels[i]
    }

    /// Common refinement (the join of the two σ-algebras).
    pub fn join(&self, other: &Partition) -> Partition {
        assert_eq!(self.len(), other.len(), "join of partitions on different sets");
        let pairs: Vec<(usize, usize)> = self.labels.iter().copied().zip(other.labels.iter().copied()).collect();
        Partition::from_labels(&pairs)
    }

    /// Join of a family; `n` is needed for the empty family (giving the trivial partition).
    pub fn join_all<'a>(n: usize, parts: impl IntoIterator<Item = &'a Partition>) -> Partition {
        parts.into_iter().fold(Partition::trivial(n), |acc, p| acc.join(p))
    }

    /// Pulls the partition back through `map: atoms -> 0..self.len()`.
    pub fn pullback(&self, map: &[usize]) -> Partition {
        let labels: Vec<usize> = map.iter().map(|&x| self.labels[x]).collect();
        Partition::from_labels(&labels)
    }

    /// True when every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.refines_on(coarser, |_| true)
    }

    /// Refinement restricted to the points where `keep` holds.
    pub fn refines_on(&self, coarser: &Partition, keep: impl Fn(usize) -> bool) -> bool {
        assert_eq!(self.len(), coarser.len());
        let mut image: Vec<Option<usize>> = vec![None; self.num_blocks()];
        for i in (0..self.len()).filter(|&i| keep(i)) {
            let slot = &mut image[self.labels[i]];
            match slot {
                None => *slot = Some(coarser.labels[i]),
                Some(c) if *c != coarser.labels[i] => return false,
                _ => {}
            }
        }
        true
    }

    /// Whether the point set `set` (as a membership mask) is a union of blocks
    /// on the points where `keep` holds.
    pub fn measurable_on(&self, set: &[bool], keep: impl Fn(usize) -> bool) -> bool {
        let mut state: Vec<Option<bool>> = vec![None; self.num_blocks()];
        for i in (0..self.len()).filter(|&i| keep(i)) {
            let slot = &mut state[self.labels[i]];
            match slot {
                None => *slot = Some(set[i]),
                Some(v) if *v != set[i] => return false,
                _ => {}
            }
        }
        true
    }

    /// Every partition of `0..n`, via restricted growth strings. Intended for `n ≤ 8`.
    pub fn all(n: usize) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut rgs = vec![0usize; n];
        loop {
            out.push(Partition::from_labels(&rgs));
            // next restricted growth string
            let mut i = n;
            loop {
                if i <= 1 {
                    return out;
                }
                i -= 1;
                let max_prev = rgs[..i].iter().copied().max().unwrap_or(0);
                if rgs[i] <= max_prev {
                    rgs[i] += 1;
                    for r in rgs.iter_mut().skip(i + 1) {
                        *r = 0;
                    }
                    break;
                }
            }
        }
    }

    /// Membership masks of all unions of blocks, in binary order of block subsets.
    /// Intended for small partitions only.
    pub fn measurable_sets(&self) -> Vec<Vec<bool>> {
        let nb = self.num_blocks();
        assert!(nb < 24, "too many blocks to enumerate measurable sets");
        (0u32..(1u32 << nb))
            .map(|mask| self.labels.iter().map(|&b| mask >> b & 1 == 1).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_is_structural() {
        let p = Partition::new(4, vec![vec![3, 1], vec![2, 0]]).unwrap();
        let q = Partition::from_labels(&["a", "b", "a", "b"]);
        assert_eq!(p, q);
        assert_eq!(p.blocks(), &[vec![0, 2], vec![1, 3]]);
    }

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (1..=6).map(|n| Partition::all(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 15, 52, 203]);
        assert_eq!(Partition::all(0).len(), 1);
    }

    #[test]
    fn rejects_bad_blocks() {
        assert!(Partition::new(3, vec![vec![0, 1]]).is_err());
        assert!(Partition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(Partition::new(2, vec![vec![0, 1], vec![]]).is_err());
        assert!(Partition::new(2, vec![vec![0, 5]]).is_err());
    }

    #[test]
    fn join_and_refinement() {
        let p = Partition::from_labels(&[0, 0, 1, 1]);
        let q = Partition::from_labels(&[0, 1, 0, 1]);
        let j = p.join(&q);
        assert_eq!(j, Partition::singletons(4));
        assert!(j.refines(&p) && j.refines(&q));
        assert!(!p.refines(&q));
        assert!(p.refines(&Partition::trivial(4)));
    }

    #[test]
    fn measurable_sets_of_two_blocks() {
        let p = Partition::from_labels(&[0, 0, 1]);
        let sets = p.measurable_sets();
        assert_eq!(sets.len(), 4);
        assert!(sets.contains(&vec![true, true, false]));
        assert!(p.measurable_on(&[true, true, false], |_| true));
        assert!(!p.measurable_on(&[true, false, false], |_| true));
        assert!(p.measurable_on(&[true, false, false], |i| i != 1));
    }
}
