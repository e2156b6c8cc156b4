use num_traits::{One, ToPrimitive};

use crate::dhj::word::{check_alphabet, enumerate_lines, subspaces_of_len, Word};
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Point sets are `u128` bitmasks over `[k]^N` in lexicographic order.
pub const MAX_POINTS: usize = 128;

fn point_count(k: usize, n: usize) -> Result<usize> {
    check_alphabet(k)?;
    let p = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if p > MAX_POINTS as u128 {
        return Err(Error::OverBudget {
            needed: p,
            budget: MAX_POINTS as u128,
        });
    }
    Ok(p as usize)
}

fn to_indices(mask: u128) -> Vec<usize> {
    (0..128).filter(|&i| mask >> i & 1 == 1).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineFreeResult {
    pub size: usize,
    /// Point indices of the lexicographically least extremal set found.
    pub set: Vec<usize>,
    pub exhaustive: bool,
    pub nodes: u64,
}

impl LineFreeResult {
    pub fn words(&self, k: usize, n: usize) -> Vec<Word> {
        self.set.iter().map(|&i| Word::at(k, n, i)).collect()
    }
}

struct Search {
    lines: Vec<u128>,
    through: Vec<Vec<u128>>,
    best: u128,
    best_size: u32,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Search {
    /// `|C| + |U|` less one for each line in a greedy family whose undecided
    /// parts are pairwise disjoint.
    fn bound(&self, chosen: u128, avail: u128) -> u32 {
        let mut used = 0u128;
        let mut saved = 0;
        for &l in &self.lines {
            let open = l & avail;
            if open != 0 && l & !(chosen | avail) == 0 && open & used == 0 {
                used |= open;
                saved += 1;
            }
        }
        chosen.count_ones() + avail.count_ones() - saved
    }

    fn run(&mut self, chosen: u128, avail: u128) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        if avail == 0 {
            if chosen.count_ones() > self.best_size {
                self.best_size = chosen.count_ones();
                self.best = chosen;
            }
            return;
        }
        if self.bound(chosen, avail) <= self.best_size {
            return;
        }
        let p = avail.trailing_zeros() as usize;
        let bit = 1u128 << p;
        let with = chosen | bit;
        let mut rest = avail & !bit;
        for &l in &self.through[p] {
            let missing = l & !with;
            if missing.count_ones() == 1 {
                rest &= !missing;
            }
        }
        self.run(with, rest);
        self.run(chosen, avail & !bit);
    }
}

/// Largest subset of `[k]^N` containing no combinatorial line, by
/// include-first branch-and-bound with a node budget.
pub fn max_line_free(k: usize, n: usize, budget: u64) -> Result<LineFreeResult> {
    let p = point_count(k, n)?;
    let lines: Vec<u128> = enumerate_lines(k, n)?
        .iter()
        .map(|l| l.iter().fold(0u128, |m, &i| m | 1 << i))
        .collect();
    let mut through = vec![Vec::new(); p];
    for &l in &lines {
        for i in to_indices(l) {
            through[i].push(l);
        }
    }
    let all = if p == 128 { u128::MAX } else { (1u128 << p) - 1 };
    let mut s = Search {
        lines,
        through,
        best: 0,
        best_size: 0,
        nodes: 0,
        budget,
        exhausted: false,
    };
    s.run(0, all);
    Ok(LineFreeResult {
        size: s.best_size as usize,
        set: to_indices(s.best),
        exhaustive: !s.exhausted,
        nodes: s.nodes,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForcingReport {
    pub holds: bool,
    /// A dense set without the required subspace.
    pub counterexample: Option<Vec<usize>>,
    /// Minimum size of a set above the density threshold.
    pub min_size: usize,
    pub sets_checked: u64,
    pub exhaustive: bool,
}

/// Every `A ⊆ [k]^N` with `d(A) > 1 − k^{−2L}` contains an `L`-dimensional
/// subspace: both through the family `u ↦ u ⊕ w` and by general search.
/// `budget` caps the number of sets examined.
pub fn subspace_forcing_check(k: usize, l: usize, n: usize, budget: u64) -> Result<ForcingReport> {
    let p = point_count(k, n)?;
    if l == 0 || l > n {
        return Err(Error::Precondition(format!("need 1 <= L <= N, got L={l} N={n}")));
    }
    let threshold = Rational::one() - Rational::ratio(1, (k as i64).pow(2 * l as u32));
    let scaled = threshold * Rational::from_count(p);
    let min_size = scaled.floor().to_integer().to_usize().expect("small") + 1;
    let special: Vec<u128> = (0..k.pow((n - l) as u32))
        .map(|wi| {
            let w = Word::at(k, n - l, wi);
            Word::all(k, l).iter().fold(0u128, |m, u| m | 1 << u.concat(&w).index(k))
        })
        .collect();
    let mut general: Vec<u128> = subspaces_of_len(k, l, n)
        .iter()
        .map(|s| s.images().iter().fold(0u128, |m, w| m | 1 << w.index(k)))
        .collect();
    general.sort_unstable();
    general.dedup();

    let all = if p == 128 { u128::MAX } else { (1u128 << p) - 1 };
    let mut checked = 0u64;
    let max_removed = p.saturating_sub(min_size);
    for removed in 0..=max_removed {
        let mut complement = Vec::with_capacity(removed);
        let mut result = None;
        let done = each_subset(p, removed, &mut complement, &mut |c| {
            if checked >= budget {
                return Some(false);
            }
            checked += 1;
            let a = all & !c;
            let ok_special = special.iter().any(|&s| s & a == s);
            let ok_general = general.iter().any(|&s| s & a == s);
            if !(ok_special && ok_general) {
                result = Some(a);
                return Some(true);
            }
            None
        });
        if let Some(a) = result {
            return Ok(ForcingReport {
                holds: false,
                counterexample: Some(to_indices(a)),
                min_size,
                sets_checked: checked,
                exhaustive: true,
            });
        }
        if done == Some(false) {
            return Ok(ForcingReport {
                holds: true,
                counterexample: None,
                min_size,
                sets_checked: checked,
                exhaustive: false,
            });
        }
    }
    Ok(ForcingReport {
        holds: true,
        counterexample: None,
        min_size,
        sets_checked: checked,
        exhaustive: true,
    })
}

/// Visits the `r`-subsets of `0..p` as masks; stops at the first `Some`.
fn each_subset(p: usize, r: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(u128) -> Option<bool>) -> Option<bool> {
    if cur.len() == r {
        return f(cur.iter().fold(0u128, |m, &i| m | 1 << i));
    }
    let start = cur.last().map_or(0, |&x| x + 1);
    for x in start..p {
        if p - x < r - cur.len() {
            break;
        }
        cur.push(x);
        let out = each_subset(p, r, cur, f);
        cur.pop();
        if out.is_some() {
            return out;
        }
    }
    None
}
