//! Permutations of `0..n` stored as image tables.

use std::fmt;

use crate::scalar::lcm;

/// `x ↦ self[x]`. Composition follows function composition:
/// `p.compose(&q)[x] = p[q[x]]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// Returns `None` unless `images` is a bijection of `0..images.len()`.
    pub fn from_images(images: Vec<usize>) -> Option<Self> {
        let mut seen = vec![false; images.len()];
        for &y in &images {
            if y >= images.len() || seen[y] {
                return None;
            }
            seen[y] = true;
        }
        Some(Self(images))
    }

    /// Rotation `x ↦ x + shift (mod n)`.
    pub fn rotation(n: usize, shift: i64) -> Self {
        let s = shift.rem_euclid(n as i64) as usize;
        Self((0..n).map(|x| (x + s) % n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &y)| i == y)
    }

    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len());
        Permutation(other.0.iter().map(|&y| self.0[y]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (x, &y) in self.0.iter().enumerate() {
            inv[y] = x;
        }
        Permutation(inv)
    }

    /// Integer power by repeated squaring; negative exponents use the inverse.
    pub fn pow(&self, e: i64) -> Permutation {
        let mut base = if e < 0 { self.inverse() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Permutation::identity(self.len());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }

    pub fn commutes_with(&self, other: &Permutation) -> bool {
        self.compose(other) == other.compose(self)
    }

    /// Cycle decomposition, each cycle starting at its least element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = self.0[x];
            }
            out.push(cycle);
        }
        out
    }

    /// Order in the symmetric group: lcm of cycle lengths.
    pub fn order(&self) -> u64 {
        self.cycles().iter().fold(1, |acc, c| lcm(acc, c.len() as u64))
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.0)
    }
}

/// Common period of a tuple of permutations: lcm of their orders.
pub fn joint_order<'a>(perms: impl IntoIterator<Item = &'a Permutation>) -> u64 {
    perms.into_iter().fold(1, |acc, p| lcm(acc, p.order()))
}

/// Connected components of `0..n` under the given permutations, as labels.
pub(crate) fn orbit_labels<'a>(n: usize, perms: impl IntoIterator<Item = &'a Permutation>, keep: impl Fn(usize) -> bool) -> Vec<usize> {
    let mut uf = UnionFind::new(n);
    for p in perms {
        for x in (0..n).filter(|&x| keep(x)) {
            let y = p.apply(x);
            if keep(y) {
                uf.union(x, y);
            }
        }
    }
    (0..n).map(|x| uf.find(x)).collect()
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_powers() {
        let r = Permutation::rotation(4, 1);
        assert_eq!(r.pow(3), Permutation::rotation(4, 3));
        assert_eq!(r.pow(-1), Permutation::rotation(4, 3));
        assert!(r.pow(4).is_identity());
        assert_eq!(r.order(), 4);
    }

    #[test]
    fn cycles_and_order() {
        let p = Permutation::from_images(vec![1, 0, 3, 4, 2]).unwrap();
        assert_eq!(p.cycles(), vec![vec![0, 1], vec![2, 3, 4]]);
        assert_eq!(p.order(), 6);
        assert!(Permutation::from_images(vec![0, 0]).is_none());
    }

    #[test]
    fn composition_is_function_composition() {
        let p = Permutation::from_images(vec![1, 2, 0]).unwrap();
        let q = Permutation::from_images(vec![0, 2, 1]).unwrap();
        let pq = p.compose(&q);
        for x in 0..3 {
            assert_eq!(pq.apply(x), p.apply(q.apply(x)));
        }
        assert!(!p.commutes_with(&q));
    }

    #[test]
    fn orbits() {
        let p = Permutation::from_images(vec![1, 0, 2, 3]).unwrap();
        let q = Permutation::from_images(vec![0, 1, 3, 2]).unwrap();
        let l = orbit_labels(4, [&p, &q], |_| true);
        assert_eq!(l[0], l[1]);
        assert_eq!(l[2], l[3]);
        assert_ne!(l[0], l[2]);
    }
}
