use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::measure::ExactProbabilitySpace;
use crate::perm::Permutation;
use crate::scalar::{lcm, Scalar};
use crate::zd::factor::FactorMap;
use crate::zd::system::FiniteZdSystem;

/// Rotation `z ↦ z + φ(n)` on `U = Z_{o_1} × … × Z_{o_r}` with Haar measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRotationSystem {
    orders: Vec<u64>,
    phi: Vec<Vec<u64>>,
}

type Element = Vec<u64>;

impl GroupRotationSystem {
    /// `phi[i]` is `φ(e_i)`; entries are reduced modulo the cyclic orders.
    pub fn new(orders: Vec<u64>, phi: Vec<Vec<i64>>) -> Result<Self> {
        if orders.is_empty() || orders.contains(&0) {
            return Err(Error::InvalidSystem("cyclic orders must be positive and nonempty".into()));
        }
        if phi.is_empty() {
            return Err(Error::InvalidSystem("rotation needs at least one generator image".into()));
        }
        let size = orders.iter().try_fold(1u64, |acc, &o| acc.checked_mul(o));
        if size.is_none_or(|s| s > 1 << 20) {
            return Err(Error::InvalidSystem("group too large".into()));
        }
        let mut reduced = Vec::with_capacity(phi.len());
        for g in phi {
            if g.len() != orders.len() {
                return Err(Error::DimensionMismatch {
                    what: "generator image length",
                    expected: orders.len(),
                    found: g.len(),
                });
            }
            reduced.push(g.iter().zip(&orders).map(|(&c, &o)| c.rem_euclid(o as i64) as u64).collect());
        }
        Ok(Self { orders, phi: reduced })
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn phi(&self) -> &[Vec<u64>] {
        &self.phi
    }

    pub fn dim(&self) -> usize {
        self.phi.len()
    }

    pub fn group_size(&self) -> usize {
        self.orders.iter().product::<u64>() as usize
    }

    /// Mixed-radix index, first coordinate most significant.
    pub fn index(&self, z: &[u64]) -> usize {
        z.iter().zip(&self.orders).fold(0usize, |acc, (&c, &o)| acc * o as usize + c as usize)
    }

    pub fn element(&self, mut idx: usize) -> Element {
        let mut z = vec![0; self.orders.len()];
        for (c, &o) in z.iter_mut().zip(&self.orders).rev() {
            *c = (idx % o as usize) as u64;
            idx /= o as usize;
        }
        z
    }

    fn add(&self, a: &[u64], b: &[u64]) -> Element {
        a.iter().zip(b).zip(&self.orders).map(|((x, y), o)| (x + y) % o).collect()
    }

    fn scale(&self, a: &[u64], k: u64) -> Element {
        a.iter().zip(&self.orders).map(|(&x, &o)| (x * (k % o)) % o).collect()
    }

    /// Order of a group element.
    pub fn element_order(&self, g: &[u64]) -> u64 {
        g.iter()
            .zip(&self.orders)
            .fold(1, |acc, (&c, &o)| lcm(acc, o / num_integer::gcd(c, o)))
    }

    /// Subgroup generated by the given elements.
    pub fn generated_subgroup(&self, gens: &[Element]) -> BTreeSet<Element> {
        let zero = vec![0; self.orders.len()];
        let mut seen: BTreeSet<Element> = BTreeSet::from([zero.clone()]);
        let mut stack = vec![zero];
        while let Some(z) = stack.pop() {
            for g in gens {
                let y = self.add(&z, g);
                if seen.insert(y.clone()) {
                    stack.push(y);
                }
            }
        }
        seen
    }

    /// Whether `φ(ℤᴰ)` is all of `U`.
    pub fn generates_group(&self) -> bool {
        self.generated_subgroup(&self.phi).len() == self.group_size()
    }

    /// Whether `⟨φ(e_1)⟩ + … + ⟨φ(e_D)⟩` is a direct sum.
    pub fn cyclic_images_independent(&self) -> bool {
        let sizes: u128 = self.phi.iter().map(|g| self.element_order(g) as u128).product();
        sizes == self.generated_subgroup(&self.phi).len() as u128
    }

    /// For `D = 2`: membership in `Z₀^{e₁} ∨ Z₀^{e₂}`, i.e.
    /// `⟨φ(e₁)⟩ ∩ ⟨φ(e₂)⟩ = {0}`.
    pub fn class_membership_z0join(&self) -> Result<bool> {
        if self.dim() != 2 {
            return Err(Error::Precondition(format!("expected a Z^2 rotation, got rank {}", self.dim())));
        }
        let a = self.generated_subgroup(&self.phi[..1]);
        let b = self.generated_subgroup(&self.phi[1..]);
        Ok(a.intersection(&b).count() == 1)
    }

    pub fn to_system<S: Scalar>(&self) -> FiniteZdSystem<S> {
        let n = self.group_size();
        let labels = (0..n)
            .map(|i| {
                let z = self.element(i);
                if z.len() == 1 {
                    z[0].to_string()
                } else {
                    let parts: Vec<String> = z.iter().map(u64::to_string).collect();
                    format!("({})", parts.join(","))
                }
            })
            .collect();
        let w = S::one() / S::from_count(n);
        let space = ExactProbabilitySpace::new(labels, vec![w; n]).expect("Haar measure is valid");
        let gens = self
            .phi
            .iter()
            .map(|g| {
                let images = (0..n).map(|i| self.index(&self.add(&self.element(i), g))).collect();
                Permutation::from_images(images).expect("translations are bijective")
            })
            .collect();
        FiniteZdSystem::new(space, gens).expect("translations commute and preserve Haar measure")
    }

    /// `Ũ = ⟨φ(e_1)⟩ ⊕ … ⊕ ⟨φ(e_D)⟩` rotated by unit vectors, with the
    /// summation map `(a_i) ↦ Σ a_i φ(e_i)` onto `U`.
    pub fn direct_sum_extension<S: Scalar>(&self) -> Result<(GroupRotationSystem, FactorMap<S>)> {
        if !self.generates_group() {
            return Err(Error::Precondition("φ(ℤᴰ) does not generate the group".into()));
        }
        let d = self.dim();
        let orders: Vec<u64> = self.phi.iter().map(|g| self.element_order(g)).collect();
        let phi = (0..d)
            .map(|i| (0..d).map(|j| i64::from(i == j)).collect())
            .collect();
        let ext = GroupRotationSystem::new(orders, phi)?;
        let map: Vec<usize> = (0..ext.group_size())
            .map(|i| {
                let a = ext.element(i);
                let z = a
                    .iter()
                    .zip(&self.phi)
                    .fold(vec![0; self.orders.len()], |acc, (&k, g)| self.add(&acc, &self.scale(g, k)));
                self.index(&z)
            })
            .collect();
        let f = FactorMap::new(ext.to_system(), self.to_system(), map)?;
        Ok((ext, f))
    }

    /// The `D = 2` extension into `Z₀^{e₁} ∨ Z₀^{e₂}`.
    pub fn rotation_extension<S: Scalar>(&self) -> Result<(GroupRotationSystem, FactorMap<S>)> {
        if self.dim() != 2 {
            return Err(Error::Precondition(format!("expected a Z^2 rotation, got rank {}", self.dim())));
        }
        self.direct_sum_extension()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn z2_diagonal_rotation_extends() {
        let rot = GroupRotationSystem::new(vec![2], vec![vec![1], vec![1]]).unwrap();
        assert!(!rot.class_membership_z0join().unwrap());
        let (ext, f) = rot.rotation_extension::<Rational>().unwrap();
        assert_eq!(ext.orders(), &[2, 2]);
        assert!(ext.class_membership_z0join().unwrap());
        // (x, y) ↦ x + y
        assert_eq!(f.map(), &[0, 1, 1, 0]);
    }

    #[test]
    fn klein_group_already_in_class() {
        let rot = GroupRotationSystem::new(vec![2, 2], vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert!(rot.class_membership_z0join().unwrap());
        let (ext, f) = rot.rotation_extension::<Rational>().unwrap();
        assert_eq!(ext.group_size(), 4);
        let mut m = f.map().to_vec();
        m.sort_unstable();
        assert_eq!(m, vec![0, 1, 2, 3]);
    }

    #[test]
    fn z6_splits_as_z3_plus_z2() {
        let rot = GroupRotationSystem::new(vec![6], vec![vec![2], vec![3]]).unwrap();
        assert!(rot.class_membership_z0join().unwrap());
        let (ext, f) = rot.rotation_extension::<Rational>().unwrap();
        assert_eq!(ext.orders(), &[3, 2]);
        for (i, &y) in f.map().iter().enumerate() {
            let a = ext.element(i);
            assert_eq!(y as u64, (2 * a[0] + 3 * a[1]) % 6);
        }
    }

    #[test]
    fn trivial_second_action() {
        let rot = GroupRotationSystem::new(vec![3], vec![vec![1], vec![0]]).unwrap();
        assert!(rot.class_membership_z0join().unwrap());
    }

    #[test]
    fn non_generating_rejected() {
        let rot = GroupRotationSystem::new(vec![4], vec![vec![2], vec![2]]).unwrap();
        assert!(matches!(rot.rotation_extension::<Rational>(), Err(Error::Precondition(_))));
        let rot3 = GroupRotationSystem::new(vec![4], vec![vec![1], vec![1], vec![1]]).unwrap();
        assert!(rot3.rotation_extension::<Rational>().is_err());
        assert!(rot3.direct_sum_extension::<Rational>().is_ok());
    }

    #[test]
    fn random_extensions_pass_membership() {
        for n1 in 1..7u64 {
            for n2 in 1..5u64 {
                for a in 0..(n1 * n2) as i64 {
                    for b in 0..(n1 * n2) as i64 {
                        let rot = GroupRotationSystem::new(vec![n1, n2], vec![vec![a % n1 as i64, a % n2 as i64], vec![b % n1 as i64, (b / 2) % n2 as i64]]).unwrap();
                        if let Ok((ext, _)) = rot.rotation_extension::<Rational>() {
                            assert!(ext.class_membership_z0join().unwrap());
                        }
                    }
                }
            }
        }
    }
}
