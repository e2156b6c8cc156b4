//! Seeded random finite ℤᴰ-systems.
//!
//! Points are grouped into orbits, each carrying a translation action of
//! `Z_a × Z_b`; every generator translates each orbit by its own vector, so
//! generators commute, and weights are constant on orbits, so they are
//! preserved. A random relabelling hides the block structure.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::measure::ExactProbabilitySpace;
use crate::perm::Permutation;
use crate::scalar::Scalar;
use crate::zd::system::FiniteZdSystem;

pub fn random_system<S: Scalar>(seed: u64, max_points: usize, dim: usize) -> FiniteZdSystem<S> {
    random_system_with(&mut ChaCha8Rng::seed_from_u64(seed), max_points, dim)
}

pub fn random_system_with<S: Scalar, R: Rng + ?Sized>(rng: &mut R, max_points: usize, dim: usize) -> FiniteZdSystem<S> {
    assert!(max_points >= 1 && dim >= 1);
    let n = rng.gen_range(1..=max_points);
    // orbit shapes (a, b) with a·b points
    let mut shapes: Vec<(usize, usize)> = Vec::new();
    let mut left = n;
    while left > 0 {
        let size = rng.gen_range(1..=left);
        let divisors: Vec<usize> = (1..=size).filter(|d| size % d == 0).collect();
        let a = *divisors.choose(rng).unwrap();
        shapes.push((a, size / a));
        left -= size;
    }
    let mut raw: Vec<i64> = shapes.iter().map(|_| rng.gen_range(1..=4)).collect();
    if shapes.len() > 1 && rng.gen_ratio(1, 6) {
        let k = rng.gen_range(0..shapes.len());
        raw[k] = 0;
    }
    let total: i64 = shapes.iter().zip(&raw).map(|(&(a, b), &c)| (a * b) as i64 * c).sum();

    let mut weights = Vec::with_capacity(n);
    let mut images: Vec<Vec<usize>> = vec![Vec::with_capacity(n); dim];
    let mut offset = 0;
    for (&(a, b), &c) in shapes.iter().zip(&raw) {
        let shifts: Vec<(usize, usize)> = (0..dim).map(|_| (rng.gen_range(0..a), rng.gen_range(0..b))).collect();
        for p in 0..a * b {
            let (x, y) = (p / b, p % b);
            weights.push(S::ratio(c, total));
            for (g, &(s, t)) in images.iter_mut().zip(&shifts) {
                g.push(offset + ((x + s) % a) * b + (y + t) % b);
            }
        }
        offset += a * b;
    }

    // relabel: point `x` moves to `sigma[x]`
    let mut sigma: Vec<usize> = (0..n).collect();
    sigma.shuffle(rng);
    let mut w2 = vec![S::zero(); n];
    for (x, w) in weights.into_iter().enumerate() {
        w2[sigma[x]] = w;
    }
    let gens = images
        .into_iter()
        .map(|im| {
            let mut g = vec![0; n];
            for x in 0..n {
                g[sigma[x]] = sigma[im[x]];
            }
            Permutation::from_images(g).expect("translation tables are bijective")
        })
        .collect();
    let space = ExactProbabilitySpace::with_weights(w2).expect("normalized weights");
    FiniteZdSystem::new(space, gens).expect("orbitwise translations commute")
}
