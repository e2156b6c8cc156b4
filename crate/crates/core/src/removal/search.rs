//! Exhaustive and seeded random searches for counterexamples to the removal
//! statement over couplings built from structured families.
//!
//! For fixed `(λ, Ψ)` the sets `⋂_j A_{i,j}` range exactly over the
//! `Φ_{⟨i⟩}`-measurable sets (take `k_i = 1`, `I_{i,1} = ⟨i⟩`), and the
//! conclusion depends only on these intersections, so the exhaustive mode
//! scans tuples of `Φ_{⟨i⟩}`-measurable sets.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fberg::furstenberg_joining;
use crate::measure::{relatively_independent_product, Coupling, ExactProbabilitySpace, Partition};
use crate::perm::{Permutation, UnionFind};
use crate::removal::instance::{
    check_structure_hypotheses, conclusion_for_sets, from_mask, psi_join, FamilyEntry, RemovalInstance,
};
use crate::removal::upset::{big_subsets, elements, UpSet};
use crate::scalar::{Rational, Scalar};
use crate::zd::random::random_system_with;
use crate::zd::{FiniteZdSystem, SubgroupSpec};

/// Families of couplings fed to the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CouplingKind {
    Diagonal,
    Product,
    /// Relatively independent self-products over a quotient, with each
    /// coordinate twisted by a weight-preserving permutation.
    Fiber,
    /// Furstenberg self-joinings of systems on the space.
    Furstenberg,
}

impl CouplingKind {
    pub const ALL: [CouplingKind; 4] = [Self::Diagonal, Self::Product, Self::Fiber, Self::Furstenberg];

    pub fn name(self) -> &'static str {
        match self {
            Self::Diagonal => "diagonal",
            Self::Product => "product",
            Self::Fiber => "fiber",
            Self::Furstenberg => "furstenberg",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone)]
pub struct ExhaustiveConfig {
    pub points: usize,
    pub d: usize,
    pub kinds: Vec<CouplingKind>,
    /// Maximum number of `(λ, Ψ)` candidates to examine.
    pub budget: u64,
}

#[derive(Debug, Clone)]
pub struct RandomConfig {
    pub max_points: usize,
    pub d: usize,
    pub kinds: Vec<CouplingKind>,
    /// Number of hypothesis-satisfying instances to test.
    pub count: u64,
    pub seed: u64,
    /// Give up after this many candidates; defaults to `50 * count` when zero.
    pub max_attempts: u64,
}

#[derive(Debug, Clone)]
pub enum SearchConfig {
    Exhaustive(ExhaustiveConfig),
    Random(RandomConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub counterexample: Option<RemovalInstance<Rational>>,
    /// Candidates satisfying [i]–[iii].
    pub valid_instances: u64,
    /// Candidates excluded because some hypothesis failed.
    pub rejected: u64,
    pub set_tuples_checked: u64,
    /// False when the budget or attempt cap cut the search short.
    pub exhaustive: bool,
}

pub fn search_counterexample(config: &SearchConfig) -> Result<SearchOutcome> {
    match config {
        SearchConfig::Exhaustive(c) => exhaustive_search(c),
        SearchConfig::Random(c) => random_search(c),
    }
}

fn q(n: i64, d: i64) -> Rational {
    <Rational as Scalar>::ratio(n, d)
}

/// Weight vectors `c / Σc` with `c ∈ {0,1,2}ⁿ \ {0}`, deduplicated.
fn weight_grid(n: usize) -> Vec<Vec<Rational>> {
    let mut out = BTreeSet::new();
    for code in 1..3usize.pow(n as u32) {
        let c: Vec<i64> = (0..n).map(|k| (code / 3usize.pow(k as u32) % 3) as i64).collect();
        let s: i64 = c.iter().sum();
        out.insert(c.iter().map(|&x| q(x, s)).collect::<Vec<_>>());
    }
    out.into_iter().collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut v = p.clone();
            v.insert(pos, n - 1);
            out.push(v);
        }
    }
    out.sort();
    out
}

fn weight_preserving(space: &ExactProbabilitySpace<Rational>) -> Vec<Permutation> {
    permutations(space.len())
        .into_iter()
        .filter(|p| (0..p.len()).all(|x| space.weight(p[x]) == space.weight(x)))
        .map(|p| Permutation::from_images(p).expect("generated permutations are valid"))
        .collect()
}

fn fiber_coupling(space: &ExactProbabilitySpace<Rational>, p: &Partition, twists: &[&Permutation]) -> Coupling<Rational> {
    let maps: Vec<Vec<usize>> = twists.iter().map(|s| s.images().iter().map(|&y| p.block_of(y)).collect()).collect();
    relatively_independent_product(&vec![space.clone(); twists.len()], &maps).expect("twists preserve the quotient measure")
}

type MassKey = Vec<(Vec<usize>, Rational)>;

fn key(c: &Coupling<Rational>) -> MassKey {
    c.mass().iter().map(|(t, m)| (t.clone(), m.clone())).collect()
}

/// All couplings of the requested kinds on `space`, deduplicated, in a fixed order.
fn exhaustive_couplings(space: &ExactProbabilitySpace<Rational>, d: usize, kinds: &[CouplingKind]) -> Vec<Coupling<Rational>> {
    let mut seen: BTreeSet<MassKey> = BTreeSet::new();
    let mut out = Vec::new();
    let mut push = |c: Coupling<Rational>| {
        if seen.insert(key(&c)) {
            out.push(c);
        }
    };
    let wp = weight_preserving(space);
    for &kind in kinds {
        match kind {
            CouplingKind::Diagonal => push(Coupling::diagonal(space, d)),
            CouplingKind::Product => push(Coupling::product(&vec![space.clone(); d])),
            CouplingKind::Fiber => {
                let id = Permutation::identity(space.len());
                for p in Partition::all(space.len()) {
                    for_each_tuple(wp.len(), d - 1, &mut |idx| {
                        let mut twists = vec![&id];
                        twists.extend(idx.iter().map(|&k| &wp[k]));
                        push(fiber_coupling(space, &p, &twists));
                    });
                }
            }
            CouplingKind::Furstenberg => {
                for_each_tuple(wp.len(), d, &mut |idx| {
                    let gens: Vec<Permutation> = idx.iter().map(|&k| wp[k].clone()).collect();
                    if let Ok(sys) = FiniteZdSystem::new(space.clone(), gens) {
                        let all: Vec<usize> = (0..d).collect();
                        push(furstenberg_joining(&sys, &all).expect("valid index set").coupling().clone());
                    }
                });
            }
        }
    }
    out
}

fn for_each_tuple(base: usize, len: usize, f: &mut impl FnMut(&[usize])) {
    if base == 0 && len > 0 {
        return;
    }
    let mut idx = vec![0usize; len];
    loop {
        f(&idx);
        let mut k = len;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < base {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Star families `I_{i,1} = ⟨i⟩` with the given coordinate sets.
fn star_instance(
    space: &ExactProbabilitySpace<Rational>,
    lambda: &Coupling<Rational>,
    psi: &BTreeMap<u32, Partition>,
    sets: &[Vec<bool>],
) -> Result<RemovalInstance<Rational>> {
    let d = lambda.arity();
    let families = (0..d)
        .map(|i| {
            vec![FamilyEntry {
                upset: UpSet::star(d, i),
                set: from_mask(&sets[i]),
            }]
        })
        .collect();
    RemovalInstance::new(space.clone(), lambda.clone(), psi.clone(), families)
}

/// Scans every tuple of `Φ_{⟨i⟩}`-measurable sets; returns the first violation.
fn scan_set_tuples(
    space: &ExactProbabilitySpace<Rational>,
    lambda: &Coupling<Rational>,
    psi: &BTreeMap<u32, Partition>,
    checked: &mut u64,
) -> Result<Option<RemovalInstance<Rational>>> {
    let d = lambda.arity();
    let n = space.len();
    let choices: Vec<Vec<Vec<bool>>> = (0..d)
        .map(|i| psi_join(psi, &UpSet::star(d, i), n).measurable_sets())
        .collect();
    let sizes: Vec<usize> = choices.iter().map(Vec::len).collect();
    let mut idx = vec![0usize; d];
    loop {
        let sets: Vec<Vec<bool>> = idx.iter().zip(&choices).map(|(&k, c)| c[k].clone()).collect();
        *checked += 1;
        if !conclusion_for_sets(space, lambda, &sets).holds {
            return star_instance(space, lambda, psi, &sets).map(Some);
        }
        let mut k = d;
        loop {
            if k == 0 {
                return Ok(None);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < sizes[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Partitions of the space compatible with [ii] for `e` under `λ`.
fn compatible_partitions(lambda: &Coupling<Rational>, e: u32, all: &[Partition]) -> Vec<Partition> {
    let el = elements(e);
    all.iter()
        .filter(|p| el[1..].iter().all(|&j| lambda.coordinates_agree(el[0], j, p)))
        .cloned()
        .collect()
}

fn exhaustive_search(c: &ExhaustiveConfig) -> Result<SearchOutcome> {
    if !(1..=4).contains(&c.points) || !(2..=3).contains(&c.d) {
        return Err(Error::Precondition(format!(
            "exhaustive mode needs 1 <= |X| <= 4 and 2 <= d <= 3, got |X| = {}, d = {}",
            c.points, c.d
        )));
    }
    let mut out = SearchOutcome {
        counterexample: None,
        valid_instances: 0,
        rejected: 0,
        set_tuples_checked: 0,
        exhaustive: true,
    };
    let masks = big_subsets(c.d);
    let parts = Partition::all(c.points);
    let mut examined = 0u64;
    for w in weight_grid(c.points) {
        let space = ExactProbabilitySpace::with_weights(w)?;
        for lambda in exhaustive_couplings(&space, c.d, &c.kinds) {
            let options: Vec<Vec<Partition>> = masks.iter().map(|&e| compatible_partitions(&lambda, e, &parts)).collect();
            let sizes: Vec<usize> = options.iter().map(Vec::len).collect();
            if sizes.contains(&0) {
                continue;
            }
            let mut idx = vec![0usize; masks.len()];
            loop {
                examined += 1;
                if examined > c.budget {
                    out.exhaustive = false;
                    return Ok(out);
                }
                let psi: BTreeMap<u32, Partition> = masks.iter().zip(&idx).zip(&options).map(|((&e, &k), o)| (e, o[k].clone())).collect();
                let h = check_structure_hypotheses(&space, &lambda, &psi)?;
                if h.all() {
                    out.valid_instances += 1;
                    if let Some(inst) = scan_set_tuples(&space, &lambda, &psi, &mut out.set_tuples_checked)? {
                        out.counterexample = Some(inst);
                        return Ok(out);
                    }
                } else {
                    out.rejected += 1;
                }
                let mut k = idx.len();
                let done = loop {
                    if k == 0 {
                        break true;
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < sizes[k] {
                        break false;
                    }
                    idx[k] = 0;
                };
                if done {
                    break;
                }
            }
        }
    }
    Ok(out)
}

/// Finest partition compatible with [ii] for `e`: components of the graph
/// joining `t_i` and `t_j` for `i, j ∈ e` over the atoms.
pub fn maximal_compatible(lambda: &Coupling<Rational>, n: usize, e: u32) -> Partition {
    let el = elements(e);
    let mut uf = UnionFind::new(n);
    for t in lambda.mass().keys() {
        for &j in &el[1..] {
            uf.union(t[el[0]], t[j]);
        }
    }
    Partition::from_labels(&(0..n).map(|x| uf.find(x)).collect::<Vec<_>>())
}

/// Merges blocks of `p` that meet a common block of `r`.
fn coarsen(p: &Partition, r: &Partition) -> Partition {
    let n = p.len();
    let mut uf = UnionFind::new(n);
    for b in p.blocks().iter().chain(r.blocks()) {
        for &x in &b[1..] {
            uf.union(b[0], x);
        }
    }
    Partition::from_labels(&(0..n).map(|x| uf.find(x)).collect::<Vec<_>>())
}

fn random_partition<R: Rng>(rng: &mut R, n: usize) -> Partition {
    let k = rng.gen_range(1..=n.max(1));
    Partition::from_labels(&(0..n).map(|_| rng.gen_range(0..k)).collect::<Vec<_>>())
}

fn random_space<R: Rng>(rng: &mut R, max_points: usize) -> ExactProbabilitySpace<Rational> {
    let n = rng.gen_range(2.min(max_points)..=max_points);
    loop {
        let c: Vec<i64> = (0..n).map(|_| if rng.gen_ratio(1, 6) { 0 } else { rng.gen_range(1..=3) }).collect();
        let s: i64 = c.iter().sum();
        if s > 0 {
            return ExactProbabilitySpace::with_weights(c.iter().map(|&x| q(x, s)).collect()).expect("normalized");
        }
    }
}

fn random_weight_preserving<R: Rng>(rng: &mut R, space: &ExactProbabilitySpace<Rational>) -> Permutation {
    // shuffle inside each weight class
    let n = space.len();
    let classes = Partition::from_labels(space.weights());
    let mut images: Vec<usize> = (0..n).collect();
    for b in classes.blocks() {
        let mut shuffled = b.clone();
        shuffled.shuffle(rng);
        for (&x, &y) in b.iter().zip(&shuffled) {
            images[x] = y;
        }
    }
    Permutation::from_images(images).expect("class shuffles are bijective")
}

/// A random `(μ, λ, Ψ)` from the requested families; `Ψ` is [i]- and
/// [ii]-compatible by construction, [iii] is left to the caller.
pub fn random_structure<R: Rng>(
    rng: &mut R,
    max_points: usize,
    d: usize,
    kinds: &[CouplingKind],
) -> (ExactProbabilitySpace<Rational>, Coupling<Rational>, BTreeMap<u32, Partition>) {
    let kind = *kinds.choose(rng).expect("at least one coupling kind");
    let masks = big_subsets(d);
    if kind == CouplingKind::Furstenberg {
        let sys: FiniteZdSystem<Rational> = random_system_with(rng, max_points, d);
        let all: Vec<usize> = (0..d).collect();
        let lambda = furstenberg_joining(&sys, &all).expect("valid index set").coupling().clone();
        if rng.gen_bool(0.5) {
            let psi = masks
                .iter()
                .map(|&e| (e, sys.invariant_factor(&SubgroupSpec::differences(d, &elements(e)))))
                .collect();
            return (sys.space().clone(), lambda, psi);
        }
        let psi = random_psi(rng, &lambda, sys.len(), &masks);
        return (sys.space().clone(), lambda, psi);
    }
    let space = random_space(rng, max_points);
    let n = space.len();
    let lambda = match kind {
        CouplingKind::Diagonal => Coupling::diagonal(&space, d),
        CouplingKind::Product => Coupling::product(&vec![space.clone(); d]),
        _ => {
            let one = |rng: &mut R| {
                let p = random_partition(rng, n);
                let mut twists = vec![Permutation::identity(n)];
                twists.extend((1..d).map(|_| random_weight_preserving(rng, &space)));
                fiber_coupling(&space, &p, &twists.iter().collect::<Vec<_>>())
            };
            let a = one(rng);
            if rng.gen_ratio(1, 4) {
                let b = one(rng);
                let half = q(1, 2);
                let mixed = a.mass().iter().chain(b.mass()).map(|(t, m)| (t.clone(), m.clone() * half.clone()));
                Coupling::self_coupling(&space, d, mixed).expect("mixtures of couplings are couplings")
            } else {
                a
            }
        }
    };
    let psi = random_psi(rng, &lambda, n, &masks);
    (space, lambda, psi)
}

fn random_psi<R: Rng>(rng: &mut R, lambda: &Coupling<Rational>, n: usize, masks: &[u32]) -> BTreeMap<u32, Partition> {
    let maximal: BTreeMap<u32, Partition> = masks.iter().map(|&e| (e, maximal_compatible(lambda, n, e))).collect();
    match rng.gen_range(0..3) {
        0 => maximal,
        1 => {
            let r = random_partition(rng, n);
            maximal.into_iter().map(|(e, p)| (e, coarsen(&p, &r))).collect()
        }
        _ => {
            let d = lambda.arity();
            let t = rng.gen_range(2..=d) as u32;
            maximal
                .into_iter()
                .map(|(e, p)| if e.count_ones() >= t { (e, Partition::trivial(n)) } else { (e, p) })
                .collect()
        }
    }
}

/// Random families `(I_{i,j}, A_{i,j})` with `[d] ∈ I_{i,j} ⊆ ⟨i⟩`.
fn random_families<R: Rng>(rng: &mut R, d: usize, psi: &BTreeMap<u32, Partition>, n: usize) -> Vec<Vec<FamilyEntry>> {
    (0..d)
        .map(|i| {
            let star: Vec<u32> = UpSet::star(d, i).members().iter().copied().collect();
            (0..rng.gen_range(1..=2))
                .map(|_| {
                    let gens: Vec<u32> = star.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
                    let gens = if gens.is_empty() { vec![*star.choose(rng).expect("star is nonempty")] } else { gens };
                    let upset = UpSet::generate(d, &gens).expect("members of the star are valid");
                    let phi = psi_join(psi, &upset, n);
                    let chosen: Vec<bool> = (0..phi.num_blocks()).map(|_| rng.gen_bool(0.6)).collect();
                    let set = (0..n).filter(|&x| chosen[phi.block_of(x)]).collect();
                    FamilyEntry { upset, set }
                })
                .collect()
        })
        .collect()
}

fn random_search(c: &RandomConfig) -> Result<SearchOutcome> {
    if c.max_points == 0 || c.max_points > 6 || !(2..=4).contains(&c.d) || c.kinds.is_empty() {
        return Err(Error::Precondition(format!(
            "random mode needs 1 <= |X| <= 6, 2 <= d <= 4 and a coupling family, got |X| <= {}, d = {}",
            c.max_points, c.d
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let cap = if c.max_attempts == 0 { c.count.saturating_mul(50) } else { c.max_attempts };
    let mut out = SearchOutcome {
        counterexample: None,
        valid_instances: 0,
        rejected: 0,
        set_tuples_checked: 0,
        exhaustive: true,
    };
    let mut attempts = 0;
    while out.valid_instances < c.count {
        if attempts >= cap {
            out.exhaustive = false;
            break;
        }
        attempts += 1;
        let (space, lambda, psi) = random_structure(&mut rng, c.max_points, c.d, &c.kinds);
        if !check_structure_hypotheses(&space, &lambda, &psi)?.all() {
            out.rejected += 1;
            continue;
        }
        out.valid_instances += 1;
        let families = random_families(&mut rng, c.d, &psi, space.len());
        let inst = RemovalInstance::new(space.clone(), lambda.clone(), psi.clone(), families)?;
        out.set_tuples_checked += 1;
        if !conclusion_for_sets(&space, &lambda, &inst.coordinate_sets()).holds {
            out.counterexample = Some(inst);
            return Ok(out);
        }
        let tuple_count: usize = (0..c.d)
            .map(|i| 1usize << psi_join(&psi, &UpSet::star(c.d, i), space.len()).num_blocks().min(20))
            .product();
        if tuple_count <= 4096 {
            if let Some(inst) = scan_set_tuples(&space, &lambda, &psi, &mut out.set_tuples_checked)? {
                out.counterexample = Some(inst);
                return Ok(out);
            }
        }
    }
    Ok(out)
}
