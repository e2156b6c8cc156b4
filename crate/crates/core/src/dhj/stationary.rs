//! Finite truncations of laws on `K^{[k]^*}`: coordinates are the words of
//! length `1..=D`, ordered by length and then lexicographically.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::dhj::correspondence::{CorrespondenceMeasure, PointEvents};
use crate::dhj::word::{check_alphabet, subspaces_of_len, CombinatorialSubspace, Word};
use crate::error::{Error, Result};
use crate::fberg::{upsets_for_predicates, UpsetPairFailure};
use crate::measure::{relative_independence, Coupling, ExactProbabilitySpace, IndependenceReport, Partition};
use crate::perm::UnionFind;
use crate::removal::upset::{big_subsets, elements};
use crate::scalar::Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryLawTruncation {
    k: usize,
    depth: usize,
    values: usize,
    weights: BTreeMap<Vec<usize>, Rational>,
}

/// Number of words of length `1..=depth`.
pub fn coordinate_count(k: usize, depth: usize) -> usize {
    (1..=depth).map(|l| k.pow(l as u32)).sum()
}

impl StationaryLawTruncation {
    pub fn new(k: usize, depth: usize, values: usize, weights: BTreeMap<Vec<usize>, Rational>) -> Result<Self> {
        check_alphabet(k)?;
        if depth == 0 || values == 0 {
            return Err(Error::Precondition("depth and value count must be positive".into()));
        }
        let width = coordinate_count(k, depth);
        for c in weights.keys() {
            if c.len() != width {
                return Err(Error::DimensionMismatch {
                    what: "configuration length",
                    expected: width,
                    found: c.len(),
                });
            }
            if let Some(&x) = c.iter().find(|&&x| x >= values) {
                return Err(Error::InvalidMeasure(format!("value {x} outside K of size {values}")));
            }
        }
        if weights.values().any(|m| m <= &Rational::zero()) {
            return Err(Error::InvalidMeasure("masses must be positive".into()));
        }
        let total: Rational = weights.values().cloned().sum();
        if !total.is_one() {
            return Err(Error::InvalidMeasure(format!("total mass {total} is not 1")));
        }
        Ok(Self {
            k,
            depth,
            values,
            weights,
        })
    }

    /// The product law `ν^{⊗W}`.
    pub fn iid(k: usize, depth: usize, nu: &ExactProbabilitySpace<Rational>) -> Result<Self> {
        check_alphabet(k)?;
        let width = coordinate_count(k, depth);
        let support = nu.support();
        let count = (support.len() as u128).checked_pow(width as u32);
        if count.is_none_or(|c| c > 1 << 20) {
            return Err(Error::OverBudget {
                needed: count.unwrap_or(u128::MAX),
                budget: 1 << 20,
            });
        }
        let mut weights = BTreeMap::new();
        let mut pick = vec![0usize; width];
        loop {
            let config: Vec<usize> = pick.iter().map(|&p| support[p]).collect();
            let m = config.iter().fold(Rational::one(), |acc, &x| acc * nu.weight(x).clone());
            weights.insert(config, m);
            let mut i = 0;
            while i < width {
                pick[i] += 1;
                if pick[i] < support.len() {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
            if i == width {
                break;
            }
        }
        Self::new(k, depth, nu.len(), weights)
    }

    /// Mass `ν(c)` on the constant configuration `c`.
    pub fn constant_mixture(k: usize, depth: usize, nu: &ExactProbabilitySpace<Rational>) -> Result<Self> {
        let width = coordinate_count(k, depth);
        let weights = nu.support().into_iter().map(|c| (vec![c; width], nu.weight(c).clone())).collect();
        Self::new(k, depth, nu.len(), weights)
    }

    /// Point mass on the configuration `w ↦ f(w)`.
    pub fn deterministic(k: usize, depth: usize, values: usize, f: impl Fn(&Word) -> usize) -> Result<Self> {
        let config: Vec<usize> = coordinates(k, depth).iter().map(f).collect();
        Self::new(k, depth, values, BTreeMap::from([(config, Rational::one())]))
    }

    /// A depth-`L` correspondence measure read as a depth-1 law on `K = {0, 1}`;
    /// needs `L = 1`.
    pub fn from_correspondence(mu: &CorrespondenceMeasure) -> Result<Self> {
        if mu.depth() != 1 {
            return Err(Error::Precondition("only depth-1 correspondence measures embed directly".into()));
        }
        let weights = mu.mass().iter().map(|(c, m)| (c.iter().map(|&b| b as usize).collect(), m.clone())).collect();
        Self::new(mu.alphabet(), 1, 2, weights)
    }

    pub fn alphabet(&self) -> usize {
        self.k
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn values(&self) -> usize {
        self.values
    }

    pub fn weights(&self) -> &BTreeMap<Vec<usize>, Rational> {
        &self.weights
    }

    /// Position of `w` among the coordinates.
    pub fn coordinate(&self, w: &Word) -> Result<usize> {
        if w.is_empty() || w.len() > self.depth || w.letters().iter().any(|&l| l as usize > self.k) {
            return Err(Error::Precondition(format!("word {w} is not a coordinate of the truncation")));
        }
        Ok(coordinate_count(self.k, w.len() - 1) + w.index(self.k))
    }

    /// `T_φ#μ` on `K^{[k]^n}`, parameters in lexicographic order.
    pub fn pullback(&self, phi: &CombinatorialSubspace) -> Result<BTreeMap<Vec<usize>, Rational>> {
        if phi.alphabet() != self.k {
            return Err(Error::Precondition("subspace alphabet differs from the law's".into()));
        }
        let idx = phi.images().iter().map(|w| self.coordinate(w)).collect::<Result<Vec<_>>>()?;
        let mut out: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
        for (c, m) in &self.weights {
            let key: Vec<usize> = idx.iter().map(|&i| c[i]).collect();
            let e = out.entry(key).or_insert_with(Rational::zero);
            *e = e.clone() + m.clone();
        }
        Ok(out)
    }

    /// The line marginal along a particular line.
    pub fn line_marginal_along(&self, line: &CombinatorialSubspace) -> Result<Coupling<Rational>> {
        if line.dim() != 1 {
            return Err(Error::Precondition("expected a line".into()));
        }
        let point = self.point_marginal_at(&line.images()[0])?;
        Coupling::self_coupling(&point, self.k, self.pullback(line)?)
    }

    fn point_marginal_at(&self, w: &Word) -> Result<ExactProbabilitySpace<Rational>> {
        let i = self.coordinate(w)?;
        let mut weights = vec![Rational::zero(); self.values];
        for (c, m) in &self.weights {
            weights[c[i]] = weights[c[i]].clone() + m.clone();
        }
        ExactProbabilitySpace::with_weights(weights)
    }
}

impl PointEvents for StationaryLawTruncation {
    /// `μ{x_w = 1}` reading value `1` as the event.
    fn point_event_masses(&self) -> Vec<Rational> {
        let width = coordinate_count(self.k, self.depth);
        (0..width)
            .map(|i| self.weights.iter().filter(|(c, _)| c[i] == 1).map(|(_, m)| m.clone()).sum())
            .collect()
    }
}

/// Words of length `1..=depth` in coordinate order.
pub fn coordinates(k: usize, depth: usize) -> Vec<Word> {
    (1..=depth).flat_map(|l| Word::all(k, l)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationarityReport {
    pub holds: bool,
    /// Two subspaces of equal dimension whose pullback laws differ.
    pub witness: Option<(CombinatorialSubspace, CombinatorialSubspace)>,
    pub subspaces_checked: usize,
}

/// Compares `T_φ#μ` over every subspace `φ` of dimension `1..=m` with images
/// of length at most `D`, then over every single word (dimension 0).
pub fn strong_stationarity_check(law: &StationaryLawTruncation, dim_cap: usize) -> Result<StationarityReport> {
    if dim_cap > law.depth {
        return Err(Error::Precondition(format!("dimension cap {dim_cap} exceeds depth {}", law.depth)));
    }
    let mut checked = 0;
    for n in (1..=dim_cap).chain([0]) {
        let lo = n.max(1);
        let mut first: Option<(CombinatorialSubspace, BTreeMap<Vec<usize>, Rational>)> = None;
        for len in lo..=law.depth {
            for phi in subspaces_of_len(law.k, n, len) {
                let img = law.pullback(&phi)?;
                checked += 1;
                match &first {
                    None => first = Some((phi, img)),
                    Some((f, reference)) => {
                        if *reference != img {
                            return Ok(StationarityReport {
                                holds: false,
                                witness: Some((f.clone(), phi)),
                                subspaces_checked: checked,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(StationarityReport {
        holds: true,
        witness: None,
        subspaces_checked: checked,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    pub point: ExactProbabilitySpace<Rational>,
    /// Coordinate `i` is the line point `φ(i + 1)`.
    pub line: Coupling<Rational>,
}

/// Point and line marginals, after checking stationarity in dimensions 0 and 1.
pub fn marginals(law: &StationaryLawTruncation) -> Result<Marginals> {
    let r = strong_stationarity_check(law, 1)?;
    if let Some((a, b)) = r.witness {
        return Err(Error::NotStationary(format!(
            "pullbacks along {} and {} differ",
            a.template(),
            b.template()
        )));
    }
    let one = Word::new(law.k, vec![1])?;
    let point = law.point_marginal_at(&one)?;
    let line = law.line_marginal_along(&CombinatorialSubspace::line(law.k, vec![1], one)?)?;
    Ok(Marginals { point, line })
}

fn letter_coords(k: usize, e: &[u8]) -> Result<Vec<usize>> {
    let set: BTreeSet<u8> = e.iter().copied().collect();
    if let Some(&l) = set.iter().find(|&&l| l == 0 || l as usize > k) {
        return Err(Error::Precondition(format!("letter {l} outside [{k}]")));
    }
    Ok(set.into_iter().map(|l| l as usize - 1).collect())
}

/// `Φ_e` on `K`: components of the graph joining `x` and `y` whenever some
/// line atom has `x` at coordinate `i` and `y` at `j`, `i, j ∈ e`. For small
/// `K` the description by `μ^line(π_i⁻¹A Δ π_j⁻¹A) = 0` is checked against it.
pub fn insensitive_algebra(m: &Marginals, e: &[u8]) -> Result<Partition> {
    let k = m.line.arity();
    let coords = letter_coords(k, e)?;
    let n = m.point.len();
    let mut uf = UnionFind::new(n);
    for t in m.line.mass().keys() {
        for w in coords.windows(2) {
            uf.union(t[w[0]], t[w[1]]);
        }
    }
    let p = Partition::from_labels(&(0..n).map(|x| uf.find(x)).collect::<Vec<_>>());
    if n <= 12 {
        for bits in 0u32..1 << n {
            let a: Vec<bool> = (0..n).map(|x| bits >> x & 1 == 1).collect();
            let insensitive = m.line.mass().keys().all(|t| coords.iter().all(|&i| a[t[i]] == a[t[coords[0]]]));
            if insensitive != p.measurable_on(&a, |_| true) {
                return Err(Error::Invariant(format!("characterisations of Φ_e disagree on set {bits:#b}")));
            }
        }
    }
    Ok(p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dhj2Report {
    pub holds: bool,
    /// Sets `A_1, …, A_k` with `μ^line(∏A_i) = 0 < μ^pt(⋂A_i)`.
    pub witness: Option<Vec<Vec<bool>>>,
    pub tuples_checked: usize,
    /// Whether every measurable tuple was tried rather than block tuples only.
    pub all_measurable: bool,
}

/// `μ^line(∏A_i) = 0 ⇒ μ^pt(⋂A_i) = 0` over tuples with `A_i` measurable for
/// `family[i]`: all measurable tuples when there are at most 4096, block
/// tuples otherwise.
pub fn dhj2_implication(m: &Marginals, family: &[Partition]) -> Result<Dhj2Report> {
    let k = m.line.arity();
    if family.len() != k {
        return Err(Error::DimensionMismatch {
            what: "partition family vs alphabet",
            expected: k,
            found: family.len(),
        });
    }
    let n = m.point.len();
    let measurable: u128 = family.iter().map(|p| 1u128 << p.num_blocks().min(64)).product::<u128>();
    let all_measurable = measurable <= 4096;
    let options: Vec<Vec<Vec<bool>>> = family
        .iter()
        .map(|p| {
            if all_measurable {
                p.measurable_sets()
            } else {
                (0..p.num_blocks()).map(|b| (0..n).map(|x| p.block_of(x) == b).collect()).collect()
            }
        })
        .collect();
    let mut pick = vec![0usize; k];
    let mut checked = 0;
    loop {
        let sets: Vec<Vec<bool>> = (0..k).map(|i| options[i][pick[i]].clone()).collect();
        checked += 1;
        if m.line.product_mass(&sets).is_zero() {
            let meet: Vec<bool> = (0..n).map(|x| sets.iter().all(|s| s[x])).collect();
            if !m.point.measure(&meet).is_zero() {
                return Ok(Dhj2Report {
                    holds: false,
                    witness: Some(sets),
                    tuples_checked: checked,
                    all_measurable,
                });
            }
        }
        let mut i = 0;
        while i < k {
            pick[i] += 1;
            if pick[i] < options[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
    }
    Ok(Dhj2Report {
        holds: true,
        witness: None,
        tuples_checked: checked,
        all_measurable,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineStructureReport {
    pub marginals: Marginals,
    /// `Φ_e` for `|e| ≥ 2`, keyed by coordinate bitmask (bit `i` is letter `i + 1`).
    pub insensitive: BTreeMap<u32, Partition>,
    /// Coordinate pullbacks relatively independent over `π_i⁻¹(⋁_{j≠i} Φ_{ij})`.
    pub line1: IndependenceReport<Rational>,
    /// `Φ†_I` and `Φ†_{I'}` relatively independent over `Φ†_{I∩I'}`.
    pub line2_holds: bool,
    pub line2_failure: Option<UpsetPairFailure<Rational>>,
    pub upset_pairs_checked: usize,
    pub all_upsets: bool,
    /// The implication over the family `Φ_{⟨i⟩}`.
    pub dhj2: Dhj2Report,
}

pub fn line_structure_predicates(law: &StationaryLawTruncation) -> Result<LineStructureReport> {
    let k = law.k;
    if k < 2 {
        return Err(Error::Precondition("line predicates need k >= 2".into()));
    }
    let m = marginals(law)?;
    let n = m.point.len();
    let lam = &m.line;
    let insensitive: BTreeMap<u32, Partition> = big_subsets(k)
        .into_iter()
        .map(|e| {
            let letters: Vec<u8> = elements(e).iter().map(|&i| i as u8 + 1).collect();
            insensitive_algebra(&m, &letters).map(|p| (e, p))
        })
        .collect::<Result<_>>()?;

    let pair = |i: usize, j: usize| &insensitive[&((1u32 << i) | (1u32 << j))];
    let mut factors = Vec::with_capacity(k);
    let mut subs = Vec::with_capacity(k);
    for i in 0..k {
        let xi = Partition::join_all(n, (0..k).filter(|&j| j != i).map(|j| pair(i, j)));
        factors.push(lam.pullback(i, &Partition::singletons(n)));
        subs.push(lam.pullback(i, &xi));
    }
    let line1 = relative_independence(&factors, &subs, lam)?;

    let lifted: BTreeMap<u32, Partition> =
        insensitive.iter().map(|(&e, p)| (e, lam.pullback(e.trailing_zeros() as usize, p))).collect();
    let atoms = lam.num_atoms();
    let join = |u: &crate::removal::UpSet| Partition::join_all(atoms, u.members().iter().map(|e| &lifted[e]));
    let (upsets, all_upsets) = upsets_for_predicates(k);
    let joined: Vec<Partition> = upsets.iter().map(join).collect();
    let mut checked = 0;
    let mut failure = None;
    'pairs: for a in 0..upsets.len() {
        for b in a + 1..upsets.len() {
            let meet = join(&upsets[a].intersect(&upsets[b]));
            let r = relative_independence(&[joined[a].clone(), joined[b].clone()], &[meet.clone(), meet], lam)?;
            checked += 1;
            if !r.holds {
                failure = Some(UpsetPairFailure {
                    first: upsets[a].clone(),
                    second: upsets[b].clone(),
                    witness: r.witness,
                });
                break 'pairs;
            }
        }
    }

    let family: Vec<Partition> = (0..k)
        .map(|i| Partition::join_all(n, insensitive.iter().filter(|(e, _)| *e >> i & 1 == 1).map(|(_, p)| p)))
        .collect();
    let dhj2 = dhj2_implication(&m, &family)?;
    Ok(LineStructureReport {
        marginals: m,
        insensitive,
        line1,
        line2_holds: failure.is_none(),
        line2_failure: failure,
        upset_pairs_checked: checked,
        all_upsets,
        dhj2,
    })
}
