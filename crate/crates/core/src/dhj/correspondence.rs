use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::dhj::word::{check_alphabet, CombinatorialSubspace, Word};
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// A measure on `{0,1}^{[k]^L}`; configurations are indexed by the words of
/// `[k]^L` in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrespondenceMeasure {
    k: usize,
    l: usize,
    mass: BTreeMap<Vec<bool>, Rational>,
}

/// Processes with a `{x_w = 1}` event for each coordinate.
pub trait PointEvents {
    /// `μ{x_w = 1}` for every coordinate `w`.
    fn point_event_masses(&self) -> Vec<Rational>;
}

impl CorrespondenceMeasure {
    pub fn new(k: usize, l: usize, mass: BTreeMap<Vec<bool>, Rational>) -> Result<Self> {
        check_alphabet(k)?;
        let width = k.pow(l as u32);
        if let Some(c) = mass.keys().find(|c| c.len() != width) {
            return Err(Error::DimensionMismatch {
                what: "configuration length",
                expected: width,
                found: c.len(),
            });
        }
        if mass.values().any(|m| m <= &Rational::zero()) {
            return Err(Error::InvalidMeasure("masses must be positive".into()));
        }
        let total: Rational = mass.values().cloned().sum();
        if !total.is_one() {
            return Err(Error::InvalidMeasure(format!("total mass {total} is not 1")));
        }
        Ok(Self { k, l, mass })
    }

    pub fn alphabet(&self) -> usize {
        self.k
    }

    pub fn depth(&self) -> usize {
        self.l
    }

    pub fn mass(&self) -> &BTreeMap<Vec<bool>, Rational> {
        &self.mass
    }

    pub fn mass_of(&self, config: &[bool]) -> Rational {
        self.mass.get(config).cloned().unwrap_or_else(Rational::zero)
    }

    /// `μ{x_w = 1 for all w in words}`.
    pub fn all_ones(&self, words: &[Word]) -> Result<Rational> {
        let idx = words
            .iter()
            .map(|w| {
                if w.len() != self.l || w.letters().iter().any(|&c| c as usize > self.k) {
                    Err(Error::Precondition(format!("word {w} is not in [{}]^{}", self.k, self.l)))
                } else {
                    Ok(w.index(self.k))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.mass.iter().filter(|(c, _)| idx.iter().all(|&i| c[i])).map(|(_, m)| m.clone()).sum())
    }

    pub fn point_event(&self, w: &Word) -> Result<Rational> {
        self.all_ones(std::slice::from_ref(w))
    }

    /// `μ{x_{φ(i)} = 1 ∀i}` for a line `φ` into `[k]^L`.
    pub fn line_event(&self, line: &CombinatorialSubspace) -> Result<Rational> {
        if line.dim() != 1 || line.alphabet() != self.k {
            return Err(Error::Precondition("expected a line over the same alphabet".into()));
        }
        self.all_ones(&line.images())
    }
}

impl PointEvents for CorrespondenceMeasure {
    fn point_event_masses(&self) -> Vec<Rational> {
        Word::all(self.k, self.l).iter().map(|w| self.point_event(w).expect("word of the right length")).collect()
    }
}

/// `μ_L{x} = d({v ∈ [k]^M : x_w = 1_{A_w}(v) ∀w})` with `A_w = {v : w ⊕ v ∈ A}`
/// and `M = N − L`. `a` is a membership mask over `[k]^N`.
pub fn build_correspondence(k: usize, n: usize, a: &[bool], l: usize) -> Result<CorrespondenceMeasure> {
    check_alphabet(k)?;
    if l == 0 || l >= n {
        return Err(Error::Precondition(format!("need 1 <= L < N, got L={l} N={n}")));
    }
    let total = k.pow(n as u32);
    if a.len() != total {
        return Err(Error::DimensionMismatch {
            what: "set mask over [k]^N",
            expected: total,
            found: a.len(),
        });
    }
    let m = n - l;
    let tail = k.pow(m as u32);
    let heads = k.pow(l as u32);
    let unit = Rational::ratio(1, tail as i64);
    let mut mass: BTreeMap<Vec<bool>, Rational> = BTreeMap::new();
    for v in 0..tail {
        // w ⊕ v has index w·k^M + v
        let config: Vec<bool> = (0..heads).map(|w| a[w * tail + v]).collect();
        let e = mass.entry(config).or_insert_with(Rational::zero);
        *e = e.clone() + unit.clone();
    }
    CorrespondenceMeasure::new(k, l, mass)
}

/// `μ{x_w = 1} ≥ δ` for every coordinate.
pub fn check_inf_dhj_premises(mu: &impl PointEvents, delta: &Rational) -> bool {
    mu.point_event_masses().iter().all(|m| m >= delta)
}
