use std::fmt;

use crate::error::{Error, Result};

pub const MAX_ALPHABET: usize = 9;

pub(crate) fn check_alphabet(k: usize) -> Result<()> {
    if !(1..=MAX_ALPHABET).contains(&k) {
        return Err(Error::Precondition(format!("alphabet size {k} outside 1..={MAX_ALPHABET}")));
    }
    Ok(())
}

/// A word over `[k] = {1, …, k}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    letters: Vec<u8>,
}

impl Word {
    pub fn new(k: usize, letters: Vec<u8>) -> Result<Self> {
        check_alphabet(k)?;
        if let Some(&l) = letters.iter().find(|&&l| l == 0 || l as usize > k) {
            return Err(Error::Precondition(format!("letter {l} outside [{k}]")));
        }
        Ok(Self { letters })
    }

    pub fn parse(k: usize, s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::Precondition(format!("'{c}' is not a letter")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(k, letters)
    }

    pub fn empty() -> Self {
        Self { letters: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    /// Position in the lexicographic order of `[k]^len`.
    pub fn index(&self, k: usize) -> usize {
        self.letters.iter().fold(0, |acc, &l| acc * k + (l as usize - 1))
    }

    /// The word of length `len` at lexicographic position `idx` in `[k]^len`.
    pub fn at(k: usize, len: usize, mut idx: usize) -> Self {
        let mut letters = vec![1u8; len];
        for slot in letters.iter_mut().rev() {
            *slot = (idx % k) as u8 + 1;
            idx /= k;
        }
        Self { letters }
    }

    /// All of `[k]^len` in lexicographic order.
    pub fn all(k: usize, len: usize) -> Vec<Self> {
        (0..k.pow(len as u32)).map(|i| Self::at(k, len, i)).collect()
    }

    /// `self ⊕ other`.
    pub fn concat(&self, other: &Word) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Self { letters }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// `r_{e,i}`: every letter in `e` becomes `i`.
pub fn letter_replace(e: &[u8], i: u8, w: &Word) -> Word {
    Word {
        letters: w.letters.iter().map(|l| if e.contains(l) { i } else { *l }).collect(),
    }
}

/// An `n`-dimensional subspace `[k]^n ↪ [k]^*` given by breakpoints
/// `N_1 < … < N_n`, wildcard sets `I_i ⊆ (N_{i-1}, N_i]` (1-based positions)
/// and a template.
///
/// With `n = 0` the subspace is the single point given by the template.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CombinatorialSubspace {
    k: usize,
    breakpoints: Vec<usize>,
    wildcards: Vec<Vec<usize>>,
    template: Word,
}

impl CombinatorialSubspace {
    pub fn new(k: usize, breakpoints: Vec<usize>, mut wildcards: Vec<Vec<usize>>, template: Word) -> Result<Self> {
        check_alphabet(k)?;
        Word::new(k, template.letters.clone())?;
        if breakpoints.len() != wildcards.len() {
            return Err(Error::DimensionMismatch {
                what: "wildcard sets vs breakpoints",
                expected: breakpoints.len(),
                found: wildcards.len(),
            });
        }
        let mut lo = 0;
        for (i, (&hi, set)) in breakpoints.iter().zip(wildcards.iter_mut()).enumerate() {
            if hi <= lo {
                return Err(Error::Precondition("breakpoints must be strictly increasing and positive".into()));
            }
            set.sort_unstable();
            set.dedup();
            if set.is_empty() || set.iter().any(|&m| m <= lo || m > hi) {
                return Err(Error::Precondition(format!("wildcard set {i} must be nonempty within ({lo}, {hi}]")));
            }
            lo = hi;
        }
        if !breakpoints.is_empty() && template.len() != lo {
            return Err(Error::DimensionMismatch {
                what: "template length",
                expected: lo,
                found: template.len(),
            });
        }
        Ok(Self {
            k,
            breakpoints,
            wildcards,
            template,
        })
    }

    /// The line `[k] → [k]^len` with wildcards `J` and fixed letters from `template`.
    pub fn line(k: usize, wildcards: Vec<usize>, template: Word) -> Result<Self> {
        let len = template.len();
        Self::new(k, vec![len], vec![wildcards], template)
    }

    pub fn point(k: usize, w: Word) -> Result<Self> {
        Self::new(k, vec![], vec![], w)
    }

    pub fn alphabet(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn breakpoints(&self) -> &[usize] {
        &self.breakpoints
    }

    pub fn wildcards(&self) -> &[Vec<usize>] {
        &self.wildcards
    }

    pub fn template(&self) -> &Word {
        &self.template
    }

    /// Length of every image word.
    pub fn ambient_len(&self) -> usize {
        self.template.len()
    }

    /// Images of `[k]^n` in lexicographic order of the parameter.
    pub fn images(&self) -> Vec<Word> {
        Word::all(self.k, self.dim())
            .iter()
            .map(|v| subspace_embed(self, v).expect("parameter has the subspace dimension"))
            .collect()
    }
}

/// `φ(v_1 … v_n)`.
pub fn subspace_embed(s: &CombinatorialSubspace, v: &Word) -> Result<Word> {
    if v.len() != s.dim() {
        return Err(Error::DimensionMismatch {
            what: "subspace parameter length",
            expected: s.dim(),
            found: v.len(),
        });
    }
    if let Some(&l) = v.letters.iter().find(|&&l| l as usize > s.k) {
        return Err(Error::Precondition(format!("letter {l} outside [{}]", s.k)));
    }
    let mut letters = s.template.letters.clone();
    for (set, &l) in s.wildcards.iter().zip(&v.letters) {
        for &m in set {
            letters[m - 1] = l;
        }
    }
    Ok(Word { letters })
}

/// All `n`-dimensional subspaces with image words of length exactly `len`.
/// Template letters under wildcards are normalised to `1`.
pub fn subspaces_of_len(k: usize, n: usize, len: usize) -> Vec<CombinatorialSubspace> {
    let mut out = Vec::new();
    if n == 0 {
        for w in Word::all(k, len) {
            out.push(CombinatorialSubspace::point(k, w).expect("valid point"));
        }
        return out;
    }
    if len < n {
        return out;
    }
    // breakpoints: choose N_1 < … < N_{n-1} in 1..len, N_n = len
    let mut bps = Vec::new();
    choose_increasing(1, len - 1, n - 1, &mut Vec::new(), &mut bps);
    for mut bp in bps {
        bp.push(len);
        let windows: Vec<(usize, usize)> = bp
            .iter()
            .scan(0, |lo, &hi| {
                let w = (*lo, hi);
                *lo = hi;
                Some(w)
            })
            .collect();
        let choices: Vec<Vec<Vec<usize>>> = windows
            .iter()
            .map(|&(lo, hi)| {
                let width = hi - lo;
                (1u32..1 << width)
                    .map(|m| (0..width).filter(|b| m >> b & 1 == 1).map(|b| lo + 1 + b).collect())
                    .collect()
            })
            .collect();
        let mut pick = vec![0usize; n];
        loop {
            let wild: Vec<Vec<usize>> = (0..n).map(|i| choices[i][pick[i]].clone()).collect();
            let mut fixed = vec![true; len];
            for &m in wild.iter().flatten() {
                fixed[m - 1] = false;
            }
            let free: Vec<usize> = (0..len).filter(|&m| fixed[m]).collect();
            for t in Word::all(k, free.len()) {
                let mut letters = vec![1u8; len];
                for (&m, &l) in free.iter().zip(t.letters()) {
                    letters[m] = l;
                }
                out.push(
                    CombinatorialSubspace::new(k, bp.clone(), wild.clone(), Word { letters }).expect("valid by construction"),
                );
            }
            let mut i = 0;
            while i < n {
                pick[i] += 1;
                if pick[i] < choices[i].len() {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }
    out
}

fn choose_increasing(from: usize, to: usize, count: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if count == 0 {
        out.push(cur.clone());
        return;
    }
    for x in from..=to {
        if to + 1 - x < count {
            break;
        }
        cur.push(x);
        choose_increasing(x + 1, to, count - 1, cur, out);
        cur.pop();
    }
}

/// Every combinatorial line in `[k]^N` as the sorted indices of its `k` points,
/// deduplicated and in lexicographic order.
pub fn enumerate_lines(k: usize, n: usize) -> Result<Vec<Vec<usize>>> {
    check_alphabet(k)?;
    if k < 2 || n == 0 {
        return Err(Error::Precondition("lines need k >= 2 and N >= 1".into()));
    }
    let mut lines: Vec<Vec<usize>> = subspaces_of_len(k, 1, n)
        .iter()
        .map(|s| {
            let mut pts: Vec<usize> = s.images().iter().map(|w| w.index(k)).collect();
            pts.sort_unstable();
            pts
        })
        .collect();
    let before = lines.len();
    lines.sort();
    lines.dedup();
    if lines.len() != before {
        return Err(Error::Invariant("distinct line encodings gave the same point set".into()));
    }
    Ok(lines)
}
