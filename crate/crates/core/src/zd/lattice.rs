//! Integer linear algebra for subgroups of ℤᴰ.

use crate::error::{Error, Result};
use crate::zd::system::SubgroupSpec;

/// Nonzero elementary divisors of an integer matrix (Smith normal form),
/// in order along the diagonal.
pub fn smith_diagonal(rows: &[Vec<i64>]) -> Vec<i128> {
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    for t in 0..m.min(n) {
        loop {
            // pivot: smallest nonzero magnitude in the trailing block
            let Some((pi, pj)) = (t..m)
                .flat_map(|i| (t..n).map(move |j| (i, j)))
                .filter(|&(i, j)| a[i][j] != 0)
                .min_by_key(|&(i, j)| a[i][j].abs())
            else {
                return out;
            };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            let p = a[t][t];
            let mut dirty = false;
            for i in t + 1..m {
                let q = a[i][t] / p;
                if q != 0 {
                    for j in t..n {
                        a[i][j] -= q * a[t][j];
                    }
                }
                dirty |= a[i][t] != 0;
            }
            for j in t + 1..n {
                let q = a[t][j] / p;
                if q != 0 {
                    for row in a.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                dirty |= a[t][j] != 0;
            }
            if dirty {
                continue;
            }
            // divisibility of the remaining block by the pivot
            if let Some(i) = (t + 1..m).find(|&i| (t + 1..n).any(|j| a[i][j] % p != 0)) {
                for j in t..n {
                    a[t][j] += a[i][j];
                }
                continue;
            }
            out.push(p.abs());
            break;
        }
    }
    out
}

/// Rank of the subgroup generated by the given vectors.
pub fn rank(vectors: &[Vec<i64>]) -> usize {
    smith_diagonal(vectors).len()
}

/// Checks that `ℤᴰ = parts[0] ⊕ … ⊕ parts[r-1]`: the stacked generators span
/// ℤᴰ with all elementary divisors 1, and the ranks of the parts add up to D.
pub fn check_direct_sum(dim: usize, parts: &[&SubgroupSpec]) -> Result<()> {
    for p in parts {
        p.check_dim(dim)?;
    }
    let stacked: Vec<Vec<i64>> = parts.iter().flat_map(|p| p.vectors().iter().cloned()).collect();
    let divisors = smith_diagonal(&stacked);
    if divisors.len() != dim || divisors.iter().any(|&d| d != 1) {
        return Err(Error::Decomposition(format!(
            "subgroups span a lattice with elementary divisors {divisors:?} in Z^{dim}"
        )));
    }
    let ranks: Vec<usize> = parts.iter().map(|p| rank(p.vectors())).collect();
    if ranks.iter().sum::<usize>() != dim {
        return Err(Error::Decomposition(format!("ranks {ranks:?} do not add up to {dim}")));
    }
    Ok(())
}
