//! Exhaustive search for the smallest product-set enlargement meeting a bulk condition.

use crate::error::OracleError;
use crate::tensor::index_set::ModeKey;
use crate::tensor::{HTensor, ProductIndexSet};

/// Largest number of candidate indices the search enumerates.
pub const SEARCH_CAP: usize = 20;

/// Relative slack on the bulk condition, matching the runtime check of `expand`.
const SLACK: f64 = 1e-12;

/// A product set `Λ ⊆ Λ̂ ⊆ Λ̃` minimizing `Σ_j #(Λ̂_j \ Λ_j)` subject to `‖R_Λ̂ r‖ ≥ α‖r‖`.
///
/// Subsets are visited by increasing size and lexicographically within a size, so the first
/// feasible one is returned.
pub fn best_product_set_bruteforce<K: ModeKey>(
    r: &HTensor<K>,
    lambda: &ProductIndexSet<K>,
    tilde: &ProductIndexSet<K>,
    alpha: f64,
) -> Result<ProductIndexSet<K>, OracleError> {
    if !lambda.is_subset(tilde) || !r.support().is_subset(tilde) {
        return Err(OracleError::Input("needs Λ ⊆ Λ̃ and supp r ⊆ Λ̃".into()));
    }
    let j = tilde.j();
    let inside: Vec<Vec<bool>> = (0..=j)
        .map(|m| {
            if m == 0 {
                tilde.mode0.iter().map(|x| lambda.contains0(x)).collect()
            } else {
                tilde.modes[m - 1].iter().map(|&d| lambda.contains_mode(m, d)).collect()
            }
        })
        .collect();
    let cands: Vec<(usize, usize)> =
        inside.iter().enumerate().flat_map(|(m, v)| v.iter().enumerate().filter(|(_, &o)| !o).map(move |(p, _)| (m, p))).collect();
    if cands.len() > SEARCH_CAP {
        return Err(OracleError::TooLarge(format!("{} candidate indices (cap {SEARCH_CAP})", cands.len())));
    }

    let dense = r.to_dense_on(tilde)?;
    let shape = dense.shape.clone();
    let entries: Vec<(Vec<usize>, f64)> = dense
        .data
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .map(|(off, &v)| {
            let mut c = vec![0; j + 1];
            let mut rest = off;
            for m in (0..=j).rev() {
                c[m] = rest % shape[m];
                rest /= shape[m];
            }
            (c, v * v)
        })
        .collect();
    let total: f64 = entries.iter().map(|(_, s)| s).sum();
    let target = alpha * alpha * total * (1.0 - SLACK).powi(2);
    let kept = |mask: &[Vec<bool>]| -> f64 {
        entries.iter().filter(|(c, _)| c.iter().enumerate().all(|(m, &i)| mask[m][i])).map(|(_, s)| s).sum()
    };

    let n = cands.len();
    for k in 0..=n {
        let mut comb: Vec<usize> = (0..k).collect();
        loop {
            let mut mask = inside.clone();
            for &i in &comb {
                let (m, p) = cands[i];
                mask[m][p] = true;
            }
            if kept(&mask) >= target {
                return Ok(select(tilde, &mask));
            }
            if !next_combination(&mut comb, n) {
                break;
            }
        }
    }
    Ok(tilde.clone())
}

/// Advances `comb` to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if comb[i] < n - k + i {
            comb[i] += 1;
            for t in i + 1..k {
                comb[t] = comb[t - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn select<K: ModeKey>(tilde: &ProductIndexSet<K>, mask: &[Vec<bool>]) -> ProductIndexSet<K> {
    let mode0 = tilde.mode0.iter().zip(&mask[0]).filter(|(_, &c)| c).map(|(x, _)| x.clone()).collect();
    let modes =
        tilde.modes.iter().zip(&mask[1..]).map(|(v, c)| v.iter().zip(c).filter(|(_, &c)| c).map(|(&d, _)| d).collect()).collect();
    ProductIndexSet::new(mode0, modes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_in_order() {
        let mut c = vec![0, 1];
        let mut seen = vec![c.clone()];
        while next_combination(&mut c, 4) {
            seen.push(c.clone());
        }
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        let mut e: Vec<usize> = vec![];
        assert!(!next_combination(&mut e, 3));
    }
}
