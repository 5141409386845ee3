//! Product index sets `Λ = Λ_0 × Λ_1 × … × Λ_J` stored as sorted lists per mode.

use serde::{Deserialize, Serialize};
use std::fmt::Debug;

/// Key type usable for the sparse mode 0.
pub trait ModeKey: Ord + Clone + Debug + Send + Sync + 'static {}
impl<T: Ord + Clone + Debug + Send + Sync + 'static> ModeKey for T {}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductIndexSet<K> {
    /// Sorted, deduplicated mode-0 indices.
    pub mode0: Vec<K>,
    /// Sorted, deduplicated degrees for modes `1..=J` (entry `j-1` is mode `j`).
    pub modes: Vec<Vec<u32>>,
}

impl<K: ModeKey> ProductIndexSet<K> {
    pub fn empty(j: usize) -> Self {
        ProductIndexSet { mode0: Vec::new(), modes: vec![Vec::new(); j] }
    }

    /// Sorts and deduplicates the inputs.
    pub fn new(mut mode0: Vec<K>, modes: Vec<Vec<u32>>) -> Self {
        mode0.sort();
        mode0.dedup();
        let modes = modes
            .into_iter()
            .map(|mut m| {
                m.sort_unstable();
                m.dedup();
                m
            })
            .collect();
        ProductIndexSet { mode0, modes }
    }

    pub fn j(&self) -> usize {
        self.modes.len()
    }

    pub fn mode_len(&self, mode: usize) -> usize {
        if mode == 0 {
            self.mode0.len()
        } else {
            self.modes[mode - 1].len()
        }
    }

    pub fn mode_lens(&self) -> Vec<usize> {
        (0..=self.j()).map(|m| self.mode_len(m)).collect()
    }

    /// True when the product set has no element.
    pub fn is_empty(&self) -> bool {
        (0..=self.j()).any(|m| self.mode_len(m) == 0)
    }

    pub fn cardinality(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            self.mode_lens().iter().product()
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        assert_eq!(self.j(), other.j());
        ProductIndexSet {
            mode0: merge_sorted(&self.mode0, &other.mode0),
            modes: self.modes.iter().zip(&other.modes).map(|(a, b)| merge_sorted(a, b)).collect(),
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        assert_eq!(self.j(), other.j());
        ProductIndexSet {
            mode0: intersect_sorted(&self.mode0, &other.mode0),
            modes: self.modes.iter().zip(&other.modes).map(|(a, b)| intersect_sorted(a, b)).collect(),
        }
    }

    /// Mode-wise inclusion `Λ_j ⊆ other_j` for every mode.
    pub fn is_subset(&self, other: &Self) -> bool {
        is_subset_sorted(&self.mode0, &other.mode0)
            && self.modes.iter().zip(&other.modes).all(|(a, b)| is_subset_sorted(a, b))
    }

    /// Sum over modes of the number of indices of `self` missing from `base`.
    pub fn added_count(&self, base: &Self) -> usize {
        count_missing(&self.mode0, &base.mode0)
            + self.modes.iter().zip(&base.modes).map(|(a, b)| count_missing(a, b)).sum::<usize>()
    }

    pub fn contains0(&self, k: &K) -> bool {
        self.mode0.binary_search(k).is_ok()
    }

    pub fn contains_mode(&self, mode: usize, v: u32) -> bool {
        self.modes[mode - 1].binary_search(&v).is_ok()
    }
}

pub fn merge_sorted<T: Ord + Clone>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i].clone());
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

pub fn intersect_sorted<T: Ord + Clone>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i].clone());
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn is_subset_sorted<T: Ord>(a: &[T], b: &[T]) -> bool {
    count_missing(a, b) == 0
}

fn count_missing<T: Ord>(a: &[T], b: &[T]) -> usize {
    let mut j = 0;
    let mut missing = 0;
    for x in a {
        while j < b.len() && b[j] < *x {
            j += 1;
        }
        if j < b.len() && b[j] == *x {
            j += 1;
        } else {
            missing += 1;
        }
    }
    missing
}

/// Position lookup of each element of `sub` inside sorted `full` (None if absent).
pub fn positions_in<T: Ord>(sub: &[T], full: &[T]) -> Vec<Option<usize>> {
    let mut out = Vec::with_capacity(sub.len());
    let mut j = 0;
    for x in sub {
        while j < full.len() && full[j] < *x {
            j += 1;
        }
        if j < full.len() && full[j] == *x {
            out.push(Some(j));
        } else {
            out.push(None);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra() {
        let a = ProductIndexSet::new(vec![3u32, 1, 1], vec![vec![0, 1], vec![2]]);
        let b = ProductIndexSet::new(vec![2u32, 3], vec![vec![1, 2], vec![]]);
        assert_eq!(a.mode0, vec![1, 3]);
        let u = a.union(&b);
        assert_eq!(u.mode0, vec![1, 2, 3]);
        assert_eq!(u.modes[0], vec![0, 1, 2]);
        assert!(a.is_subset(&u));
        assert!(b.is_empty());
        assert_eq!(b.cardinality(), 0);
        assert_eq!(a.cardinality(), 4);
        assert_eq!(u.added_count(&a), 2);
        let i = a.intersection(&b);
        assert_eq!(i.mode0, vec![3]);
        assert_eq!(positions_in(&[1u32, 4], &[0, 1, 2]), vec![Some(1), None]);
    }
}
