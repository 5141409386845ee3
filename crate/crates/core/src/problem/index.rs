//! Sparse-mode indices `(ν̄, λ)` and the finite index universe.

use super::basis::SpatialIndex;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use std::fmt;

/// Finitely supported tail multi-index: sorted `(parameter, degree)` pairs with degree ≥ 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TailIndex(pub SmallVec<[(u16, u16); 4]>);

impl TailIndex {
    pub fn zero() -> Self {
        TailIndex(SmallVec::new())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self, param: u16) -> u32 {
        match self.0.binary_search_by_key(&param, |&(p, _)| p) {
            Ok(i) => self.0[i].1 as u32,
            Err(_) => 0,
        }
    }

    /// The multi-index with entry `param` set to `degree` (removed when 0).
    pub fn with_degree(&self, param: u16, degree: u32) -> Self {
        let mut v = self.0.clone();
        match v.binary_search_by_key(&param, |&(p, _)| p) {
            Ok(i) if degree == 0 => {
                v.remove(i);
            }
            Ok(i) => v[i].1 = degree as u16,
            Err(_) if degree == 0 => {}
            Err(i) => v.insert(i, (param, degree as u16)),
        }
        TailIndex(v)
    }

    pub fn max_degree(&self) -> u32 {
        self.0.iter().map(|&(_, d)| d as u32).max().unwrap_or(0)
    }
}

impl fmt::Display for TailIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (p, d)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}:{d}")?;
        }
        write!(f, "]")
    }
}

/// Mode-0 index. Ordering is by `ν̄` first, so a sorted support groups spatial indices per tail index.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SparseModeIndex {
    pub nu: TailIndex,
    pub lambda: SpatialIndex,
}

impl SparseModeIndex {
    pub fn spatial(lambda: SpatialIndex) -> Self {
        SparseModeIndex { nu: TailIndex::zero(), lambda }
    }
}

impl fmt::Display for SparseModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.nu, self.lambda)
    }
}

/// Optional caps that turn the problem into a finite one (dense-resolvable test problems).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexUniverse {
    /// Finest admissible spatial level.
    #[serde(default)]
    pub max_level: Option<u8>,
    /// Largest admissible Legendre degree, in every parameter.
    #[serde(default)]
    pub max_degree: Option<u32>,
}

impl IndexUniverse {
    pub fn unbounded() -> Self {
        Self::default()
    }

    pub fn level_ok(&self, level: u8) -> bool {
        self.max_level.is_none_or(|m| level <= m)
    }

    pub fn degree_ok(&self, d: u32) -> bool {
        self.max_degree.is_none_or(|m| d <= m)
    }

    pub fn contains(&self, idx: &SparseModeIndex) -> bool {
        self.level_ok(idx.lambda.level) && self.degree_ok(idx.nu.max_degree())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_index_updates() {
        let z = TailIndex::zero();
        let a = z.with_degree(7, 2).with_degree(3, 1);
        assert_eq!(a.0.as_slice(), &[(3, 1), (7, 2)]);
        assert_eq!(a.degree(7), 2);
        assert_eq!(a.degree(5), 0);
        assert_eq!(a.with_degree(3, 0).with_degree(7, 0), z);
        assert_eq!(a.max_degree(), 2);
    }

    #[test]
    fn ordering_groups_by_tail() {
        let s = |l, k| SpatialIndex::new(l, k);
        let mut v = vec![
            SparseModeIndex { nu: TailIndex::zero().with_degree(5, 1), lambda: s(0, 0) },
            SparseModeIndex::spatial(s(2, 3)),
            SparseModeIndex::spatial(s(1, 0)),
        ];
        v.sort();
        assert!(v[0].nu.is_zero() && v[1].nu.is_zero());
        assert_eq!(v[0].lambda, s(1, 0));
    }
}
