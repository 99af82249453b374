//! Multisets over a finite, indexed element set.
//!
//! A [`MultiSet`] is stored densely: component `i` counts element `i` of an
//! ambient set of fixed size (its *dimension*). All protocol configurations
//! in this crate are multisets over the state set of some model.

use std::fmt;

use crate::AlgebraError;

/// A dense multiset of fixed dimension.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiSet {
    counts: Vec<u64>,
}

impl MultiSet {
    /// The empty multiset over `dim` elements.
    pub fn zero(dim: usize) -> Self {
        Self {
            counts: vec![0; dim],
        }
    }

    /// The multiset holding exactly one copy of `element`.
    pub fn singleton(dim: usize, element: usize) -> Self {
        let mut m = Self::zero(dim);
        m.counts[element] = 1;
        m
    }

    pub fn from_counts(counts: Vec<u64>) -> Self {
        Self { counts }
    }

    /// Builds a multiset from `(element, count)` pairs; repeated elements accumulate.
    pub fn from_pairs(dim: usize, pairs: impl IntoIterator<Item = (usize, u64)>) -> Self {
        let mut m = Self::zero(dim);
        for (e, n) in pairs {
            m.counts[e] += n;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, element: usize) -> u64 {
        self.counts.get(element).copied().unwrap_or(0)
    }

    pub fn set(&mut self, element: usize, count: u64) {
        self.counts[element] = count;
    }

    pub fn increment(&mut self, element: usize, by: u64) {
        self.counts[element] += by;
    }

    /// Removes `by` copies of `element`, failing if fewer are present.
    pub fn decrement(&mut self, element: usize, by: u64) -> Result<(), AlgebraError> {
        let c = &mut self.counts[element];
        if *c < by {
            return Err(AlgebraError::Underflow { element });
        }
        *c -= by;
        Ok(())
    }

    /// Sum of all counts.
    pub fn size(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Elements with a positive count, in index order.
    pub fn support(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, _)| i)
            .collect()
    }

    /// Total count over a subset of elements.
    pub fn count_of(&self, elements: impl IntoIterator<Item = usize>) -> u64 {
        elements.into_iter().map(|e| self.get(e)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    fn same_dim(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.dim() != other.dim() {
            return Err(AlgebraError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_dim(other)?;
        Ok(Self {
            counts: self
                .counts
                .iter()
                .zip(&other.counts)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Componentwise subtraction; an error if any component would go negative.
    pub fn checked_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_dim(other)?;
        let mut counts = Vec::with_capacity(self.dim());
        for (element, (a, b)) in self.counts.iter().zip(&other.counts).enumerate() {
            counts.push(a.checked_sub(*b).ok_or(AlgebraError::Underflow { element })?);
        }
        Ok(Self { counts })
    }

    /// Componentwise `self <= other`.
    pub fn leq(&self, other: &Self) -> Result<bool, AlgebraError> {
        self.same_dim(other)?;
        Ok(self.counts.iter().zip(&other.counts).all(|(a, b)| a <= b))
    }

    /// Concatenation of multisets over disjoint element sets: `self` keeps
    /// indices `0..self.dim()`, `other` is shifted after it.
    pub fn concat(&self, other: &Self) -> Self {
        let mut counts = self.counts.clone();
        counts.extend_from_slice(&other.counts);
        Self { counts }
    }

    /// Concatenation where both operands are given over a shared index space
    /// of the same dimension and must have disjoint supports.
    pub fn disjoint_union(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_dim(other)?;
        if let Some(element) = (0..self.dim()).find(|&i| self.get(i) > 0 && other.get(i) > 0) {
            return Err(AlgebraError::Overlap { element });
        }
        self.add(other)
    }

    /// Restriction to the first `dim` elements.
    pub fn truncate(&self, dim: usize) -> Self {
        Self {
            counts: self.counts[..dim].to_vec(),
        }
    }

    /// Zero-extension to a larger dimension.
    pub fn extend_to(&self, dim: usize) -> Self {
        let mut counts = self.counts.clone();
        counts.resize(dim, 0);
        Self { counts }
    }

    /// All multisets of dimension `dim` and size exactly `size`, in lexicographic order.
    pub fn all_of_size(dim: usize, size: u64) -> Vec<Self> {
        let bounds = vec![(0, size); dim];
        Self::bounded_of_size(&bounds, size)
    }

    /// All multisets of size `size` with `lo_i <= m(i) <= hi_i`, in lexicographic order.
    pub fn bounded_of_size(bounds: &[(u64, u64)], size: u64) -> Vec<Self> {
        let mut out = Vec::new();
        let mut current = vec![0u64; bounds.len()];
        // suffix sums of the bounds decide feasibility early
        let mut min_rest = vec![0u64; bounds.len() + 1];
        let mut max_rest = vec![0u64; bounds.len() + 1];
        for i in (0..bounds.len()).rev() {
            min_rest[i] = min_rest[i + 1] + bounds[i].0;
            max_rest[i] = max_rest[i + 1].saturating_add(bounds[i].1);
        }
        fn rec(
            i: usize,
            left: u64,
            bounds: &[(u64, u64)],
            min_rest: &[u64],
            max_rest: &[u64],
            current: &mut Vec<u64>,
            out: &mut Vec<MultiSet>,
        ) {
            if i == bounds.len() {
                if left == 0 {
                    out.push(MultiSet::from_counts(current.clone()));
                }
                return;
            }
            if left < min_rest[i] || left > max_rest[i] {
                return;
            }
            let (lo, hi) = bounds[i];
            for v in lo..=hi.min(left) {
                current[i] = v;
                rec(i + 1, left - v, bounds, min_rest, max_rest, current, out);
            }
            current[i] = 0;
        }
        rec(0, size, bounds, &min_rest, &max_rest, &mut current, &mut out);
        out
    }
}

impl fmt::Debug for MultiSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for (i, &c) in self.counts.iter().enumerate() {
            if c > 0 {
                if !first {
                    write!(f, ", ")?;
                }
                write!(f, "{i}:{c}")?;
                first = false;
            }
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(c: &[u64]) -> MultiSet {
        MultiSet::from_counts(c.to_vec())
    }

    #[test]
    fn add_and_subtract() {
        // {a,a,b} + {b} = {2a, 2b}
        assert_eq!(ms(&[2, 1]).add(&ms(&[0, 1])).unwrap(), ms(&[2, 2]));
        // {2a, b} - {a} = {a, b}
        assert_eq!(ms(&[2, 1]).checked_sub(&ms(&[1, 0])).unwrap(), ms(&[1, 1]));
        // {a} - {b} underflows
        assert_eq!(
            ms(&[1, 0]).checked_sub(&ms(&[0, 1])),
            Err(AlgebraError::Underflow { element: 1 })
        );
    }

    #[test]
    fn size_support_and_leq() {
        let m = ms(&[0, 3, 1]);
        assert_eq!(m.size(), 4);
        assert_eq!(m.support(), vec![1, 2]);
        assert!(ms(&[0, 1, 1]).leq(&m).unwrap());
        assert!(!ms(&[1, 0, 0]).leq(&m).unwrap());
        assert!(ms(&[1]).leq(&m).is_err());
    }

    #[test]
    fn concat_and_disjoint_union() {
        assert_eq!(ms(&[1, 2]).concat(&ms(&[3])), ms(&[1, 2, 3]));
        assert_eq!(
            ms(&[1, 0]).disjoint_union(&ms(&[0, 4])).unwrap(),
            ms(&[1, 4])
        );
        assert_eq!(
            ms(&[1, 1]).disjoint_union(&ms(&[0, 4])),
            Err(AlgebraError::Overlap { element: 1 })
        );
    }

    #[test]
    fn enumeration_counts() {
        // stars and bars: C(3 + 3 - 1, 3 - 1) = 10
        assert_eq!(MultiSet::all_of_size(3, 3).len(), 10);
        assert_eq!(MultiSet::all_of_size(0, 0).len(), 1);
        assert!(MultiSet::all_of_size(0, 1).is_empty());
        let bounded = MultiSet::bounded_of_size(&[(1, 1), (0, 5)], 3);
        assert_eq!(bounded, vec![ms(&[1, 2])]);
    }

    proptest::proptest! {
        #[test]
        fn add_sub_inverse(a in proptest::collection::vec(0u64..20, 4), b in proptest::collection::vec(0u64..20, 4)) {
            let (a, b) = (ms(&a), ms(&b));
            let sum = a.add(&b).unwrap();
            proptest::prop_assert_eq!(sum.size(), a.size() + b.size());
            proptest::prop_assert_eq!(sum.checked_sub(&b).unwrap(), a);
        }
    }
}
