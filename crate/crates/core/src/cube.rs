//! Cubes and counting constraints.
//!
//! A cube is the set of multisets lying between a lower and an upper bound,
//! where upper bounds may be infinite. A counting constraint is a finite
//! union of cubes over one element set; constraints are closed under union,
//! intersection and complement, and every operation here is checked against
//! membership rather than producing a canonical form.

use std::fmt;

use crate::multiset::MultiSet;
use crate::AlgebraError;

/// Default ceiling on the number of multisets [`CountingConstraint::equiv_bounded`] may enumerate.
pub const DEFAULT_ENUMERATION_CAP: u64 = 20_000_000;

/// An upper bound: a natural number or infinity.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bound {
    Finite(u64),
    Infinite,
}

impl Bound {
    pub fn finite(self) -> Option<u64> {
        match self {
            Bound::Finite(n) => Some(n),
            Bound::Infinite => None,
        }
    }

    pub fn admits(self, n: u64) -> bool {
        match self {
            Bound::Finite(u) => n <= u,
            Bound::Infinite => true,
        }
    }

    /// Saturating addition: infinity absorbs everything.
    pub fn saturating_add(self, k: u64) -> Bound {
        match self {
            Bound::Finite(u) => Bound::Finite(u.saturating_add(k)),
            Bound::Infinite => Bound::Infinite,
        }
    }
}

impl fmt::Debug for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(n) => write!(f, "{n}"),
            Bound::Infinite => write!(f, "inf"),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// `{ m : lower <= m <= upper }` over a fixed number of elements.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cube {
    lower: Vec<u64>,
    upper: Vec<Bound>,
}

/// Norms of a single cube.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NormReport {
    pub lnorm: u64,
    pub unorm: u64,
    pub norm: u64,
}

/// Norms of a counting constraint: one report per member cube, and the
/// componentwise maximum over them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintNorm {
    pub per_cube: Vec<NormReport>,
    pub aggregate: NormReport,
}

impl Cube {
    /// Builds a cube, rejecting `lower > upper` in any component.
    pub fn new(lower: Vec<u64>, upper: Vec<Bound>) -> Result<Self, AlgebraError> {
        if lower.len() != upper.len() {
            return Err(AlgebraError::DimensionMismatch {
                left: lower.len(),
                right: upper.len(),
            });
        }
        if let Some(element) = (0..lower.len()).find(|&i| !upper[i].admits(lower[i])) {
            return Err(AlgebraError::EmptyBounds { element });
        }
        Ok(Self { lower, upper })
    }

    /// The cube containing every multiset of dimension `dim`.
    pub fn universal(dim: usize) -> Self {
        Self {
            lower: vec![0; dim],
            upper: vec![Bound::Infinite; dim],
        }
    }

    /// The cube containing exactly `m`.
    pub fn singleton(m: &MultiSet) -> Self {
        Self {
            lower: m.counts().to_vec(),
            upper: m.counts().iter().map(|&c| Bound::Finite(c)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[u64] {
        &self.lower
    }

    pub fn upper(&self) -> &[Bound] {
        &self.upper
    }

    pub fn bounds(&self, element: usize) -> (u64, Bound) {
        (self.lower[element], self.upper[element])
    }

    /// Replaces the bounds of one element.
    pub fn with_bounds(
        mut self,
        element: usize,
        lower: u64,
        upper: Bound,
    ) -> Result<Self, AlgebraError> {
        if !upper.admits(lower) {
            return Err(AlgebraError::EmptyBounds { element });
        }
        self.lower[element] = lower;
        self.upper[element] = upper;
        Ok(self)
    }

    /// Fixes one element to an exact count.
    pub fn with_exact(self, element: usize, count: u64) -> Self {
        self.with_bounds(element, count, Bound::Finite(count))
            .expect("exact bounds are never empty")
    }

    pub fn contains(&self, m: &MultiSet) -> Result<bool, AlgebraError> {
        if m.dim() != self.dim() {
            return Err(AlgebraError::DimensionMismatch {
                left: m.dim(),
                right: self.dim(),
            });
        }
        Ok(self.contains_unchecked(m))
    }

    /// Membership test for callers that already know the dimensions agree.
    pub fn contains_unchecked(&self, m: &MultiSet) -> bool {
        m.counts()
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&c, (&lo, &hi))| lo <= c && hi.admits(c))
    }

    /// Intersection of two cubes, `None` when empty.
    pub fn intersect(&self, other: &Self) -> Result<Option<Self>, AlgebraError> {
        if self.dim() != other.dim() {
            return Err(AlgebraError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        let lower: Vec<u64> = self
            .lower
            .iter()
            .zip(&other.lower)
            .map(|(a, b)| *a.max(b))
            .collect();
        let upper: Vec<Bound> = self
            .upper
            .iter()
            .zip(&other.upper)
            .map(|(a, b)| *a.min(b))
            .collect();
        if (0..lower.len()).any(|i| !upper[i].admits(lower[i])) {
            return Ok(None);
        }
        Ok(Some(Self { lower, upper }))
    }

    /// Every upper bound is finite.
    pub fn is_bounded(&self) -> bool {
        self.upper.iter().all(|u| u.finite().is_some())
    }

    /// Smallest and largest size of a member (largest is `None` when unbounded).
    pub fn size_range(&self) -> (u64, Option<u64>) {
        let min = self.lower.iter().sum();
        let max = self
            .upper
            .iter()
            .try_fold(0u64, |acc, u| u.finite().map(|n| acc.saturating_add(n)));
        (min, max)
    }

    /// All members of size exactly `size`, in lexicographic order.
    pub fn members_of_size(&self, size: u64) -> Vec<MultiSet> {
        let bounds: Vec<(u64, u64)> = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| (lo, hi.finite().unwrap_or(size).min(size)))
            .collect();
        if bounds.iter().any(|(lo, hi)| lo > hi) {
            return Vec::new();
        }
        MultiSet::bounded_of_size(&bounds, size)
    }

    pub fn norm(&self) -> NormReport {
        let lnorm = self.lower.iter().sum();
        let unorm = self.upper.iter().filter_map(|u| u.finite()).sum();
        NormReport {
            lnorm,
            unorm,
            norm: u64::max(lnorm, unorm),
        }
    }

    /// The complement of this cube as a union of half-space cubes.
    fn complement(&self) -> CountingConstraint {
        let dim = self.dim();
        let mut cubes = Vec::new();
        for q in 0..dim {
            if self.lower[q] > 0 {
                let mut c = Cube::universal(dim);
                c.upper[q] = Bound::Finite(self.lower[q] - 1);
                cubes.push(c);
            }
            if let Bound::Finite(u) = self.upper[q] {
                let mut c = Cube::universal(dim);
                c.lower[q] = u + 1;
                cubes.push(c);
            }
        }
        CountingConstraint { dim, cubes }
    }
}

impl fmt::Debug for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.dim() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}..{:?}", self.lower[i], self.upper[i])?;
        }
        write!(f, "]")
    }
}

/// A finite union of cubes over a shared element set. The empty union
/// denotes the empty set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountingConstraint {
    dim: usize,
    cubes: Vec<Cube>,
}

impl CountingConstraint {
    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            cubes: Vec::new(),
        }
    }

    pub fn from_cube(cube: Cube) -> Self {
        Self {
            dim: cube.dim(),
            cubes: vec![cube],
        }
    }

    pub fn from_cubes(dim: usize, cubes: Vec<Cube>) -> Result<Self, AlgebraError> {
        if let Some(c) = cubes.iter().find(|c| c.dim() != dim) {
            return Err(AlgebraError::DimensionMismatch {
                left: dim,
                right: c.dim(),
            });
        }
        Ok(Self { dim, cubes })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    fn same_dim(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.dim != other.dim {
            return Err(AlgebraError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn contains(&self, m: &MultiSet) -> Result<bool, AlgebraError> {
        if m.dim() != self.dim {
            return Err(AlgebraError::DimensionMismatch {
                left: m.dim(),
                right: self.dim,
            });
        }
        Ok(self.cubes.iter().any(|c| c.contains_unchecked(m)))
    }

    pub fn union(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_dim(other)?;
        let mut cubes = self.cubes.clone();
        cubes.extend(other.cubes.iter().cloned());
        Ok(Self {
            dim: self.dim,
            cubes,
        })
    }

    /// Pairwise intersection of member cubes, dropping empty results.
    pub fn intersect(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.same_dim(other)?;
        let mut cubes = Vec::new();
        for a in &self.cubes {
            for b in &other.cubes {
                if let Some(c) = a.intersect(b)? {
                    if !cubes.contains(&c) {
                        cubes.push(c);
                    }
                }
            }
        }
        Ok(Self {
            dim: self.dim,
            cubes,
        })
    }

    /// Complement relative to all multisets of this dimension.
    pub fn complement(&self) -> Self {
        let mut acc = CountingConstraint::from_cube(Cube::universal(self.dim));
        for cube in &self.cubes {
            acc = acc
                .intersect(&cube.complement())
                .expect("complement cubes share the dimension");
        }
        acc
    }

    pub fn norm(&self) -> ConstraintNorm {
        let per_cube: Vec<NormReport> = self.cubes.iter().map(Cube::norm).collect();
        let aggregate = per_cube.iter().fold(
            NormReport {
                lnorm: 0,
                unorm: 0,
                norm: 0,
            },
            |acc, r| NormReport {
                lnorm: acc.lnorm.max(r.lnorm),
                unorm: acc.unorm.max(r.unorm),
                norm: acc.norm.max(r.norm),
            },
        );
        ConstraintNorm {
            per_cube,
            aggregate,
        }
    }

    /// Whether both constraints have the same members among multisets whose
    /// every component is at most `bound`.
    pub fn equiv_bounded(&self, other: &Self, bound: u64) -> Result<bool, AlgebraError> {
        self.equiv_bounded_with_cap(other, bound, DEFAULT_ENUMERATION_CAP)
    }

    pub fn equiv_bounded_with_cap(
        &self,
        other: &Self,
        bound: u64,
        cap: u64,
    ) -> Result<bool, AlgebraError> {
        self.same_dim(other)?;
        let total = (bound.saturating_add(1)).checked_pow(self.dim as u32);
        match total {
            Some(t) if t <= cap => {}
            _ => return Err(AlgebraError::EnumerationCap { cap }),
        }
        let mut current = vec![0u64; self.dim];
        loop {
            let m = MultiSet::from_counts(current.clone());
            if self.contains(&m)? != other.contains(&m)? {
                return Ok(false);
            }
            // odometer increment
            let mut i = 0;
            loop {
                if i == self.dim {
                    return Ok(true);
                }
                if current[i] < bound {
                    current[i] += 1;
                    break;
                }
                current[i] = 0;
                i += 1;
            }
        }
    }
}
