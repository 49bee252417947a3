//! Finite sets of integer vectors in `ℤⁿ` with sumset algebra, and
//! constructive, self-verifying versions of the covering, Plünnecke–Ruzsa,
//! dilated-sumset, entropy and Balog–Szemerédi–Gowers statements.

mod lemmas;
pub mod suite;

pub use lemmas::{
    bsg_construct, entropy_of_sum, exg_construct, plunnecke_check, ruzsa_cover, setsum_bound_check,
    setsum_exponent, BsgOutcome, BsgReport, BsgStrategy, CoverReport, ExgReport, PlunneckeReport,
    SetsumReport,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// A finite, deduplicated set of integer vectors of a common dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVectorSet {
    dim: usize,
    elements: BTreeSet<Vec<i64>>,
}

impl IntVectorSet {
    pub fn new<I>(dim: usize, elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<i64>>,
    {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        let mut set = BTreeSet::new();
        for v in elements {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
            }
            set.insert(v);
        }
        Ok(Self { dim, elements: set })
    }

    pub fn empty(dim: usize) -> Self {
        Self { dim, elements: BTreeSet::new() }
    }

    /// One-dimensional set.
    pub fn from_scalars<I: IntoIterator<Item = i64>>(values: I) -> Self {
        Self {
            dim: 1,
            elements: values.into_iter().map(|v| vec![v]).collect(),
        }
    }

    /// `{lo, lo+1, …, hi}` in one dimension.
    pub fn interval(lo: i64, hi: i64) -> Self {
        Self::from_scalars(lo..=hi)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.elements.contains(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.elements.iter()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.elements.is_subset(&other.elements)
    }

    /// Coordinates of a one-dimensional set.
    pub fn to_scalars(&self) -> Option<Vec<i64>> {
        (self.dim == 1).then(|| self.elements.iter().map(|v| v[0]).collect())
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    fn combine_with(&self, other: &Self, op: impl Fn(i64, i64) -> i64) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = BTreeSet::new();
        for a in &self.elements {
            for b in &other.elements {
                out.insert(a.iter().zip(b).map(|(x, y)| op(*x, *y)).collect());
            }
        }
        Ok(Self { dim: self.dim, elements: out })
    }

    /// `A + B`.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.combine_with(other, |x, y| x + y)
    }

    /// `A − B`.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.combine_with(other, |x, y| x - y)
    }

    /// `p·A = {p·a}`.
    pub fn dilate(&self, p: i64) -> Self {
        Self {
            dim: self.dim,
            elements: self
                .elements
                .iter()
                .map(|v| v.iter().map(|x| p * x).collect())
                .collect(),
        }
    }

    /// `p⋆A = A + ⋯ + A` (`p` summands).
    pub fn iterate(&self, p: u32) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidArgument("iterated sumset needs p ≥ 1".into()));
        }
        let mut acc = self.clone();
        for _ in 1..p {
            acc = acc.sum(self)?;
        }
        Ok(acc)
    }

    pub fn translate(&self, shift: &[i64]) -> Self {
        Self {
            dim: self.dim,
            elements: self
                .elements
                .iter()
                .map(|v| v.iter().zip(shift).map(|(x, s)| x + s).collect())
                .collect(),
        }
    }
}

impl fmt::Display for IntVectorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if self.dim == 1 {
                write!(f, "{}", v[0])?;
            } else {
                write!(f, "{v:?}")?;
            }
        }
        write!(f, "}}")
    }
}

impl FromIterator<i64> for IntVectorSet {
    fn from_iter<T: IntoIterator<Item = i64>>(iter: T) -> Self {
        Self::from_scalars(iter)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combine {
    Sum,
    Difference,
    Dilate(i64),
    Iterate(u32),
}

/// Sumset operations by kind; `Dilate` and `Iterate` ignore `b`.
pub fn set_combine(kind: Combine, a: &IntVectorSet, b: Option<&IntVectorSet>) -> Result<IntVectorSet> {
    let need_b = || b.ok_or_else(|| Error::InvalidArgument("second operand required".into()));
    match kind {
        Combine::Sum => a.sum(need_b()?),
        Combine::Difference => a.difference(need_b()?),
        Combine::Dilate(p) => Ok(a.dilate(p)),
        Combine::Iterate(p) => a.iterate(p),
    }
}

/// A subset `F ⊆ A × B`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairSubset {
    pairs: BTreeSet<(Vec<i64>, Vec<i64>)>,
}

impl PairSubset {
    pub fn new<I: IntoIterator<Item = (Vec<i64>, Vec<i64>)>>(pairs: I) -> Self {
        Self { pairs: pairs.into_iter().collect() }
    }

    pub fn from_scalar_pairs<I: IntoIterator<Item = (i64, i64)>>(pairs: I) -> Self {
        Self::new(pairs.into_iter().map(|(a, b)| (vec![a], vec![b])))
    }

    /// `A × B`.
    pub fn full(a: &IntVectorSet, b: &IntVectorSet) -> Self {
        Self::new(a.iter().flat_map(|x| b.iter().map(move |y| (x.clone(), y.clone()))))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Vec<i64>, Vec<i64>)> {
        self.pairs.iter()
    }

    pub fn validate(&self, a: &IntVectorSet, b: &IntVectorSet) -> Result<()> {
        if self.pairs.iter().all(|(x, y)| a.contains(x) && b.contains(y)) {
            Ok(())
        } else {
            Err(Error::InvalidPair)
        }
    }
}

/// `A +_F B = {a + b : (a, b) ∈ F}`.
pub fn partial_sumset(a: &IntVectorSet, b: &IntVectorSet, f: &PairSubset) -> Result<IntVectorSet> {
    a.check_dim(b)?;
    f.validate(a, b)?;
    IntVectorSet::new(
        a.dim,
        f.iter().map(|(x, y)| x.iter().zip(y).map(|(u, v)| u + v).collect()),
    )
}

/// All representations `s = a + b` with `(a, b) ∈ A × B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumFiber {
    pub target: Vec<i64>,
    pub pairs: Vec<(Vec<i64>, Vec<i64>)>,
}

pub fn sum_fiber(a: &IntVectorSet, b: &IntVectorSet, target: &[i64]) -> Result<SumFiber> {
    a.check_dim(b)?;
    let pairs = a
        .iter()
        .filter_map(|x| {
            let y: Vec<i64> = target.iter().zip(x).map(|(s, u)| s - u).collect();
            b.contains(&y).then(|| (x.clone(), y))
        })
        .collect();
    Ok(SumFiber { target: target.to_vec(), pairs })
}

/// `|T(s)|` for every `s ∈ A + B`.
pub fn fiber_sizes(a: &IntVectorSet, b: &IntVectorSet) -> Result<BTreeMap<Vec<i64>, usize>> {
    a.check_dim(b)?;
    let mut sizes = BTreeMap::new();
    for x in a.iter() {
        for y in b.iter() {
            let s: Vec<i64> = x.iter().zip(y).map(|(u, v)| u + v).collect();
            *sizes.entry(s).or_insert(0) += 1;
        }
    }
    Ok(sizes)
}
