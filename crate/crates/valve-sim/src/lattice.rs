//! Finite integer capability lattice.
//!
//! An AI is summarized by a capability vector: one bounded integer level per
//! capability dimension, ordered componentwise. Danger and escape sets are
//! upward closed and are stored by their minimal generators (an antichain),
//! the only finite description such sets admit. This module also hosts the
//! static escape-coverage check (every dangerous frontier point must have a
//! strictly weaker capability that already suffices to escape) and the
//! sandwich-witness scan used when auditing growth trajectories.

use std::fmt;

use thiserror::Error;

/// Default cap on exhaustive lattice enumeration.
pub const ENUMERATION_CAP: u64 = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("lattice must have at least one dimension")]
    ZeroDims,
    #[error("max_level must be at least 1")]
    ZeroMaxLevel,
    #[error("vector has {got} components, lattice has {want} dimensions")]
    WrongDims { got: usize, want: usize },
    #[error("component {index} is {value}, above max level {max}")]
    ComponentOutOfRange { index: usize, value: u32, max: u32 },
    #[error("generator set is empty")]
    EmptyGenerators,
    #[error("generators are not an antichain: {redundant} dominates {kept}")]
    NotAntichain { redundant: CapVector, kept: CapVector },
    #[error("lattice has {cardinality} points, enumeration cap is {cap}")]
    EnumerationCapExceeded { cardinality: u64, cap: u64 },
}

/// How "strictly below" is read when comparing capability vectors.
///
/// `All` demands a strict drop in every component; `AtLeastOne` demands
/// dominance with a strict drop somewhere. The audit is sound under either
/// reading as long as it is applied consistently, so the choice is a
/// scenario knob (`strictness = "all" | "some"`) defaulting to `All`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Strictness {
    #[default]
    All,
    AtLeastOne,
}

impl Strictness {
    /// Is `a` strictly below `b` under this reading?
    pub fn strictly_below(self, a: &CapVector, b: &CapVector) -> bool {
        match self {
            Strictness::All => a.strictly_below(b),
            Strictness::AtLeastOne => a.leq(b) && a != b,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Strictness::All => "all",
            Strictness::AtLeastOne => "some",
        }
    }
}

/// A point in the capability lattice: one level per dimension.
///
/// `Ord`/`PartialOrd` are the *lexicographic total order*, used only for
/// sorting and canonical set representations. The domain order is the
/// componentwise partial order exposed through [`CapVector::leq`] and
/// [`CapVector::strictly_below`]; the two must not be confused.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CapVector {
    levels: Vec<u32>,
}

impl CapVector {
    pub fn new(levels: Vec<u32>) -> Self {
        assert!(!levels.is_empty(), "capability vector must have at least one component");
        Self { levels }
    }

    pub fn dims(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn level(&self, dim: usize) -> u32 {
        self.levels[dim]
    }

    fn check_dims(&self, other: &Self) {
        assert_eq!(
            self.dims(),
            other.dims(),
            "capability vector dimension mismatch: {} vs {}",
            self.dims(),
            other.dims()
        );
    }

    /// Componentwise order: true iff `self[i] <= other[i]` for every `i`.
    ///
    /// Panics on dimension mismatch.
    pub fn leq(&self, other: &Self) -> bool {
        self.check_dims(other);
        self.levels.iter().zip(&other.levels).all(|(a, b)| a <= b)
    }

    /// Strict componentwise order: true iff `self[i] < other[i]` for every `i`.
    ///
    /// Panics on dimension mismatch.
    pub fn strictly_below(&self, other: &Self) -> bool {
        self.check_dims(other);
        self.levels.iter().zip(&other.levels).all(|(a, b)| a < b)
    }

    /// Add `inc` to every component, saturating at `max_level`.
    pub fn saturating_raise(&self, inc: u32, max_level: u32) -> Self {
        Self {
            levels: self
                .levels
                .iter()
                .map(|&v| v.saturating_add(inc).min(max_level))
                .collect(),
        }
    }
}

impl fmt::Display for CapVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.levels.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// The capability space: `dims` components, each in `0..=max_level`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    pub dims: usize,
    pub max_level: u32,
    pub strictness: Strictness,
}

impl Lattice {
    pub fn new(dims: usize, max_level: u32) -> Result<Self, LatticeError> {
        if dims == 0 {
            return Err(LatticeError::ZeroDims);
        }
        if max_level == 0 {
            return Err(LatticeError::ZeroMaxLevel);
        }
        Ok(Self { dims, max_level, strictness: Strictness::All })
    }

    pub fn with_strictness(mut self, strictness: Strictness) -> Self {
        self.strictness = strictness;
        self
    }

    /// Number of lattice points, `(max_level + 1)^dims`, saturating at
    /// `u64::MAX` if the product overflows.
    pub fn cardinality(&self) -> u64 {
        let base = self.max_level as u64 + 1;
        let mut n: u64 = 1;
        for _ in 0..self.dims {
            n = match n.checked_mul(base) {
                Some(v) => v,
                None => return u64::MAX,
            };
        }
        n
    }

    pub fn contains(&self, v: &CapVector) -> bool {
        v.dims() == self.dims && v.levels().iter().all(|&l| l <= self.max_level)
    }

    /// Validate raw levels into a lattice point.
    pub fn vector(&self, levels: &[u32]) -> Result<CapVector, LatticeError> {
        if levels.len() != self.dims {
            return Err(LatticeError::WrongDims { got: levels.len(), want: self.dims });
        }
        for (index, &value) in levels.iter().enumerate() {
            if value > self.max_level {
                return Err(LatticeError::ComponentOutOfRange {
                    index,
                    value,
                    max: self.max_level,
                });
            }
        }
        Ok(CapVector::new(levels.to_vec()))
    }

    pub fn bottom(&self) -> CapVector {
        CapVector::new(vec![0; self.dims])
    }

    pub fn top(&self) -> CapVector {
        CapVector::new(vec![self.max_level; self.dims])
    }

    /// Every lattice point exactly once, in lexicographic order (leftmost
    /// component most significant). Refuses lattices above the default
    /// enumeration cap.
    pub fn enumerate(&self) -> Result<LatticeIter, LatticeError> {
        self.enumerate_with_cap(ENUMERATION_CAP)
    }

    pub fn enumerate_with_cap(&self, cap: u64) -> Result<LatticeIter, LatticeError> {
        let cardinality = self.cardinality();
        if cardinality > cap {
            return Err(LatticeError::EnumerationCapExceeded { cardinality, cap });
        }
        Ok(LatticeIter { next: Some(vec![0; self.dims]), max_level: self.max_level })
    }
}

/// Iterator over all lattice points in lexicographic order.
#[derive(Debug)]
pub struct LatticeIter {
    next: Option<Vec<u32>>,
    max_level: u32,
}

impl Iterator for LatticeIter {
    type Item = CapVector;

    fn next(&mut self) -> Option<CapVector> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        // Odometer increment, rightmost digit fastest.
        let mut i = succ.len();
        loop {
            if i == 0 {
                self.next = None;
                break;
            }
            i -= 1;
            if succ[i] < self.max_level {
                succ[i] += 1;
                for d in succ.iter_mut().skip(i + 1) {
                    *d = 0;
                }
                self.next = Some(succ);
                break;
            }
        }
        Some(CapVector::new(current))
    }
}

/// An upward-closed set of capability vectors, stored as the antichain of
/// its minimal generators, sorted for a canonical representation.
///
/// Membership is monotone: if `v` is in the set and `v <= w`, then `w` is in
/// the set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UpSet {
    generators: Vec<CapVector>,
}

impl UpSet {
    /// Build from generators that must already form an antichain.
    /// Duplicates and dominated generators are rejected, not repaired; use
    /// [`UpSet::normalized`] when repair is wanted.
    pub fn from_antichain(gens: impl IntoIterator<Item = CapVector>) -> Result<Self, LatticeError> {
        let gens: Vec<CapVector> = gens.into_iter().collect();
        Self::check_consistent_dims(&gens)?;
        for (i, a) in gens.iter().enumerate() {
            for b in gens.iter().skip(i + 1) {
                if a.leq(b) {
                    return Err(LatticeError::NotAntichain {
                        redundant: b.clone(),
                        kept: a.clone(),
                    });
                }
                if b.leq(a) {
                    return Err(LatticeError::NotAntichain {
                        redundant: a.clone(),
                        kept: b.clone(),
                    });
                }
            }
        }
        let mut gens = gens;
        gens.sort();
        Ok(Self { generators: gens })
    }

    /// Reduce an arbitrary nonempty generator set to its minimal antichain.
    /// Membership semantics are unchanged: a vector is in the set iff it
    /// dominates one of the original generators.
    pub fn normalized(gens: impl IntoIterator<Item = CapVector>) -> Result<Self, LatticeError> {
        let gens: Vec<CapVector> = gens.into_iter().collect();
        Self::check_consistent_dims(&gens)?;
        let mut minimal: Vec<CapVector> = Vec::new();
        for g in gens {
            if minimal.iter().any(|m| m.leq(&g)) {
                continue; // dominated by a kept generator
            }
            minimal.retain(|m| !g.leq(m));
            minimal.push(g);
        }
        minimal.sort();
        minimal.dedup();
        Ok(Self { generators: minimal })
    }

    fn check_consistent_dims(gens: &[CapVector]) -> Result<(), LatticeError> {
        let first = gens.first().ok_or(LatticeError::EmptyGenerators)?;
        for g in gens {
            if g.dims() != first.dims() {
                return Err(LatticeError::WrongDims { got: g.dims(), want: first.dims() });
            }
        }
        Ok(())
    }

    pub fn generators(&self) -> &[CapVector] {
        &self.generators
    }

    pub fn dims(&self) -> usize {
        self.generators[0].dims()
    }

    /// Membership: true iff some generator is componentwise below `v`.
    ///
    /// Panics on dimension mismatch.
    pub fn contains(&self, v: &CapVector) -> bool {
        self.generators.iter().any(|g| g.leq(v))
    }

    /// Raise every generator by `inc`, saturating at `max_level`, and
    /// re-normalize (saturation can collapse generators).
    pub fn raised(&self, inc: u32, max_level: u32) -> Self {
        Self::normalized(self.generators.iter().map(|g| g.saturating_raise(inc, max_level)))
            .expect("raising a nonempty antichain keeps it nonempty")
    }
}

impl fmt::Display for UpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "}}")
    }
}

/// Verdict of the escape-coverage check for one danger generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageEntry {
    pub danger: CapVector,
    /// An escape generator strictly below the danger generator, when one exists.
    pub witness: Option<CapVector>,
}

/// Result of checking that every danger generator is covered by a strictly
/// weaker escape generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EscapeCoverage {
    pub entries: Vec<CoverageEntry>,
}

impl EscapeCoverage {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.witness.is_some())
    }

    pub fn failures(&self) -> impl Iterator<Item = &CoverageEntry> {
        self.entries.iter().filter(|e| e.witness.is_none())
    }
}

/// For each danger generator, find an escape generator strictly below it
/// (under the given strictness reading). The check at generator level is
/// equivalent to the pointwise statement over the whole upward-closed danger
/// set: a witness below a generator is strictly below everything above that
/// generator.
pub fn check_escape_coverage(danger: &UpSet, escape: &UpSet, strictness: Strictness) -> EscapeCoverage {
    let entries = danger
        .generators()
        .iter()
        .map(|c| CoverageEntry {
            danger: c.clone(),
            witness: escape
                .generators()
                .iter()
                .find(|a| strictness.strictly_below(a, c))
                .cloned(),
        })
        .collect();
    EscapeCoverage { entries }
}

/// Smallest trajectory index strictly sandwiched between `a` and `c`
/// (`a < trajectory[s] < c` under `strictness`), if any.
pub fn sandwich_witness(
    a: &CapVector,
    c: &CapVector,
    trajectory: &[CapVector],
    strictness: Strictness,
) -> Option<usize> {
    trajectory
        .iter()
        .position(|b| strictness.strictly_below(a, b) && strictness.strictly_below(b, c))
}
