//! Fuzzy measures on the subset lattice of `S` sources.
//!
//! A subset is identified by its bitmask: bit `i` is set when source `i`
//! (element `i` of an instance vector) belongs to it. Both measure types are
//! indexed by that mask, so `values[0]` is the empty set and
//! `values[(1 << S) - 1]` is the full set.
//!
//! Measures are immutable values. Edits such as
//! [`BinaryFuzzyMeasure::set_with_repair`] return a new measure.

mod binary;
mod doc;
mod enumerate;
mod real;

use std::fmt;

use thiserror::Error;

pub use binary::{sample_random, sample_random_with, BinaryFuzzyMeasure};
pub use doc::{Measure, MeasureDoc, MeasureJsonError, MeasureValues};
pub use enumerate::{
    enumerate_all, enumerate_all_with_cap, measure_count, MeasureEnumerator,
    DEFAULT_ENUMERATION_CAP, MAX_ENUMERATION_CAP,
};
pub use real::{sample_random_real, sample_random_real_with, RealFuzzyMeasure};

/// Largest source count a measure may have (2^24 lattice elements).
pub const MAX_SOURCES: usize = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("source count {0} outside supported range 1..={MAX_SOURCES}")]
    SourceCountOutOfRange(usize),
    #[error("a measure on {source_count} sources has {expected} values, got {found}")]
    LengthMismatch {
        source_count: usize,
        expected: usize,
        found: usize,
    },
    #[error("subset mask {mask:#b} does not fit {source_count} sources")]
    SubsetOutOfRange { mask: u64, source_count: usize },
    #[error("source index {index} out of range for {source_count} sources")]
    SourceIndexOutOfRange { index: usize, source_count: usize },
    #[error("{0} is pinned by the measure axioms and cannot be set")]
    PinnedElement(SourceSet),
    #[error("sampling density {0} must lie strictly between 0 and 1")]
    InvalidDensity(f64),
    #[error("value {value} for {set} lies outside its admissible range [{low}, {high}]")]
    ValueOutOfBounds {
        set: SourceSet,
        value: f64,
        low: f64,
        high: f64,
    },
    #[error("measure violates its axioms: {0}")]
    Invalid(ValidityReport),
    #[error(
        "refusing to enumerate measures on {source_count} sources (cap {cap}): there are {estimate} of them"
    )]
    EnumerationRefused {
        source_count: usize,
        cap: usize,
        estimate: String,
    },
}

pub fn check_source_count(source_count: usize) -> Result<(), MeasureError> {
    if (1..=MAX_SOURCES).contains(&source_count) {
        Ok(())
    } else {
        Err(MeasureError::SourceCountOutOfRange(source_count))
    }
}

/// Mask of the full source set.
#[inline]
pub fn full_mask(source_count: usize) -> usize {
    (1usize << source_count) - 1
}

/// A subset of the `S` sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SourceSet {
    mask: u32,
    source_count: u8,
}

impl SourceSet {
    pub fn new(mask: u64, source_count: usize) -> Result<Self, MeasureError> {
        check_source_count(source_count)?;
        if mask >> source_count != 0 {
            return Err(MeasureError::SubsetOutOfRange { mask, source_count });
        }
        Ok(Self {
            mask: mask as u32,
            source_count: source_count as u8,
        })
    }

    pub fn from_sources(sources: &[usize], source_count: usize) -> Result<Self, MeasureError> {
        check_source_count(source_count)?;
        let mut mask = 0u64;
        for &index in sources {
            if index >= source_count {
                return Err(MeasureError::SourceIndexOutOfRange {
                    index,
                    source_count,
                });
            }
            mask |= 1 << index;
        }
        Self::new(mask, source_count)
    }

    pub fn empty(source_count: usize) -> Result<Self, MeasureError> {
        Self::new(0, source_count)
    }

    pub fn full(source_count: usize) -> Result<Self, MeasureError> {
        check_source_count(source_count)?;
        Self::new(full_mask(source_count) as u64, source_count)
    }

    // Internal constructor for masks already known to be in range.
    pub(crate) fn from_mask(mask: usize, source_count: usize) -> Self {
        debug_assert!(mask >> source_count == 0);
        Self {
            mask: mask as u32,
            source_count: source_count as u8,
        }
    }

    pub fn mask(&self) -> usize {
        self.mask as usize
    }

    pub fn source_count(&self) -> usize {
        usize::from(self.source_count)
    }

    /// Number of sources in the subset.
    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn is_full(&self) -> bool {
        self.mask() == full_mask(self.source_count())
    }

    pub fn contains(&self, source: usize) -> bool {
        source < self.source_count() && self.mask & (1 << source) != 0
    }

    /// Bitwise containment: `self ⊆ other`.
    pub fn is_subset_of(&self, other: &SourceSet) -> bool {
        self.mask & other.mask == self.mask
    }

    /// Zero-based source indices, ascending.
    pub fn sources(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.source_count()).filter(move |&i| self.mask & (1 << i) != 0)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.sources().collect()
    }
}

/// One-based source labels, e.g. `{1,3}` for sources 0 and 2.
impl fmt::Display for SourceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, source) in self.sources().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", source + 1)?;
        }
        f.write_str("}")
    }
}

/// Subsets with exactly `cardinality` members in increasing mask order
/// (Gosper's hack).
pub(crate) fn masks_with_cardinality(
    source_count: usize,
    cardinality: usize,
) -> impl Iterator<Item = usize> {
    let limit = 1u64 << source_count;
    let mut next = if cardinality > source_count {
        limit
    } else {
        (1u64 << cardinality) - 1
    };
    std::iter::from_fn(move || {
        if next >= limit {
            return None;
        }
        let current = next;
        if current == 0 {
            next = limit;
        } else {
            let lowest = current & current.wrapping_neg();
            let ripple = current + lowest;
            next = ripple | (((ripple ^ current) / lowest) >> 2);
        }
        Some(current as usize)
    })
}

/// Every subset, by increasing cardinality and then increasing mask.
pub(crate) fn cardinality_order(source_count: usize) -> impl Iterator<Item = usize> {
    (0..=source_count).flat_map(move |k| masks_with_cardinality(source_count, k))
}

/// A set function on the subset lattice, readable by mask.
pub trait FuzzyMeasure: Sync {
    fn source_count(&self) -> usize;

    /// Value at `mask`. Callers guarantee `mask < 2^S`.
    fn value(&self, mask: usize) -> f64;

    /// Choquet integral over a precomputed descending chain: `sorted[k]` is
    /// the (k+1)-th largest confidence and `chain[k]` the mask of the top
    /// k+1 sources. Binary measures override this with an exact shortcut.
    fn integrate_chain(&self, sorted: &[f64], chain: &[u32]) -> f64 {
        let mut acc = 0.0;
        for k in 0..sorted.len() {
            let next = sorted.get(k + 1).copied().unwrap_or(0.0);
            acc += (sorted[k] - next) * self.value(chain[k] as usize);
        }
        acc
    }

    fn lattice_size(&self) -> usize {
        1 << self.source_count()
    }

    fn validate(&self) -> ValidityReport {
        validate_with(self.source_count(), |mask| self.value(mask))
    }
}

/// An axiom a measure fails.
#[derive(Debug, Clone, PartialEq)]
pub enum AxiomViolation {
    /// The empty set must map to 0.
    EmptySet { value: f64 },
    /// The full set must map to 1.
    Normalization { value: f64 },
    /// A value outside [0, 1] (or NaN).
    Range { set: SourceSet, value: f64 },
    /// `subset ⊆ superset` but `g(subset) > g(superset)`. Only the first
    /// offending covering pair is reported.
    Monotonicity {
        subset: SourceSet,
        superset: SourceSet,
        subset_value: f64,
        superset_value: f64,
    },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::EmptySet { value } => write!(f, "empty-set rule: g({{}}) = {value}"),
            AxiomViolation::Normalization { value } => {
                write!(f, "normalization: g(full set) = {value}")
            }
            AxiomViolation::Range { set, value } => write!(f, "range: g({set}) = {value}"),
            AxiomViolation::Monotonicity {
                subset,
                superset,
                subset_value,
                superset_value,
            } => write!(
                f,
                "monotonicity: g({subset}) = {subset_value} > g({superset}) = {superset_value}"
            ),
        }
    }
}

/// Outcome of checking the measure axioms.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidityReport {
    pub violations: Vec<AxiomViolation>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates_empty_set(&self) -> bool {
        self.violations
            .iter()
            .any(|v| matches!(v, AxiomViolation::EmptySet { .. }))
    }

    pub fn violates_normalization(&self) -> bool {
        self.violations
            .iter()
            .any(|v| matches!(v, AxiomViolation::Normalization { .. }))
    }

    pub fn violates_monotonicity(&self) -> bool {
        self.violations
            .iter()
            .any(|v| matches!(v, AxiomViolation::Monotonicity { .. }))
    }

    pub fn into_result(self) -> Result<(), MeasureError> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(MeasureError::Invalid(self))
        }
    }
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (n, v) in self.violations.iter().enumerate() {
            if n > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks the axioms on a raw value table. The only error is structural
/// (wrong length or source count); axiom failures land in the report.
pub fn validate_values(source_count: usize, values: &[f64]) -> Result<ValidityReport, MeasureError> {
    check_source_count(source_count)?;
    let expected = 1usize << source_count;
    if values.len() != expected {
        return Err(MeasureError::LengthMismatch {
            source_count,
            expected,
            found: values.len(),
        });
    }
    Ok(validate_with(source_count, |mask| values[mask]))
}

// Monotonicity is checked on the S·2^(S-1) covering pairs (A, A ∪ {i}),
// which implies it for every A ⊆ B by transitivity.
pub(crate) fn validate_with(source_count: usize, value: impl Fn(usize) -> f64) -> ValidityReport {
    let full = full_mask(source_count);
    let mut violations = Vec::new();
    let empty = value(0);
    if empty != 0.0 {
        violations.push(AxiomViolation::EmptySet { value: empty });
    }
    let top = value(full);
    if top != 1.0 {
        violations.push(AxiomViolation::Normalization { value: top });
    }
    for mask in 1..full {
        let v = value(mask);
        if !(0.0..=1.0).contains(&v) {
            violations.push(AxiomViolation::Range {
                set: SourceSet::from_mask(mask, source_count),
                value: v,
            });
            break;
        }
    }
    'outer: for mask in 0..full {
        let v = value(mask);
        for i in 0..source_count {
            let bit = 1 << i;
            if mask & bit != 0 {
                continue;
            }
            let w = value(mask | bit);
            if v > w {
                violations.push(AxiomViolation::Monotonicity {
                    subset: SourceSet::from_mask(mask, source_count),
                    superset: SourceSet::from_mask(mask | bit, source_count),
                    subset_value: v,
                    superset_value: w,
                });
                break 'outer;
            }
        }
    }
    ValidityReport { violations }
}
