use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    check_source_count, full_mask, masks_with_cardinality, FuzzyMeasure, MeasureError, SourceSet,
};

/// A monotone `[0, 1]`-valued fuzzy measure indexed by subset mask.
#[derive(Debug, Clone, PartialEq)]
pub struct RealFuzzyMeasure {
    source_count: usize,
    values: Vec<f64>,
}

impl RealFuzzyMeasure {
    pub(crate) fn from_values_unchecked(source_count: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), 1 << source_count);
        Self {
            source_count,
            values,
        }
    }

    /// Wraps a value table without checking the axioms.
    pub fn from_raw(source_count: usize, values: Vec<f64>) -> Result<Self, MeasureError> {
        check_source_count(source_count)?;
        let expected = 1usize << source_count;
        if values.len() != expected {
            return Err(MeasureError::LengthMismatch {
                source_count,
                expected,
                found: values.len(),
            });
        }
        Ok(Self::from_values_unchecked(source_count, values))
    }

    pub fn try_new(source_count: usize, values: Vec<f64>) -> Result<Self, MeasureError> {
        let m = Self::from_raw(source_count, values)?;
        m.validate().into_result()?;
        Ok(m)
    }

    pub fn source_count(&self) -> usize {
        self.source_count
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, set: SourceSet) -> f64 {
        self.values[set.mask()]
    }

    /// The interval a single element may take without breaking
    /// monotonicity: `[max over immediate subsets, min over immediate
    /// supersets]`. Pinned elements have a degenerate interval.
    pub fn bounds(&self, mask: usize) -> (f64, f64) {
        let full = full_mask(self.source_count);
        if mask == 0 {
            return (0.0, 0.0);
        }
        if mask == full {
            return (1.0, 1.0);
        }
        let mut low = 0.0f64;
        let mut high = 1.0f64;
        for i in 0..self.source_count {
            let bit = 1 << i;
            if mask & bit != 0 {
                low = low.max(self.values[mask ^ bit]);
            } else {
                high = high.min(self.values[mask | bit]);
            }
        }
        (low, high)
    }

    /// Replaces one non-pinned element with a value inside its bounds.
    pub fn with_value(&self, set: SourceSet, value: f64) -> Result<Self, MeasureError> {
        if set.source_count() != self.source_count {
            return Err(MeasureError::SubsetOutOfRange {
                mask: set.mask() as u64,
                source_count: self.source_count,
            });
        }
        if set.is_empty() || set.is_full() {
            return Err(MeasureError::PinnedElement(set));
        }
        let (low, high) = self.bounds(set.mask());
        if !(low..=high).contains(&value) {
            return Err(MeasureError::ValueOutOfBounds {
                set,
                value,
                low,
                high,
            });
        }
        Ok(self.with_value_unchecked(set.mask(), value))
    }

    pub(crate) fn with_value_unchecked(&self, mask: usize, value: f64) -> Self {
        let mut out = self.clone();
        out.values[mask] = value;
        out
    }

    /// Every non-empty set at 1 (the real counterpart of the maximum BFM).
    pub fn maximum(source_count: usize) -> Result<Self, MeasureError> {
        check_source_count(source_count)?;
        let mut values = vec![1.0; 1 << source_count];
        values[0] = 0.0;
        Ok(Self::from_values_unchecked(source_count, values))
    }

    /// Only the full set at 1.
    pub fn minimum(source_count: usize) -> Result<Self, MeasureError> {
        check_source_count(source_count)?;
        let mut values = vec![0.0; 1 << source_count];
        values[full_mask(source_count)] = 1.0;
        Ok(Self::from_values_unchecked(source_count, values))
    }
}

impl FuzzyMeasure for RealFuzzyMeasure {
    fn source_count(&self) -> usize {
        self.source_count
    }

    #[inline]
    fn value(&self, mask: usize) -> f64 {
        self.values[mask]
    }
}

/// Random real measure: subsets visited by increasing cardinality, each drawn
/// uniformly from `[max over immediate subsets, 1]`.
pub fn sample_random_real(
    source_count: usize,
    rng_seed: u64,
) -> Result<RealFuzzyMeasure, MeasureError> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    sample_random_real_with(source_count, &mut rng)
}

pub fn sample_random_real_with<R: Rng + ?Sized>(
    source_count: usize,
    rng: &mut R,
) -> Result<RealFuzzyMeasure, MeasureError> {
    check_source_count(source_count)?;
    let mut values = vec![0.0; 1 << source_count];
    for k in 1..source_count {
        for mask in masks_with_cardinality(source_count, k) {
            let mut low = 0.0f64;
            let mut rest = mask;
            while rest != 0 {
                let bit = rest & rest.wrapping_neg();
                low = low.max(values[mask ^ bit]);
                rest ^= bit;
            }
            values[mask] = if low < 1.0 {
                rng.random_range(low..=1.0)
            } else {
                1.0
            };
        }
    }
    values[full_mask(source_count)] = 1.0;
    Ok(RealFuzzyMeasure::from_values_unchecked(source_count, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_source_is_pinned() {
        let m = sample_random_real(1, 4).unwrap();
        assert_eq!(m.values(), &[0.0, 1.0]);
    }

    #[test]
    fn samples_are_valid_and_reproducible() {
        for seed in 0..50 {
            let m = sample_random_real(5, seed).unwrap();
            assert!(m.validate().is_valid(), "seed {seed}: {}", m.validate());
        }
        assert_eq!(sample_random_real(4, 9).unwrap(), sample_random_real(4, 9).unwrap());
        assert!(sample_random_real(25, 0).is_err());
    }

    #[test]
    fn bounds_and_edits() {
        let m = RealFuzzyMeasure::try_new(2, vec![0.0, 0.3, 0.6, 1.0]).unwrap();
        assert_eq!(m.bounds(1), (0.0, 1.0));
        let a = SourceSet::from_sources(&[0], 2).unwrap();
        assert!(m.with_value(a, 0.9).is_ok());
        assert!(matches!(
            m.with_value(SourceSet::full(2).unwrap(), 0.5),
            Err(MeasureError::PinnedElement(_))
        ));
        let m3 = RealFuzzyMeasure::try_new(3, vec![0.0, 0.2, 0.3, 0.5, 0.1, 0.4, 0.6, 1.0]).unwrap();
        assert_eq!(m3.bounds(0b011), (0.3, 1.0));
        assert_eq!(m3.bounds(0b001), (0.0, 0.4));
        let single = SourceSet::from_sources(&[0], 3).unwrap();
        assert!(matches!(
            m3.with_value(single, 0.45),
            Err(MeasureError::ValueOutOfBounds { .. })
        ));
    }
}
