use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    cardinality_order, check_source_count, full_mask, masks_with_cardinality, FuzzyMeasure,
    MeasureError, RealFuzzyMeasure, SourceSet,
};

/// A monotone `{0, 1}`-valued set function with `g(∅) = 0` and `g(S) = 1`,
/// stored as a packed bit array indexed by subset mask.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryFuzzyMeasure {
    source_count: usize,
    words: Vec<u64>,
}

impl BinaryFuzzyMeasure {
    fn zeroed(source_count: usize) -> Self {
        let len = 1usize << source_count;
        Self {
            source_count,
            words: vec![0; len.div_ceil(64)],
        }
    }

    #[inline]
    fn put(&mut self, mask: usize, bit: bool) {
        let word = &mut self.words[mask >> 6];
        if bit {
            *word |= 1 << (mask & 63);
        } else {
            *word &= !(1 << (mask & 63));
        }
    }

    /// Wraps a raw bit table without checking the axioms; use
    /// [`FuzzyMeasure::validate`] to inspect it.
    pub fn from_raw(source_count: usize, bits: &[bool]) -> Result<Self, MeasureError> {
        check_source_count(source_count)?;
        let expected = 1usize << source_count;
        if bits.len() != expected {
            return Err(MeasureError::LengthMismatch {
                source_count,
                expected,
                found: bits.len(),
            });
        }
        let mut m = Self::zeroed(source_count);
        for (mask, &bit) in bits.iter().enumerate() {
            m.put(mask, bit);
        }
        Ok(m)
    }

    /// Builds a measure and rejects it unless all axioms hold.
    pub fn try_new(source_count: usize, bits: &[bool]) -> Result<Self, MeasureError> {
        let m = Self::from_raw(source_count, bits)?;
        m.validate().into_result()?;
        Ok(m)
    }

    /// Only the full set is 1. The Choquet integral reduces to `min`.
    pub fn minimum(source_count: usize) -> Result<Self, MeasureError> {
        check_source_count(source_count)?;
        let mut m = Self::zeroed(source_count);
        m.put(full_mask(source_count), true);
        Ok(m)
    }

    /// Every non-empty set is 1. The Choquet integral reduces to `max`.
    pub fn maximum(source_count: usize) -> Result<Self, MeasureError> {
        check_source_count(source_count)?;
        let mut m = Self::zeroed(source_count);
        for mask in 1..=full_mask(source_count) {
            m.put(mask, true);
        }
        Ok(m)
    }

    /// Upward closure of an antichain of winning coalitions.
    pub fn from_minimal_winning(
        source_count: usize,
        coalitions: &[SourceSet],
    ) -> Result<Self, MeasureError> {
        check_source_count(source_count)?;
        let mut m = Self::zeroed(source_count);
        for c in coalitions {
            if c.source_count() != source_count {
                return Err(MeasureError::SubsetOutOfRange {
                    mask: c.mask() as u64,
                    source_count,
                });
            }
            m.put(c.mask(), true);
        }
        // Ascending masks visit every immediate subset before its supersets.
        for mask in 1..=full_mask(source_count) {
            if !m.get(mask) && m.any_immediate_subset_set(mask) {
                m.put(mask, true);
            }
        }
        m.validate().into_result()?;
        Ok(m)
    }

    pub fn source_count(&self) -> usize {
        self.source_count
    }

    #[inline]
    pub fn get(&self, mask: usize) -> bool {
        self.words[mask >> 6] >> (mask & 63) & 1 == 1
    }

    pub fn get_set(&self, set: SourceSet) -> bool {
        self.get(set.mask())
    }

    /// Number of subsets mapped to 1.
    pub fn ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..1usize << self.source_count).map(move |mask| self.get(mask))
    }

    fn any_immediate_subset_set(&self, mask: usize) -> bool {
        let mut rest = mask;
        while rest != 0 {
            let bit = rest & rest.wrapping_neg();
            if self.get(mask ^ bit) {
                return true;
            }
            rest ^= bit;
        }
        false
    }

    fn all_immediate_subsets_clear(&self, mask: usize) -> bool {
        !self.any_immediate_subset_set(mask)
    }

    /// Sets `subset` to `bit` and repairs monotonicity: raising a subset
    /// raises all of its supersets, lowering it lowers all of its subsets.
    /// The empty and full sets are pinned and cannot be targeted.
    pub fn set_with_repair(&self, subset: SourceSet, bit: bool) -> Result<Self, MeasureError> {
        if subset.source_count() != self.source_count {
            return Err(MeasureError::SubsetOutOfRange {
                mask: subset.mask() as u64,
                source_count: self.source_count,
            });
        }
        if subset.is_empty() || subset.is_full() {
            return Err(MeasureError::PinnedElement(subset));
        }
        Ok(self.set_unpinned(subset.mask(), bit))
    }

    pub(crate) fn set_unpinned(&self, target: usize, bit: bool) -> Self {
        let mut out = self.clone();
        let full = full_mask(self.source_count);
        if bit {
            // Supersets of target: target | x for every x over the complement.
            let free = full & !target;
            let mut x = free;
            loop {
                out.put(target | x, true);
                if x == 0 {
                    break;
                }
                x = (x - 1) & free;
            }
        } else {
            let mut x = target;
            loop {
                if x != 0 {
                    out.put(x, false);
                }
                if x == 0 {
                    break;
                }
                x = (x - 1) & target;
            }
        }
        out
    }

    /// Coalitions mapped to 1 whose every immediate subset maps to 0, in
    /// increasing cardinality order. Their upward closure is the measure.
    pub fn minimal_winning_coalitions(&self) -> Vec<SourceSet> {
        cardinality_order(self.source_count)
            .filter(|&mask| self.get(mask) && self.all_immediate_subsets_clear(mask))
            .map(|mask| SourceSet::from_mask(mask, self.source_count))
            .collect()
    }

    /// Coalitions mapped to 0 whose every immediate superset maps to 1.
    pub fn maximal_losing_coalitions(&self) -> Vec<SourceSet> {
        let full = full_mask(self.source_count);
        cardinality_order(self.source_count)
            .filter(|&mask| {
                !self.get(mask)
                    && (0..self.source_count)
                        .map(|i| 1 << i)
                        .filter(|bit| mask & bit == 0)
                        .all(|bit| self.get(mask | bit))
            })
            .filter(|&mask| mask != full)
            .map(|mask| SourceSet::from_mask(mask, self.source_count))
            .collect()
    }

    pub fn to_real(&self) -> RealFuzzyMeasure {
        let values = self.bits().map(|b| if b { 1.0 } else { 0.0 }).collect();
        RealFuzzyMeasure::from_values_unchecked(self.source_count, values)
    }
}

impl FuzzyMeasure for BinaryFuzzyMeasure {
    fn source_count(&self) -> usize {
        self.source_count
    }

    #[inline]
    fn value(&self, mask: usize) -> f64 {
        if self.get(mask) {
            1.0
        } else {
            0.0
        }
    }

    // With 0/1 weights the sorted-difference sum telescopes to the
    // confidence at the first chain position whose coalition wins.
    #[inline]
    fn integrate_chain(&self, sorted: &[f64], chain: &[u32]) -> f64 {
        for (k, &mask) in chain.iter().enumerate() {
            if self.get(mask as usize) {
                return sorted[k];
            }
        }
        0.0
    }
}

/// Random binary measure. Subsets are visited by increasing cardinality;
/// one is forced to 1 when any immediate subset already is, otherwise it is
/// 1 with probability `density`. The full set is always 1.
pub fn sample_random(
    source_count: usize,
    density: f64,
    rng_seed: u64,
) -> Result<BinaryFuzzyMeasure, MeasureError> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    sample_random_with(source_count, density, &mut rng)
}

pub fn sample_random_with<R: Rng + ?Sized>(
    source_count: usize,
    density: f64,
    rng: &mut R,
) -> Result<BinaryFuzzyMeasure, MeasureError> {
    check_source_count(source_count)?;
    if !(density > 0.0 && density < 1.0) {
        return Err(MeasureError::InvalidDensity(density));
    }
    let mut m = BinaryFuzzyMeasure::zeroed(source_count);
    for k in 1..source_count {
        for mask in masks_with_cardinality(source_count, k) {
            let bit = m.any_immediate_subset_set(mask) || rng.random_bool(density);
            if bit {
                m.put(mask, true);
            }
        }
    }
    m.put(full_mask(source_count), true);
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(sources: &[usize], s: usize) -> SourceSet {
        SourceSet::from_sources(sources, s).unwrap()
    }

    fn ones_at(m: &BinaryFuzzyMeasure) -> Vec<usize> {
        (0..m.lattice_size()).filter(|&x| m.get(x)).collect()
    }

    #[test]
    fn raising_adds_only_supersets() {
        let m = BinaryFuzzyMeasure::minimum(3).unwrap();
        let r = m.set_with_repair(set(&[0, 1], 3), true).unwrap();
        assert_eq!(ones_at(&r), vec![0b011, 0b111]);
        assert!(r.validate().is_valid());
    }

    #[test]
    fn raising_singleton_closes_upward() {
        let m = BinaryFuzzyMeasure::minimum(3).unwrap();
        let r = m.set_with_repair(set(&[0], 3), true).unwrap();
        // Oracle: scan every mask for containment of bit 0.
        let expected: Vec<usize> = (0..8).filter(|x| x & 1 == 1).collect();
        assert_eq!(ones_at(&r), expected);
        assert_eq!(expected, vec![0b001, 0b011, 0b101, 0b111]);
    }

    #[test]
    fn lowering_singleton_of_maximum() {
        let m = BinaryFuzzyMeasure::maximum(3).unwrap();
        let r = m.set_with_repair(set(&[0], 3), false).unwrap();
        let expected: Vec<usize> = (1..8).filter(|&x| x != 1).collect();
        assert_eq!(ones_at(&r), expected);
        assert!(r.validate().is_valid());
    }

    #[test]
    fn lowering_closes_downward() {
        let m = BinaryFuzzyMeasure::maximum(3).unwrap();
        let r = m.set_with_repair(set(&[0, 1], 3), false).unwrap();
        assert_eq!(ones_at(&r), vec![0b100, 0b101, 0b110, 0b111]);
    }

    #[test]
    fn pinned_elements_rejected() {
        let m = BinaryFuzzyMeasure::minimum(3).unwrap();
        assert!(matches!(
            m.set_with_repair(SourceSet::empty(3).unwrap(), true),
            Err(MeasureError::PinnedElement(_))
        ));
        assert!(matches!(
            m.set_with_repair(SourceSet::full(3).unwrap(), false),
            Err(MeasureError::PinnedElement(_))
        ));
    }

    #[test]
    fn learned_measure_readout() {
        let g = BinaryFuzzyMeasure::from_minimal_winning(3, &[set(&[0, 1], 3), set(&[0, 2], 3)])
            .unwrap();
        assert_eq!(ones_at(&g), vec![0b011, 0b101, 0b111]);
        let mwc: Vec<String> = g.minimal_winning_coalitions().iter().map(|c| c.to_string()).collect();
        assert_eq!(mwc, vec!["{1,2}", "{1,3}"]);
        let losing: Vec<String> = g.maximal_losing_coalitions().iter().map(|c| c.to_string()).collect();
        assert_eq!(losing, vec!["{1}", "{2,3}"]);
    }

    #[test]
    fn extreme_measures_readout() {
        let min = BinaryFuzzyMeasure::minimum(3).unwrap();
        assert_eq!(min.minimal_winning_coalitions(), vec![SourceSet::full(3).unwrap()]);
        let max = BinaryFuzzyMeasure::maximum(3).unwrap();
        let singles: Vec<usize> = max.minimal_winning_coalitions().iter().map(|c| c.mask()).collect();
        assert_eq!(singles, vec![1, 2, 4]);
        assert_eq!(max.maximal_losing_coalitions(), vec![SourceSet::empty(3).unwrap()]);
    }

    #[test]
    fn sampling_limits_and_determinism() {
        let low = sample_random(4, 1e-12, 3).unwrap();
        assert_eq!(low, BinaryFuzzyMeasure::minimum(4).unwrap());
        let high = sample_random(4, 1.0 - 1e-12, 3).unwrap();
        assert_eq!(high, BinaryFuzzyMeasure::maximum(4).unwrap());
        assert_eq!(sample_random(3, 0.5, 11).unwrap(), sample_random(3, 0.5, 11).unwrap());
        assert!(sample_random(0, 0.5, 1).is_err());
        assert!(sample_random(25, 0.5, 1).is_err());
        assert!(sample_random(3, 0.0, 1).is_err());
        assert!(sample_random(3, 1.0, 1).is_err());
    }

    #[test]
    fn large_lattice_sampling_is_valid() {
        let m = sample_random(12, 0.02, 5).unwrap();
        assert!(m.validate().is_valid());
        assert_eq!(m.lattice_size(), 4096);
    }

    #[test]
    fn from_raw_checks_length_only() {
        assert!(BinaryFuzzyMeasure::from_raw(2, &[true, false, false, false]).is_ok());
        assert!(BinaryFuzzyMeasure::try_new(2, &[true, false, false, false]).is_err());
        assert!(matches!(
            BinaryFuzzyMeasure::from_raw(2, &[false; 3]),
            Err(MeasureError::LengthMismatch { .. })
        ));
    }
}
