use super::{check_source_count, full_mask, BinaryFuzzyMeasure, MeasureError};

/// Default limit on enumeration: 7579 measures at S = 5.
pub const DEFAULT_ENUMERATION_CAP: usize = 5;
/// No cap may exceed this; S = 7 already has ~2.4e12 measures.
pub const MAX_ENUMERATION_CAP: usize = 6;

// Dedekind numbers M(S) minus the two constant Boolean functions, which
// violate the pinned ends.
const MEASURE_COUNTS: [&str; 10] = [
    "0",
    "1",
    "4",
    "18",
    "166",
    "7579",
    "7828352",
    "2414682040996",
    "56130437228687557907786",
    "286386577668298411128469151667598498812364",
];

/// Exact number of binary fuzzy measures on `source_count` sources, as a
/// decimal string, when it is known.
pub fn measure_count(source_count: usize) -> Option<String> {
    MEASURE_COUNTS.get(source_count).map(|s| s.to_string())
}

/// Every binary fuzzy measure on `source_count ≤ 5` sources, each exactly once.
pub fn enumerate_all(source_count: usize) -> Result<MeasureEnumerator, MeasureError> {
    enumerate_all_with_cap(source_count, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_all_with_cap(
    source_count: usize,
    cap: usize,
) -> Result<MeasureEnumerator, MeasureError> {
    check_source_count(source_count)?;
    let cap = cap.min(MAX_ENUMERATION_CAP);
    if source_count > cap {
        return Err(MeasureError::EnumerationRefused {
            source_count,
            cap,
            estimate: measure_count(source_count)
                .unwrap_or_else(|| "more than 10^41".to_string()),
        });
    }
    Ok(MeasureEnumerator::new(source_count))
}

/// Depth-first walk over assignments of the free lattice elements in
/// cardinality order. An element is forced to 1 when any immediate subset
/// is 1; otherwise it branches 0 then 1. Every leaf is monotone, so the walk
/// yields each measure once, in lexicographic order of the free bits.
#[derive(Debug, Clone)]
pub struct MeasureEnumerator {
    source_count: usize,
    order: Vec<usize>,
    bits: Vec<bool>,
    started: bool,
    done: bool,
}

impl MeasureEnumerator {
    fn new(source_count: usize) -> Self {
        let full = full_mask(source_count);
        let order: Vec<usize> = super::cardinality_order(source_count)
            .filter(|&m| m != 0 && m != full)
            .collect();
        let mut bits = vec![false; full + 1];
        bits[full] = true;
        Self {
            source_count,
            order,
            bits,
            started: false,
            done: false,
        }
    }

    fn forced(&self, mask: usize) -> bool {
        let mut rest = mask;
        while rest != 0 {
            let bit = rest & rest.wrapping_neg();
            if self.bits[mask ^ bit] {
                return true;
            }
            rest ^= bit;
        }
        false
    }

    fn fill_from(&mut self, start: usize) {
        for p in start..self.order.len() {
            let mask = self.order[p];
            self.bits[mask] = self.forced(mask);
        }
    }

    fn current(&self) -> BinaryFuzzyMeasure {
        BinaryFuzzyMeasure::from_raw(self.source_count, &self.bits)
            .expect("enumerator keeps a full-length table")
    }
}

impl Iterator for MeasureEnumerator {
    type Item = BinaryFuzzyMeasure;

    fn next(&mut self) -> Option<BinaryFuzzyMeasure> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.fill_from(0);
            return Some(self.current());
        }
        // Deepest element still at its free 0 branch moves to 1.
        for p in (0..self.order.len()).rev() {
            let mask = self.order[p];
            if !self.bits[mask] && !self.forced(mask) {
                self.bits[mask] = true;
                self.fill_from(p + 1);
                return Some(self.current());
            }
        }
        self.done = true;
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::FuzzyMeasure;

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_all(1).unwrap().count(), 1);
        assert_eq!(enumerate_all(2).unwrap().count(), 4);
        assert_eq!(enumerate_all(3).unwrap().count(), 18);
    }

    #[test]
    fn five_sources_match_dedekind() {
        let all: Vec<_> = enumerate_all(5).unwrap().collect();
        assert_eq!(all.len().to_string(), measure_count(5).unwrap());
        assert!(all.iter().all(|m| m.validate().is_valid()));
    }

    #[test]
    fn first_is_minimum_last_is_maximum() {
        let all: Vec<_> = enumerate_all(3).unwrap().collect();
        assert_eq!(all[0], BinaryFuzzyMeasure::minimum(3).unwrap());
        assert_eq!(all[all.len() - 1], BinaryFuzzyMeasure::maximum(3).unwrap());
    }

    #[test]
    fn refuses_above_cap_with_estimate() {
        match enumerate_all(6) {
            Err(MeasureError::EnumerationRefused { estimate, cap, .. }) => {
                assert_eq!(cap, 5);
                assert_eq!(estimate, "7828352");
            }
            other => panic!("expected refusal, got {other:?}"),
        }
        assert!(enumerate_all_with_cap(9, 20).is_err());
        assert_eq!(measure_count(4).as_deref(), Some("166"));
    }
}
