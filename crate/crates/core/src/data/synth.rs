//! Seeded synthetic multi-resolution data with a known binary measure.
//!
//! Instances come in two kinds, defined by the truth measure `g`:
//!
//! - *target*: every source of a random minimal winning coalition `W` is
//!   exactly 1.0 and the remaining sources are drawn from
//!   `[0, TARGET_BACKGROUND_MAX)`, so `C_g = 1`.
//! - *background*: every source of a random maximal losing coalition `L`
//!   is drawn from `[BACKGROUND_HIGH_MIN, 1]` and the remaining sources are
//!   exactly 0.0, so `C_g = 0`. All instances of one candidate set share `L`.
//!
//! Each positive bag hides one target instance in one of its candidate sets;
//! everything else is background. Gaussian noise is then added to every
//! confidence and clipped to `[0, 1]`.

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Bag, BagLabel, CandidateSet, DataError, Dataset, Instance};
use crate::choquet::SortedChain;
use crate::measure::{BinaryFuzzyMeasure, Measure, MeasureDoc, MeasureError, SourceSet};
use crate::rng;

/// Upper bound for the non-coalition sources of a target instance.
pub const TARGET_BACKGROUND_MAX: f64 = 0.5;
/// Lower bound for the losing-coalition sources of a background instance.
pub const BACKGROUND_HIGH_MIN: f64 = 0.5;

/// Inclusive integer range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntRange {
    pub min: usize,
    pub max: usize,
}

impl IntRange {
    pub fn new(min: usize, max: usize) -> Self {
        Self { min, max }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        rng.random_range(self.min..=self.max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub source_count: usize,
    pub n_pos_bags: usize,
    pub n_neg_bags: usize,
    pub sets_per_bag: IntRange,
    pub instances_per_set: IntRange,
    pub noise_sigma: f64,
    pub truth_measure: MeasureDoc,
    pub rng_seed: u64,
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid synthetic spec: {0}")]
    Spec(String),
    #[error("truth measure: {0}")]
    Truth(#[from] MeasureError),
    #[error(transparent)]
    Data(#[from] DataError),
}

impl SynthSpec {
    pub fn validate(&self) -> Result<BinaryFuzzyMeasure, SynthError> {
        let truth = match Measure::try_from(self.truth_measure.clone())? {
            Measure::Binary(m) => m,
            Measure::Real(_) => {
                return Err(SynthError::Spec("truth_measure must be binary".into()));
            }
        };
        if truth.source_count() != self.source_count {
            return Err(SynthError::Spec(format!(
                "truth measure covers {} sources, spec says {}",
                truth.source_count(),
                self.source_count
            )));
        }
        if self.n_pos_bags == 0 || self.n_neg_bags == 0 {
            return Err(SynthError::Spec("bag counts must be positive".into()));
        }
        for (name, r) in [
            ("sets_per_bag", self.sets_per_bag),
            ("instances_per_set", self.instances_per_set),
        ] {
            if r.min == 0 || r.min > r.max {
                return Err(SynthError::Spec(format!(
                    "{name} must be a non-empty range of positive counts, got {}..={}",
                    r.min, r.max
                )));
            }
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(SynthError::Spec(format!(
                "noise_sigma must be finite and non-negative, got {}",
                self.noise_sigma
            )));
        }
        Ok(truth)
    }
}

struct Generator<'a, R> {
    rng: R,
    source_count: usize,
    winning: &'a [Vec<bool>],
    losing: &'a [Vec<bool>],
}

impl<R: Rng> Generator<'_, R> {
    fn target(&mut self) -> Vec<f64> {
        let w = self.winning.choose(&mut self.rng).expect("valid measures have a winning set");
        (0..self.source_count)
            .map(|i| {
                if w[i] {
                    1.0
                } else {
                    self.rng.random_range(0.0..TARGET_BACKGROUND_MAX)
                }
            })
            .collect()
    }

    fn background(&mut self, losing: &[bool]) -> Vec<f64> {
        (0..self.source_count)
            .map(|i| {
                if losing[i] {
                    self.rng.random_range(BACKGROUND_HIGH_MIN..=1.0)
                } else {
                    0.0
                }
            })
            .collect()
    }

    fn candidate_set(&mut self, size: usize) -> Vec<Vec<f64>> {
        let losing = self.losing.choose(&mut self.rng).expect("valid measures have a losing set").clone();
        (0..size).map(|_| self.background(&losing)).collect()
    }
}

// Label, per-set instance values, per-set instance truth.
type RawBag = (BagLabel, Vec<Vec<Vec<f64>>>, Vec<Vec<u8>>);

/// Generates a dataset whose positive bags each contain a target instance
/// and whose negative bags contain only background instances. Identical
/// specs give identical datasets.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<Dataset, SynthError> {
    let truth = spec.validate()?;
    let s = spec.source_count;
    let as_flags = |set: &SourceSet| (0..s).map(|i| set.contains(i)).collect::<Vec<bool>>();
    let winning: Vec<Vec<bool>> = truth.minimal_winning_coalitions().iter().map(as_flags).collect();
    let losing: Vec<Vec<bool>> = truth.maximal_losing_coalitions().iter().map(as_flags).collect();
    let mut gen = Generator {
        rng: rng::stream(spec.rng_seed, rng::SYNTH, 0),
        source_count: s,
        winning: &winning,
        losing: &losing,
    };

    let mut raw_bags: Vec<RawBag> = Vec::new();
    for _ in 0..spec.n_pos_bags {
        let n_sets = spec.sets_per_bag.sample(&mut gen.rng);
        let target_set = gen.rng.random_range(0..n_sets);
        let mut sets = Vec::with_capacity(n_sets);
        let mut truth_labels = Vec::with_capacity(n_sets);
        for k in 0..n_sets {
            let size = spec.instances_per_set.sample(&mut gen.rng);
            let mut set = gen.candidate_set(size);
            let mut labels = vec![0u8; size];
            if k == target_set {
                let slot = gen.rng.random_range(0..size);
                set[slot] = gen.target();
                labels[slot] = 1;
            }
            sets.push(set);
            truth_labels.push(labels);
        }
        raw_bags.push((BagLabel::Positive, sets, truth_labels));
    }
    for _ in 0..spec.n_neg_bags {
        let n_sets = spec.sets_per_bag.sample(&mut gen.rng);
        let mut sets = Vec::with_capacity(n_sets);
        let mut truth_labels = Vec::with_capacity(n_sets);
        for _ in 0..n_sets {
            let size = spec.instances_per_set.sample(&mut gen.rng);
            sets.push(gen.candidate_set(size));
            truth_labels.push(vec![0u8; size]);
        }
        raw_bags.push((BagLabel::Negative, sets, truth_labels));
    }

    debug_assert!(raw_bags.iter().all(|(label, sets, _)| match label {
        BagLabel::Negative => sets.iter().flatten().all(|h| SortedChain::new(h).integrate(&truth) == 0.0),
        BagLabel::Positive => sets.iter().flatten().any(|h| SortedChain::new(h).integrate(&truth) == 1.0),
    }));

    if spec.noise_sigma > 0.0 {
        let noise = Normal::new(0.0, spec.noise_sigma)
            .map_err(|e| SynthError::Spec(format!("noise_sigma: {e}")))?;
        for (_, sets, _) in raw_bags.iter_mut() {
            for v in sets.iter_mut().flatten().flatten() {
                *v = (*v + noise.sample(&mut gen.rng)).clamp(0.0, 1.0);
            }
        }
    }

    let mut bags = Vec::with_capacity(raw_bags.len());
    let mut instance_truth = Vec::with_capacity(raw_bags.len());
    for (label, sets, labels) in raw_bags {
        let sets = sets
            .into_iter()
            .map(|set| CandidateSet::new(set.into_iter().map(Instance::new).collect()))
            .collect();
        bags.push(Bag::new(label, sets));
        instance_truth.push(labels);
    }
    Ok(Dataset::new(s, bags, Some(instance_truth))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn learned_doc() -> MeasureDoc {
        MeasureDoc::Antichain {
            source_count: 3,
            minimal_winning: vec![vec![0, 1], vec![0, 2]],
        }
    }

    fn spec(noise: f64) -> SynthSpec {
        SynthSpec {
            source_count: 3,
            n_pos_bags: 10,
            n_neg_bags: 10,
            sets_per_bag: IntRange::new(1, 3),
            instances_per_set: IntRange::new(1, 3),
            noise_sigma: noise,
            truth_measure: learned_doc(),
            rng_seed: 42,
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_synthetic(&spec(0.05)).unwrap();
        let b = generate_synthetic(&spec(0.05)).unwrap();
        assert_eq!(a.to_json_string(), b.to_json_string());
        let mut other = spec(0.05);
        other.rng_seed = 43;
        assert_ne!(generate_synthetic(&other).unwrap(), a);
    }

    #[test]
    fn extremal_instances_without_noise() {
        let d = generate_synthetic(&spec(0.0)).unwrap();
        let truth = Measure::try_from(learned_doc()).unwrap();
        let flat = d.flat_truth().unwrap();
        for (((b, _, _), inst), label) in d.instances().zip(flat) {
            let ci = crate::choquet_integral(inst.values(), &truth).unwrap();
            if label == 1 {
                assert_eq!(ci, 1.0);
                assert_eq!(d.bags()[b].label, BagLabel::Positive);
            } else {
                assert_eq!(ci, 0.0);
            }
        }
        assert_eq!(d.positive_bags(), 10);
        assert_eq!(d.negative_bags(), 10);
    }

    #[test]
    fn rejects_bad_specs() {
        let mut s = spec(0.0);
        s.source_count = 4;
        assert!(matches!(generate_synthetic(&s), Err(SynthError::Spec(_))));
        let mut s = spec(0.0);
        s.sets_per_bag = IntRange::new(2, 1);
        assert!(generate_synthetic(&s).is_err());
        let mut s = spec(0.0);
        s.noise_sigma = -1.0;
        assert!(generate_synthetic(&s).is_err());
        let mut s = spec(0.0);
        s.truth_measure = MeasureDoc::Antichain {
            source_count: 3,
            minimal_winning: vec![],
        };
        assert!(matches!(generate_synthetic(&s), Err(SynthError::Truth(_))));
    }
}
