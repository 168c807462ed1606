#![allow(dead_code)]

use bfm_core::{
    choquet_integral, Bag, BagLabel, CandidateSet, Dataset, FuzzyMeasure, IntRange, Instance,
    MeasureDoc, SynthSpec,
};
use rand::Rng;

/// The coalition structure {1,2}, {1,3} on three sources.
pub fn learned_doc() -> MeasureDoc {
    MeasureDoc::Antichain {
        source_count: 3,
        minimal_winning: vec![vec![0, 1], vec![0, 2]],
    }
}

pub fn synth_spec(source_count: usize, truth: MeasureDoc, noise: f64, bags: usize, seed: u64) -> SynthSpec {
    SynthSpec {
        source_count,
        n_pos_bags: bags,
        n_neg_bags: bags,
        sets_per_bag: IntRange::new(1, 3),
        instances_per_set: IntRange::new(1, 3),
        noise_sigma: noise,
        truth_measure: truth,
        rng_seed: seed,
    }
}

/// Uniformly random dataset with at least one bag of each polarity.
pub fn random_dataset<R: Rng>(rng: &mut R, source_count: usize) -> Dataset {
    let n_bags = rng.random_range(2..8);
    let bags = (0..n_bags)
        .map(|b| {
            let label = match b {
                0 => BagLabel::Positive,
                1 => BagLabel::Negative,
                _ if rng.random_bool(0.5) => BagLabel::Positive,
                _ => BagLabel::Negative,
            };
            let sets = (0..rng.random_range(1..4))
                .map(|_| {
                    CandidateSet::new(
                        (0..rng.random_range(1..4))
                            .map(|_| Instance::new((0..source_count).map(|_| rng.random::<f64>()).collect()))
                            .collect(),
                    )
                })
                .collect();
            Bag::new(label, sets)
        })
        .collect();
    Dataset::new(source_count, bags, None).unwrap()
}

/// Literal triple loop over bags, candidate sets and instances, calling the
/// public Choquet integral per instance.
pub fn naive_objective<M: FuzzyMeasure>(g: &M, data: &Dataset) -> f64 {
    let mut total = 0.0;
    for bag in data.bags() {
        let per_set: Vec<f64> = bag
            .candidate_sets
            .iter()
            .map(|set| {
                let cis: Vec<f64> = set
                    .instances()
                    .iter()
                    .map(|h| choquet_integral(h.values(), g).unwrap())
                    .collect();
                match bag.label {
                    BagLabel::Negative => cis.iter().cloned().fold(f64::INFINITY, f64::min).powi(2),
                    BagLabel::Positive => (cis.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - 1.0).powi(2),
                }
            })
            .collect();
        total += match bag.label {
            BagLabel::Negative => per_set.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            BagLabel::Positive => per_set.iter().cloned().fold(f64::INFINITY, f64::min),
        };
    }
    total
}

/// Brute-force count of monotone assignments: every 0/1 setting of the
/// 2^S − 2 free lattice elements, filtered by the axiom checker.
pub fn brute_force_measure_count(source_count: usize) -> usize {
    let size = 1usize << source_count;
    let free = size - 2;
    (0u64..1 << free)
        .filter(|assignment| {
            let mut values = vec![0.0; size];
            values[size - 1] = 1.0;
            for k in 0..free {
                if assignment >> k & 1 == 1 {
                    values[k + 1] = 1.0;
                }
            }
            bfm_core::measure::validate_values(source_count, &values).unwrap().is_valid()
        })
        .count()
}
