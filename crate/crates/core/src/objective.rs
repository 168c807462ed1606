//! The min-max multiple-instance fusion objective.
//!
//! ```text
//! J = Σ_{negative bags} max_{sets} ( min_{instances} C_g(x) )²
//!   + Σ_{positive bags} min_{sets} ( max_{instances} C_g(x) − 1 )²
//! ```
//!
//! A negative bag is only cheap when every candidate set contains some
//! instance that fuses to 0; a positive bag is cheap as soon as one
//! candidate set contains an instance that fuses to 1. Contributions are
//! plain sums, not normalized by bag counts.

use serde::Serialize;
use thiserror::Error;

use crate::choquet::SortedChain;
use crate::data::{BagLabel, Dataset};
use crate::measure::FuzzyMeasure;
use crate::par;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObjectiveError {
    #[error("measure covers {measure} sources but the dataset has {data}")]
    SourceMismatch { measure: usize, data: usize },
    #[error("dataset has no bags")]
    EmptyDataset,
}

/// One bag's share of `J`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BagContribution {
    pub bag: usize,
    #[serde(serialize_with = "label_as_u8")]
    pub label: BagLabel,
    pub contribution: f64,
    /// Candidate set realizing the outer max (negative) or min (positive);
    /// lowest index on ties.
    pub selected_set: usize,
}

fn label_as_u8<S: serde::Serializer>(label: &BagLabel, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u8(label.as_u8())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectiveBreakdown {
    pub total: f64,
    pub negative_term: f64,
    pub positive_term: f64,
    pub per_bag: Vec<BagContribution>,
}

impl ObjectiveBreakdown {
    pub fn mean_negative(&self) -> Option<f64> {
        self.mean_for(BagLabel::Negative, self.negative_term)
    }

    pub fn mean_positive(&self) -> Option<f64> {
        self.mean_for(BagLabel::Positive, self.positive_term)
    }

    fn mean_for(&self, label: BagLabel, term: f64) -> Option<f64> {
        let n = self.per_bag.iter().filter(|b| b.label == label).count();
        (n > 0).then(|| term / n as f64)
    }
}

struct PreparedBag {
    label: BagLabel,
    sets: Vec<Vec<SortedChain>>,
}

impl PreparedBag {
    // (contribution, selected set)
    fn contribution<M: FuzzyMeasure + ?Sized>(&self, g: &M) -> (f64, usize) {
        match self.label {
            BagLabel::Negative => {
                let mut best = (f64::NEG_INFINITY, 0);
                for (k, set) in self.sets.iter().enumerate() {
                    let inner = set.iter().map(|c| c.integrate(g)).fold(f64::INFINITY, f64::min);
                    let value = inner * inner;
                    if value > best.0 {
                        best = (value, k);
                    }
                }
                best
            }
            BagLabel::Positive => {
                let mut best = (f64::INFINITY, 0);
                for (k, set) in self.sets.iter().enumerate() {
                    let inner = set.iter().map(|c| c.integrate(g)).fold(f64::NEG_INFINITY, f64::max);
                    let value = (inner - 1.0) * (inner - 1.0);
                    if value < best.0 {
                        best = (value, k);
                    }
                }
                best
            }
        }
    }
}

/// A dataset with every instance's sort order precomputed, so repeated
/// objective evaluations only pay for measure lookups.
pub struct PreparedDataset {
    source_count: usize,
    bags: Vec<PreparedBag>,
    parallel: bool,
}

impl PreparedDataset {
    pub fn new(data: &Dataset) -> Self {
        let bags = data
            .bags()
            .iter()
            .map(|bag| PreparedBag {
                label: bag.label,
                sets: bag
                    .candidate_sets
                    .iter()
                    .map(|set| set.instances().iter().map(|h| SortedChain::new(h.values())).collect())
                    .collect(),
            })
            .collect();
        Self {
            source_count: data.source_count(),
            bags,
            parallel: crate::parallel_available(),
        }
    }

    /// Evaluate bags concurrently (when compiled in) or strictly in order.
    /// Both give bit-identical totals.
    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn source_count(&self) -> usize {
        self.source_count
    }

    fn check<M: FuzzyMeasure + ?Sized>(&self, g: &M) -> Result<(), ObjectiveError> {
        if g.source_count() != self.source_count {
            return Err(ObjectiveError::SourceMismatch {
                measure: g.source_count(),
                data: self.source_count,
            });
        }
        if self.bags.is_empty() {
            return Err(ObjectiveError::EmptyDataset);
        }
        Ok(())
    }

    fn contributions<M: FuzzyMeasure + ?Sized>(&self, g: &M) -> Vec<(f64, usize)> {
        par::map_collect(&self.bags, self.parallel, |bag| bag.contribution(g))
    }

    // Terms are summed in bag order regardless of how contributions were
    // computed.
    fn terms(&self, contributions: &[(f64, usize)]) -> (f64, f64) {
        let mut negative = 0.0;
        let mut positive = 0.0;
        for (bag, (c, _)) in self.bags.iter().zip(contributions) {
            match bag.label {
                BagLabel::Negative => negative += c,
                BagLabel::Positive => positive += c,
            }
        }
        (negative, positive)
    }

    pub fn breakdown<M: FuzzyMeasure + ?Sized>(&self, g: &M) -> Result<ObjectiveBreakdown, ObjectiveError> {
        self.check(g)?;
        let contributions = self.contributions(g);
        let (negative_term, positive_term) = self.terms(&contributions);
        let per_bag = self
            .bags
            .iter()
            .zip(&contributions)
            .enumerate()
            .map(|(i, (bag, &(contribution, selected_set)))| BagContribution {
                bag: i,
                label: bag.label,
                contribution,
                selected_set,
            })
            .collect();
        Ok(ObjectiveBreakdown {
            total: negative_term + positive_term,
            negative_term,
            positive_term,
            per_bag,
        })
    }

    /// `J` alone; equal to `breakdown(g).total`.
    pub fn total<M: FuzzyMeasure + ?Sized>(&self, g: &M) -> Result<f64, ObjectiveError> {
        self.check(g)?;
        let (negative, positive) = self.terms(&self.contributions(g));
        Ok(negative + positive)
    }

    // Sequential total used inside already-parallel population evaluation.
    pub(crate) fn total_sequential<M: FuzzyMeasure + ?Sized>(&self, g: &M) -> f64 {
        let mut negative = 0.0;
        let mut positive = 0.0;
        for bag in &self.bags {
            let (c, _) = bag.contribution(g);
            match bag.label {
                BagLabel::Negative => negative += c,
                BagLabel::Positive => positive += c,
            }
        }
        negative + positive
    }
}

/// Evaluates `J` for `g` over `data` with a per-bag breakdown.
pub fn objective<M: FuzzyMeasure + ?Sized>(g: &M, data: &Dataset) -> Result<ObjectiveBreakdown, ObjectiveError> {
    PreparedDataset::new(data).breakdown(g)
}
