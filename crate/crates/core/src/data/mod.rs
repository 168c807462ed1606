//! Multi-resolution multiple-instance datasets.
//!
//! A [`Dataset`] is a list of labeled [`Bag`]s. Each bag holds candidate
//! sets, one per coarse-resolution unit, and each candidate set holds every
//! plausible matching of that unit as an `S`-length [`Instance`] of
//! per-source confidences.
//!
//! JSON layout:
//!
//! ```json
//! {"source_count": 2,
//!  "bags": [{"label": 1, "candidate_sets": [[[0.9, 0.8], [0.1, 0.7]]]}],
//!  "instance_truth": [[[1, 0]]]}
//! ```
//!
//! `instance_truth` is optional, mirrors the nesting of `candidate_sets`, and
//! is only used for scoring.

pub mod synth;

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read or write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed dataset JSON at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("source_count must be at least 1")]
    NoSources,
    #[error("bag {bag}: label {label} is not 0 or 1")]
    BadLabel { bag: usize, label: u8 },
    #[error("bag {bag} has no candidate sets")]
    EmptyBag { bag: usize },
    #[error("bag {bag}, candidate set {set} is empty")]
    EmptyCandidateSet { bag: usize, set: usize },
    #[error("bag {bag}, set {set}, instance {instance}: expected {expected} confidences, found {found}")]
    InstanceLength {
        bag: usize,
        set: usize,
        instance: usize,
        expected: usize,
        found: usize,
    },
    #[error("bag {bag}, set {set}, instance {instance}, source {source_index}: confidence {value} outside [0, 1]")]
    ConfidenceOutOfRange {
        bag: usize,
        set: usize,
        instance: usize,
        source_index: usize,
        value: f64,
    },
    #[error("instance_truth does not mirror the bag structure at {location}")]
    TruthShape { location: String },
    #[error("instance_truth at {location} is {value}, expected 0 or 1")]
    TruthLabel { location: String, value: u8 },
}

/// Per-source confidences for one matching hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Instance(Vec<f64>);

impl Instance {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl AsRef<[f64]> for Instance {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// The plausible matchings of one coarse-resolution unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CandidateSet(Vec<Instance>);

impl CandidateSet {
    pub fn new(instances: Vec<Instance>) -> Self {
        Self(instances)
    }

    pub fn instances(&self) -> &[Instance] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BagLabel {
    Negative,
    Positive,
}

impl BagLabel {
    pub fn as_u8(self) -> u8 {
        match self {
            BagLabel::Negative => 0,
            BagLabel::Positive => 1,
        }
    }
}

impl Serialize for BagLabel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.as_u8())
    }
}

impl<'de> Deserialize<'de> for BagLabel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match u8::deserialize(deserializer)? {
            0 => Ok(BagLabel::Negative),
            1 => Ok(BagLabel::Positive),
            other => Err(serde::de::Error::custom(format!(
                "bag label {other} is not 0 or 1"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bag {
    pub label: BagLabel,
    pub candidate_sets: Vec<CandidateSet>,
}

impl Bag {
    pub fn new(label: BagLabel, candidate_sets: Vec<CandidateSet>) -> Self {
        Self {
            label,
            candidate_sets,
        }
    }

    pub fn instance_count(&self) -> usize {
        self.candidate_sets.iter().map(|c| c.instances().len()).sum()
    }
}

/// Per-instance 0/1 labels nested like the bags' candidate sets.
pub type InstanceTruth = Vec<Vec<Vec<u8>>>;

/// A validated dataset. Construction checks every structural and range
/// invariant, so downstream code never re-validates instances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dataset {
    source_count: usize,
    bags: Vec<Bag>,
    #[serde(skip_serializing_if = "Option::is_none")]
    instance_truth: Option<InstanceTruth>,
}

// Raw shape used for parsing so labels can be reported by bag index.
#[derive(Deserialize)]
struct RawDataset {
    source_count: usize,
    bags: Vec<RawBag>,
    #[serde(default)]
    instance_truth: Option<InstanceTruth>,
}

#[derive(Deserialize)]
struct RawBag {
    label: u8,
    candidate_sets: Vec<CandidateSet>,
}

impl Dataset {
    pub fn new(
        source_count: usize,
        bags: Vec<Bag>,
        instance_truth: Option<InstanceTruth>,
    ) -> Result<Self, DataError> {
        if source_count == 0 {
            return Err(DataError::NoSources);
        }
        for (b, bag) in bags.iter().enumerate() {
            if bag.candidate_sets.is_empty() {
                return Err(DataError::EmptyBag { bag: b });
            }
            for (s, set) in bag.candidate_sets.iter().enumerate() {
                if set.instances().is_empty() {
                    return Err(DataError::EmptyCandidateSet { bag: b, set: s });
                }
                for (i, inst) in set.instances().iter().enumerate() {
                    if inst.len() != source_count {
                        return Err(DataError::InstanceLength {
                            bag: b,
                            set: s,
                            instance: i,
                            expected: source_count,
                            found: inst.len(),
                        });
                    }
                    if let Some(k) = inst.values().iter().position(|v| !(0.0..=1.0).contains(v)) {
                        return Err(DataError::ConfidenceOutOfRange {
                            bag: b,
                            set: s,
                            instance: i,
                            source_index: k,
                            value: inst.values()[k],
                        });
                    }
                }
            }
        }
        if let Some(truth) = &instance_truth {
            check_truth_shape(&bags, truth)?;
        }
        Ok(Self {
            source_count,
            bags,
            instance_truth,
        })
    }

    pub fn source_count(&self) -> usize {
        self.source_count
    }

    pub fn bags(&self) -> &[Bag] {
        &self.bags
    }

    pub fn instance_truth(&self) -> Option<&InstanceTruth> {
        self.instance_truth.as_ref()
    }

    pub fn positive_bags(&self) -> usize {
        self.bags.iter().filter(|b| b.label == BagLabel::Positive).count()
    }

    pub fn negative_bags(&self) -> usize {
        self.bags.len() - self.positive_bags()
    }

    pub fn instance_count(&self) -> usize {
        self.bags.iter().map(Bag::instance_count).sum()
    }

    /// Every instance with its `(bag, set, instance)` position, in storage
    /// order.
    pub fn instances(&self) -> impl Iterator<Item = ((usize, usize, usize), &Instance)> {
        self.bags.iter().enumerate().flat_map(|(b, bag)| {
            bag.candidate_sets.iter().enumerate().flat_map(move |(s, set)| {
                set.instances()
                    .iter()
                    .enumerate()
                    .map(move |(i, inst)| ((b, s, i), inst))
            })
        })
    }

    /// Ground-truth labels flattened in the same order as [`Self::instances`].
    pub fn flat_truth(&self) -> Option<Vec<u8>> {
        self.instance_truth
            .as_ref()
            .map(|t| t.iter().flatten().flatten().copied().collect())
    }

    /// Same data without the evaluation labels.
    pub fn without_truth(&self) -> Self {
        Self {
            source_count: self.source_count,
            bags: self.bags.clone(),
            instance_truth: None,
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self, DataError> {
        let raw: RawDataset = serde_json::from_str(s).map_err(|e| DataError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let bags = raw
            .bags
            .into_iter()
            .enumerate()
            .map(|(b, bag)| {
                let label = match bag.label {
                    0 => BagLabel::Negative,
                    1 => BagLabel::Positive,
                    label => return Err(DataError::BadLabel { bag: b, label }),
                };
                Ok(Bag::new(label, bag.candidate_sets))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(raw.source_count, bags, raw.instance_truth)
    }

    /// Compact JSON with a trailing newline. Floats use shortest round-trip
    /// formatting, so save followed by load is lossless.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string(self).expect("datasets always serialize");
        s.push('\n');
        s
    }
}

fn check_truth_shape(bags: &[Bag], truth: &InstanceTruth) -> Result<(), DataError> {
    if truth.len() != bags.len() {
        return Err(DataError::TruthShape {
            location: format!("top level ({} bags vs {} entries)", bags.len(), truth.len()),
        });
    }
    for (b, (bag, t)) in bags.iter().zip(truth).enumerate() {
        if t.len() != bag.candidate_sets.len() {
            return Err(DataError::TruthShape {
                location: format!("bag {b}"),
            });
        }
        for (s, (set, ts)) in bag.candidate_sets.iter().zip(t).enumerate() {
            if ts.len() != set.instances().len() {
                return Err(DataError::TruthShape {
                    location: format!("bag {b}, set {s}"),
                });
            }
            if let Some(i) = ts.iter().position(|&v| v > 1) {
                return Err(DataError::TruthLabel {
                    location: format!("bag {b}, set {s}, instance {i}"),
                    value: ts[i],
                });
            }
        }
    }
    Ok(())
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Dataset::from_json_str(&text)
}

pub fn save_dataset(data: &Dataset, path: impl AsRef<Path>) -> Result<(), DataError> {
    let path = path.as_ref();
    fs::write(path, data.to_json_string()).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"source_count": 2, "bags": [
        {"label": 1, "candidate_sets": [[[0.9, 0.8]]]},
        {"label": 0, "candidate_sets": [[[0.1, 0.2], [0.3, 0.0]]]}
    ]}"#;

    #[test]
    fn loads_minimal_file() {
        let d = Dataset::from_json_str(MINIMAL).unwrap();
        assert_eq!(d.bags().len(), 2);
        assert_eq!(d.positive_bags(), 1);
        assert_eq!(d.negative_bags(), 1);
        assert_eq!(d.instance_count(), 3);
        assert!(d.instance_truth().is_none());
    }

    #[test]
    fn names_the_out_of_range_instance() {
        let text = MINIMAL.replace("0.3, 0.0", "0.3, 1.3");
        match Dataset::from_json_str(&text) {
            Err(DataError::ConfidenceOutOfRange {
                bag: 1,
                set: 0,
                instance: 1,
                source_index: 1,
                value,
            }) => assert_eq!(value, 1.3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_empty_structures() {
        let empty_set = r#"{"source_count": 2, "bags": [{"label": 1, "candidate_sets": [[]]}]}"#;
        assert!(matches!(
            Dataset::from_json_str(empty_set),
            Err(DataError::EmptyCandidateSet { bag: 0, set: 0 })
        ));
        let empty_bag = r#"{"source_count": 2, "bags": [{"label": 0, "candidate_sets": []}]}"#;
        assert!(matches!(
            Dataset::from_json_str(empty_bag),
            Err(DataError::EmptyBag { bag: 0 })
        ));
    }

    #[test]
    fn rejects_bad_label_length_and_syntax() {
        let bad_label = MINIMAL.replace(r#""label": 0"#, r#""label": 2"#);
        assert!(matches!(
            Dataset::from_json_str(&bad_label),
            Err(DataError::BadLabel { bag: 1, label: 2 })
        ));
        let short = MINIMAL.replace("[0.9, 0.8]", "[0.9]");
        assert!(matches!(
            Dataset::from_json_str(&short),
            Err(DataError::InstanceLength { bag: 0, found: 1, .. })
        ));
        match Dataset::from_json_str("{\"source_count\": 2,\n \"bags\": [}") {
            Err(DataError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn truth_must_mirror_bags() {
        let with_truth = MINIMAL.replace("]}\n    ]}", "]}\n    ], \"instance_truth\": [[[1]], [[0, 0]]]}");
        let d = Dataset::from_json_str(&with_truth).unwrap();
        assert_eq!(d.flat_truth().unwrap(), vec![1, 0, 0]);
        let bad = MINIMAL.replace("]}\n    ]}", "]}\n    ], \"instance_truth\": [[[1]], [[0]]]}");
        assert!(matches!(
            Dataset::from_json_str(&bad),
            Err(DataError::TruthShape { .. })
        ));
    }

    #[test]
    fn file_round_trip() {
        let d = Dataset::from_json_str(MINIMAL).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.json");
        save_dataset(&d, &path).unwrap();
        assert_eq!(load_dataset(&path).unwrap(), d);
        assert!(matches!(
            load_dataset(dir.path().join("missing.json")),
            Err(DataError::Io { .. })
        ));
    }
}
