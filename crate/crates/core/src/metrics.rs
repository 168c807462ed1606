//! Fusion maps and detection scores.
//!
//! ROC points are produced by sweeping every distinct score as a threshold,
//! highest first; equal scores move together as one diagonal step, so the
//! trapezoidal AUC equals the Mann-Whitney pair-counting statistic with ties
//! counted as one half. PSNR uses a unit peak: `psnr = −20·log10(rmse)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::choquet::SortedChain;
use crate::data::Dataset;
use crate::measure::{FuzzyMeasure, Measure, MeasureDoc};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("measure covers {measure} sources but the dataset has {data}")]
    SourceMismatch { measure: usize, data: usize },
    #[error("{scores} scores but {truth} truth labels")]
    LengthMismatch { scores: usize, truth: usize },
    #[error("truth label {value} at position {index} is not 0 or 1")]
    BadLabel { index: usize, value: u8 },
    #[error("no scores to evaluate")]
    Empty,
    #[error("AUC is undefined: truth contains only {0} labels")]
    SingleClass(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NaiveMode {
    Min,
    Max,
    Mean,
}

impl NaiveMode {
    fn apply(self, h: &[f64]) -> f64 {
        match self {
            NaiveMode::Min => h.iter().copied().fold(f64::INFINITY, f64::min),
            NaiveMode::Max => h.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            NaiveMode::Mean => h.iter().sum::<f64>() / h.len() as f64,
        }
    }
}

impl std::str::FromStr for NaiveMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "min" => Ok(NaiveMode::Min),
            "max" => Ok(NaiveMode::Max),
            "mean" => Ok(NaiveMode::Mean),
            other => Err(format!("unknown naive mode {other:?} (expected min, max or mean)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "aggregation", rename_all = "snake_case")]
pub enum Provenance {
    Choquet { measure: MeasureDoc },
    Naive { mode: NaiveMode },
}

/// One fused confidence per instance, in dataset storage order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FusionMap {
    pub scores: Vec<f64>,
    pub provenance: Provenance,
}

/// Choquet fusion of every instance with respect to `g`.
pub fn fuse(data: &Dataset, g: &Measure) -> Result<FusionMap, MetricsError> {
    if g.source_count() != data.source_count() {
        return Err(MetricsError::SourceMismatch {
            measure: g.source_count(),
            data: data.source_count(),
        });
    }
    let scores = data
        .instances()
        .map(|(_, h)| SortedChain::new(h.values()).integrate(g))
        .collect();
    Ok(FusionMap {
        scores,
        provenance: Provenance::Choquet { measure: g.to_doc() },
    })
}

/// Elementwise min, max or mean across sources.
pub fn fuse_naive(data: &Dataset, mode: NaiveMode) -> FusionMap {
    FusionMap {
        scores: data.instances().map(|(_, h)| mode.apply(h.values())).collect(),
        provenance: Provenance::Naive { mode },
    }
}

/// A point on the ROC curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport {
    /// `None` when the truth holds a single class.
    pub auc: Option<f64>,
    pub rmse: f64,
    #[serde(serialize_with = "psnr_json")]
    pub psnr: f64,
    pub roc_points: Vec<RocPoint>,
}

// JSON has no infinity; a perfect map reports the string "inf".
fn psnr_json<S: serde::Serializer>(psnr: &f64, s: S) -> Result<S::Ok, S::Error> {
    if psnr.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*psnr)
    }
}

fn check_truth(scores: &[f64], truth: &[u8]) -> Result<(), MetricsError> {
    if scores.len() != truth.len() {
        return Err(MetricsError::LengthMismatch {
            scores: scores.len(),
            truth: truth.len(),
        });
    }
    if scores.is_empty() {
        return Err(MetricsError::Empty);
    }
    if let Some(index) = truth.iter().position(|&t| t > 1) {
        return Err(MetricsError::BadLabel {
            index,
            value: truth[index],
        });
    }
    Ok(())
}

pub fn rmse(scores: &[f64], truth: &[u8]) -> Result<f64, MetricsError> {
    check_truth(scores, truth)?;
    let sum: f64 = scores
        .iter()
        .zip(truth)
        .map(|(s, &t)| (s - f64::from(t)).powi(2))
        .sum();
    Ok((sum / scores.len() as f64).sqrt())
}

/// Unit-peak PSNR in dB; infinite when `rmse` is 0.
pub fn psnr_from_rmse(rmse: f64) -> f64 {
    if rmse == 0.0 {
        f64::INFINITY
    } else {
        -20.0 * rmse.log10()
    }
}

/// ROC curve from (0,0) to (1,1) and its trapezoidal area.
pub fn roc_auc(scores: &[f64], truth: &[u8]) -> Result<(Vec<RocPoint>, f64), MetricsError> {
    check_truth(scores, truth)?;
    let positives = truth.iter().filter(|&&t| t == 1).count();
    let negatives = truth.len() - positives;
    if positives == 0 {
        return Err(MetricsError::SingleClass("negative"));
    }
    if negatives == 0 {
        return Err(MetricsError::SingleClass("positive"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![RocPoint { fpr: 0.0, tpr: 0.0 }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut auc = 0.0;
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        while i < order.len() && scores[order[i]] == threshold {
            if truth[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        let prev = *points.last().expect("starts at origin");
        let next = RocPoint {
            fpr: fp as f64 / negatives as f64,
            tpr: tp as f64 / positives as f64,
        };
        auc += (next.fpr - prev.fpr) * (next.tpr + prev.tpr) / 2.0;
        points.push(next);
    }
    Ok((points, auc))
}

/// AUC, RMSE and PSNR of a fusion map against per-instance labels. A
/// single-class truth yields `auc: None` with RMSE and PSNR still filled in.
pub fn score(map: &FusionMap, truth: &[u8]) -> Result<ScoreReport, MetricsError> {
    let rmse = rmse(&map.scores, truth)?;
    let (roc_points, auc) = match roc_auc(&map.scores, truth) {
        Ok((points, auc)) => (points, Some(auc)),
        Err(MetricsError::SingleClass(_)) => (Vec::new(), None),
        Err(e) => return Err(e),
    };
    Ok(ScoreReport {
        auc,
        rmse,
        psnr: psnr_from_rmse(rmse),
        roc_points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(scores: &[f64]) -> FusionMap {
        FusionMap {
            scores: scores.to_vec(),
            provenance: Provenance::Naive { mode: NaiveMode::Mean },
        }
    }

    #[test]
    fn perfect_detector() {
        let r = score(&map(&[0.0, 1.0, 1.0, 0.0]), &[0, 1, 1, 0]).unwrap();
        assert_eq!(r.auc, Some(1.0));
        assert_eq!(r.rmse, 0.0);
        assert!(r.psnr.is_infinite());
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains(r#""psnr":"inf""#));
    }

    #[test]
    fn constant_scores_are_chance() {
        let r = score(&map(&[0.4; 6]), &[0, 1, 0, 1, 0, 1]).unwrap();
        assert_eq!(r.auc, Some(0.5));
        assert_eq!(r.roc_points.len(), 2);
    }

    #[test]
    fn pair_counted_example() {
        // Pairs (pos, neg): (0.35,0.1) ok, (0.35,0.4) wrong, (0.8,0.1) ok,
        // (0.8,0.4) ok → 3/4.
        let r = score(&map(&[0.1, 0.4, 0.35, 0.8]), &[0, 0, 1, 1]).unwrap();
        assert_eq!(r.auc, Some(0.75));
        let first = r.roc_points.first().unwrap();
        let last = r.roc_points.last().unwrap();
        assert_eq!((first.fpr, first.tpr), (0.0, 0.0));
        assert_eq!((last.fpr, last.tpr), (1.0, 1.0));
    }

    #[test]
    fn table_row_consistency() {
        let psnr = psnr_from_rmse(0.3615);
        assert!((psnr - 8.838).abs() < 0.005, "{psnr}");
    }

    #[test]
    fn single_class_keeps_errors() {
        let r = score(&map(&[0.2, 0.4]), &[0, 0]).unwrap();
        assert_eq!(r.auc, None);
        assert!(r.rmse > 0.0);
        assert!(matches!(roc_auc(&[0.2], &[1]), Err(MetricsError::SingleClass("positive"))));
    }

    #[test]
    fn input_errors() {
        assert!(matches!(score(&map(&[0.2]), &[0, 1]), Err(MetricsError::LengthMismatch { .. })));
        assert!(matches!(score(&map(&[0.2]), &[2]), Err(MetricsError::BadLabel { .. })));
        assert!(matches!(score(&map(&[]), &[]), Err(MetricsError::Empty)));
    }

    #[test]
    fn naive_modes() {
        let h = [0.2, 0.9, 0.5];
        assert_eq!(NaiveMode::Min.apply(&h), 0.2);
        assert_eq!(NaiveMode::Max.apply(&h), 0.9);
        assert!((NaiveMode::Mean.apply(&h) - 1.6 / 3.0).abs() < 1e-15);
        assert_eq!("mean".parse::<NaiveMode>(), Ok(NaiveMode::Mean));
        assert!("median".parse::<NaiveMode>().is_err());
    }
}
