//! Timing study: binary versus real-valued evolutionary search on seeded
//! synthetic data with a growing number of sources.

use rand::seq::index;
use serde::Serialize;
use thiserror::Error;

use crate::data::synth::{generate_synthetic, IntRange, SynthError, SynthSpec};
use crate::data::Dataset;
use crate::measure::{BinaryFuzzyMeasure, Measure, MeasureError, SourceSet};
use crate::optimizer::{train_bfm, train_real_fm, EaConfig, Termination, TrainError};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Bfm,
    RealFm,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Bfm => "bfm",
            Method::RealFm => "real-fm",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchConfig {
    pub sources: Vec<usize>,
    pub repeats: usize,
    pub cap_seconds: f64,
    pub seed: u64,
    pub bags_per_class: usize,
    pub noise_sigma: f64,
    pub methods: Vec<Method>,
    /// Budget shared by both methods; its seed and time cap are overridden
    /// per run.
    pub ea: EaConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sources: vec![6, 8, 10, 12],
            repeats: 5,
            cap_seconds: 120.0,
            seed: 0,
            bags_per_class: 20,
            noise_sigma: 0.05,
            methods: vec![Method::RealFm, Method::Bfm],
            ea: EaConfig::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid benchmark configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Train(#[from] TrainError),
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRun {
    pub method: Method,
    pub source_count: usize,
    pub repeat: usize,
    pub seed: u64,
    pub wall_time_seconds: f64,
    pub best_objective: f64,
    pub generations_run: usize,
    pub terminated_by: Termination,
    /// Stopped by the time cap; the wall time is a lower bound.
    pub censored: bool,
    /// Stopped by the time cap after a single generation.
    pub cap_too_small: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchCell {
    pub method: Method,
    pub source_count: usize,
    pub mean_time: f64,
    pub sd_time: f64,
    pub mean_objective: f64,
    pub sd_objective: f64,
    pub censored: bool,
    pub runs: Vec<BenchRun>,
}

/// Sample mean and (n − 1) standard deviation; 0 spread for one sample.
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Truth measure for the study: upward closure of one random pair and one
/// random triple (capped at `S` members).
pub fn bench_truth(source_count: usize, seed: u64) -> Result<BinaryFuzzyMeasure, MeasureError> {
    let mut rng = rng::stream(seed, "bench-truth", source_count as u64);
    let mut coalitions = Vec::new();
    for size in [2usize, 3] {
        let size = size.min(source_count);
        let members = index::sample(&mut rng, source_count, size).into_vec();
        coalitions.push(SourceSet::from_sources(&members, source_count)?);
    }
    // Drop a coalition that contains the other so the list is an antichain.
    if coalitions[0].is_subset_of(&coalitions[1]) {
        coalitions.pop();
    }
    BinaryFuzzyMeasure::from_minimal_winning(source_count, &coalitions)
}

pub fn bench_dataset(cfg: &BenchConfig, source_count: usize) -> Result<Dataset, BenchError> {
    let truth = bench_truth(source_count, cfg.seed)?;
    let spec = SynthSpec {
        source_count,
        n_pos_bags: cfg.bags_per_class,
        n_neg_bags: cfg.bags_per_class,
        sets_per_bag: IntRange::new(1, 3),
        instances_per_set: IntRange::new(1, 3),
        noise_sigma: cfg.noise_sigma,
        truth_measure: Measure::Binary(truth).to_doc(),
        rng_seed: rng::derive_seed(cfg.seed, &format!("bench-data-{source_count}")),
    };
    Ok(generate_synthetic(&spec)?.without_truth())
}

impl BenchConfig {
    fn validate(&self) -> Result<(), BenchError> {
        if self.sources.is_empty() || self.sources.iter().any(|&s| s < 2) {
            return Err(BenchError::Config("source counts must all be at least 2".into()));
        }
        if self.repeats == 0 {
            return Err(BenchError::Config("repeats must be positive".into()));
        }
        if !(self.cap_seconds.is_finite() && self.cap_seconds > 0.0) {
            return Err(BenchError::Config(format!("cap must be positive, got {}", self.cap_seconds)));
        }
        if self.bags_per_class == 0 {
            return Err(BenchError::Config("bags_per_class must be positive".into()));
        }
        Ok(())
    }

    fn run_config(&self, source_count: usize, repeat: usize) -> EaConfig {
        EaConfig {
            rng_seed: rng::derive_seed(self.seed, &format!("bench-run-{source_count}-{repeat}")),
            time_cap_seconds: Some(self.cap_seconds),
            ..self.ea.clone()
        }
    }
}

/// Runs every (source count, method, repeat) combination. Wall time covers
/// the optimizer call only. `progress` sees each run as it finishes.
pub fn run_bench(
    cfg: &BenchConfig,
    mut progress: impl FnMut(&BenchRun),
) -> Result<Vec<BenchCell>, BenchError> {
    cfg.validate()?;
    let mut cells = Vec::new();
    for &s in &cfg.sources {
        let data = bench_dataset(cfg, s)?;
        for &method in &cfg.methods {
            let mut runs = Vec::with_capacity(cfg.repeats);
            for repeat in 0..cfg.repeats {
                let ea = cfg.run_config(s, repeat);
                let result = match method {
                    Method::Bfm => train_bfm(&data, &ea)?,
                    Method::RealFm => train_real_fm(&data, &ea)?,
                };
                let censored = result.terminated_by == Termination::TimeCap;
                let run = BenchRun {
                    method,
                    source_count: s,
                    repeat,
                    seed: ea.rng_seed,
                    wall_time_seconds: result.wall_time_seconds,
                    best_objective: result.best_objective,
                    generations_run: result.generations_run,
                    terminated_by: result.terminated_by,
                    censored,
                    cap_too_small: censored && result.generations_run <= 1,
                };
                progress(&run);
                runs.push(run);
            }
            let times: Vec<f64> = runs.iter().map(|r| r.wall_time_seconds).collect();
            let objectives: Vec<f64> = runs.iter().map(|r| r.best_objective).collect();
            let (mean_time, sd_time) = mean_sd(&times);
            let (mean_objective, sd_objective) = mean_sd(&objectives);
            cells.push(BenchCell {
                method,
                source_count: s,
                mean_time,
                sd_time,
                mean_objective,
                sd_objective,
                censored: runs.iter().any(|r| r.censored),
                runs,
            });
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::FuzzyMeasure;

    #[test]
    fn truth_is_valid_and_seeded() {
        for s in 2..=12 {
            let t = bench_truth(s, 5).unwrap();
            assert!(t.validate().is_valid());
            assert_eq!(t, bench_truth(s, 5).unwrap());
            assert!(!t.minimal_winning_coalitions().is_empty());
        }
    }

    #[test]
    fn mean_and_spread() {
        assert_eq!(mean_sd(&[2.0]), (2.0, 0.0));
        let (m, sd) = mean_sd(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((sd - 1.0).abs() < 1e-15);
    }

    #[test]
    fn smoke_two_by_two() {
        let cfg = BenchConfig {
            sources: vec![3, 4],
            repeats: 2,
            bags_per_class: 5,
            ..BenchConfig::default()
        };
        let mut seen = 0;
        let cells = run_bench(&cfg, |_| seen += 1).unwrap();
        assert_eq!(cells.len(), 4);
        assert_eq!(seen, 8);
        assert!(cells.iter().all(|c| !c.censored && c.mean_time < cfg.cap_seconds));
    }

    #[test]
    fn rejects_bad_configs() {
        let cfg = BenchConfig {
            sources: vec![1],
            ..BenchConfig::default()
        };
        assert!(matches!(run_bench(&cfg, |_| {}), Err(BenchError::Config(_))));
    }

    #[test]
    fn tiny_cap_is_flagged_not_failed() {
        let cfg = BenchConfig {
            sources: vec![6],
            repeats: 1,
            cap_seconds: 1e-9,
            bags_per_class: 5,
            methods: vec![Method::RealFm],
            ..BenchConfig::default()
        };
        let cells = run_bench(&cfg, |_| {}).unwrap();
        assert!(cells[0].censored);
        assert!(cells[0].runs[0].cap_too_small);
    }
}
