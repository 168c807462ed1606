//! Learning binary fuzzy measures for Choquet-integral fusion of
//! multi-resolution, multiple-instance sensor data.
//!
//! The crate is organized bottom-up:
//!
//! - [`measure`]: binary and real-valued fuzzy measures on the subset lattice
//!   of `S` sources, axiom validation, closure-preserving edits, random
//!   sampling and exhaustive enumeration.
//! - [`choquet`]: the discrete Choquet integral plus an independent max-min
//!   evaluation for binary measures.
//! - [`data`]: bags of candidate sets of instances, JSON I/O and a seeded
//!   synthetic generator.
//! - [`objective`]: the min-max multiple-instance fusion objective.
//! - [`optimizer`]: evolutionary search over binary measures, an exhaustive
//!   oracle for small `S`, and a real-valued evolutionary baseline.
//! - [`metrics`]: fusion maps, naive baselines, ROC/AUC, RMSE and PSNR.
//!
//! Population and bag-level evaluation run on rayon when the `parallel`
//! feature is enabled (the default). Without it every code path runs
//! sequentially and produces identical numbers.

pub mod bench;
pub mod choquet;
pub mod data;
pub mod measure;
pub mod metrics;
pub mod objective;
pub mod optimizer;
pub mod rng;

mod par;

pub use choquet::{choquet_integral, choquet_maxmin, ChoquetError, SortedChain};
pub use data::{
    load_dataset, save_dataset, Bag, BagLabel, CandidateSet, DataError, Dataset, Instance,
};
pub use data::synth::{generate_synthetic, IntRange, SynthError, SynthSpec};
pub use measure::{
    enumerate_all, sample_random, sample_random_real, AxiomViolation, BinaryFuzzyMeasure,
    FuzzyMeasure, Measure, MeasureDoc, MeasureError, RealFuzzyMeasure, SourceSet,
    ValidityReport,
};
pub use metrics::{fuse, fuse_naive, score, FusionMap, MetricsError, NaiveMode, ScoreReport};
pub use objective::{objective, ObjectiveBreakdown, ObjectiveError, PreparedDataset};
pub use optimizer::{
    train_bfm, train_exhaustive, train_real_fm, EaConfig, Termination, TrainError, TrainResult,
};

/// Whether rayon-backed evaluation was compiled in.
pub const fn parallel_available() -> bool {
    cfg!(feature = "parallel")
}
