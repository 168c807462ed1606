use std::path::PathBuf;

use bfm_core::measure::DEFAULT_ENUMERATION_CAP;
use bfm_core::optimizer::train_exhaustive_with;
use bfm_core::{
    load_dataset, train_bfm, train_real_fm, EaConfig, FuzzyMeasure, Measure, MeasureDoc,
    ObjectiveBreakdown, PreparedDataset, TrainResult,
};
use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::error::CliError;
use crate::output::{read_to_string, Outputs, Provenance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Bfm,
    BfmExhaustive,
    Real,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub mode: Mode,
    #[arg(long)]
    pub seed: u64,
    /// Result file (JSON).
    #[arg(long)]
    pub out: PathBuf,
    /// Include the per-bag objective breakdown of the learned measure.
    #[arg(long)]
    pub explain: bool,
    /// Optimizer settings (JSON, any subset of fields); flags below win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub stall: Option<usize>,
    #[arg(long)]
    pub cap_seconds: Option<f64>,
    /// Largest source count accepted by exhaustive search.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub enumeration_cap: usize,
}

#[derive(Serialize)]
struct RunConfig<'a> {
    command: &'static str,
    data: &'a PathBuf,
    mode: Mode,
    ea: &'a EaConfig,
    enumeration_cap: usize,
}

#[derive(Serialize)]
struct TrainOutput<'a> {
    provenance: Provenance,
    mode: Mode,
    data: &'a PathBuf,
    config: &'a EaConfig,
    #[serde(flatten)]
    result: &'a TrainResult,
    best_measure_minimal_winning: Option<MeasureDoc>,
    mean_negative: Option<f64>,
    mean_positive: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    explain: Option<ObjectiveBreakdown>,
}

fn ea_config(args: &TrainArgs) -> Result<EaConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => serde_json::from_str(&read_to_string(path)?)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?,
        None => EaConfig::default(),
    };
    cfg.rng_seed = args.seed;
    if let Some(v) = args.population {
        cfg.population_size = v;
    }
    if let Some(v) = args.generations {
        cfg.max_generations = v;
    }
    if let Some(v) = args.stall {
        cfg.stall_generations = v;
    }
    if args.cap_seconds.is_some() {
        cfg.time_cap_seconds = args.cap_seconds;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn describe(m: &Measure) -> String {
    match m.as_binary() {
        Some(b) => {
            let sets: Vec<String> = b.minimal_winning_coalitions().iter().map(|c| c.to_string()).collect();
            format!("minimal winning coalitions: {}", sets.join(" "))
        }
        None => format!("real-valued measure over {} sources", m.source_count()),
    }
}

pub fn run(args: &TrainArgs, outputs: &Outputs, parallel: bool) -> Result<(), CliError> {
    let mut cfg = ea_config(args)?;
    cfg.parallel = parallel;
    outputs.check(&[&args.out])?;
    let data = load_dataset(&args.data)?.without_truth();

    let result = match args.mode {
        Mode::Bfm => train_bfm(&data, &cfg)?,
        Mode::Real => train_real_fm(&data, &cfg)?,
        Mode::BfmExhaustive => train_exhaustive_with(&data, args.enumeration_cap, parallel)?,
    };
    let breakdown = PreparedDataset::new(&data).breakdown(&result.best_measure)?;

    let provenance = Provenance::new(
        Some(args.seed),
        &RunConfig {
            command: "train",
            data: &args.data,
            mode: args.mode,
            ea: &cfg,
            enumeration_cap: args.enumeration_cap,
        },
    );
    outputs.write_json(
        &args.out,
        &TrainOutput {
            provenance,
            mode: args.mode,
            data: &args.data,
            config: &cfg,
            result: &result,
            best_measure_minimal_winning: result.best_measure.to_antichain_doc(),
            mean_negative: breakdown.mean_negative(),
            mean_positive: breakdown.mean_positive(),
            explain: args.explain.then(|| breakdown.clone()),
        },
    )?;

    println!("best objective: {}", result.best_objective);
    println!(
        "generations: {}, evaluations: {}, stopped: {:?}, wall time: {:.3} s",
        result.generations_run, result.evaluations, result.terminated_by, result.wall_time_seconds
    );
    println!("{}", describe(&result.best_measure));
    if args.explain {
        for bag in &breakdown.per_bag {
            println!(
                "bag {:>4} label {} contribution {:.6} via set {}",
                bag.bag,
                bag.label.as_u8(),
                bag.contribution,
                bag.selected_set
            );
        }
    }
    Ok(())
}
