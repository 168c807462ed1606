use std::path::{Path, PathBuf};

use bfm_core::{fuse, fuse_naive, load_dataset, score, Dataset, FusionMap, Measure, NaiveMode, ScoreReport};
use clap::Args;
use serde::Serialize;

use crate::error::CliError;
use crate::output::{read_to_string, Outputs, Provenance};

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("aggregation").required(true).args(["measure", "naive"])))]
pub struct FuseArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Measure JSON, or a `train` result file.
    #[arg(long)]
    pub measure: Option<PathBuf>,
    /// Fixed aggregation instead of a measure: min, max or mean.
    #[arg(long)]
    pub naive: Option<NaiveMode>,
    /// Output directory for fusion.csv, score.json and roc.csv.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct RunConfig<'a> {
    command: &'static str,
    data: &'a PathBuf,
    measure: Option<&'a PathBuf>,
    naive: Option<NaiveMode>,
}

#[derive(Serialize)]
struct ScoreOutput<'a> {
    provenance: &'a Provenance,
    positives: usize,
    negatives: usize,
    #[serde(flatten)]
    report: &'a ScoreReport,
}

/// Accepts a bare measure document or any JSON object carrying one under
/// `best_measure`.
/// Also returns the training seed when the file carries provenance.
pub fn load_measure(path: &Path) -> Result<(Measure, Option<u64>), CliError> {
    let text = read_to_string(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let seed = value.pointer("/provenance/seed").and_then(serde_json::Value::as_u64);
    let doc = value.get("best_measure").cloned().unwrap_or(value);
    let measure =
        serde_json::from_value(doc).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    Ok((measure, seed))
}

fn fusion_csv(data: &Dataset, map: &FusionMap, truth: Option<&[u8]>, provenance: &Provenance) -> String {
    let mut out = provenance.csv_comment();
    out.push_str(if truth.is_some() { "bag,set,instance,score,truth\n" } else { "bag,set,instance,score\n" });
    for (k, ((b, s, i), _)) in data.instances().enumerate() {
        out.push_str(&format!("{b},{s},{i},{}", map.scores[k]));
        if let Some(t) = truth {
            out.push_str(&format!(",{}", t[k]));
        }
        out.push('\n');
    }
    out
}

fn roc_csv(report: &ScoreReport, provenance: &Provenance) -> String {
    let mut out = provenance.csv_comment();
    out.push_str("fpr,tpr\n");
    for p in &report.roc_points {
        out.push_str(&format!("{},{}\n", p.fpr, p.tpr));
    }
    out
}

pub fn run(args: &FuseArgs, outputs: &Outputs) -> Result<(), CliError> {
    let fusion_path = args.out.join("fusion.csv");
    let score_path = args.out.join("score.json");
    let roc_path = args.out.join("roc.csv");
    outputs.check(&[&fusion_path, &score_path, &roc_path])?;

    let data = load_dataset(&args.data)?;
    let (map, seed) = match (&args.measure, args.naive) {
        (Some(path), _) => {
            let (measure, seed) = load_measure(path)?;
            (fuse(&data, &measure)?, seed)
        }
        (None, Some(mode)) => (fuse_naive(&data, mode), None),
        (None, None) => return Err(CliError::Validation("pass --measure or --naive".into())),
    };
    let provenance = Provenance::new(
        seed,
        &RunConfig {
            command: "fuse-eval",
            data: &args.data,
            measure: args.measure.as_ref(),
            naive: args.naive,
        },
    );
    let truth = data.flat_truth();
    outputs.write(&fusion_path, fusion_csv(&data, &map, truth.as_deref(), &provenance))?;

    let Some(truth) = truth else {
        eprintln!("warning: dataset has no instance_truth; wrote fusion scores only, scoring skipped");
        return Ok(());
    };
    let report = score(&map, &truth)?;
    let positives = truth.iter().filter(|&&t| t == 1).count();
    outputs.write_json(
        &score_path,
        &ScoreOutput {
            provenance: &provenance,
            positives,
            negatives: truth.len() - positives,
            report: &report,
        },
    )?;
    outputs.write(&roc_path, roc_csv(&report, &provenance))?;

    match report.auc {
        Some(auc) => println!("auc: {auc:.4}"),
        None => println!("auc: undefined (single class)"),
    }
    println!("rmse: {:.4}", report.rmse);
    println!("psnr: {:.3} dB", report.psnr);
    Ok(())
}
