use std::path::PathBuf;

use bfm_core::{generate_synthetic, Measure, MeasureDoc, SynthSpec};
use clap::Args;
use serde::Serialize;

use crate::error::CliError;
use crate::output::{read_to_string, sibling, Outputs, Provenance};

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Generator spec (JSON).
    #[arg(long)]
    pub spec: PathBuf,
    /// Dataset file to write; a `.manifest.json` sidecar is written next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct Manifest<'a> {
    provenance: Provenance,
    spec: &'a SynthSpec,
    truth_measure: MeasureDoc,
    truth_minimal_winning: Option<MeasureDoc>,
    positive_bags: usize,
    negative_bags: usize,
    instances: usize,
}

pub fn run(args: &SynthArgs, outputs: &Outputs) -> Result<(), CliError> {
    let text = read_to_string(&args.spec)?;
    let spec: SynthSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", args.spec.display())))?;
    let truth = Measure::Binary(spec.validate()?);
    let data = generate_synthetic(&spec)?;

    let manifest_path = sibling(&args.out, "manifest.json");
    outputs.check(&[&args.out, &manifest_path])?;
    outputs.write(&args.out, data.to_json_string())?;
    outputs.write_json(
        &manifest_path,
        &Manifest {
            provenance: Provenance::new(Some(spec.rng_seed), &spec),
            spec: &spec,
            truth_measure: truth.to_doc(),
            truth_minimal_winning: truth.to_antichain_doc(),
            positive_bags: data.positive_bags(),
            negative_bags: data.negative_bags(),
            instances: data.instance_count(),
        },
    )?;
    eprintln!(
        "wrote {} ({} positive, {} negative bags, {} instances)",
        args.out.display(),
        data.positive_bags(),
        data.negative_bags(),
        data.instance_count()
    );
    Ok(())
}
