use std::path::PathBuf;

use bfm_core::bench::{run_bench, BenchCell, BenchConfig, Method};
use bfm_core::EaConfig;
use clap::Args;
use serde::Serialize;

use crate::error::CliError;
use crate::output::{sibling, Outputs, Provenance};

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Source counts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "6,8,10,12")]
    pub sources: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    /// Per-run wall-clock cap; runs reaching it are reported as censored.
    #[arg(long, default_value_t = 120.0)]
    pub cap_seconds: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Positive and negative bags per dataset (each).
    #[arg(long, default_value_t = 20)]
    pub bags: usize,
    #[arg(long, default_value_t = 0.05)]
    pub noise: f64,
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub stall: Option<usize>,
    /// Timing table (CSV); `.runs.csv` and `.json` siblings hold the detail.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct BenchOutput<'a> {
    provenance: &'a Provenance,
    config: &'a BenchConfig,
    cells: &'a [BenchCell],
}

fn config(args: &BenchArgs, parallel: bool) -> BenchConfig {
    let mut ea = EaConfig {
        parallel,
        ..EaConfig::default()
    };
    if let Some(v) = args.population {
        ea.population_size = v;
    }
    if let Some(v) = args.generations {
        ea.max_generations = v;
    }
    if let Some(v) = args.stall {
        ea.stall_generations = v;
    }
    BenchConfig {
        sources: args.sources.clone(),
        repeats: args.repeats,
        cap_seconds: args.cap_seconds,
        seed: args.seed,
        bags_per_class: args.bags,
        noise_sigma: args.noise,
        methods: vec![Method::RealFm, Method::Bfm],
        ea,
    }
}

fn time_cell(c: &BenchCell, cap: f64) -> String {
    if c.censored {
        format!(">{cap} s")
    } else {
        format!("{:.4}({:.4})", c.mean_time, c.sd_time)
    }
}

/// Methods as rows, source counts as columns, `mean(sd)` cells.
pub fn table_csv(cfg: &BenchConfig, cells: &[BenchCell], provenance: &Provenance) -> String {
    let mut out = provenance.csv_comment();
    out.push_str("method,quantity");
    for s in &cfg.sources {
        out.push_str(&format!(",S={s}"));
    }
    out.push('\n');
    for quantity in ["time_seconds", "best_objective"] {
        for &method in &cfg.methods {
            out.push_str(&format!("{},{quantity}", method.name()));
            for &s in &cfg.sources {
                let c = cells
                    .iter()
                    .find(|c| c.method == method && c.source_count == s)
                    .expect("every combination was run");
                let cell = match quantity {
                    "time_seconds" => time_cell(c, cfg.cap_seconds),
                    _ => format!("{:.6}({:.6})", c.mean_objective, c.sd_objective),
                };
                out.push_str(&format!(",{cell}"));
            }
            out.push('\n');
        }
    }
    out
}

fn runs_csv(cells: &[BenchCell], provenance: &Provenance) -> String {
    let mut out = provenance.csv_comment();
    out.push_str("method,sources,repeat,seed,wall_time_seconds,best_objective,generations,terminated_by,censored,cap_too_small\n");
    for r in cells.iter().flat_map(|c| &c.runs) {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.method.name(),
            r.source_count,
            r.repeat,
            r.seed,
            r.wall_time_seconds,
            r.best_objective,
            r.generations_run,
            serde_json::to_value(r.terminated_by).expect("enum serializes").as_str().unwrap_or("?"),
            r.censored,
            r.cap_too_small
        ));
    }
    out
}

pub fn run(args: &BenchArgs, outputs: &Outputs, parallel: bool) -> Result<(), CliError> {
    let cfg = config(args, parallel);
    let runs_path = sibling(&args.out, "runs.csv");
    let json_path = sibling(&args.out, "json");
    outputs.check(&[&args.out, &runs_path, &json_path])?;

    let cells = run_bench(&cfg, |r| {
        eprintln!(
            "S={:>2} {:<7} repeat {} time {:.3} s objective {:.6} ({:?}){}",
            r.source_count,
            r.method.name(),
            r.repeat,
            r.wall_time_seconds,
            r.best_objective,
            r.terminated_by,
            if r.cap_too_small { " [cap shorter than one generation]" } else { "" }
        )
    })?;
    let provenance = Provenance::new(Some(cfg.seed), &cfg);
    let table = table_csv(&cfg, &cells, &provenance);
    outputs.write(&args.out, &table)?;
    outputs.write(&runs_path, runs_csv(&cells, &provenance))?;
    outputs.write_json(
        &json_path,
        &BenchOutput {
            provenance: &provenance,
            config: &cfg,
            cells: &cells,
        },
    )?;
    print!("{}", table.lines().skip(1).collect::<Vec<_>>().join("\n"));
    println!();
    Ok(())
}
