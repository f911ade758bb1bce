use std::path::PathBuf;

use anyhow::Result;
use clap::Args as ClapArgs;

use fcncd_core::checkpoint::load_model;
use fcncd_core::data::load_dataset;
use fcncd_core::train::evaluate_model;

#[derive(ClapArgs)]
pub struct Args {
    /// Model checkpoint produced by `train`.
    #[arg(long)]
    checkpoint: PathBuf,

    /// Dataset manifest to evaluate against.
    #[arg(long)]
    dataset: PathBuf,

    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Also write per-block diagnostics as CSV.
    #[arg(long)]
    per_block: Option<PathBuf>,
}

pub fn run(args: &Args) -> Result<()> {
    let dataset = load_dataset(&args.dataset)?;
    let model = load_model(&args.checkpoint)?;
    let report = evaluate_model(&model, &dataset, args.per_block.is_some())?;

    if let Some(path) = &args.per_block {
        let mut text = String::from("block,records,pair_accuracy,exact_match\n");
        for d in &report.per_block {
            text.push_str(&format!(
                "{},{},{},{}\n",
                d.block, d.records, d.pair_accuracy, d.exact_match
            ));
        }
        super::write_text(path, &text)?;
    }

    let summary = fcncd_core::train::EvalReport {
        per_block: Vec::new(),
        ..report
    };
    match &args.out {
        Some(path) => super::write_json(path, &summary)?,
        None => println!("{}", serde_json::to_string_pretty(&summary)?),
    }
    Ok(())
}
