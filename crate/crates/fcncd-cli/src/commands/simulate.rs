use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args as ClapArgs;

use fcncd_core::data::{save_dataset, validate, DatasetManifest};
use fcncd_core::sim::{generate, save_truth, SimConfig};

#[derive(ClapArgs)]
pub struct Args {
    /// Generation settings as JSON (see `SimConfig`).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,

    /// Built-in configuration; `sim-mole` is the standard MOLE-4 benchmark.
    #[arg(long)]
    preset: Option<String>,

    /// Overrides the seed from the config or preset.
    #[arg(long)]
    seed: Option<u64>,

    /// Output directory for the dataset, truth files and manifest.
    #[arg(long)]
    out: PathBuf,

    /// Dataset name recorded in the manifest.
    #[arg(long, default_value = "sim")]
    name: String,
}

pub fn run(args: &Args) -> Result<()> {
    let mut config = match (&args.config, &args.preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| fcncd_core::Error::io(path.display().to_string(), e))?;
            serde_json::from_str::<SimConfig>(&text)
                .map_err(|e| fcncd_core::Error::Config(format!("{}: {e}", path.display())))?
        }
        (None, Some(preset)) => match preset.as_str() {
            "sim-mole" => SimConfig::sim_mole(0),
            other => bail!(fcncd_core::Error::Config(format!(
                "unknown preset {other:?} (expected sim-mole)"
            ))),
        },
        _ => bail!(fcncd_core::Error::Config(
            "exactly one of --config or --preset is required".into()
        )),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    config.validate().context("invalid simulation config")?;

    let (dataset, truth) = generate(&config)?;
    let violations = validate(&dataset);
    assert!(violations.is_empty(), "generated dataset must validate");

    let manifest_path = save_dataset(&dataset, &args.out, &args.name)?;
    save_truth(&truth, &args.out)?;
    // record the truth files in the manifest
    let mut manifest = DatasetManifest::load(&manifest_path)?;
    manifest.truth_theta_file = Some("truth_theta.csv".into());
    manifest.truth_items_file = Some("truth_items.csv".into());
    super::write_json(&manifest_path, &manifest)?;

    println!(
        "dataset {}: participants={} items={} dimensions={} blocks={} items_per_block={} type={} records={}",
        args.name,
        dataset.num_participants,
        dataset.num_items,
        dataset.num_dimensions,
        dataset.num_blocks(),
        dataset.items_per_block(),
        dataset.block_type,
        dataset.records.len()
    );
    println!("manifest: {}", manifest_path.display());
    Ok(())
}
