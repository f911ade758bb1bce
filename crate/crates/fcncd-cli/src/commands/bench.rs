use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args as ClapArgs;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use fcncd_core::baselines::{evaluate_random, BaselineKind};
use fcncd_core::data::{split_by_block, split_records};
use fcncd_core::loss::LossKind;
use fcncd_core::train::{train, SplitMode};
use fcncd_core::{AnyModel, EvalReport, FcncdConfig, FcncdVariant, TrainConfig};

#[derive(ClapArgs)]
pub struct Args {
    /// Dataset manifest (JSON).
    #[arg(long)]
    dataset: PathBuf,

    /// Comma-separated models: random, mf, ranknet, ncdm-r, mupp-2pl, fcncd,
    /// fcncd-eb, fcncd-bpr, fcncd-list, fcncd-mo.
    #[arg(long, value_delimiter = ',')]
    models: Vec<String>,

    /// Training runs averaged per model, each with its own derived seed.
    #[arg(long, default_value_t = 10)]
    repeats: usize,

    /// Hyperparameter preset: map, bfi or sim-mole.
    #[arg(long)]
    profile: Option<String>,

    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    max_epochs: Option<usize>,
    #[arg(long)]
    patience: Option<usize>,
    #[arg(long)]
    train_fraction: Option<f64>,
    /// Held-out split: by-record or by-block.
    #[arg(long)]
    split: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Leaderboard CSV output path.
    #[arg(long)]
    out: PathBuf,
}

struct Row {
    model: String,
    pra: f64,
    lra: f64,
    doa: Option<f64>,
    seed_count: usize,
}

pub fn run(args: &Args) -> Result<()> {
    if args.models.is_empty() {
        anyhow::bail!(fcncd_core::Error::Config("no models requested".into()));
    }
    if args.repeats == 0 {
        anyhow::bail!(fcncd_core::Error::Config("repeats must be positive".into()));
    }
    let dataset = fcncd_core::data::load_dataset(&args.dataset)?;

    let mut base = match &args.profile {
        Some(name) => TrainConfig::profile(name)?,
        None => TrainConfig::default(),
    };
    if let Some(v) = args.lambda {
        base.lambda = v;
    }
    if let Some(v) = args.batch_size {
        base.batch_size = v;
    }
    if let Some(v) = args.learning_rate {
        base.learning_rate = v;
    }
    if let Some(v) = args.max_epochs {
        base.max_epochs = v;
    }
    if let Some(v) = args.patience {
        base.patience = v;
    }
    if let Some(v) = args.train_fraction {
        base.train_fraction = v;
    }
    if let Some(split) = &args.split {
        base.split = split.parse::<SplitMode>()?;
    }
    base.validate()?;

    let mut rows: Vec<Row> = Vec::new();
    for model_name in &args.models {
        let mut pra_sum = 0.0;
        let mut lra_sum = 0.0;
        let mut doa_sum: Option<f64> = Some(0.0);
        for repeat in 0..args.repeats {
            let mut config = base;
            config.seed = args.seed + repeat as u64;
            let eval = run_one(model_name, &dataset, &config)
                .with_context(|| format!("model {model_name}, repeat {repeat}"))
                .inspect_err(|_| {
                    // preserve finished rows before aborting
                    let _ = write_rows(&args.out, &rows);
                })?;
            pra_sum += eval.pra;
            lra_sum += eval.lra;
            doa_sum = match (doa_sum, eval.doa) {
                (Some(acc), Some(d)) => Some(acc + d),
                _ => None,
            };
            eprintln!(
                "bench {model_name} seed {}: pra {:.4} lra {:.4}",
                config.seed, eval.pra, eval.lra
            );
        }
        let n = args.repeats as f64;
        rows.push(Row {
            model: model_name.clone(),
            pra: pra_sum / n,
            lra: lra_sum / n,
            doa: doa_sum.map(|d| d / n),
            seed_count: args.repeats,
        });
        write_rows(&args.out, &rows)?;
    }
    println!("leaderboard: {}", args.out.display());
    Ok(())
}

/// Trains (or samples, for random) one model with the given seed and returns
/// its held-out evaluation.
fn run_one(
    model_name: &str,
    dataset: &fcncd_core::ResponseDataset,
    config: &TrainConfig,
) -> Result<EvalReport> {
    if model_name == "random" {
        // evaluate on the same held-out side a trained model would see
        let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
        let (_, test) = match config.split {
            SplitMode::ByRecord => split_records(dataset, config.train_fraction, &mut rng)?,
            SplitMode::ByBlock => split_by_block(dataset, config.train_fraction, &mut rng)?,
        };
        return Ok(evaluate_random(&test, config.seed)?);
    }

    let mut config = *config;
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    let mut model = match model_name {
        name if name == "fcncd" || name.starts_with("fcncd-") => {
            let variant: FcncdVariant = name.strip_prefix("fcncd-").unwrap_or("full").parse()?;
            match variant {
                FcncdVariant::Bpr => config.loss = LossKind::OriginalBpr,
                FcncdVariant::List => config.loss = LossKind::List,
                _ => {}
            }
            let mut model_config = FcncdConfig::default();
            variant.apply(&mut model_config);
            AnyModel::new_fcncd(model_config, dataset, &mut rng)?
        }
        name => {
            let kind: BaselineKind = name.parse()?;
            AnyModel::new_baseline(kind, dataset, &mut rng)?
        }
    };
    let report = train(&mut model, dataset, &config)?;
    Ok(report.eval)
}

fn write_rows(path: &PathBuf, rows: &[Row]) -> Result<()> {
    let mut text = String::from("model,pra,lra,doa,seed_count\n");
    for row in rows {
        let doa = row.doa.map(|d| d.to_string()).unwrap_or_default();
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            row.model, row.pra, row.lra, doa, row.seed_count
        ));
    }
    super::write_text(path, &text)
}
