use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Result};
use clap::Args as ClapArgs;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use fcncd_core::baselines::BaselineKind;
use fcncd_core::checkpoint::save_model;
use fcncd_core::data::load_dataset;
use fcncd_core::loss::LossKind;
use fcncd_core::train::{write_history_csv, SplitMode};
use fcncd_core::{AnyModel, FcncdConfig, FcncdVariant, TrainConfig};

#[derive(ClapArgs)]
pub struct Args {
    /// Dataset manifest (JSON).
    #[arg(long)]
    pub dataset: PathBuf,

    /// Model to fit: fcncd, mf, ranknet, ncdm-r or mupp-2pl.
    #[arg(long, default_value = "fcncd")]
    pub model: String,

    /// FCNCD variant: full, eb, bpr, list or mo.
    #[arg(long, default_value = "full")]
    pub variant: String,

    /// Hyperparameter preset: map, bfi or sim-mole.
    #[arg(long)]
    pub profile: Option<String>,

    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub weight_decay: Option<f64>,
    #[arg(long)]
    pub max_epochs: Option<usize>,
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long)]
    pub train_fraction: Option<f64>,
    /// Pair loss: weighted-bpr, original-bpr or list (the bpr/list variants
    /// select this automatically).
    #[arg(long)]
    pub loss: Option<String>,
    /// Held-out split: by-record or by-block.
    #[arg(long)]
    pub split: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Embedding width of the FCNCD model.
    #[arg(long)]
    pub embed_dim: Option<usize>,
    /// Mapping layer width of the FCNCD model.
    #[arg(long)]
    pub mapping_width: Option<usize>,
    /// Head hidden width of the FCNCD model.
    #[arg(long)]
    pub head_width: Option<usize>,

    /// Checkpoint output path; history and evaluation reports are written
    /// next to it as <out>.history.csv and <out>.eval.json.
    #[arg(long)]
    pub out: PathBuf,

    /// Print one line per epoch while training.
    #[arg(long)]
    pub verbose: bool,
}

pub fn build_train_config(args: &Args) -> Result<TrainConfig> {
    let mut config = match &args.profile {
        Some(name) => TrainConfig::profile(name)?,
        None => TrainConfig::default(),
    };
    let variant: FcncdVariant = args.variant.parse()?;
    match variant {
        FcncdVariant::Bpr => config.loss = LossKind::OriginalBpr,
        FcncdVariant::List => config.loss = LossKind::List,
        _ => {}
    }
    if let Some(v) = args.lambda {
        config.lambda = v;
    }
    if let Some(v) = args.batch_size {
        config.batch_size = v;
    }
    if let Some(v) = args.learning_rate {
        config.learning_rate = v;
    }
    if let Some(v) = args.weight_decay {
        config.weight_decay = v;
    }
    if let Some(v) = args.max_epochs {
        config.max_epochs = v;
    }
    if let Some(v) = args.patience {
        config.patience = v;
    }
    if let Some(v) = args.train_fraction {
        config.train_fraction = v;
    }
    if let Some(loss) = &args.loss {
        config.loss = match loss.as_str() {
            "weighted-bpr" => LossKind::WeightedBpr,
            "original-bpr" | "bpr" => LossKind::OriginalBpr,
            "list" => LossKind::List,
            other => bail!(fcncd_core::Error::Config(format!(
                "unknown loss {other:?}"
            ))),
        };
    }
    if let Some(split) = &args.split {
        config.split = split.parse::<SplitMode>()?;
    }
    config.seed = args.seed;
    config.validate()?;
    Ok(config)
}

pub fn run(args: &Args) -> Result<()> {
    let dataset = load_dataset(&args.dataset)?;
    let config = build_train_config(args)?;

    let mut rng = ChaCha20Rng::seed_from_u64(args.seed);
    let mut model = if args.model == "fcncd" {
        let variant: FcncdVariant = args.variant.parse()?;
        let mut model_config = FcncdConfig::default();
        if let Some(v) = args.embed_dim {
            model_config.embed_dim = v;
        }
        if let Some(v) = args.mapping_width {
            model_config.mapping_width = v;
        }
        if let Some(v) = args.head_width {
            model_config.head_width = v;
        }
        variant.apply(&mut model_config);
        AnyModel::new_fcncd(model_config, &dataset, &mut rng)?
    } else {
        let kind: BaselineKind = args.model.parse()?;
        AnyModel::new_baseline(kind, &dataset, &mut rng)?
    };

    let started = Instant::now();
    let report = train_with_progress(&mut model, &dataset, &config, args.verbose)?;
    eprintln!(
        "trained {} in {:.1}s ({} epochs, best epoch {})",
        args.model,
        started.elapsed().as_secs_f64(),
        report.history.len(),
        report.best_epoch
    );

    save_model(&model, &args.out)?;
    write_history_csv(&report.history, &side_path(&args.out, "history.csv"))?;
    super::write_json(&side_path(&args.out, "eval.json"), &report.eval)?;
    println!(
        "checkpoint: {}\nbest_epoch: {}\ntest_pra: {}\ntest_lra: {}",
        args.out.display(),
        report.best_epoch,
        report.eval.pra,
        report.eval.lra
    );
    Ok(())
}

fn train_with_progress(
    model: &mut AnyModel,
    dataset: &fcncd_core::ResponseDataset,
    config: &TrainConfig,
    verbose: bool,
) -> Result<fcncd_core::TrainReport> {
    let report = fcncd_core::train::train_with(model, dataset, config, |h| {
        if verbose {
            eprintln!(
                "epoch {:>3}  loss {:.6}  pra {:.4}  lra {:.4}",
                h.epoch, h.train_loss, h.pra, h.lra
            );
        }
    })?;
    Ok(report)
}

pub(crate) fn side_path(out: &Path, suffix: &str) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".");
    name.push(suffix);
    out.with_file_name(name)
}
