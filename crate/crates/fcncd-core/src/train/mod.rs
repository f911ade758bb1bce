//! Mini-batch training with early stopping, plus model evaluation.

mod metrics;

pub use metrics::{
    degree_of_agreement, list_rank_accuracy, pair_rank_accuracy, per_block_diagnostics,
    BlockDiagnostic, EvalReport,
};

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::data::{
    split_by_block, split_records, ItemBlock, QMatrix, RankVector, ResponseDataset, ResponseRecord,
};
use crate::error::{Error, Result};
use crate::loss::{append_pair_loss, LossKind, PairLossSpec};
use crate::model::Fcncd;
use crate::numerics::{adamw_step, AdamwConfig, AdamwState, DiffGraph, NodeId, ParamSet};

/// How held-out data is carved off: individual records (each block is seen
/// in training for most participants) or whole blocks (held-out blocks are
/// entirely unseen).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SplitMode {
    #[default]
    ByRecord,
    ByBlock,
}

impl std::str::FromStr for SplitMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "by-record" | "record" => Ok(SplitMode::ByRecord),
            "by-block" | "block" => Ok(SplitMode::ByBlock),
            other => Err(Error::Config(format!("unknown split mode {other:?}"))),
        }
    }
}

/// Training hyperparameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lambda: f64,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub max_epochs: usize,
    /// Consecutive non-improving epochs tolerated before stopping.
    pub patience: usize,
    pub train_fraction: f64,
    pub seed: u64,
    pub loss: LossKind,
    pub split: SplitMode,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lambda: 5.0,
            batch_size: 64,
            learning_rate: 1e-3,
            weight_decay: 1e-2,
            max_epochs: 200,
            patience: 5,
            train_fraction: 0.8,
            seed: 0,
            loss: LossKind::WeightedBpr,
            split: SplitMode::ByRecord,
        }
    }
}

impl TrainConfig {
    /// Named presets: `map` (lambda 8, batch 256, lr 1e-2), `bfi` (5, 64,
    /// 5e-3), `sim-mole` (10, 32, 5e-4).
    pub fn profile(name: &str) -> Result<Self> {
        let (lambda, batch_size, learning_rate) = match name.to_ascii_lowercase().as_str() {
            "map" => (8.0, 256, 1e-2),
            "bfi" => (5.0, 64, 5e-3),
            "sim-mole" | "sim_mole" => (10.0, 32, 5e-4),
            other => {
                return Err(Error::Config(format!(
                    "unknown profile {other:?} (expected map, bfi or sim-mole)"
                )))
            }
        };
        Ok(TrainConfig {
            lambda,
            batch_size,
            learning_rate,
            ..Default::default()
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.patience == 0 {
            return Err(Error::Config("patience must be at least 1".into()));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config("train fraction must lie in (0, 1)".into()));
        }
        if self.batch_size == 0 || self.max_epochs == 0 {
            return Err(Error::Config("batch size and max epochs must be positive".into()));
        }
        if self.learning_rate <= 0.0 {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        if matches!(self.loss, LossKind::WeightedBpr) && self.lambda <= 0.0 {
            return Err(Error::Config("lambda must be positive".into()));
        }
        Ok(())
    }

    pub fn pair_loss_spec(&self) -> Result<PairLossSpec> {
        PairLossSpec::new(self.loss, self.lambda)
    }

    fn adamw(&self) -> AdamwConfig {
        AdamwConfig {
            learning_rate: self.learning_rate,
            weight_decay: self.weight_decay,
            ..Default::default()
        }
    }
}

/// A model trainable by the shared loop: it scores block items through a
/// graph and names the parameters to project after each step.
pub trait BlockScoringModel {
    fn params(&self) -> &ParamSet;
    fn params_mut(&mut self) -> &mut ParamSet;

    /// Appends score computation for `records`; returns a (rows x 1) node,
    /// record-major in block item order.
    fn append_batch_scores(
        &self,
        graph: &mut DiffGraph,
        records: &[&ResponseRecord],
        dataset: &ResponseDataset,
    ) -> Result<NodeId>;

    /// Appends the training loss for a batch. The default aggregates the
    /// configured block pair loss; pairwise-logistic models override.
    fn append_batch_loss(
        &self,
        graph: &mut DiffGraph,
        records: &[&ResponseRecord],
        dataset: &ResponseDataset,
        spec: PairLossSpec,
    ) -> Result<NodeId> {
        let scores = self.append_batch_scores(graph, records, dataset)?;
        let ranks: Vec<&RankVector> = records.iter().map(|r| &r.ranks).collect();
        append_pair_loss(graph, scores, &ranks, spec)
    }

    /// Direct (graph-free) scores for one block.
    fn score_block(&self, participant: usize, block: &ItemBlock, q: &QMatrix) -> Result<Vec<f64>>;

    /// Parameters projected onto the nonnegative orthant after each step.
    fn constrained_param_names(&self) -> &'static [&'static str] {
        &[]
    }

    /// Per-dimension abilities, when the model has an interpretable mapping.
    fn ability_profile(&self, participant: usize) -> Option<Vec<f64>>;
}

impl BlockScoringModel for Fcncd {
    fn params(&self) -> &ParamSet {
        &self.params
    }

    fn params_mut(&mut self) -> &mut ParamSet {
        &mut self.params
    }

    fn append_batch_scores(
        &self,
        graph: &mut DiffGraph,
        records: &[&ResponseRecord],
        dataset: &ResponseDataset,
    ) -> Result<NodeId> {
        Fcncd::append_batch_scores(self, graph, records, dataset)
    }

    fn score_block(&self, participant: usize, block: &ItemBlock, q: &QMatrix) -> Result<Vec<f64>> {
        self.predict_block(participant, block, q)
    }

    fn constrained_param_names(&self) -> &'static [&'static str] {
        self.constrained_params()
    }

    fn ability_profile(&self, participant: usize) -> Option<Vec<f64>> {
        Fcncd::ability_profile(self, participant).ok()
    }
}

/// One epoch of the training history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub pra: f64,
    pub lra: f64,
}

/// Outcome of a training run: per-epoch history, the restored best epoch,
/// and the held-out evaluation of the restored parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainReport {
    pub history: Vec<EpochStats>,
    pub best_epoch: usize,
    pub eval: EvalReport,
}

/// Splits the dataset, optimizes with AdamW and per-step projection, tracks
/// held-out pairwise accuracy, stops after `patience` non-improving epochs,
/// and restores the best parameters.
pub fn train<M: BlockScoringModel>(
    model: &mut M,
    dataset: &ResponseDataset,
    config: &TrainConfig,
) -> Result<TrainReport> {
    train_with(model, dataset, config, |_| {})
}

/// [`train`] with a per-epoch observer, for progress reporting.
pub fn train_with<M: BlockScoringModel>(
    model: &mut M,
    dataset: &ResponseDataset,
    config: &TrainConfig,
    mut on_epoch: impl FnMut(&EpochStats),
) -> Result<TrainReport> {
    config.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    let (train_set, test_set) = match config.split {
        SplitMode::ByRecord => split_records(dataset, config.train_fraction, &mut rng)?,
        SplitMode::ByBlock => split_by_block(dataset, config.train_fraction, &mut rng)?,
    };
    if train_set.records.is_empty() {
        return Err(Error::Data("training split is empty".into()));
    }
    let spec = config.pair_loss_spec()?;

    let mut state = AdamwState::new(model.params(), config.adamw());
    let mut grads = crate::numerics::Gradients::zeros_like(model.params());
    let mut history: Vec<EpochStats> = Vec::new();
    let mut best: Option<(f64, usize, ParamSet)> = None;
    let mut non_improving = 0usize;

    let mut order: Vec<usize> = (0..train_set.records.len()).collect();
    for epoch in 1..=config.max_epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut batches = 0usize;
        for chunk in order.chunks(config.batch_size) {
            let records: Vec<&ResponseRecord> =
                chunk.iter().map(|&i| &train_set.records[i]).collect();
            let mut graph = DiffGraph::new();
            let loss = model.append_batch_loss(&mut graph, &records, &train_set, spec)?;
            graph.set_output(loss);
            let value = graph.forward_backward_into(model.params(), &mut grads)?;
            adamw_step(model.params_mut(), &grads, &mut state)?;
            clip_constrained(model);
            loss_sum += value;
            batches += 1;
        }

        let scored = batch_scores(model, &test_set)?;
        let pra = pair_rank_accuracy(
            scored
                .iter()
                .zip(&test_set.records)
                .map(|(s, r)| (s.as_slice(), &r.ranks)),
        )?;
        let lra = list_rank_accuracy(
            scored
                .iter()
                .zip(&test_set.records)
                .map(|(s, r)| (s.as_slice(), &r.ranks)),
        )?;
        let stats = EpochStats {
            epoch,
            train_loss: loss_sum / batches as f64,
            pra,
            lra,
        };
        on_epoch(&stats);
        history.push(stats);

        let improved = best.as_ref().map_or(true, |(b, _, _)| pra > *b);
        if improved {
            best = Some((pra, epoch, model.params().clone()));
            non_improving = 0;
        } else {
            non_improving += 1;
            if non_improving >= config.patience {
                break;
            }
        }
    }

    let (_, best_epoch, best_params) = best.expect("at least one epoch ran");
    *model.params_mut() = best_params;
    let eval = evaluate_model(model, &test_set, false)?;
    Ok(TrainReport {
        history,
        best_epoch,
        eval,
    })
}

fn clip_constrained<M: BlockScoringModel>(model: &mut M) {
    for name in model.constrained_param_names() {
        let params = model.params_mut();
        let clipped = params.get(name).expect("constrained param").clip_nonnegative();
        *params.get_mut(name).expect("constrained param") = clipped;
    }
}

/// Graph-evaluated scores for every record, chunked for cache friendliness.
pub fn batch_scores<M: BlockScoringModel>(
    model: &M,
    dataset: &ResponseDataset,
) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(dataset.records.len());
    for chunk in dataset.records.chunks(512) {
        let records: Vec<&ResponseRecord> = chunk.iter().collect();
        let mut graph = DiffGraph::new();
        let scores = model.append_batch_scores(&mut graph, &records, dataset)?;
        graph.set_output(scores);
        let values = graph.forward(model.params())?;
        let mut offset = 0;
        for rec in chunk {
            let t = dataset.blocks[rec.block].size();
            out.push(values.data()[offset..offset + t].to_vec());
            offset += t;
        }
    }
    Ok(out)
}

/// Scores the dataset and assembles the metric report. DOA uses the model's
/// ability profile when it exposes one.
pub fn evaluate_model<M: BlockScoringModel>(
    model: &M,
    dataset: &ResponseDataset,
    with_diagnostics: bool,
) -> Result<EvalReport> {
    let scored = batch_scores(model, dataset)?;
    let pra = pair_rank_accuracy(
        scored
            .iter()
            .zip(&dataset.records)
            .map(|(s, r)| (s.as_slice(), &r.ranks)),
    )?;
    let lra = list_rank_accuracy(
        scored
            .iter()
            .zip(&dataset.records)
            .map(|(s, r)| (s.as_slice(), &r.ranks)),
    )?;
    let doa = match collect_abilities(model, dataset.num_participants) {
        Some(abilities) => Some(degree_of_agreement(&abilities, dataset)?),
        None => None,
    };
    let per_block = if with_diagnostics {
        per_block_diagnostics(
            scored
                .iter()
                .zip(&dataset.records)
                .map(|(s, r)| (r.block, s.as_slice(), &r.ranks)),
        )?
    } else {
        Vec::new()
    };
    Ok(EvalReport {
        pra,
        lra,
        doa,
        per_block,
    })
}

/// Ability vectors for all participants, or None if the model has no
/// interpretable profile.
pub fn collect_abilities<M: BlockScoringModel>(
    model: &M,
    num_participants: usize,
) -> Option<Vec<Vec<f64>>> {
    (0..num_participants)
        .map(|p| model.ability_profile(p))
        .collect()
}

/// Writes the per-epoch log as `epoch,loss,pra,lra`.
pub fn write_history_csv(history: &[EpochStats], path: &Path) -> Result<()> {
    let mut text = String::from("epoch,loss,pra,lra\n");
    for h in history {
        text.push_str(&format!("{},{},{},{}\n", h.epoch, h.train_loss, h.pra, h.lra));
    }
    crate::data::io_write(path, &text)
}
