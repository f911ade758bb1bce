//! One enum over every trainable model, for checkpointing and CLI dispatch.

use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::{BaselineKind, Mf, MfConfig, Mupp2pl, NcdmConfig, NcdmR, RankNet};
use crate::data::{ItemBlock, QMatrix, ResponseDataset, ResponseRecord};
use crate::error::{Error, Result};
use crate::loss::PairLossSpec;
use crate::model::{Fcncd, FcncdConfig};
use crate::numerics::{DiffGraph, NodeId, ParamSet};
use crate::train::BlockScoringModel;

/// Any model the training loop can fit. The random baseline has no
/// parameters and lives outside this enum.
#[derive(Debug, Clone)]
pub enum AnyModel {
    Fcncd(Fcncd),
    Mf(Mf),
    RankNet(RankNet),
    NcdmR(NcdmR),
    Mupp2pl(Mupp2pl),
}

/// Stable kind tag used in checkpoints and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Fcncd,
    Mf,
    RankNet,
    NcdmR,
    Mupp2pl,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ModelKind::Fcncd => "fcncd",
            ModelKind::Mf => "mf",
            ModelKind::RankNet => "ranknet",
            ModelKind::NcdmR => "ncdm-r",
            ModelKind::Mupp2pl => "mupp-2pl",
        };
        write!(f, "{s}")
    }
}

impl AnyModel {
    pub fn new_fcncd(
        config: FcncdConfig,
        dataset: &ResponseDataset,
        rng: &mut ChaCha20Rng,
    ) -> Result<Self> {
        Ok(AnyModel::Fcncd(Fcncd::new(
            config,
            dataset.num_participants,
            dataset.num_items,
            dataset.num_dimensions,
            rng,
        )?))
    }

    pub fn new_baseline(
        kind: BaselineKind,
        dataset: &ResponseDataset,
        rng: &mut ChaCha20Rng,
    ) -> Result<Self> {
        let (n, m, k) = (
            dataset.num_participants,
            dataset.num_items,
            dataset.num_dimensions,
        );
        match kind {
            BaselineKind::Mf => Ok(AnyModel::Mf(Mf::new(MfConfig::default(), n, m, rng)?)),
            BaselineKind::RankNet => Ok(AnyModel::RankNet(RankNet::new(
                MfConfig::default(),
                n,
                m,
                rng,
            )?)),
            BaselineKind::NcdmR => Ok(AnyModel::NcdmR(NcdmR::new(
                NcdmConfig::default(),
                n,
                m,
                k,
                rng,
            )?)),
            BaselineKind::Mupp2pl => Ok(AnyModel::Mupp2pl(Mupp2pl::new(n, m, k, rng)?)),
            BaselineKind::Random => Err(Error::Config(
                "the random baseline has no trainable model".into(),
            )),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            AnyModel::Fcncd(_) => ModelKind::Fcncd,
            AnyModel::Mf(_) => ModelKind::Mf,
            AnyModel::RankNet(_) => ModelKind::RankNet,
            AnyModel::NcdmR(_) => ModelKind::NcdmR,
            AnyModel::Mupp2pl(_) => ModelKind::Mupp2pl,
        }
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        match self {
            AnyModel::Fcncd(m) => (m.num_participants, m.num_items, m.num_dimensions),
            AnyModel::Mf(m) => (m.num_participants, m.num_items, 0),
            AnyModel::RankNet(m) => (m.num_participants, m.num_items, 0),
            AnyModel::NcdmR(m) => (m.num_participants, m.num_items, m.num_dimensions),
            AnyModel::Mupp2pl(m) => (m.num_participants, m.num_items, m.num_dimensions),
        }
    }

    fn inner(&self) -> &dyn BlockScoringModel {
        match self {
            AnyModel::Fcncd(m) => m,
            AnyModel::Mf(m) => m,
            AnyModel::RankNet(m) => m,
            AnyModel::NcdmR(m) => m,
            AnyModel::Mupp2pl(m) => m,
        }
    }

    fn inner_mut(&mut self) -> &mut dyn BlockScoringModel {
        match self {
            AnyModel::Fcncd(m) => m,
            AnyModel::Mf(m) => m,
            AnyModel::RankNet(m) => m,
            AnyModel::NcdmR(m) => m,
            AnyModel::Mupp2pl(m) => m,
        }
    }
}

impl BlockScoringModel for AnyModel {
    fn params(&self) -> &ParamSet {
        self.inner().params()
    }

    fn params_mut(&mut self) -> &mut ParamSet {
        self.inner_mut().params_mut()
    }

    fn append_batch_scores(
        &self,
        graph: &mut DiffGraph,
        records: &[&ResponseRecord],
        dataset: &ResponseDataset,
    ) -> Result<NodeId> {
        self.inner().append_batch_scores(graph, records, dataset)
    }

    fn append_batch_loss(
        &self,
        graph: &mut DiffGraph,
        records: &[&ResponseRecord],
        dataset: &ResponseDataset,
        spec: PairLossSpec,
    ) -> Result<NodeId> {
        self.inner().append_batch_loss(graph, records, dataset, spec)
    }

    fn score_block(&self, participant: usize, block: &ItemBlock, q: &QMatrix) -> Result<Vec<f64>> {
        self.inner().score_block(participant, block, q)
    }

    fn constrained_param_names(&self) -> &'static [&'static str] {
        self.inner().constrained_param_names()
    }

    fn ability_profile(&self, participant: usize) -> Option<Vec<f64>> {
        self.inner().ability_profile(participant)
    }
}
