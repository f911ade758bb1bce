//! Matrix-factorization scorer: participant and item latent vectors combined
//! elementwise and passed through a sigmoid head. No dimension structure, so
//! no ability profile.

use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::data::{ItemBlock, QMatrix, ResponseDataset, ResponseRecord};
use crate::error::Result;
use crate::numerics::{xavier_uniform, Array, DiffGraph, NodeId, ParamSet};
use crate::train::BlockScoringModel;

use super::{append_mlp, mlp_forward, Activation};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MfConfig {
    pub latent_dim: usize,
    pub hidden1: usize,
    pub hidden2: usize,
}

impl Default for MfConfig {
    fn default() -> Self {
        MfConfig {
            latent_dim: 64,
            hidden1: 256,
            hidden2: 128,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Mf {
    pub config: MfConfig,
    pub num_participants: usize,
    pub num_items: usize,
    pub params: ParamSet,
}

impl Mf {
    pub fn new(
        config: MfConfig,
        num_participants: usize,
        num_items: usize,
        rng: &mut ChaCha20Rng,
    ) -> Result<Self> {
        let mut params = ParamSet::new();
        params.insert("h_s", xavier_uniform(num_participants, config.latent_dim, rng)?)?;
        params.insert("h_e", xavier_uniform(num_items, config.latent_dim, rng)?)?;
        params.insert("w1", xavier_uniform(config.latent_dim, config.hidden1, rng)?)?;
        params.insert("b1", Array::zeros(vec![config.hidden1]))?;
        params.insert("w2", xavier_uniform(config.hidden1, config.hidden2, rng)?)?;
        params.insert("b2", Array::zeros(vec![config.hidden2]))?;
        params.insert("w3", xavier_uniform(config.hidden2, 1, rng)?)?;
        params.insert("b3", Array::zeros(vec![1]))?;
        Ok(Mf {
            config,
            num_participants,
            num_items,
            params,
        })
    }

    pub fn forward(&self, participant: usize, item: usize) -> f64 {
        let hs = self.params.get("h_s").expect("latents").row(participant);
        let he = self.params.get("h_e").expect("latents").row(item);
        let input: Vec<f64> = hs.iter().zip(he).map(|(a, b)| a * b).collect();
        mlp_forward(&self.params, &input, Activation::Sigmoid)
    }
}

impl BlockScoringModel for Mf {
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
        let mut participant_rows = Vec::new();
        let mut item_rows = Vec::new();
        for rec in records {
            for &item in &dataset.blocks[rec.block].items {
                participant_rows.push(rec.participant);
                item_rows.push(item);
            }
        }
        let hs = graph.leaf("h_s");
        let he = graph.leaf("h_e");
        let gs = graph.gather_rows(hs, participant_rows);
        let ge = graph.gather_rows(he, item_rows);
        let input = graph.mul(gs, ge);
        Ok(append_mlp(graph, input, Activation::Sigmoid))
    }

    fn score_block(&self, participant: usize, block: &ItemBlock, _q: &QMatrix) -> Result<Vec<f64>> {
        Ok(block
            .items
            .iter()
            .map(|&item| self.forward(participant, item))
            .collect())
    }

    fn ability_profile(&self, _participant: usize) -> Option<Vec<f64>> {
        None
    }
}
