//! RankNet-style scorer: the matrix-factorization structure with ReLU hidden
//! layers, trained on pair order probabilities P(i beats j) = s(y_i - y_j).

use rand_chacha::ChaCha20Rng;

use crate::data::{ItemBlock, QMatrix, RankVector, ResponseDataset, ResponseRecord};
use crate::error::Result;
use crate::loss::{append_logistic_pair_loss, PairLossSpec};
use crate::numerics::{sigmoid, softplus, xavier_uniform, Array, DiffGraph, NodeId, ParamSet};
use crate::train::BlockScoringModel;

use super::{append_mlp, mlp_forward, Activation, MfConfig};

#[derive(Debug, Clone)]
pub struct RankNet {
    pub config: MfConfig,
    pub num_participants: usize,
    pub num_items: usize,
    pub params: ParamSet,
}

impl RankNet {
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
        Ok(RankNet {
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
        mlp_forward(&self.params, &input, Activation::Relu)
    }
}

/// Probability that item i outranks item j given their scores.
pub fn pair_probability(y_i: f64, y_j: f64) -> f64 {
    sigmoid(y_i - y_j)
}

/// Cross-entropy of the observed order: -ln s(y_winner - y_loser).
pub fn pair_loss(y_winner: f64, y_loser: f64) -> f64 {
    softplus(-(y_winner - y_loser))
}

impl BlockScoringModel for RankNet {
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
        Ok(append_mlp(graph, input, Activation::Relu))
    }

    fn append_batch_loss(
        &self,
        graph: &mut DiffGraph,
        records: &[&ResponseRecord],
        dataset: &ResponseDataset,
        _spec: PairLossSpec,
    ) -> Result<NodeId> {
        let scores = self.append_batch_scores(graph, records, dataset)?;
        let ranks: Vec<&RankVector> = records.iter().map(|r| &r.ranks).collect();
        append_logistic_pair_loss(graph, scores, &ranks)
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
