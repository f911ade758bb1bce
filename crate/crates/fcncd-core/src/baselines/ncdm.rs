//! NCDM-style scorer adapted to ranking: K-wide proficiency and difficulty,
//! scalar discrimination, a monotone MLP (nonnegative weights), and pair
//! order probabilities for training.

use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::data::{ItemBlock, QMatrix, RankVector, ResponseDataset, ResponseRecord};
use crate::error::Result;
use crate::loss::{append_logistic_pair_loss, PairLossSpec};
use crate::numerics::{sigmoid, xavier_uniform, Array, DiffGraph, NodeId, ParamSet};
use crate::train::BlockScoringModel;

use super::{mlp_forward, Activation};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NcdmConfig {
    pub hidden1: usize,
    pub hidden2: usize,
}

impl Default for NcdmConfig {
    fn default() -> Self {
        NcdmConfig {
            hidden1: 256,
            hidden2: 128,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NcdmR {
    pub config: NcdmConfig,
    pub num_participants: usize,
    pub num_items: usize,
    pub num_dimensions: usize,
    pub params: ParamSet,
}

impl NcdmR {
    pub fn new(
        config: NcdmConfig,
        num_participants: usize,
        num_items: usize,
        num_dimensions: usize,
        rng: &mut ChaCha20Rng,
    ) -> Result<Self> {
        let mut params = ParamSet::new();
        params.insert("h_s", xavier_uniform(num_participants, num_dimensions, rng)?)?;
        params.insert("h_diff", xavier_uniform(num_items, num_dimensions, rng)?)?;
        params.insert("h_disc", xavier_uniform(num_items, 1, rng)?)?;
        params.insert("w1", xavier_uniform(num_dimensions, config.hidden1, rng)?)?;
        params.insert("b1", Array::zeros(vec![config.hidden1]))?;
        params.insert("w2", xavier_uniform(config.hidden1, config.hidden2, rng)?)?;
        params.insert("b2", Array::zeros(vec![config.hidden2]))?;
        params.insert("w3", xavier_uniform(config.hidden2, 1, rng)?)?;
        params.insert("b3", Array::zeros(vec![1]))?;
        Ok(NcdmR {
            config,
            num_participants,
            num_items,
            num_dimensions,
            params,
        })
    }

    /// q-masked interaction: e_k * disc * (s(h_s[k]) - s(h_diff[k])) on the
    /// item's dimension k, zero elsewhere.
    fn input_vector(&self, participant: usize, item: usize, q: &QMatrix) -> Vec<f64> {
        let k = q.dim_of(item);
        let hs = self.params.get("h_s").expect("proficiency").row(participant);
        let hdiff = self.params.get("h_diff").expect("difficulty").row(item);
        let disc = sigmoid(self.params.get("h_disc").expect("discrimination").row(item)[0]);
        let mut input = vec![0.0; self.num_dimensions];
        input[k] = disc * (sigmoid(hs[k]) - sigmoid(hdiff[k]));
        input
    }

    pub fn forward(&self, participant: usize, item: usize, q: &QMatrix) -> f64 {
        mlp_forward(
            &self.params,
            &self.input_vector(participant, item, q),
            Activation::Sigmoid,
        )
    }
}

impl BlockScoringModel for NcdmR {
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
        let mut mask = Vec::new();
        for rec in records {
            for &item in &dataset.blocks[rec.block].items {
                participant_rows.push(rec.participant);
                item_rows.push(item);
                mask.extend(dataset.q.row(item));
            }
        }
        let rows = item_rows.len();

        let hs = graph.leaf("h_s");
        let hdiff = graph.leaf("h_diff");
        let hdisc = graph.leaf("h_disc");
        let gs = graph.gather_rows(hs, participant_rows);
        let gdiff = graph.gather_rows(hdiff, item_rows.clone());
        let gdisc = graph.gather_rows(hdisc, item_rows);
        let s_prof = graph.sigmoid(gs);
        let s_diff = graph.sigmoid(gdiff);
        let s_disc = graph.sigmoid(gdisc);
        let gap = graph.sub(s_prof, s_diff);
        let mask_node = graph.constant(Array::new(vec![rows, self.num_dimensions], mask)?);
        let masked = graph.mul(gap, mask_node);
        let scaled = graph.scale_rows(masked, s_disc);
        Ok(super::append_mlp(graph, scaled, Activation::Sigmoid))
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

    fn score_block(&self, participant: usize, block: &ItemBlock, q: &QMatrix) -> Result<Vec<f64>> {
        Ok(block
            .items
            .iter()
            .map(|&item| self.forward(participant, item, q))
            .collect())
    }

    fn constrained_param_names(&self) -> &'static [&'static str] {
        &["w1", "w2", "w3"]
    }

    fn ability_profile(&self, participant: usize) -> Option<Vec<f64>> {
        if participant >= self.num_participants {
            return None;
        }
        Some(
            self.params
                .get("h_s")
                .expect("proficiency")
                .row(participant)
                .iter()
                .map(|&v| sigmoid(v))
                .collect(),
        )
    }
}
