//! Pairwise dominance model: P(i beats j) = s(a_i th_qi - a_j th_qj
//! + a_i b_i - a_j b_j), fit by gradient maximum likelihood on the pairwise
//! conversion of block responses. Discrimination stays positive through a
//! softplus reparameterization.

use rand_chacha::ChaCha20Rng;

use crate::data::{ItemBlock, QMatrix, RankVector, ResponseDataset, ResponseRecord};
use crate::error::Result;
use crate::loss::{append_logistic_pair_loss, PairLossSpec};
use crate::numerics::{sigmoid, softplus, xavier_uniform, DiffGraph, NodeId, ParamSet};
use crate::train::BlockScoringModel;

#[derive(Debug, Clone)]
pub struct Mupp2pl {
    pub num_participants: usize,
    pub num_items: usize,
    pub num_dimensions: usize,
    pub params: ParamSet,
}

impl Mupp2pl {
    /// Trait table is (participants * dimensions) rows, participant major,
    /// like the neural proficiency tables.
    pub fn new(
        num_participants: usize,
        num_items: usize,
        num_dimensions: usize,
        rng: &mut ChaCha20Rng,
    ) -> Result<Self> {
        let mut params = ParamSet::new();
        params.insert("theta", xavier_uniform(num_participants * num_dimensions, 1, rng)?)?;
        params.insert("a_raw", xavier_uniform(num_items, 1, rng)?)?;
        params.insert("b", xavier_uniform(num_items, 1, rng)?)?;
        Ok(Mupp2pl {
            num_participants,
            num_items,
            num_dimensions,
            params,
        })
    }

    fn trait_row(&self, participant: usize, dim: usize) -> usize {
        participant * self.num_dimensions + dim
    }

    pub fn discrimination(&self, item: usize) -> f64 {
        softplus(self.params.get("a_raw").expect("a_raw").row(item)[0])
    }

    pub fn difficulty(&self, item: usize) -> f64 {
        self.params.get("b").expect("b").row(item)[0]
    }

    pub fn theta(&self, participant: usize, dim: usize) -> f64 {
        self.params.get("theta").expect("theta").row(self.trait_row(participant, dim))[0]
    }

    /// Item utility a_i (th_qi + b_i); pair probabilities are sigmoids of
    /// utility differences.
    pub fn utility(&self, participant: usize, item: usize, q: &QMatrix) -> f64 {
        let theta = self.theta(participant, q.dim_of(item));
        self.discrimination(item) * (theta + self.difficulty(item))
    }

    /// Closed-form P(i beats j) for one participant.
    pub fn pair_probability(&self, participant: usize, i: usize, j: usize, q: &QMatrix) -> f64 {
        sigmoid(self.utility(participant, i, q) - self.utility(participant, j, q))
    }
}

impl BlockScoringModel for Mupp2pl {
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
        let mut trait_rows = Vec::new();
        let mut item_rows = Vec::new();
        for rec in records {
            for &item in &dataset.blocks[rec.block].items {
                trait_rows.push(self.trait_row(rec.participant, dataset.q.dim_of(item)));
                item_rows.push(item);
            }
        }
        let theta = graph.leaf("theta");
        let a_raw = graph.leaf("a_raw");
        let b = graph.leaf("b");
        let g_theta = graph.gather_rows(theta, trait_rows);
        let g_a = graph.gather_rows(a_raw, item_rows.clone());
        let g_b = graph.gather_rows(b, item_rows);
        let a = graph.softplus(g_a);
        let shifted = graph.add(g_theta, g_b);
        Ok(graph.mul(a, shifted))
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

    /// Utilities squashed into (0,1); the squash is monotone so rankings and
    /// pair orders are unchanged.
    fn score_block(&self, participant: usize, block: &ItemBlock, q: &QMatrix) -> Result<Vec<f64>> {
        Ok(block
            .items
            .iter()
            .map(|&item| sigmoid(self.utility(participant, item, q)))
            .collect())
    }

    fn ability_profile(&self, participant: usize) -> Option<Vec<f64>> {
        if participant >= self.num_participants {
            return None;
        }
        Some(
            (0..self.num_dimensions)
                .map(|k| self.theta(participant, k))
                .collect(),
        )
    }
}
