//! The FCNCD scoring network.
//!
//! Each participant carries one embedding row per dimension; items carry
//! difficulty and discrimination embeddings. A sigmoid mapping layer lifts
//! the embeddings, an interaction combines them as disc * (prof - diff),
//! and a two-layer head with nonnegative weights produces a score in (0,1).
//! Keeping the head weights nonnegative makes the score monotone in the
//! mapped proficiency, which is what ties scores back to ability.

use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::data::{BlockType, ItemBlock, QMatrix, RankVector, ResponseDataset, ResponseRecord};
use crate::error::{Error, Result};
use crate::numerics::{sigmoid, xavier_uniform, Array, DiffGraph, NodeId, ParamSet};

/// Layer widths and ablation switches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FcncdConfig {
    /// Embedding width d.
    pub embed_dim: usize,
    /// Output width of the sigmoid mapping layer.
    pub mapping_width: usize,
    /// Hidden width of the scoring head.
    pub head_width: usize,
    /// Feed raw embeddings straight into the interaction (no mapping layer).
    pub skip_mapping: bool,
    /// Drop the nonnegative constraint on the head weights.
    pub no_monotone: bool,
}

impl Default for FcncdConfig {
    fn default() -> Self {
        FcncdConfig {
            embed_dim: 64,
            mapping_width: 256,
            head_width: 128,
            skip_mapping: false,
            no_monotone: false,
        }
    }
}

impl FcncdConfig {
    pub fn validate(&self) -> Result<()> {
        if self.embed_dim == 0 || self.mapping_width == 0 || self.head_width == 0 {
            return Err(Error::Config("layer widths must be positive".into()));
        }
        Ok(())
    }

    /// Width of the interaction vector entering the head.
    pub fn interaction_width(&self) -> usize {
        if self.skip_mapping {
            self.embed_dim
        } else {
            self.mapping_width
        }
    }
}

/// Named ablation variants of the full model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FcncdVariant {
    /// Full model.
    Full,
    /// Embeddings feed the interaction directly (no mapping layer).
    Eb,
    /// Trained with the unweighted pair loss.
    Bpr,
    /// Trained with the listwise loss.
    List,
    /// Head weights left unconstrained.
    Mo,
}

impl FcncdVariant {
    pub fn apply(self, config: &mut FcncdConfig) {
        match self {
            FcncdVariant::Eb => config.skip_mapping = true,
            FcncdVariant::Mo => config.no_monotone = true,
            _ => {}
        }
    }
}

impl std::str::FromStr for FcncdVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(FcncdVariant::Full),
            "eb" => Ok(FcncdVariant::Eb),
            "bpr" => Ok(FcncdVariant::Bpr),
            "list" => Ok(FcncdVariant::List),
            "mo" => Ok(FcncdVariant::Mo),
            other => Err(Error::Config(format!("unknown variant {other:?}"))),
        }
    }
}

/// FCNCD parameters plus the counts they were built for.
#[derive(Debug, Clone)]
pub struct Fcncd {
    pub config: FcncdConfig,
    pub num_participants: usize,
    pub num_items: usize,
    pub num_dimensions: usize,
    pub params: ParamSet,
}

impl Fcncd {
    /// Xavier-initialized weights, zero biases. The proficiency table stores
    /// one `embed_dim` row per (participant, dimension) pair, participant
    /// major.
    pub fn new(
        config: FcncdConfig,
        num_participants: usize,
        num_items: usize,
        num_dimensions: usize,
        rng: &mut ChaCha20Rng,
    ) -> Result<Self> {
        config.validate()?;
        let d = config.embed_dim;
        let mut params = ParamSet::new();
        params.insert("w_s", xavier_uniform(num_participants * num_dimensions, d, rng)?)?;
        params.insert("w_diff", xavier_uniform(num_items, d, rng)?)?;
        params.insert("w_disc", xavier_uniform(num_items, d, rng)?)?;
        if !config.skip_mapping {
            for name in ["w1", "w2", "w3"] {
                params.insert(name, xavier_uniform(d, config.mapping_width, rng)?)?;
                params.insert(
                    format!("b{}", &name[1..]),
                    Array::zeros(vec![config.mapping_width]),
                )?;
            }
        }
        params.insert(
            "w4",
            xavier_uniform(config.interaction_width(), config.head_width, rng)?,
        )?;
        params.insert("b4", Array::zeros(vec![config.head_width]))?;
        params.insert("w5", xavier_uniform(config.head_width, 1, rng)?)?;
        params.insert("b5", Array::zeros(vec![1]))?;
        Ok(Fcncd {
            config,
            num_participants,
            num_items,
            num_dimensions,
            params,
        })
    }

    fn prof_row(&self, participant: usize, dim: usize) -> usize {
        participant * self.num_dimensions + dim
    }

    fn check_ids(&self, participant: usize, item: usize) -> Result<()> {
        if participant >= self.num_participants {
            return Err(Error::Data(format!(
                "participant {participant} out of range {}",
                self.num_participants
            )));
        }
        if item >= self.num_items {
            return Err(Error::Data(format!(
                "item {item} out of range {}",
                self.num_items
            )));
        }
        Ok(())
    }

    fn affine(&self, input: &[f64], w: &str, b: &str) -> Vec<f64> {
        let w = self.params.get(w).expect("layer weights present");
        let b = self.params.get(b).expect("layer bias present");
        let (rows, cols) = (w.rows(), w.cols());
        debug_assert_eq!(rows, input.len());
        let mut out = b.data().to_vec();
        for (i, &x) in input.iter().enumerate() {
            let wrow = w.row(i);
            for (o, &wv) in out.iter_mut().zip(wrow) {
                *o += x * wv;
            }
        }
        debug_assert_eq!(out.len(), cols);
        out
    }

    /// Mapped proficiency vector for a (participant, dimension) pair: the
    /// interaction-input view of ability.
    pub fn map_participant(&self, participant: usize, dim: usize) -> Vec<f64> {
        let row = self
            .params
            .get("w_s")
            .expect("proficiency table")
            .row(self.prof_row(participant, dim))
            .to_vec();
        if self.config.skip_mapping {
            row
        } else {
            self.affine(&row, "w1", "b1").iter().map(|&v| sigmoid(v)).collect()
        }
    }

    /// Mapped difficulty and discrimination vectors for an item.
    pub fn map_item(&self, item: usize) -> (Vec<f64>, Vec<f64>) {
        let diff = self.params.get("w_diff").expect("difficulty table").row(item).to_vec();
        let disc = self.params.get("w_disc").expect("discrimination table").row(item).to_vec();
        if self.config.skip_mapping {
            (diff, disc)
        } else {
            (
                self.affine(&diff, "w2", "b2").iter().map(|&v| sigmoid(v)).collect(),
                self.affine(&disc, "w3", "b3").iter().map(|&v| sigmoid(v)).collect(),
            )
        }
    }

    /// Scores a mapped triple through the interaction and head. Exposed so
    /// monotonicity can be probed by perturbing the proficiency input.
    pub fn score_mapped(&self, prof: &[f64], diff: &[f64], disc: &[f64]) -> f64 {
        let x: Vec<f64> = disc
            .iter()
            .zip(prof.iter().zip(diff))
            .map(|(&c, (&p, &d))| c * (p - d))
            .collect();
        let f1: Vec<f64> = self.affine(&x, "w4", "b4").iter().map(|&v| sigmoid(v)).collect();
        let out = self.affine(&f1, "w5", "b5");
        sigmoid(out[0])
    }

    /// Predicted endorsement score in (0,1) for one participant and item.
    pub fn forward(&self, participant: usize, item: usize, q: &QMatrix) -> Result<f64> {
        self.check_ids(participant, item)?;
        let prof = self.map_participant(participant, q.dim_of(item));
        let (diff, disc) = self.map_item(item);
        Ok(self.score_mapped(&prof, &diff, &disc))
    }

    /// Scores every item of a block, preserving block order.
    pub fn predict_block(
        &self,
        participant: usize,
        block: &ItemBlock,
        q: &QMatrix,
    ) -> Result<Vec<f64>> {
        block
            .items
            .iter()
            .map(|&item| self.forward(participant, item, q))
            .collect()
    }

    /// Per-dimension ability summary in (0,1): the mean of the sigmoid over
    /// the raw proficiency row. Monotone in every embedding entry.
    pub fn ability_profile(&self, participant: usize) -> Result<Vec<f64>> {
        if participant >= self.num_participants {
            return Err(Error::Data(format!(
                "participant {participant} out of range {}",
                self.num_participants
            )));
        }
        let w_s = self.params.get("w_s").expect("proficiency table");
        let d = self.config.embed_dim as f64;
        Ok((0..self.num_dimensions)
            .map(|k| {
                w_s.row(self.prof_row(participant, k))
                    .iter()
                    .map(|&v| sigmoid(v))
                    .sum::<f64>()
                    / d
            })
            .collect())
    }

    /// Names of parameters held nonnegative after every optimizer step.
    pub fn constrained_params(&self) -> &'static [&'static str] {
        if self.config.no_monotone {
            &[]
        } else {
            &["w4", "w5"]
        }
    }

    /// Projects the constrained weights onto the nonnegative orthant.
    pub fn clip_constrained(&mut self) {
        for name in self.constrained_params() {
            let clipped = self.params.get(name).expect("constrained param").clip_nonnegative();
            *self.params.get_mut(name).expect("constrained param") = clipped;
        }
    }

    /// Appends score computation for a batch of records; returns a
    /// (total_items x 1) node of scores laid out record-major in block item
    /// order.
    pub fn append_batch_scores(
        &self,
        graph: &mut DiffGraph,
        records: &[&ResponseRecord],
        dataset: &ResponseDataset,
    ) -> Result<NodeId> {
        let mut prof_rows = Vec::new();
        let mut item_rows = Vec::new();
        for rec in records {
            let block = &dataset.blocks[rec.block];
            for &item in &block.items {
                prof_rows.push(self.prof_row(rec.participant, dataset.q.dim_of(item)));
                item_rows.push(item);
            }
        }

        let w_s = graph.leaf("w_s");
        let w_diff = graph.leaf("w_diff");
        let w_disc = graph.leaf("w_disc");
        let g_prof = graph.gather_rows(w_s, prof_rows);
        let g_diff = graph.gather_rows(w_diff, item_rows.clone());
        let g_disc = graph.gather_rows(w_disc, item_rows);

        let (h_prof, h_diff, h_disc) = if self.config.skip_mapping {
            (g_prof, g_diff, g_disc)
        } else {
            let mapped = |input: NodeId, w: &str, b: &str, graph: &mut DiffGraph| {
                let w = graph.leaf(w);
                let b = graph.leaf(b);
                let lin = graph.matmul(input, w);
                let lin = graph.add_row_bias(lin, b);
                graph.sigmoid(lin)
            };
            (
                mapped(g_prof, "w1", "b1", graph),
                mapped(g_diff, "w2", "b2", graph),
                mapped(g_disc, "w3", "b3", graph),
            )
        };

        let gap = graph.sub(h_prof, h_diff);
        let interaction = graph.mul(h_disc, gap);
        let w4 = graph.leaf("w4");
        let b4 = graph.leaf("b4");
        let hidden = graph.matmul(interaction, w4);
        let hidden = graph.add_row_bias(hidden, b4);
        let hidden = graph.sigmoid(hidden);
        let w5 = graph.leaf("w5");
        let b5 = graph.leaf("b5");
        let out = graph.matmul(hidden, w5);
        let out = graph.add_row_bias(out, b5);
        Ok(graph.sigmoid(out))
    }
}

/// Converts scores into the block's rank convention. Ties order by item
/// index, lower index ranked lower.
pub fn rank_scores(scores: &[f64], block_type: BlockType) -> Result<RankVector> {
    let t = scores.len();
    let min_t = if block_type == BlockType::Mole { 3 } else { 2 };
    if t < min_t {
        return Err(Error::Data(format!(
            "{block_type} ranking needs at least {min_t} scores, got {t}"
        )));
    }
    let mut order: Vec<usize> = (0..t).collect();
    order.sort_by(|&a, &b| {
        scores[a]
            .partial_cmp(&scores[b])
            .expect("scores are finite")
            .then(a.cmp(&b))
    });
    let mut values = vec![0u32; t];
    match block_type {
        BlockType::Rank => {
            for (pos, &idx) in order.iter().enumerate() {
                values[idx] = pos as u32 + 1;
            }
        }
        BlockType::Mole => {
            values.iter_mut().for_each(|v| *v = 2);
            values[order[0]] = 1;
            values[order[t - 1]] = 3;
        }
        BlockType::Pick => {
            values.iter_mut().for_each(|v| *v = 1);
            values[order[t - 1]] = t as u32;
        }
    }
    RankVector::new(block_type, values)
}
