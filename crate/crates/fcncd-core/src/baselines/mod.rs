//! Comparison models sharing the numerics substrate and training loop.

pub mod mf;
pub mod mupp;
pub mod ncdm;
pub mod ranknet;

pub use mf::{Mf, MfConfig};
pub use mupp::Mupp2pl;
pub use ncdm::{NcdmR, NcdmConfig};
pub use ranknet::RankNet;

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::data::ResponseDataset;
use crate::error::{Error, Result};
use crate::numerics::{sigmoid, DiffGraph, NodeId, ParamSet};
use crate::train::{
    degree_of_agreement, list_rank_accuracy, pair_rank_accuracy, EvalReport,
};

/// The comparison models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineKind {
    Random,
    Mf,
    RankNet,
    NcdmR,
    Mupp2pl,
}

impl std::str::FromStr for BaselineKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(BaselineKind::Random),
            "mf" => Ok(BaselineKind::Mf),
            "ranknet" => Ok(BaselineKind::RankNet),
            "ncdm-r" | "ncdm_r" | "ncdm" => Ok(BaselineKind::NcdmR),
            "mupp-2pl" | "mupp_2pl" | "mupp" => Ok(BaselineKind::Mupp2pl),
            other => Err(Error::Config(format!("unknown baseline {other:?}"))),
        }
    }
}

impl std::fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            BaselineKind::Random => "random",
            BaselineKind::Mf => "mf",
            BaselineKind::RankNet => "ranknet",
            BaselineKind::NcdmR => "ncdm-r",
            BaselineKind::Mupp2pl => "mupp-2pl",
        };
        write!(f, "{s}")
    }
}

/// Uniform(0,1) scores for one block.
pub fn random_scores(t: usize, rng: &mut ChaCha20Rng) -> Vec<f64> {
    (0..t).map(|_| rng.gen::<f64>()).collect()
}

/// Uniform(0,1) per-dimension abilities for one participant.
pub fn random_abilities(k: usize, rng: &mut ChaCha20Rng) -> Vec<f64> {
    (0..k).map(|_| rng.gen::<f64>()).collect()
}

/// Evaluates the random baseline: uniform scores per record and uniform
/// abilities per participant, both drawn from the seeded generator.
pub fn evaluate_random(dataset: &ResponseDataset, seed: u64) -> Result<EvalReport> {
    use rand::SeedableRng;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let scored: Vec<Vec<f64>> = dataset
        .records
        .iter()
        .map(|r| random_scores(dataset.blocks[r.block].size(), &mut rng))
        .collect();
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
    let abilities: Vec<Vec<f64>> = (0..dataset.num_participants)
        .map(|_| random_abilities(dataset.num_dimensions, &mut rng))
        .collect();
    let doa = degree_of_agreement(&abilities, dataset)?;
    Ok(EvalReport {
        pra,
        lra,
        doa: Some(doa),
        per_block: Vec::new(),
    })
}

/// Hidden-layer activation of the baseline score heads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Activation {
    Sigmoid,
    Relu,
}

impl Activation {
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Sigmoid => sigmoid(x),
            Activation::Relu => x.max(0.0),
        }
    }

    fn append(self, graph: &mut DiffGraph, node: NodeId) -> NodeId {
        match self {
            Activation::Sigmoid => graph.sigmoid(node),
            Activation::Relu => graph.relu(node),
        }
    }
}

/// y = s(w3 . act(w2 . act(w1 . x + b1) + b2) + b3), graph route.
pub(crate) fn append_mlp(
    graph: &mut DiffGraph,
    input: NodeId,
    act: Activation,
) -> NodeId {
    let mut h = input;
    for (w, b) in [("w1", "b1"), ("w2", "b2")] {
        let w = graph.leaf(w);
        let b = graph.leaf(b);
        let lin = graph.matmul(h, w);
        let lin = graph.add_row_bias(lin, b);
        h = act.append(graph, lin);
    }
    let w3 = graph.leaf("w3");
    let b3 = graph.leaf("b3");
    let lin = graph.matmul(h, w3);
    let lin = graph.add_row_bias(lin, b3);
    graph.sigmoid(lin)
}

/// Same head, direct route.
pub(crate) fn mlp_forward(params: &ParamSet, input: &[f64], act: Activation) -> f64 {
    let mut h = input.to_vec();
    for (w, b) in [("w1", "b1"), ("w2", "b2")] {
        h = affine(params, &h, w, b)
            .into_iter()
            .map(|v| act.apply(v))
            .collect();
    }
    sigmoid(affine(params, &h, "w3", "b3")[0])
}

pub(crate) fn affine(params: &ParamSet, input: &[f64], w: &str, b: &str) -> Vec<f64> {
    let w = params.get(w).expect("weights present");
    let b = params.get(b).expect("bias present");
    let mut out = b.data().to_vec();
    for (i, &x) in input.iter().enumerate() {
        for (o, &wv) in out.iter_mut().zip(w.row(i)) {
            *o += x * wv;
        }
    }
    out
}
