//! Cognitive diagnosis for forced-choice questionnaires.
//!
//! The crate covers the full pipeline: encoding PICK/RANK/MOLE block
//! responses, a ground-truth response simulator, the FCNCD scoring network
//! with monotone output head, rank-weighted pairwise losses, gradient-fit
//! baseline models, and ranking/interpretability metrics (PRA, LRA, DOA).

pub mod baselines;
pub mod checkpoint;
pub mod data;
pub mod error;
pub mod loss;
pub mod model;
pub mod numerics;
pub mod registry;
pub mod sim;
pub mod train;

pub use error::{Error, Result};

pub use data::{BlockType, ItemBlock, QMatrix, RankVector, ResponseDataset, ResponseRecord};
pub use model::{rank_scores, Fcncd, FcncdConfig, FcncdVariant};
pub use registry::{AnyModel, ModelKind};
pub use sim::{SimConfig, SimTruth};
pub use train::{BlockScoringModel, EvalReport, TrainConfig, TrainReport};
