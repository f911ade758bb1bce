use std::path::PathBuf;

use anyhow::Result;
use clap::Args as ClapArgs;
use serde::Serialize;

use fcncd_core::checkpoint::load_model;
use fcncd_core::data::load_dataset;
use fcncd_core::model::rank_scores;
use fcncd_core::train::BlockScoringModel;

#[derive(ClapArgs)]
pub struct Args {
    /// Model checkpoint produced by `train`.
    #[arg(long)]
    checkpoint: PathBuf,

    /// Dataset manifest with the responses to compare against.
    #[arg(long)]
    dataset: PathBuf,

    /// Comma-separated participant ids.
    #[arg(long, value_delimiter = ',')]
    participants: Vec<usize>,

    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Radar-chart-ready abilities plus block-by-block predicted and observed
/// rankings for one participant.
#[derive(Serialize)]
struct ParticipantReport {
    participant: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    abilities: Option<Vec<f64>>,
    blocks: Vec<BlockReport>,
}

#[derive(Serialize)]
struct BlockReport {
    block: usize,
    items: Vec<usize>,
    dimensions: Vec<usize>,
    predicted_scores: Vec<f64>,
    predicted_ranks: Vec<u32>,
    actual_ranks: Vec<u32>,
}

#[derive(Serialize)]
struct Report {
    participants: Vec<ParticipantReport>,
}

pub fn run(args: &Args) -> Result<()> {
    let dataset = load_dataset(&args.dataset)?;
    let model = load_model(&args.checkpoint)?;

    let mut participants = Vec::new();
    for &participant in &args.participants {
        if participant >= dataset.num_participants {
            anyhow::bail!(fcncd_core::Error::Data(format!(
                "participant {participant} out of range {}",
                dataset.num_participants
            )));
        }
        let mut blocks = Vec::new();
        for rec in dataset
            .records
            .iter()
            .filter(|r| r.participant == participant)
        {
            let block = &dataset.blocks[rec.block];
            let scores = model.score_block(participant, block, &dataset.q)?;
            let predicted = rank_scores(&scores, dataset.block_type)?;
            blocks.push(BlockReport {
                block: rec.block,
                items: block.items.clone(),
                dimensions: block.items.iter().map(|&i| dataset.q.dim_of(i)).collect(),
                predicted_scores: scores,
                predicted_ranks: predicted.values,
                actual_ranks: rec.ranks.values.clone(),
            });
        }
        participants.push(ParticipantReport {
            participant,
            abilities: model.ability_profile(participant),
            blocks,
        });
    }

    let report = Report { participants };
    match &args.out {
        Some(path) => super::write_json(path, &report)?,
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(())
}
