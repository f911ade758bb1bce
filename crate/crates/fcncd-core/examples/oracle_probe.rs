// scratch: ceiling PRA/LRA of true generative scores on sim-mole
use fcncd_core::sim::{block_endorsements, generate, SimConfig};
use fcncd_core::train::{list_rank_accuracy, pair_rank_accuracy};

fn main() {
    let cfg = SimConfig::sim_mole(7);
    let (dataset, truth) = generate(&cfg).unwrap();
    // oracle scores = true endorsement probabilities
    let scored: Vec<Vec<f64>> = dataset
        .records
        .iter()
        .map(|r| {
            block_endorsements(
                truth.theta_row(r.participant),
                &dataset.blocks[r.block],
                &dataset.q,
                &truth.discrimination,
                &truth.difficulty,
            )
        })
        .collect();
    let pra = pair_rank_accuracy(
        scored.iter().zip(&dataset.records).map(|(s, r)| (s.as_slice(), &r.ranks)),
    )
    .unwrap();
    let lra = list_rank_accuracy(
        scored.iter().zip(&dataset.records).map(|(s, r)| (s.as_slice(), &r.ranks)),
    )
    .unwrap();
    println!("oracle endorsement scores: PRA {pra:.4} LRA {lra:.4}");

    // theta-only scores (ignore item params)
    let scored2: Vec<Vec<f64>> = dataset
        .records
        .iter()
        .map(|r| {
            dataset.blocks[r.block]
                .items
                .iter()
                .map(|&i| truth.theta_row(r.participant)[dataset.q.dim_of(i)])
                .collect()
        })
        .collect();
    let pra2 = pair_rank_accuracy(
        scored2.iter().zip(&dataset.records).map(|(s, r)| (s.as_slice(), &r.ranks)),
    )
    .unwrap();
    println!("theta-only scores:        PRA {pra2:.4}");
}
