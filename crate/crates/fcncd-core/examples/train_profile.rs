// scratch: where does a training step spend time
use std::time::Instant;
use fcncd_core::loss::{append_pair_loss, LossKind, PairLossSpec};
use fcncd_core::numerics::{adamw_step, AdamwConfig, AdamwState, DiffGraph};
use fcncd_core::sim::{generate, SimConfig};
use fcncd_core::train::BlockScoringModel;
use fcncd_core::{AnyModel, FcncdConfig, RankVector, ResponseRecord};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() {
    fcncd_core::numerics::tune_allocator();
    let cfg = SimConfig::sim_mole(7);
    let (dataset, _) = generate(&cfg).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let mut model = AnyModel::new_fcncd(FcncdConfig::default(), &dataset, &mut rng).unwrap();
    let spec = PairLossSpec::new(LossKind::WeightedBpr, 10.0).unwrap();
    let mut state = AdamwState::new(model.params(), AdamwConfig::with_learning_rate(5e-4));

    let steps = 100;
    let (mut t_build, mut t_fb, mut t_adam) = (0.0, 0.0, 0.0);
    for s in 0..steps {
        let lo = (s * 32) % (dataset.records.len() - 32);
        let records: Vec<&ResponseRecord> = dataset.records[lo..lo + 32].iter().collect();
        let ranks: Vec<&RankVector> = records.iter().map(|r| &r.ranks).collect();

        let t = Instant::now();
        let mut graph = DiffGraph::new();
        let scores = model.append_batch_scores(&mut graph, &records, &dataset).unwrap();
        let loss = append_pair_loss(&mut graph, scores, &ranks, spec).unwrap();
        graph.set_output(loss);
        t_build += t.elapsed().as_secs_f64();

        let t = Instant::now();
        let (_, grads) = graph.forward_backward(model.params()).unwrap();
        t_fb += t.elapsed().as_secs_f64();

        let t = Instant::now();
        adamw_step(model.params_mut(), &grads, &mut state).unwrap();
        t_adam += t.elapsed().as_secs_f64();
    }
    println!(
        "per step: build {:.2}ms  forward+backward {:.2}ms  adamw {:.2}ms  total {:.2}ms",
        t_build / steps as f64 * 1e3,
        t_fb / steps as f64 * 1e3,
        t_adam / steps as f64 * 1e3,
        (t_build + t_fb + t_adam) / steps as f64 * 1e3
    );

    // eval pass timing
    let t = Instant::now();
    let scored = fcncd_core::train::batch_scores(&model, &dataset).unwrap();
    println!(
        "eval forward: {:.2}ms per 1000 records ({} records total {:.2}s)",
        t.elapsed().as_secs_f64() / dataset.records.len() as f64 * 1e6,
        scored.len(),
        t.elapsed().as_secs_f64()
    );
}
