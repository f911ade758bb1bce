// scratch: effect of embedding init scale on the training trajectory
use fcncd_core::sim::{generate, SimConfig};
use fcncd_core::train::{train_with, BlockScoringModel, TrainConfig};
use fcncd_core::{AnyModel, FcncdConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() {
    fcncd_core::numerics::tune_allocator();
    let scale: f64 = std::env::args().nth(1).unwrap().parse().unwrap();
    let lr: f64 = std::env::args().nth(2).unwrap_or("0.0005".into()).parse().unwrap();
    let mut cfg = SimConfig::sim_mole(7);
    cfg.num_participants = 500;
    let (dataset, _) = generate(&cfg).unwrap();

    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let mut model = AnyModel::new_fcncd(FcncdConfig::default(), &dataset, &mut rng).unwrap();
    for name in ["w_s", "w_diff", "w_disc"] {
        let m = match &mut model {
            AnyModel::Fcncd(m) => m,
            _ => unreachable!(),
        };
        let old = m.params.get(name).unwrap();
        let scaled = fcncd_core::numerics::Array::new(
            old.shape().to_vec(),
            old.data().iter().map(|v| v * scale).collect(),
        )
        .unwrap();
        *m.params.get_mut(name).unwrap() = scaled;
    }
    let tc = TrainConfig {
        lambda: 10.0,
        batch_size: 32,
        learning_rate: lr,
        max_epochs: 14,
        patience: 14,
        seed: 1,
        ..Default::default()
    };
    train_with(&mut model, &dataset, &tc, |h| {
        println!("scale {scale} lr {lr} epoch {:>2} loss {:.4} pra {:.4} lra {:.4}", h.epoch, h.train_loss, h.pra, h.lra);
    })
    .unwrap();
    let _ = model.params();
}
