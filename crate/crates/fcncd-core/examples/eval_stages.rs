// scratch: per-stage cost of one eval chunk
use fcncd_core::numerics::{xavier_uniform, Array, DiffGraph, ParamSet};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use std::time::Instant;

fn time_graph(name: &str, params: &ParamSet, build: impl Fn(&mut DiffGraph) -> usize) {
    let mut g = DiffGraph::new();
    let out = build(&mut g);
    g.set_output(out);
    // warm
    let _ = g.forward(params).unwrap();
    let t = Instant::now();
    let reps = 20;
    for _ in 0..reps {
        std::hint::black_box(g.forward(params).unwrap());
    }
    println!("{name}: {:.2} ms", t.elapsed().as_secs_f64() / reps as f64 * 1e3);
}

fn main() {
    fcncd_core::numerics::tune_allocator();
    let rows = 2048usize;
    let mut rng = ChaCha20Rng::seed_from_u64(0);
    let mut params = ParamSet::new();
    params.insert("w_s", xavier_uniform(24000, 64, &mut rng).unwrap()).unwrap();
    params.insert("w1", xavier_uniform(64, 256, &mut rng).unwrap()).unwrap();
    params.insert("b1", Array::zeros(vec![256])).unwrap();
    params.insert("w4", xavier_uniform(256, 128, &mut rng).unwrap()).unwrap();
    params.insert("b4", Array::zeros(vec![128])).unwrap();
    let rows_idx: Vec<usize> = (0..rows).map(|i| (i * 37) % 24000).collect();

    time_graph("gather 2048x64", &params, |g| {
        let ws = g.leaf("w_s");
        g.gather_rows(ws, rows_idx.clone())
    });
    time_graph("gather+matmul 2048x64x256", &params, |g| {
        let ws = g.leaf("w_s");
        let gr = g.gather_rows(ws, rows_idx.clone());
        let w1 = g.leaf("w1");
        g.matmul(gr, w1)
    });
    time_graph("gather+matmul+bias", &params, |g| {
        let ws = g.leaf("w_s");
        let gr = g.gather_rows(ws, rows_idx.clone());
        let w1 = g.leaf("w1");
        let mm = g.matmul(gr, w1);
        let b1 = g.leaf("b1");
        g.add_row_bias(mm, b1)
    });
    time_graph("gather+matmul+bias+sigmoid", &params, |g| {
        let ws = g.leaf("w_s");
        let gr = g.gather_rows(ws, rows_idx.clone());
        let w1 = g.leaf("w1");
        let mm = g.matmul(gr, w1);
        let b1 = g.leaf("b1");
        let ab = g.add_row_bias(mm, b1);
        g.sigmoid(ab)
    });
    time_graph("...+head matmul 2048x256x128", &params, |g| {
        let ws = g.leaf("w_s");
        let gr = g.gather_rows(ws, rows_idx.clone());
        let w1 = g.leaf("w1");
        let mm = g.matmul(gr, w1);
        let b1 = g.leaf("b1");
        let ab = g.add_row_bias(mm, b1);
        let s = g.sigmoid(ab);
        let w4 = g.leaf("w4");
        g.matmul(s, w4)
    });
}
