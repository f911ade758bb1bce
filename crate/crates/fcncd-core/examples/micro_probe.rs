// scratch: primitive throughput checks
use fcncd_core::numerics::{fast_exp, sigmoid};
use std::time::Instant;

fn main() {
    let n = 524_288usize;
    let xs: Vec<f64> = (0..n).map(|i| (i as f64 / n as f64) * 8.0 - 4.0).collect();

    let t = Instant::now();
    let mut acc = 0.0;
    for _ in 0..50 {
        for &x in &xs {
            acc += sigmoid(x);
        }
    }
    println!("sigmoid map: {:.2} ns/elem (acc {acc:.1})", t.elapsed().as_secs_f64() / (50.0 * n as f64) * 1e9);

    let t = Instant::now();
    let mut acc = 0.0;
    for _ in 0..50 {
        for &x in &xs {
            acc += fast_exp(-x.abs());
        }
    }
    println!("fast_exp map: {:.2} ns/elem (acc {acc:.1})", t.elapsed().as_secs_f64() / (50.0 * n as f64) * 1e9);

    let t = Instant::now();
    let mut acc = 0.0;
    for _ in 0..50 {
        for &x in &xs {
            acc += (-x.abs()).exp();
        }
    }
    println!("libm exp map: {:.2} ns/elem (acc {acc:.1})", t.elapsed().as_secs_f64() / (50.0 * n as f64) * 1e9);

    // collect into a fresh Vec like map_unary does
    let t = Instant::now();
    let mut total = 0.0;
    for _ in 0..50 {
        let out: Vec<f64> = xs.iter().map(|&x| sigmoid(x)).collect();
        total += out[7];
    }
    println!("sigmoid collect: {:.2} ns/elem ({total:.1})", t.elapsed().as_secs_f64() / (50.0 * n as f64) * 1e9);

    // adamw-style 4-stream fused loop with indexing
    let mut theta = vec![0.5f64; n];
    let mut m = vec![0.1f64; n];
    let mut v = vec![0.01f64; n];
    let g = vec![1e-3f64; n];
    let t = Instant::now();
    for _ in 0..50 {
        let (b1, b2, lr, eps, decay) = (0.9, 0.999, 5e-4, 1e-8, 1.0 - 5e-6);
        let (c1, c2) = (1.1, 1.05);
        for i in 0..theta.len() {
            let gi = g[i];
            let mi = b1 * m[i] + (1.0 - b1) * gi;
            let vi = b2 * v[i] + (1.0 - b2) * gi * gi;
            m[i] = mi;
            v[i] = vi;
            theta[i] = theta[i] * decay - lr * (mi * c1) / ((vi * c2).sqrt() + eps);
        }
    }
    println!("adamw indexed: {:.2} ns/elem ({})", t.elapsed().as_secs_f64() / (50.0 * n as f64) * 1e9, theta[3]);

    // zipped version
    let mut theta = vec![0.5f64; n];
    let mut m = vec![0.1f64; n];
    let mut v = vec![0.01f64; n];
    let t = Instant::now();
    for _ in 0..50 {
        let (b1, b2, lr, eps, decay) = (0.9, 0.999, 5e-4, 1e-8, 1.0 - 5e-6);
        let (c1, c2) = (1.1, 1.05);
        for ((t_, m_), (v_, g_)) in theta.iter_mut().zip(m.iter_mut()).zip(v.iter_mut().zip(g.iter())) {
            let gi = *g_;
            let mi = b1 * *m_ + (1.0 - b1) * gi;
            let vi = b2 * *v_ + (1.0 - b2) * gi * gi;
            *m_ = mi;
            *v_ = vi;
            *t_ = *t_ * decay - lr * (mi * c1) / ((vi * c2).sqrt() + eps);
        }
    }
    println!("adamw zipped:  {:.2} ns/elem ({})", t.elapsed().as_secs_f64() / (50.0 * n as f64) * 1e9, theta[3]);
}
