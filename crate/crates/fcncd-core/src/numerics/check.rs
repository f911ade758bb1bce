//! Gradient checking against central finite differences.
//!
//! Built purely on forward evaluation, so it stays independent of the
//! reverse-mode path it is used to verify.

use crate::numerics::{Array, DiffGraph, Gradients, ParamSet};

/// Finite-difference gradients aligned with a `ParamSet`.
pub struct FdGradients {
    grads: Vec<Array>,
}

/// Central-difference gradients of the graph output for every parameter
/// entry: (f(x + h) - f(x - h)) / 2h.
pub fn finite_difference_gradients(graph: &DiffGraph, params: &ParamSet, h: f64) -> FdGradients {
    let mut work = params.clone();
    let mut grads = Vec::with_capacity(params.len());
    for idx in 0..params.len() {
        let n = params.value(idx).len();
        let mut g = vec![0.0; n];
        for j in 0..n {
            let orig = work.value(idx).data()[j];
            work.value_mut(idx).data_mut()[j] = orig + h;
            let up = graph.forward(&work).unwrap().data()[0];
            work.value_mut(idx).data_mut()[j] = orig - h;
            let down = graph.forward(&work).unwrap().data()[0];
            work.value_mut(idx).data_mut()[j] = orig;
            g[j] = (up - down) / (2.0 * h);
        }
        grads.push(Array::new(params.value(idx).shape().to_vec(), g).unwrap());
    }
    FdGradients { grads }
}

impl FdGradients {
    pub fn by_index(&self, idx: usize) -> &Array {
        &self.grads[idx]
    }

    /// Largest relative error against analytic gradients over all entries.
    /// Entries whose magnitude falls below 1e-4 on both sides are compared
    /// against that floor, which turns the test absolute there; central
    /// differences carry O(h^2) truncation noise that would otherwise
    /// dominate near-zero gradients.
    pub fn max_relative_error(&self, params: &ParamSet, analytic: &Gradients) -> f64 {
        let mut worst: f64 = 0.0;
        for idx in 0..params.len() {
            let fd = self.grads[idx].data();
            let ad = analytic.by_index(idx).data();
            for (&f, &a) in fd.iter().zip(ad) {
                let denom = f.abs().max(a.abs()).max(1e-4);
                worst = worst.max((f - a).abs() / denom);
            }
        }
        worst
    }
}
