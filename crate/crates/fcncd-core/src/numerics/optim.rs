//! AdamW with decoupled weight decay.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Array, Gradients, ParamSet};

/// AdamW hyperparameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AdamwConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub weight_decay: f64,
}

impl AdamwConfig {
    pub fn with_learning_rate(learning_rate: f64) -> Self {
        AdamwConfig {
            learning_rate,
            ..Default::default()
        }
    }
}

impl Default for AdamwConfig {
    fn default() -> Self {
        AdamwConfig {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            weight_decay: 1e-2,
        }
    }
}

/// First/second moment estimates plus the step counter, aligned with a
/// `ParamSet`. The counter increases by exactly one per `adamw_step`.
#[derive(Debug, Clone)]
pub struct AdamwState {
    pub config: AdamwConfig,
    step: u64,
    first_moment: Vec<Array>,
    second_moment: Vec<Array>,
}

impl AdamwState {
    pub fn new(params: &ParamSet, config: AdamwConfig) -> Self {
        AdamwState {
            config,
            step: 0,
            first_moment: params
                .iter()
                .map(|(_, v)| Array::zeros(v.shape().to_vec()))
                .collect(),
            second_moment: params
                .iter()
                .map(|(_, v)| Array::zeros(v.shape().to_vec()))
                .collect(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }
}

/// One decoupled-weight-decay update with bias correction:
///
///   theta *= 1 - lr * wd
///   m = b1 m + (1 - b1) g;  v = b2 v + (1 - b2) g^2
///   theta -= lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
pub fn adamw_step(params: &mut ParamSet, grads: &Gradients, state: &mut AdamwState) -> Result<()> {
    if grads.len() != params.len() {
        return Err(Error::Config(format!(
            "gradients cover {} parameters, expected {}",
            grads.len(),
            params.len()
        )));
    }
    state.step += 1;
    let c = state.config;
    let bias1 = 1.0 / (1.0 - c.beta1.powi(state.step as i32));
    let bias2 = 1.0 / (1.0 - c.beta2.powi(state.step as i32));
    let decay = 1.0 - c.learning_rate * c.weight_decay;

    for idx in 0..params.len() {
        let g = grads.by_index(idx);
        if g.shape() != params.value(idx).shape() {
            return Err(Error::shape(
                "adamw_step",
                format!(
                    "gradient for {} has shape {:?}, parameter is {:?}",
                    params.name(idx),
                    g.shape(),
                    params.value(idx).shape()
                ),
            ));
        }
        let theta = params.value_mut(idx).data_mut();
        let m = state.first_moment[idx].data_mut();
        let v = state.second_moment[idx].data_mut();
        let g = g.data();
        // zipped iteration keeps the loop free of bounds checks
        for ((t, g), (m, v)) in theta
            .iter_mut()
            .zip(g.iter())
            .zip(m.iter_mut().zip(v.iter_mut()))
        {
            let gi = *g;
            let mi = c.beta1 * *m + (1.0 - c.beta1) * gi;
            let vi = c.beta2 * *v + (1.0 - c.beta2) * gi * gi;
            *m = mi;
            *v = vi;
            *t = *t * decay
                - c.learning_rate * (mi * bias1) / ((vi * bias2).sqrt() + c.epsilon);
        }
        params.value(idx).check_finite("adamw_step")?;
    }
    Ok(())
}
