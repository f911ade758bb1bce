use rand::Rng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::numerics::Array;

/// Glorot/Xavier uniform initialization: i.i.d. Uniform(-g, g) with
/// g = sqrt(6 / (fan_in + fan_out)). Returns a `fan_in x fan_out` matrix.
pub fn xavier_uniform(fan_in: usize, fan_out: usize, rng: &mut ChaCha20Rng) -> Result<Array> {
    if fan_in == 0 || fan_out == 0 {
        return Err(Error::Config(format!(
            "xavier_uniform requires positive fans, got ({fan_in}, {fan_out})"
        )));
    }
    let gain = (6.0 / (fan_in + fan_out) as f64).sqrt();
    let data = (0..fan_in * fan_out)
        .map(|_| rng.gen_range(-gain..gain))
        .collect();
    Array::new(vec![fan_in, fan_out], data)
}
