use crate::error::{Error, Result};

/// Dense row-major array of 64-bit reals.
///
/// Every constructor and every operation that produces an `Array` rejects
/// NaN and infinite entries, so downstream code can assume finiteness.
#[derive(Debug, Clone, PartialEq)]
pub struct Array {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Array {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let expected: usize = shape.iter().product();
        if data.len() != expected {
            return Err(Error::shape(
                "Array::new",
                format!("shape {:?} implies {} values, got {}", shape, expected, data.len()),
            ));
        }
        let arr = Array { shape, data };
        arr.check_finite("Array::new")?;
        Ok(arr)
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let len = shape.iter().product();
        Array {
            shape,
            data: vec![0.0; len],
        }
    }

    pub fn scalar(value: f64) -> Result<Self> {
        Array::new(vec![1], vec![value])
    }

    pub fn from_vec(data: Vec<f64>) -> Result<Self> {
        let len = data.len();
        Array::new(vec![len], data)
    }

    /// Column vector holding one f64 per row; used for per-row weights.
    pub fn column(data: Vec<f64>) -> Result<Self> {
        let len = data.len();
        Array::new(vec![len, 1], data)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Number of rows when viewed as a matrix (1 for vectors/scalars).
    pub fn rows(&self) -> usize {
        match self.shape.len() {
            0 | 1 => 1,
            _ => self.shape[0],
        }
    }

    /// Number of columns when viewed as a matrix.
    pub fn cols(&self) -> usize {
        match self.shape.len() {
            0 => 0,
            1 => self.shape[0],
            _ => self.shape[1..].iter().product(),
        }
    }

    pub fn row(&self, r: usize) -> &[f64] {
        let c = self.cols();
        &self.data[r * c..(r + 1) * c]
    }

    /// The single value of a scalar array.
    pub fn scalar_value(&self) -> Result<f64> {
        if self.data.len() != 1 {
            return Err(Error::shape(
                "Array::scalar_value",
                format!("expected a scalar, shape is {:?}", self.shape),
            ));
        }
        Ok(self.data[0])
    }

    pub(crate) fn check_finite(&self, context: &str) -> Result<()> {
        // NaN and Inf are exactly the values with an all-ones exponent field;
        // the integer reduction vectorizes where a float scan would not
        const EXP_MASK: u64 = 0x7ff0_0000_0000_0000;
        let mut bad = 0u64;
        for v in &self.data {
            bad |= u64::from(v.to_bits() & EXP_MASK == EXP_MASK);
        }
        if bad == 0 {
            Ok(())
        } else {
            Err(Error::NonFinite {
                context: context.to_string(),
            })
        }
    }

    /// Elementwise max(entry, 0). Shape preserved.
    pub fn clip_nonnegative(&self) -> Array {
        Array {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&v| v.max(0.0)).collect(),
        }
    }

    pub(crate) fn add_assign(&mut self, other: &Array) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::shape(
                "Array::add_assign",
                format!("{:?} vs {:?}", self.shape, other.shape),
            ));
        }
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += b;
        }
        Ok(())
    }
}

/// Clip every entry of `weights` to be nonnegative.
pub fn clip_nonnegative(weights: &Array) -> Array {
    weights.clip_nonnegative()
}

// Cody-Waite split of ln 2: EXP_LN2_HI carries ~21 significant bits, so
// k * EXP_LN2_HI is exact for |k| <= 1024 and the reduced argument keeps
// full precision.
const EXP_LOG2E: f64 = std::f64::consts::LOG2_E;
const EXP_LN2_HI: f64 = 6.931471803691238164e-1;
const EXP_LN2_LO: f64 = 1.908214929270587700e-10;

/// e^x via range reduction and a degree-13 Taylor kernel. Agrees with the
/// platform exp to a couple of ulps, but is branch-free so element loops
/// vectorize. Underflows to 0 below -708.39, overflows to infinity above
/// 709, and propagates NaN.
#[inline]
pub fn fast_exp(x: f64) -> f64 {
    // clamp keeps the scale exponent in the normal range; NaN passes through
    let c = x.clamp(-709.0, 709.0);
    let k = (c * EXP_LOG2E).round();
    let r = (c - k * EXP_LN2_HI) - k * EXP_LN2_LO;
    // Taylor series of e^r for |r| <= ln2/2; remainder < 2e-16
    let p = 1.0
        + r * (1.0
            + r * (0.5
                + r * (1.0 / 6.0
                    + r * (1.0 / 24.0
                        + r * (1.0 / 120.0
                            + r * (1.0 / 720.0
                                + r * (1.0 / 5040.0
                                    + r * (1.0 / 40320.0
                                        + r * (1.0 / 362880.0
                                            + r * (1.0 / 3628800.0
                                                + r * (1.0 / 39916800.0
                                                    + r * (1.0 / 479001600.0
                                                        + r * (1.0 / 6227020800.0)))))))))))));
    // NaN casts to 0, so the scale stays harmless and p carries the NaN
    let bits = (((k as i64) + 1023) as u64) << 52;
    let v = p * f64::from_bits(bits);
    // saturate outside the reduced range
    let v = if x > 709.0 { f64::INFINITY } else { v };
    if x < -708.39 {
        0.0
    } else {
        v
    }
}

/// Numerically stable logistic function.
#[inline]
pub fn sigmoid(x: f64) -> f64 {
    let e = fast_exp(-x.abs());
    let numerator = if x >= 0.0 { 1.0 } else { e };
    numerator / (1.0 + e)
}

/// Numerically stable ln(1 + e^x); equals -ln(sigmoid(-x)).
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + fast_exp(-x.abs()).ln_1p()
}
