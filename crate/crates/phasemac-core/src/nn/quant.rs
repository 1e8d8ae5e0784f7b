//! Symmetric per-tensor fixed-point quantization.

use alloc::vec::Vec;

use crate::math::{fabs, round_half_away};
use crate::nn::NnError;

/// Integer tensor plus its scale: real value ~= value * scale.
///
/// The range is symmetric, [-(2^(bits-1)-1), 2^(bits-1)-1]: the most
/// negative two's-complement code is never emitted.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedTensor {
    pub values: Vec<i8>,
    pub scale: f64,
    pub bits: u8,
}

impl QuantizedTensor {
    pub fn qmax(&self) -> i32 {
        (1 << (self.bits - 1)) - 1
    }

    pub fn dequantize(&self) -> Vec<f64> {
        self.values.iter().map(|&v| v as f64 * self.scale).collect()
    }
}

/// Quantize with scale = max|x| / (2^(bits-1) - 1), rounding half away from
/// zero. An all-zero tensor gets scale 1 by convention.
pub fn quantize(x: &[f64], bits: u8) -> Result<QuantizedTensor, NnError> {
    if !(2..=8).contains(&bits) {
        return Err(NnError::BitsOutOfRange(bits));
    }
    if x.is_empty() {
        return Err(NnError::EmptyInput);
    }
    let mut max_abs = 0.0f64;
    for &v in x {
        if !v.is_finite() {
            return Err(NnError::NonFinite);
        }
        let a = fabs(v);
        if a > max_abs {
            max_abs = a;
        }
    }
    let qmax = ((1i32 << (bits - 1)) - 1) as f64;
    let scale = if max_abs == 0.0 { 1.0 } else { max_abs / qmax };
    let values = x
        .iter()
        .map(|&v| {
            let q = round_half_away(v / scale);
            let q = if q > qmax {
                qmax
            } else if q < -qmax {
                -qmax
            } else {
                q
            };
            q as i8
        })
        .collect();
    Ok(QuantizedTensor {
        values,
        scale,
        bits,
    })
}
