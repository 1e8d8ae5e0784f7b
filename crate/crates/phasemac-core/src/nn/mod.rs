//! Minimal fully-connected runtime over the MAC backends.
//!
//! Training is always float; quantization is post-training, symmetric and
//! per-tensor, so the integer path never sees -128 and maps directly onto
//! the sign-magnitude datapath. Between layers the wide MAC output is
//! dequantized, biased and activated in float, then requantized for the
//! next layer.

mod anomaly;
mod forward;
mod model;
mod quant;
mod train;

pub use anomaly::{anomaly_score, anomaly_score_prepared, detect};
pub use forward::{
    fc_forward, fc_forward_with_ledger, prepare_quantized, IntBackend, QuantizedFcModel,
};
pub use model::{Activation, FcModel};
pub use quant::{quantize, QuantizedTensor};
pub use train::{train_sgd, Hyper, LossKind, TrainStats};

use core::fmt;

use crate::array::ArrayError;
use crate::pmac::GroId;

#[derive(Debug, Clone, PartialEq)]
pub enum NnError {
    EmptyInput,
    NonFinite,
    BitsOutOfRange(u8),
    DimMismatch {
        expected: usize,
        got: usize,
    },
    BadModel(&'static str),
    /// A PMAC counter saturated inside a layer.
    Saturated {
        layer: usize,
        row: usize,
        gro: GroId,
    },
    /// A layer is too wide for the configured counters.
    LayerCapacity {
        layer: usize,
        len: usize,
        max_safe: usize,
    },
    RaggedLayer {
        layer: usize,
    },
    NanLoss {
        epoch: usize,
        step: usize,
    },
    BadWindow {
        len: usize,
        expected: usize,
    },
    BadThreshold(f64),
}

impl fmt::Display for NnError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NnError::EmptyInput => write!(f, "input tensor is empty"),
            NnError::NonFinite => write!(f, "input contains a non-finite value"),
            NnError::BitsOutOfRange(b) => write!(f, "bit width {b} outside [2, 8]"),
            NnError::DimMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            NnError::BadModel(why) => write!(f, "invalid model: {why}"),
            NnError::Saturated { layer, row, gro } => write!(
                f,
                "layer {layer}, row {row}: GRO {gro} saturated; \
                 reduce layer width or raise counter_bits"
            ),
            NnError::LayerCapacity {
                layer,
                len,
                max_safe,
            } => write!(
                f,
                "layer {layer} width {len} exceeds counter capacity (max safe {max_safe}); \
                 reduce layer width or raise counter_bits"
            ),
            NnError::RaggedLayer { layer } => write!(f, "layer {layer} has ragged rows"),
            NnError::NanLoss { epoch, step } => {
                write!(
                    f,
                    "training diverged: NaN loss at epoch {epoch}, step {step}"
                )
            }
            NnError::BadWindow { len, expected } => {
                write!(f, "window has {len} samples, expected {expected}")
            }
            NnError::BadThreshold(t) => write!(f, "threshold must be positive, got {t}"),
        }
    }
}

impl core::error::Error for NnError {}

/// Which engine executes the integer matmul of each layer.
///
/// `PmacSim` and `IntegerRef` are contractually bit-identical on the same
/// quantized inputs; `Float` skips quantization entirely.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MacBackend {
    Float,
    IntegerRef,
    PmacSim(crate::pmac::PmacConfig),
}

pub(crate) fn lift_array_error(layer: usize, e: ArrayError) -> NnError {
    match e {
        ArrayError::Saturated { row, gro } => NnError::Saturated { layer, row, gro },
        ArrayError::CapacityExceeded { len, max_safe } => NnError::LayerCapacity {
            layer,
            len,
            max_safe,
        },
        ArrayError::DimMismatch { cols, len, .. } => NnError::DimMismatch {
            expected: cols,
            got: len,
        },
        ArrayError::Ragged { .. } => NnError::RaggedLayer { layer },
    }
}
