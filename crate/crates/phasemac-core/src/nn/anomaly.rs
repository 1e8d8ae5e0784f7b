//! Prediction-error anomaly scoring.
//!
//! The detector is an autoencoder-style predictor trained on normal
//! operation: it reads a window of sensor samples and predicts the next
//! window. Small prediction error means the signal looks like the trained
//! normal condition; an alert fires when the error crosses a threshold.

use alloc::vec::Vec;

use crate::array::EnergyLedger;
use crate::nn::{fc_forward, FcModel, IntBackend, MacBackend, NnError, QuantizedFcModel};

/// Mean squared prediction error over one window of 2H samples: the first
/// H samples are the model input, the last H the prediction target.
pub fn anomaly_score(
    model: &FcModel,
    window: &[f64],
    bits: u8,
    backend: &MacBackend,
) -> Result<f64, NnError> {
    let h = model.input_dim();
    if window.len() != 2 * h {
        return Err(NnError::BadWindow {
            len: window.len(),
            expected: 2 * h,
        });
    }
    if model.output_dim() != h {
        return Err(NnError::BadModel(
            "predictor must map H inputs to H outputs",
        ));
    }
    let pred = fc_forward(model, &window[..h], backend, bits)?;
    Ok(mse(&pred, &window[h..]))
}

/// [`anomaly_score`] over an already-quantized model: the fast path when
/// scoring many windows at one bit width.
pub fn anomaly_score_prepared(
    prep: &QuantizedFcModel,
    window: &[f64],
    backend: IntBackend,
    ledger: &mut EnergyLedger,
) -> Result<f64, NnError> {
    let h = prep.input_dim();
    if window.len() != 2 * h {
        return Err(NnError::BadWindow {
            len: window.len(),
            expected: 2 * h,
        });
    }
    if prep.output_dim() != h {
        return Err(NnError::BadModel(
            "predictor must map H inputs to H outputs",
        ));
    }
    let pred = prep.forward(&window[..h], backend, ledger)?;
    Ok(mse(&pred, &window[h..]))
}

fn mse(pred: &[f64], target: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (&p, &t) in pred.iter().zip(target) {
        let e = p - t;
        sum += e * e;
    }
    sum / pred.len() as f64
}

/// Pointwise threshold comparison: alert where the score exceeds it.
pub fn detect(scores: &[f64], threshold: f64) -> Result<Vec<bool>, NnError> {
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(NnError::BadThreshold(threshold));
    }
    Ok(scores.iter().map(|&s| s > threshold).collect())
}
