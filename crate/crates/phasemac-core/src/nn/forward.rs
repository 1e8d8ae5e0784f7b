//! Forward pass with pluggable MAC engine.

use alloc::vec::Vec;

use crate::array::{EnergyLedger, Int8Matrix, PmacArray};
use crate::nn::quant::quantize;
use crate::nn::{lift_array_error, FcModel, MacBackend, NnError};
use crate::pmac::{ref_dot, PmacConfig};

/// Integer engines for the quantized path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntBackend {
    Reference,
    Pmac(PmacConfig),
}

/// A model with its weights already quantized, ready for repeated inference
/// at one bit width.
#[derive(Debug, Clone)]
pub struct QuantizedFcModel {
    pub(crate) layers: Vec<QuantLayer>,
    pub bits: u8,
    input_dim: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct QuantLayer {
    pub weights: Int8Matrix,
    pub w_scale: f64,
    pub bias: Vec<f64>,
    pub act: crate::nn::Activation,
}

/// Quantize every weight matrix of the model once.
pub fn prepare_quantized(model: &FcModel, bits: u8) -> Result<QuantizedFcModel, NnError> {
    let dims = model.dims();
    let mut layers = Vec::with_capacity(model.num_layers());
    for l in 0..model.num_layers() {
        let q = quantize(model.layer_weights(l), bits)?;
        let weights = Int8Matrix::from_flat(dims[l + 1], dims[l], q.values)
            .map_err(|e| lift_array_error(l, e))?;
        layers.push(QuantLayer {
            weights,
            w_scale: q.scale,
            bias: model.layer_bias(l).to_vec(),
            act: model.layer_activation(l),
        });
    }
    Ok(QuantizedFcModel {
        layers,
        bits,
        input_dim: dims[0],
    })
}

impl QuantizedFcModel {
    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(self.input_dim, |l| l.bias.len())
    }

    /// Quantize activations per layer, run the integer matmul on the chosen
    /// engine, then dequantize, bias and activate in float.
    pub fn forward(
        &self,
        input: &[f64],
        backend: IntBackend,
        ledger: &mut EnergyLedger,
    ) -> Result<Vec<f64>, NnError> {
        if input.len() != self.input_dim {
            return Err(NnError::DimMismatch {
                expected: self.input_dim,
                got: input.len(),
            });
        }
        let mut acts: Vec<f64> = input.to_vec();
        for (l, layer) in self.layers.iter().enumerate() {
            let qx = quantize(&acts, self.bits)?;
            let acc: Vec<i64> = match backend {
                IntBackend::Reference => {
                    // One weight read and one MAC per element, same
                    // accounting as the hardware path.
                    let m = layer.weights.rows();
                    let n = layer.weights.cols();
                    ledger.weight_reads += (m * n) as u64;
                    ledger.mac_ops += (m * n) as u64;
                    ledger.output_writes += m as u64;
                    (0..m)
                        .map(|i| ref_dot(layer.weights.row(i), &qx.values))
                        .collect::<Result<_, _>>()
                        .expect("lengths validated")
                }
                IntBackend::Pmac(cfg) => {
                    let mut array = PmacArray::new(cfg);
                    let y = array
                        .matvec(&layer.weights, &qx.values)
                        .map_err(|e| lift_array_error(l, e))?;
                    ledger.merge(array.ledger());
                    y
                }
            };
            let scale = layer.w_scale * qx.scale;
            acts = acc
                .iter()
                .zip(&layer.bias)
                .map(|(&a, &b)| layer.act.apply(a as f64 * scale + b))
                .collect();
        }
        Ok(acts)
    }
}

/// Plain float forward pass.
fn float_forward(model: &FcModel, input: &[f64]) -> Result<Vec<f64>, NnError> {
    if input.len() != model.input_dim() {
        return Err(NnError::DimMismatch {
            expected: model.input_dim(),
            got: input.len(),
        });
    }
    let mut acts: Vec<f64> = input.to_vec();
    for l in 0..model.num_layers() {
        let out_dim = model.dims()[l + 1];
        let in_dim = model.dims()[l];
        let w = model.layer_weights(l);
        let b = model.layer_bias(l);
        let act = model.layer_activation(l);
        let mut next = Vec::with_capacity(out_dim);
        for i in 0..out_dim {
            let row = &w[i * in_dim..(i + 1) * in_dim];
            let mut sum = 0.0;
            for (wj, xj) in row.iter().zip(&acts) {
                sum += wj * xj;
            }
            next.push(act.apply(sum + b[i]));
        }
        acts = next;
    }
    Ok(acts)
}

/// One inference through the selected backend.
///
/// The float backend ignores `bits`; the integer backends quantize weights
/// and activations to `bits` per layer. Prefer [`prepare_quantized`] plus
/// [`QuantizedFcModel::forward`] when running many inputs.
pub fn fc_forward(
    model: &FcModel,
    input: &[f64],
    backend: &MacBackend,
    bits: u8,
) -> Result<Vec<f64>, NnError> {
    let mut ledger = EnergyLedger::new();
    fc_forward_with_ledger(model, input, backend, bits, &mut ledger)
}

/// Like [`fc_forward`], accumulating event counts into a caller ledger.
pub fn fc_forward_with_ledger(
    model: &FcModel,
    input: &[f64],
    backend: &MacBackend,
    bits: u8,
    ledger: &mut EnergyLedger,
) -> Result<Vec<f64>, NnError> {
    match backend {
        MacBackend::Float => float_forward(model, input),
        MacBackend::IntegerRef => {
            prepare_quantized(model, bits)?.forward(input, IntBackend::Reference, ledger)
        }
        MacBackend::PmacSim(cfg) => {
            prepare_quantized(model, bits)?.forward(input, IntBackend::Pmac(*cfg), ledger)
        }
    }
}
