//! Plain-float minibatch SGD with backprop.
//!
//! Training never touches the MAC hardware model: quantization is strictly
//! post-training.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::exp;
use crate::nn::{FcModel, NnError};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    /// Mean squared error over the output vector (regression heads).
    SquaredError,
    /// Softmax cross-entropy over identity-head logits (classification).
    SoftmaxCrossEntropy,
}

#[derive(Debug, Clone)]
pub struct Hyper {
    pub lr: f64,
    pub epochs: usize,
    pub batch: usize,
    pub seed: u64,
    pub loss: LossKind,
}

impl Default for Hyper {
    fn default() -> Self {
        Self {
            lr: 0.05,
            epochs: 10,
            batch: 32,
            seed: 0,
            loss: LossKind::SquaredError,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct TrainStats {
    /// Mean minibatch loss per epoch.
    pub epoch_losses: Vec<f64>,
}

struct Scratch {
    /// Pre-activations per layer.
    pre: Vec<Vec<f64>>,
    /// Activations per layer, index 0 is the input.
    act: Vec<Vec<f64>>,
}

fn forward_tracked(model: &FcModel, input: &[f64], s: &mut Scratch) {
    s.act[0].clear();
    s.act[0].extend_from_slice(input);
    for l in 0..model.num_layers() {
        let in_dim = model.dims()[l];
        let out_dim = model.dims()[l + 1];
        let w = model.layer_weights(l);
        let b = model.layer_bias(l);
        let a = model.layer_activation(l);
        let (prev_acts, rest) = s.act.split_at_mut(l + 1);
        let x = &prev_acts[l];
        let pre = &mut s.pre[l];
        pre.clear();
        for i in 0..out_dim {
            let row = &w[i * in_dim..(i + 1) * in_dim];
            let mut sum = b[i];
            for (wj, xj) in row.iter().zip(x.iter()) {
                sum += wj * xj;
            }
            pre.push(sum);
        }
        let next = &mut rest[0];
        next.clear();
        next.extend(pre.iter().map(|&z| a.apply(z)));
    }
}

/// Loss value and the gradient at the output layer (d loss / d logits).
fn loss_and_delta(kind: LossKind, output: &[f64], target: &[f64], delta: &mut Vec<f64>) -> f64 {
    delta.clear();
    match kind {
        LossKind::SquaredError => {
            let n = output.len() as f64;
            let mut loss = 0.0;
            for (&o, &t) in output.iter().zip(target) {
                let e = o - t;
                loss += e * e;
                delta.push(2.0 * e / n);
            }
            loss / n
        }
        LossKind::SoftmaxCrossEntropy => {
            let max = output
                .iter()
                .cloned()
                .fold(f64::NEG_INFINITY, crate::math::fmax);
            let mut denom = 0.0;
            for &o in output {
                denom += exp(o - max);
            }
            let mut loss = 0.0;
            for (&o, &t) in output.iter().zip(target) {
                let p = exp(o - max) / denom;
                if t > 0.0 {
                    // -t*ln(p) via ln(p) = (o - max) - ln(denom); ln through
                    // the exp identity would need a log, so use the stable
                    // direct form below.
                    loss += t * (ln(denom) - (o - max));
                }
                delta.push(p - t);
            }
            loss
        }
    }
}

/// Natural log for the cross-entropy loss value (the gradient needs none).
fn ln(x: f64) -> f64 {
    // atanh-based series after range reduction to [2^-0.5, 2^0.5).
    debug_assert!(x > 0.0);
    let bits = x.to_bits();
    let mut e = ((bits >> 52) & 0x7ff) as i64 - 1023;
    let mut m = f64::from_bits((bits & 0x000f_ffff_ffff_ffff) | (1023u64 << 52));
    if m > core::f64::consts::SQRT_2 {
        m *= 0.5;
        e += 1;
    }
    let t = (m - 1.0) / (m + 1.0);
    let t2 = t * t;
    let mut acc = 0.0;
    for k in (0..9).rev() {
        acc = acc * t2 + 1.0 / (2 * k + 1) as f64;
    }
    2.0 * t * acc + e as f64 * core::f64::consts::LN_2
}

/// Minibatch SGD; returns the trained model and per-epoch losses.
///
/// Deterministic for a fixed seed; zero epochs return the model unchanged.
pub fn train_sgd(
    model: &FcModel,
    data: &[(Vec<f64>, Vec<f64>)],
    hyper: &Hyper,
) -> Result<(FcModel, TrainStats), NnError> {
    if data.is_empty() {
        return Err(NnError::EmptyInput);
    }
    let in_dim = model.input_dim();
    let out_dim = model.output_dim();
    for (x, y) in data {
        if x.len() != in_dim {
            return Err(NnError::DimMismatch {
                expected: in_dim,
                got: x.len(),
            });
        }
        if y.len() != out_dim {
            return Err(NnError::DimMismatch {
                expected: out_dim,
                got: y.len(),
            });
        }
    }
    let batch = hyper.batch.max(1);
    let mut model = model.clone();
    let mut stats = TrainStats::default();
    let mut rng = SplitMix64::new(hyper.seed).fork(0x54_52_41_49_4e);
    let mut order: Vec<usize> = (0..data.len()).collect();

    let n_layers = model.num_layers();
    let mut scratch = Scratch {
        pre: (0..n_layers)
            .map(|l| Vec::with_capacity(model.dims()[l + 1]))
            .collect(),
        act: (0..=n_layers)
            .map(|l| Vec::with_capacity(model.dims()[l]))
            .collect(),
    };
    let mut grad_w: Vec<Vec<f64>> = (0..n_layers)
        .map(|l| vec![0.0; model.layers[l].weights.len()])
        .collect();
    let mut grad_b: Vec<Vec<f64>> = (0..n_layers)
        .map(|l| vec![0.0; model.layers[l].bias.len()])
        .collect();
    let mut delta: Vec<f64> = Vec::new();
    let mut delta_prev: Vec<f64> = Vec::new();

    for epoch in 0..hyper.epochs {
        rng.shuffle(&mut order);
        let mut epoch_loss = 0.0;
        let mut n_batches = 0usize;
        for (step, chunk) in order.chunks(batch).enumerate() {
            for g in grad_w.iter_mut() {
                g.iter_mut().for_each(|v| *v = 0.0);
            }
            for g in grad_b.iter_mut() {
                g.iter_mut().for_each(|v| *v = 0.0);
            }
            let mut batch_loss = 0.0;
            for &idx in chunk {
                let (x, y) = &data[idx];
                forward_tracked(&model, x, &mut scratch);
                let output = &scratch.act[n_layers];
                batch_loss += loss_and_delta(hyper.loss, output, y, &mut delta);
                // Backward: walk layers from the head down.
                for l in (0..n_layers).rev() {
                    let in_dim = model.dims()[l];
                    let out_dim = model.dims()[l + 1];
                    let a = model.layer_activation(l);
                    // Fold the activation derivative into delta.
                    for (d, &z) in delta.iter_mut().zip(&scratch.pre[l]) {
                        *d *= a.grad(z);
                    }
                    let x_in = &scratch.act[l];
                    let gw = &mut grad_w[l];
                    for i in 0..out_dim {
                        let di = delta[i];
                        if di != 0.0 {
                            let row = &mut gw[i * in_dim..(i + 1) * in_dim];
                            for (g, &xj) in row.iter_mut().zip(x_in.iter()) {
                                *g += di * xj;
                            }
                        }
                        grad_b[l][i] += di;
                    }
                    if l > 0 {
                        let w = model.layer_weights(l);
                        delta_prev.clear();
                        delta_prev.resize(in_dim, 0.0);
                        for i in 0..out_dim {
                            let di = delta[i];
                            if di != 0.0 {
                                let row = &w[i * in_dim..(i + 1) * in_dim];
                                for (dp, &wj) in delta_prev.iter_mut().zip(row) {
                                    *dp += wj * di;
                                }
                            }
                        }
                        core::mem::swap(&mut delta, &mut delta_prev);
                    }
                }
            }
            let scale = hyper.lr / chunk.len() as f64;
            for l in 0..n_layers {
                for (w, g) in model.layers[l].weights.iter_mut().zip(&grad_w[l]) {
                    *w -= scale * g;
                }
                for (b, g) in model.layers[l].bias.iter_mut().zip(&grad_b[l]) {
                    *b -= scale * g;
                }
            }
            let batch_loss = batch_loss / chunk.len() as f64;
            if !batch_loss.is_finite() {
                return Err(NnError::NanLoss { epoch, step });
            }
            epoch_loss += batch_loss;
            n_batches += 1;
        }
        stats.epoch_losses.push(epoch_loss / n_batches as f64);
    }
    Ok((model, stats))
}
