//! Fully-connected model container.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::sqrt;
use crate::nn::NnError;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Identity,
    Relu,
}

impl Activation {
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            Activation::Identity => x,
            Activation::Relu => {
                if x > 0.0 {
                    x
                } else {
                    0.0
                }
            }
        }
    }

    #[inline]
    pub(crate) fn grad(&self, pre: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Relu => {
                if pre > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Layer {
    /// Row-major out_dim x in_dim.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub act: Activation,
}

/// Float FC model: per-layer weights, biases and activation.
///
/// The head is always identity; hidden layers default to ReLU.
#[derive(Debug, Clone, PartialEq)]
pub struct FcModel {
    dims: Vec<usize>,
    pub(crate) layers: Vec<Layer>,
}

impl FcModel {
    /// Zero-initialized model with ReLU hidden layers and an identity head.
    pub fn zeros(dims: &[usize]) -> Result<Self, NnError> {
        Self::check_dims(dims)?;
        let layers = (0..dims.len() - 1)
            .map(|l| Layer {
                weights: vec![0.0; dims[l + 1] * dims[l]],
                bias: vec![0.0; dims[l + 1]],
                act: if l + 2 == dims.len() {
                    Activation::Identity
                } else {
                    Activation::Relu
                },
            })
            .collect();
        Ok(Self {
            dims: dims.to_vec(),
            layers,
        })
    }

    /// Xavier-uniform initialization, deterministic per seed.
    pub fn with_seed(dims: &[usize], seed: u64) -> Result<Self, NnError> {
        let mut model = Self::zeros(dims)?;
        let mut rng = SplitMix64::new(seed).fork(0x1417);
        for l in 0..model.layers.len() {
            let fan_in = dims[l] as f64;
            let fan_out = dims[l + 1] as f64;
            let limit = sqrt(6.0 / (fan_in + fan_out));
            for w in model.layers[l].weights.iter_mut() {
                *w = rng.uniform(-limit, limit);
            }
        }
        Ok(model)
    }

    /// Assemble from explicit parts (used by tests and deserialization).
    pub fn from_parts(
        dims: &[usize],
        weights: Vec<Vec<f64>>,
        biases: Vec<Vec<f64>>,
        acts: Vec<Activation>,
    ) -> Result<Self, NnError> {
        Self::check_dims(dims)?;
        let n_layers = dims.len() - 1;
        if weights.len() != n_layers || biases.len() != n_layers || acts.len() != n_layers {
            return Err(NnError::BadModel("layer count mismatch"));
        }
        if acts[n_layers - 1] != Activation::Identity {
            return Err(NnError::BadModel("the final layer must be identity"));
        }
        let mut layers = Vec::with_capacity(n_layers);
        for l in 0..n_layers {
            if weights[l].len() != dims[l + 1] * dims[l] {
                return Err(NnError::BadModel("weight block size mismatch"));
            }
            if biases[l].len() != dims[l + 1] {
                return Err(NnError::BadModel("bias length mismatch"));
            }
            layers.push(Layer {
                weights: weights[l].clone(),
                bias: biases[l].clone(),
                act: acts[l],
            });
        }
        Ok(Self {
            dims: dims.to_vec(),
            layers,
        })
    }

    fn check_dims(dims: &[usize]) -> Result<(), NnError> {
        if dims.len() < 2 {
            return Err(NnError::BadModel("need at least one layer"));
        }
        if dims.contains(&0) {
            return Err(NnError::BadModel("zero-width layer"));
        }
        Ok(())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.dims.last().unwrap()
    }

    pub fn layer_weights(&self, l: usize) -> &[f64] {
        &self.layers[l].weights
    }

    pub fn layer_bias(&self, l: usize) -> &[f64] {
        &self.layers[l].bias
    }

    pub fn layer_activation(&self, l: usize) -> Activation {
        self.layers[l].act
    }

    /// Total weight count, i.e. MACs per single-sample inference.
    pub fn weight_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeros_shapes_and_head() {
        let m = FcModel::zeros(&[4, 3, 2]).unwrap();
        assert_eq!(m.dims(), &[4, 3, 2]);
        assert_eq!(m.num_layers(), 2);
        assert_eq!(m.layer_weights(0).len(), 12);
        assert_eq!(m.layer_bias(1).len(), 2);
        assert_eq!(m.layer_activation(0), Activation::Relu);
        assert_eq!(m.layer_activation(1), Activation::Identity);
        assert_eq!(m.weight_count(), 18);
    }

    #[test]
    fn seeded_init_is_deterministic_and_bounded() {
        let a = FcModel::with_seed(&[8, 4], 5).unwrap();
        let b = FcModel::with_seed(&[8, 4], 5).unwrap();
        assert_eq!(a, b);
        let c = FcModel::with_seed(&[8, 4], 6).unwrap();
        assert_ne!(a, c);
        let limit = (6.0f64 / 12.0).sqrt();
        assert!(a.layer_weights(0).iter().all(|w| w.abs() <= limit));
        assert!(a.layer_weights(0).iter().any(|w| *w != 0.0));
    }

    #[test]
    fn from_parts_validates() {
        assert!(FcModel::from_parts(
            &[2, 1],
            vec![vec![1.0, 2.0]],
            vec![vec![0.0]],
            vec![Activation::Identity],
        )
        .is_ok());
        // Non-identity head rejected.
        assert!(matches!(
            FcModel::from_parts(
                &[2, 1],
                vec![vec![1.0, 2.0]],
                vec![vec![0.0]],
                vec![Activation::Relu],
            ),
            Err(NnError::BadModel(_))
        ));
        assert!(FcModel::zeros(&[3]).is_err());
        assert!(FcModel::zeros(&[3, 0]).is_err());
    }
}
