//! Binary model serialization.
//!
//! Layout (all multi-byte fields little-endian):
//!
//! ```text
//! offset  size            field
//! 0       4               magic "PMFC"
//! 4       4               u32 format version (currently 1)
//! 8       4               u32 dim count D (layer count is D-1)
//! 12      4*D             u32 dims
//! 12+4D   D-1             activation per layer: 0 identity, 1 relu
//! ...     per layer l:    f64 weights, row-major dims[l+1] x dims[l],
//!                         then f64 biases, dims[l+1]
//! ```
//!
//! Weights round-trip bit-exactly.

use std::fs;
use std::path::{Path, PathBuf};

use phasemac_core::nn::{Activation, FcModel};
use thiserror::Error;

pub const MODEL_MAGIC: &[u8; 4] = b"PMFC";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: bad magic at offset 0 (not a model file)")]
    BadMagic { path: PathBuf },
    #[error("{path}: unsupported format version {got} (expected {expected})")]
    BadVersion {
        path: PathBuf,
        got: u32,
        expected: u32,
    },
    #[error("{path}: truncated at offset {offset}")]
    Truncated { path: PathBuf, offset: usize },
    #[error("{path}: invalid activation code {code} at offset {offset}")]
    BadActivation {
        path: PathBuf,
        code: u8,
        offset: usize,
    },
    #[error("{path}: malformed model: {why}")]
    Malformed { path: PathBuf, why: String },
}

pub fn save_model(path: &Path, model: &FcModel) -> Result<(), ModelIoError> {
    let dims = model.dims();
    let mut out = Vec::new();
    out.extend_from_slice(MODEL_MAGIC);
    out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    out.extend_from_slice(&(dims.len() as u32).to_le_bytes());
    for &d in dims {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for l in 0..model.num_layers() {
        out.push(match model.layer_activation(l) {
            Activation::Identity => 0,
            Activation::Relu => 1,
        });
    }
    for l in 0..model.num_layers() {
        for &w in model.layer_weights(l) {
            out.extend_from_slice(&w.to_le_bytes());
        }
        for &b in model.layer_bias(l) {
            out.extend_from_slice(&b.to_le_bytes());
        }
    }
    crate::outputs::atomic_write(path, &out).map_err(|source| ModelIoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

struct Reader<'a> {
    data: &'a [u8],
    offset: usize,
    path: &'a Path,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ModelIoError> {
        if self.data.len() < self.offset + n {
            return Err(ModelIoError::Truncated {
                path: self.path.to_path_buf(),
                offset: self.data.len(),
            });
        }
        let s = &self.data[self.offset..self.offset + n];
        self.offset += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, ModelIoError> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn f64(&mut self) -> Result<f64, ModelIoError> {
        let b = self.take(8)?;
        Ok(f64::from_le_bytes([
            b[0], b[1], b[2], b[3], b[4], b[5], b[6], b[7],
        ]))
    }
}

pub fn load_model(path: &Path) -> Result<FcModel, ModelIoError> {
    let data = fs::read(path).map_err(|source| ModelIoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut r = Reader {
        data: &data,
        offset: 0,
        path,
    };
    if r.take(4)? != MODEL_MAGIC {
        return Err(ModelIoError::BadMagic {
            path: path.to_path_buf(),
        });
    }
    let version = r.u32()?;
    if version != MODEL_VERSION {
        return Err(ModelIoError::BadVersion {
            path: path.to_path_buf(),
            got: version,
            expected: MODEL_VERSION,
        });
    }
    let n_dims = r.u32()? as usize;
    if !(2..=64).contains(&n_dims) {
        return Err(ModelIoError::Malformed {
            path: path.to_path_buf(),
            why: format!("dim count {n_dims} outside [2, 64]"),
        });
    }
    let mut dims = Vec::with_capacity(n_dims);
    for _ in 0..n_dims {
        dims.push(r.u32()? as usize);
    }
    let mut acts = Vec::with_capacity(n_dims - 1);
    for _ in 0..n_dims - 1 {
        let offset = r.offset;
        let code = r.take(1)?[0];
        acts.push(match code {
            0 => Activation::Identity,
            1 => Activation::Relu,
            _ => {
                return Err(ModelIoError::BadActivation {
                    path: path.to_path_buf(),
                    code,
                    offset,
                })
            }
        });
    }
    let mut weights = Vec::with_capacity(n_dims - 1);
    let mut biases = Vec::with_capacity(n_dims - 1);
    for l in 0..n_dims - 1 {
        let w_len = dims[l + 1] * dims[l];
        let mut w = Vec::with_capacity(w_len);
        for _ in 0..w_len {
            w.push(r.f64()?);
        }
        let mut b = Vec::with_capacity(dims[l + 1]);
        for _ in 0..dims[l + 1] {
            b.push(r.f64()?);
        }
        weights.push(w);
        biases.push(b);
    }
    FcModel::from_parts(&dims, weights, biases, acts).map_err(|e| ModelIoError::Malformed {
        path: path.to_path_buf(),
        why: e.to_string(),
    })
}
