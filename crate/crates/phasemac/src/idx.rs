//! IDX file reader/writer (the MNIST container format).
//!
//! Big-endian headers: images carry magic 2051 and three dimension words,
//! labels carry magic 2049 and one. Parse errors report the byte offset of
//! the first malformed byte.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub const IMAGES_MAGIC: u32 = 2051;
pub const LABELS_MAGIC: u32 = 2049;

#[derive(Debug, Error)]
pub enum IdxError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: bad magic {got:#010x} (expected {expected:#010x}), first malformed byte at offset {offset}")]
    BadMagic {
        path: PathBuf,
        got: u32,
        expected: u32,
        offset: u64,
    },
    #[error("{path}: truncated, first missing byte at offset {offset} (need {need} bytes)")]
    Truncated {
        path: PathBuf,
        offset: u64,
        need: u64,
    },
    #[error("{path}: label {value} out of range [0,9] at offset {offset}")]
    BadLabel {
        path: PathBuf,
        value: u8,
        offset: u64,
    },
    #[error("{path}: image count {images} does not match label count {labels}")]
    CountMismatch {
        path: PathBuf,
        images: usize,
        labels: usize,
    },
}

/// A stack of same-sized grayscale images, row-major pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxImages {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
}

impl IdxImages {
    pub fn image(&self, i: usize) -> &[u8] {
        let size = self.rows * self.cols;
        &self.pixels[i * size..(i + 1) * size]
    }

    /// One image as floats in [0, 1].
    pub fn image_f64(&self, i: usize) -> Vec<f64> {
        self.image(i).iter().map(|&p| p as f64 / 255.0).collect()
    }
}

fn read_u32_be(data: &[u8], offset: usize, path: &Path) -> Result<u32, IdxError> {
    if data.len() < offset + 4 {
        return Err(IdxError::Truncated {
            path: path.to_path_buf(),
            offset: data.len() as u64,
            need: (offset + 4 - data.len()) as u64,
        });
    }
    Ok(u32::from_be_bytes([
        data[offset],
        data[offset + 1],
        data[offset + 2],
        data[offset + 3],
    ]))
}

fn check_magic(data: &[u8], expected: u32, path: &Path) -> Result<(), IdxError> {
    let got = read_u32_be(data, 0, path)?;
    if got != expected {
        // Locate the first differing byte inside the magic word.
        let want = expected.to_be_bytes();
        let offset = (0..4).find(|&i| data[i] != want[i]).unwrap_or(0) as u64;
        return Err(IdxError::BadMagic {
            path: path.to_path_buf(),
            got,
            expected,
            offset,
        });
    }
    Ok(())
}

pub fn read_idx_images(path: &Path) -> Result<IdxImages, IdxError> {
    let data = fs::read(path).map_err(|source| IdxError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    check_magic(&data, IMAGES_MAGIC, path)?;
    let count = read_u32_be(&data, 4, path)? as usize;
    let rows = read_u32_be(&data, 8, path)? as usize;
    let cols = read_u32_be(&data, 12, path)? as usize;
    let need = 16 + count * rows * cols;
    if data.len() < need {
        return Err(IdxError::Truncated {
            path: path.to_path_buf(),
            offset: data.len() as u64,
            need: (need - data.len()) as u64,
        });
    }
    Ok(IdxImages {
        count,
        rows,
        cols,
        pixels: data[16..need].to_vec(),
    })
}

pub fn read_idx_labels(path: &Path) -> Result<Vec<u8>, IdxError> {
    let data = fs::read(path).map_err(|source| IdxError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    check_magic(&data, LABELS_MAGIC, path)?;
    let count = read_u32_be(&data, 4, path)? as usize;
    let need = 8 + count;
    if data.len() < need {
        return Err(IdxError::Truncated {
            path: path.to_path_buf(),
            offset: data.len() as u64,
            need: (need - data.len()) as u64,
        });
    }
    let labels = data[8..need].to_vec();
    for (i, &v) in labels.iter().enumerate() {
        if v > 9 {
            return Err(IdxError::BadLabel {
                path: path.to_path_buf(),
                value: v,
                offset: (8 + i) as u64,
            });
        }
    }
    Ok(labels)
}

pub fn write_idx_images(path: &Path, images: &IdxImages) -> Result<(), IdxError> {
    let mut data = Vec::with_capacity(16 + images.pixels.len());
    data.extend_from_slice(&IMAGES_MAGIC.to_be_bytes());
    data.extend_from_slice(&(images.count as u32).to_be_bytes());
    data.extend_from_slice(&(images.rows as u32).to_be_bytes());
    data.extend_from_slice(&(images.cols as u32).to_be_bytes());
    data.extend_from_slice(&images.pixels);
    crate::outputs::atomic_write(path, &data).map_err(|source| IdxError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_idx_labels(path: &Path, labels: &[u8]) -> Result<(), IdxError> {
    let mut data = Vec::with_capacity(8 + labels.len());
    data.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
    data.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    data.extend_from_slice(labels);
    crate::outputs::atomic_write(path, &data).map_err(|source| IdxError::Io {
        path: path.to_path_buf(),
        source,
    })
}
