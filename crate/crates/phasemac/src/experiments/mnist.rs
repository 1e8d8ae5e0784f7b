//! Digit-classification accuracy: float against the quantized PMAC backend.
//!
//! Needs the standard IDX files under the data root (or `mnist_dir`). With
//! `mnist_synthetic=true` a procedural digit corpus is generated, written
//! as IDX and read back through the same parser, so the full ingestion path
//! runs even without the real dataset on disk.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use phasemac_core::nn::{
    prepare_quantized, train_sgd, FcModel, Hyper, IntBackend, LossKind, MacBackend,
};
use phasemac_core::{EnergyLedger, SplitMix64};

use crate::config::{BitsSpec, ExperimentConfig};
use crate::idx::{read_idx_images, read_idx_labels, write_idx_images, write_idx_labels, IdxImages};
use crate::outputs::atomic_write_str;
use crate::synth::gen_digit_corpus;

#[derive(Debug, Clone)]
pub struct MnistOutcome {
    /// (backend label, accuracy in percent); "float" first.
    pub rows: Vec<(String, f64)>,
    pub float_acc: f64,
    pub pmac8_acc: f64,
    /// |float - 8b| in percentage points.
    pub gap: f64,
    pub train_count: usize,
    pub test_count: usize,
    pub synthetic: bool,
}

struct Dataset {
    images: IdxImages,
    labels: Vec<u8>,
}

fn load_pair(images_path: &Path, labels_path: &Path) -> Result<Dataset> {
    let images = read_idx_images(images_path)?;
    let labels = read_idx_labels(labels_path)?;
    if images.count != labels.len() {
        return Err(anyhow!(
            "{}: {} images but {} labels",
            images_path.display(),
            images.count,
            labels.len()
        ));
    }
    Ok(Dataset { images, labels })
}

fn resolve_dataset(cfg: &ExperimentConfig, synthetic: bool) -> Result<(Dataset, Dataset)> {
    if synthetic {
        let data_seed = cfg.kv.get_u64("mnist_data_seed", 1234)?;
        let train_count = cfg.kv.get_usize("mnist_synth_train", 10_000)?;
        let test_count = cfg.kv.get_usize("mnist_synth_test", 2_000)?;
        let dir = cfg.out_dir.join("synthetic-idx");
        let (train_img, train_lab) = gen_digit_corpus(train_count, data_seed);
        let (test_img, test_lab) = gen_digit_corpus(test_count, data_seed ^ 0x5eed);
        let paths = [
            dir.join("train-images-idx3-ubyte"),
            dir.join("train-labels-idx1-ubyte"),
            dir.join("t10k-images-idx3-ubyte"),
            dir.join("t10k-labels-idx1-ubyte"),
        ];
        write_idx_images(&paths[0], &train_img)?;
        write_idx_labels(&paths[1], &train_lab)?;
        write_idx_images(&paths[2], &test_img)?;
        write_idx_labels(&paths[3], &test_lab)?;
        // Read back through the parser: the ingestion path is the same one
        // real files take.
        Ok((
            load_pair(&paths[0], &paths[1])?,
            load_pair(&paths[2], &paths[3])?,
        ))
    } else {
        let dir = match cfg.kv.get("mnist_dir") {
            Some(d) => PathBuf::from(d),
            None => cfg.data_root.join("mnist"),
        };
        let train = load_pair(
            &dir.join("train-images-idx3-ubyte"),
            &dir.join("train-labels-idx1-ubyte"),
        )
        .with_context(|| {
            format!(
                "loading MNIST from {} (set PHASEMAC_DATA or mnist_dir, or run with \
                 mnist_synthetic=true)",
                dir.display()
            )
        })?;
        let test = load_pair(
            &dir.join("t10k-images-idx3-ubyte"),
            &dir.join("t10k-labels-idx1-ubyte"),
        )?;
        Ok((train, test))
    }
}

fn one_hot(label: u8) -> Vec<f64> {
    let mut v = vec![0.0; 10];
    v[label as usize] = 1.0;
    v
}

fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in xs.iter().enumerate() {
        if v > xs[best] {
            best = i;
        }
    }
    best
}

/// Accuracy of the float model on (images, labels), in percent.
fn float_accuracy(model: &FcModel, images: &IdxImages, labels: &[u8], count: usize) -> Result<f64> {
    let mut correct = 0usize;
    for (i, &label) in labels.iter().enumerate().take(count) {
        let x = images.image_f64(i);
        let out = phasemac_core::nn::fc_forward(model, &x, &MacBackend::Float, 8)?;
        if argmax(&out) == label as usize {
            correct += 1;
        }
    }
    Ok(100.0 * correct as f64 / count as f64)
}

fn pmac_accuracy(
    model: &FcModel,
    bits: u8,
    cfg: &ExperimentConfig,
    images: &IdxImages,
    labels: &[u8],
    count: usize,
) -> Result<f64> {
    let prep = prepare_quantized(model, bits)?;
    let mut ledger = EnergyLedger::new();
    let mut correct = 0usize;
    for (i, &label) in labels.iter().enumerate().take(count) {
        let x = images.image_f64(i);
        let out = prep.forward(&x, IntBackend::Pmac(cfg.pmac), &mut ledger)?;
        if argmax(&out) == label as usize {
            correct += 1;
        }
    }
    Ok(100.0 * correct as f64 / count as f64)
}

pub fn run_mnist(cfg: &ExperimentConfig) -> Result<MnistOutcome> {
    let synthetic = cfg.kv.get_bool("mnist_synthetic", false)?;
    let (train, test) = resolve_dataset(cfg, synthetic)?;

    // Desk-scale defaults: an 8k/1k subset and one hidden layer. --full
    // switches to the whole dataset and the deep stack.
    let (train_count, test_count, hidden, epochs) = if cfg.full {
        let hidden = cfg
            .kv
            .get_usize_list("mnist_hidden_full", &[512, 256, 128, 64])?;
        (
            train.images.count,
            test.images.count,
            hidden,
            cfg.kv.get_usize("mnist_epochs_full", 40)?,
        )
    } else {
        let hidden = cfg.kv.get_usize_list("mnist_hidden", &[128])?;
        (
            cfg.kv
                .get_usize("mnist_train", 8_000)?
                .min(train.images.count),
            cfg.kv
                .get_usize("mnist_test", 1_000)?
                .min(test.images.count),
            hidden,
            cfg.kv.get_usize("mnist_epochs", 12)?,
        )
    };
    let lr = cfg.kv.get_f64("mnist_lr", 0.1)?;
    let batch_size = cfg.kv.get_usize("mnist_batch_size", 32)?;

    let pixels = train.images.rows * train.images.cols;
    let mut dims = vec![pixels];
    dims.extend_from_slice(&hidden);
    dims.push(10);

    let data: Vec<(Vec<f64>, Vec<f64>)> = (0..train_count)
        .map(|i| (train.images.image_f64(i), one_hot(train.labels[i])))
        .collect();

    let seed_of = |tag: u64| SplitMix64::new(cfg.seed).fork(tag).next_u64();
    let init = FcModel::with_seed(&dims, seed_of(1))?;
    let hyper = Hyper {
        lr,
        epochs,
        batch: batch_size,
        seed: seed_of(2),
        loss: LossKind::SoftmaxCrossEntropy,
    };
    let (model, stats) = train_sgd(&init, &data, &hyper)?;
    if let (Some(first), Some(last)) = (stats.epoch_losses.first(), stats.epoch_losses.last()) {
        println!(
            "mnist: trained {epochs} epochs on {train_count} samples, loss {first:.4} -> {last:.4}"
        );
    }

    let float_acc = float_accuracy(&model, &test.images, &test.labels, test_count)?;
    let mut rows = vec![("float".to_string(), float_acc)];

    // Always evaluate 8 bits (the headline comparison), plus any other
    // requested fixed widths.
    let mut widths: Vec<u8> = vec![8];
    for spec in &cfg.bits {
        if let BitsSpec::Fixed(b) = spec {
            if !widths.contains(b) {
                widths.push(*b);
            }
        }
    }
    let mut pmac8_acc = f64::NAN;
    for bits in widths {
        let acc = pmac_accuracy(&model, bits, cfg, &test.images, &test.labels, test_count)?;
        if bits == 8 {
            pmac8_acc = acc;
        }
        rows.push((format!("pmac{bits}"), acc));
    }
    let gap = (float_acc - pmac8_acc).abs();

    let mut csv = String::from("# phasemac mnist v1\nbackend,accuracy_pct\n");
    for (label, acc) in &rows {
        let _ = writeln!(csv, "{label},{acc:.4}");
    }
    let _ = writeln!(csv, "gap_float_vs_pmac8,{gap:.4}");
    atomic_write_str(&cfg.out_dir.join("mnist_results.csv"), &csv)?;

    for (label, acc) in &rows {
        println!("mnist: {label:>7}  {acc:.2}%");
    }
    println!("mnist: |float - pmac8| = {gap:.2} points");

    Ok(MnistOutcome {
        rows,
        float_acc,
        pmac8_acc,
        gap,
        train_count,
        test_count,
        synthetic,
    })
}
