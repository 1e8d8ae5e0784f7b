//! Anomaly-detection resolution sweep on synthetic vibration data.
//!
//! A float predictor is trained on normal windows, then every requested bit
//! width runs through the PMAC backend over labeled eval windows. The
//! summary compares each resolution's score series against the float
//! reference (correlation) and against the labels (AUC).

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use phasemac_core::nn::{
    anomaly_score, anomaly_score_prepared, detect, prepare_quantized, train_sgd, FcModel, Hyper,
    IntBackend, LossKind, MacBackend,
};
use phasemac_core::EnergyLedger;
use phasemac_core::SplitMix64;

use crate::config::{BitsSpec, ExperimentConfig};
use crate::metrics::{auc, pearson, percentile};
use crate::model_io::{load_model, save_model};
use crate::outputs::{anomaly_scores_gnuplot, atomic_write_str};
use crate::synth::{gen_synthetic, windows, AnomalyKind, SynthConfig};

#[derive(Debug, Clone)]
pub struct AnomalyRow {
    pub resolution: BitsSpec,
    pub auc: f64,
    pub corr_with_float: f64,
}

#[derive(Debug, Clone)]
pub struct AnomalyOutcome {
    /// Float row first, then the quantized resolutions in request order.
    pub rows: Vec<AnomalyRow>,
    pub float_auc: f64,
    pub n_windows: usize,
    pub n_anomalous: usize,
    /// P99 of float scores over normal eval windows.
    pub threshold: f64,
    pub float_alerts: usize,
    /// PMAC event counts accumulated over all quantized inference.
    pub ledger: EnergyLedger,
}

fn parse_kind(s: &str) -> Result<AnomalyKind> {
    match s {
        "frequency" => Ok(AnomalyKind::FrequencyShift),
        "amplitude" => Ok(AnomalyKind::AmplitudeShift),
        other => Err(anyhow!(
            "anomaly_kind must be 'frequency' or 'amplitude', got '{other}'"
        )),
    }
}

/// Windows CSV: `label,s0,s1,...` with 2H samples per row. Samples use
/// shortest-round-trip float formatting, so reading the file back
/// reproduces the exact values.
pub fn write_windows_csv(path: &Path, ws: &[(Vec<f64>, bool)]) -> Result<()> {
    let mut text = String::from("# phasemac windows v1: label,samples...\n");
    for (w, label) in ws {
        let _ = write!(text, "{}", if *label { 1 } else { 0 });
        for v in w {
            let _ = write!(text, ",{v}");
        }
        text.push('\n');
    }
    atomic_write_str(path, &text)?;
    Ok(())
}

pub fn read_windows_csv(path: &Path, h: usize) -> Result<Vec<(Vec<f64>, bool)>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(',');
        let label = match parts.next().map(str::trim) {
            Some("0") => false,
            Some("1") => true,
            other => {
                return Err(anyhow!(
                    "{}:{}: label must be 0 or 1, got {other:?}",
                    path.display(),
                    i + 1
                ))
            }
        };
        let samples: Vec<f64> = parts
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| anyhow!("{}:{}: bad sample '{t}'", path.display(), i + 1))
            })
            .collect::<Result<_>>()?;
        if samples.len() != 2 * h {
            return Err(anyhow!(
                "{}:{}: window has {} samples, expected {}",
                path.display(),
                i + 1,
                samples.len(),
                2 * h
            ));
        }
        out.push((samples, label));
    }
    Ok(out)
}

pub fn run_anomaly(cfg: &ExperimentConfig) -> Result<AnomalyOutcome> {
    let h = cfg.kv.get_usize("window", 400)?;
    let hidden = cfg.kv.get_usize_list("hidden", &[256, 64, 256])?;
    let mut dims = vec![h];
    dims.extend_from_slice(&hidden);
    dims.push(h);

    let train_windows = cfg.kv.get_usize("train_windows", 300)?;
    let eval_windows = cfg.kv.get_usize("eval_windows", 160)?;
    let epochs = cfg.kv.get_usize("epochs", 20)?;
    let lr = cfg.kv.get_f64("lr", 0.05)?;
    let batch_size = cfg.kv.get_usize("batch_size", 16)?;
    let noise_sigma = cfg.kv.get_f64("noise_sigma", 0.05)?;
    let shift = cfg.kv.get_f64("shift", 1.5)?;
    let base_freqs = cfg
        .kv
        .get_f64_list("base_freqs", &[0.0137, 0.029, 0.0071])?;
    let kind = parse_kind(cfg.kv.get("anomaly_kind").unwrap_or("frequency"))?;
    let spans = cfg.kv.get_usize("spans", 3)?;
    let span_len = cfg.kv.get_usize("span_len", 2 * h)?;

    let seed_of = |tag: u64| SplitMix64::new(cfg.seed).fork(tag).next_u64();

    // Train on clean data (normal operation only).
    let train_series = gen_synthetic(&SynthConfig {
        n: (train_windows + 1) * h,
        base_freqs: base_freqs.clone(),
        noise_sigma,
        anomaly_kind: kind,
        spans: 0,
        span_len,
        shift,
        seed: seed_of(1),
    })?;
    let train_ws = windows(&train_series, h, h);
    let train_pairs: Vec<(Vec<f64>, Vec<f64>)> = train_ws
        .iter()
        .map(|(w, _)| (w[..h].to_vec(), w[h..].to_vec()))
        .collect();

    let model = if let Some(path) = cfg.kv.get("model_in") {
        let m = load_model(Path::new(path))?;
        if m.input_dim() != h || m.output_dim() != h {
            return Err(anyhow!(
                "model_in maps {} -> {}, expected {h} -> {h}",
                m.input_dim(),
                m.output_dim()
            ));
        }
        m
    } else {
        let init = FcModel::with_seed(&dims, seed_of(3))?;
        let hyper = Hyper {
            lr,
            epochs,
            batch: batch_size,
            seed: seed_of(4),
            loss: LossKind::SquaredError,
        };
        let (trained, stats) = train_sgd(&init, &train_pairs, &hyper)?;
        if let (Some(first), Some(last)) = (stats.epoch_losses.first(), stats.epoch_losses.last()) {
            println!("anomaly: trained {epochs} epochs, loss {first:.5} -> {last:.5}");
        }
        trained
    };
    if let Some(path) = cfg.kv.get("model_out") {
        save_model(Path::new(path), &model)?;
    }

    // Labeled eval windows: external CSV or a fresh series with spans.
    let eval_ws: Vec<(Vec<f64>, bool)> = if let Some(path) = cfg.kv.get("windows_csv") {
        read_windows_csv(Path::new(path), h)?
    } else {
        let eval_series = gen_synthetic(&SynthConfig {
            n: (eval_windows + 1) * h,
            base_freqs,
            noise_sigma,
            anomaly_kind: kind,
            spans,
            span_len,
            shift,
            seed: seed_of(2),
        })?;
        windows(&eval_series, h, h)
    };
    let n_windows = eval_ws.len();
    let n_anomalous = eval_ws.iter().filter(|(_, l)| *l).count();
    write_windows_csv(&cfg.out_dir.join("windows.csv"), &eval_ws)?;

    // Float reference scores.
    let float_scores: Vec<f64> = eval_ws
        .iter()
        .map(|(w, _)| anomaly_score(&model, w, 8, &MacBackend::Float))
        .collect::<Result<_, _>>()?;
    let labels: Vec<bool> = eval_ws.iter().map(|(_, l)| *l).collect();
    let float_auc = auc(&float_scores, &labels);

    let normal_scores: Vec<f64> = float_scores
        .iter()
        .zip(&labels)
        .filter(|(_, &l)| !l)
        .map(|(&s, _)| s)
        .collect();
    let threshold = if normal_scores.is_empty() {
        1.0
    } else {
        percentile(&normal_scores, 99.0)
    };
    let float_alerts = detect(&float_scores, threshold)?
        .iter()
        .filter(|&&a| a)
        .count();

    // Quantized runs through the PMAC backend.
    let mut rows = vec![AnomalyRow {
        resolution: BitsSpec::Float,
        auc: float_auc,
        corr_with_float: 1.0,
    }];
    let mut all_scores: Vec<(BitsSpec, Vec<f64>)> = vec![(BitsSpec::Float, float_scores.clone())];
    let mut ledger = EnergyLedger::new();
    for spec in &cfg.bits {
        let BitsSpec::Fixed(bits) = spec else {
            continue; // float is always the reference row
        };
        let prep = prepare_quantized(&model, *bits)?;
        let scores: Vec<f64> = eval_ws
            .iter()
            .map(|(w, _)| anomaly_score_prepared(&prep, w, IntBackend::Pmac(cfg.pmac), &mut ledger))
            .collect::<Result<_, _>>()
            .with_context(|| format!("PMAC inference at {bits} bits"))?;
        rows.push(AnomalyRow {
            resolution: *spec,
            auc: auc(&scores, &labels),
            corr_with_float: pearson(&scores, &float_scores),
        });
        all_scores.push((*spec, scores));
    }

    // Score series CSV, summary CSV, plot script.
    let mut scores_csv =
        String::from("# phasemac anomaly scores v1\nresolution,window,label,score\n");
    for (spec, scores) in &all_scores {
        let label = spec.label();
        for (i, s) in scores.iter().enumerate() {
            let _ = writeln!(
                scores_csv,
                "{label},{i},{},{s:.9e}",
                if labels[i] { 1 } else { 0 }
            );
        }
    }
    atomic_write_str(&cfg.out_dir.join("anomaly_scores.csv"), &scores_csv)?;

    let mut summary =
        String::from("# phasemac anomaly summary v1\nresolution,auc,corr_with_float\n");
    for row in &rows {
        let _ = writeln!(
            summary,
            "{},{:.6},{:.6}",
            row.resolution.label(),
            row.auc,
            row.corr_with_float
        );
    }
    atomic_write_str(&cfg.out_dir.join("anomaly_summary.csv"), &summary)?;

    let res_labels: Vec<String> = all_scores.iter().map(|(s, _)| s.label()).collect();
    atomic_write_str(
        &cfg.out_dir.join("anomaly_scores.gp"),
        &anomaly_scores_gnuplot("anomaly_scores.csv", &res_labels),
    )?;

    for row in &rows {
        println!(
            "anomaly: {:>5}  auc {:.4}  corr(float) {:.4}",
            row.resolution.label(),
            row.auc,
            row.corr_with_float
        );
    }
    println!(
        "anomaly: {n_windows} windows ({n_anomalous} anomalous), p99 threshold {threshold:.5}, {float_alerts} float alerts"
    );

    Ok(AnomalyOutcome {
        rows,
        float_auc,
        n_windows,
        n_anomalous,
        threshold,
        float_alerts,
        ledger,
    })
}
