//! Synthetic data: a vibration-like sensor series with labeled anomaly
//! spans, and a procedural digit corpus for classification runs without the
//! real dataset on disk.

use phasemac_core::SplitMix64;
use thiserror::Error;

use crate::idx::IdxImages;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("series length {n} too short, need at least {min}")]
    TooShort { n: usize, min: usize },
    #[error("anomaly spans ({spans} x {span_len}) do not fit the anomalous half of {n} samples")]
    SpansDontFit {
        spans: usize,
        span_len: usize,
        n: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnomalyKind {
    /// Oscillation frequencies scale up inside a span (equal signal power:
    /// the hard case, invisible to an energy detector).
    FrequencyShift,
    /// Amplitudes scale up inside a span.
    AmplitudeShift,
}

#[derive(Debug, Clone)]
pub struct SynthConfig {
    /// Total samples; must cover at least two 800-sample windows.
    pub n: usize,
    /// Component frequencies in cycles per sample.
    pub base_freqs: Vec<f64>,
    /// Gaussian noise standard deviation.
    pub noise_sigma: f64,
    pub anomaly_kind: AnomalyKind,
    /// Number of injected spans (0 for a clean series).
    pub spans: usize,
    /// Length of each span in samples.
    pub span_len: usize,
    /// Scale applied to frequency or amplitude inside a span.
    pub shift: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n: 8000,
            base_freqs: vec![0.0137, 0.029, 0.0071],
            noise_sigma: 0.05,
            anomaly_kind: AnomalyKind::FrequencyShift,
            spans: 3,
            span_len: 800,
            shift: 1.5,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticSeries {
    pub samples: Vec<f64>,
    /// Half-open [start, end) index ranges the anomaly was injected into.
    pub anomaly_spans: Vec<(usize, usize)>,
}

impl SyntheticSeries {
    pub fn overlaps_anomaly(&self, start: usize, end: usize) -> bool {
        self.anomaly_spans
            .iter()
            .any(|&(s, e)| start < e && s < end)
    }
}

/// Standard-normal draw via Box-Muller.
fn gaussian(rng: &mut SplitMix64) -> f64 {
    let u1 = (rng.next_f64()).max(1e-300);
    let u2 = rng.next_f64();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Sum-of-sinusoids plus Gaussian noise, with anomalies injected over
/// evenly spaced spans in the second half of the series. Oscillator phases
/// accumulate sample by sample, so a frequency shift stays continuous.
pub fn gen_synthetic(cfg: &SynthConfig) -> Result<SyntheticSeries, SynthError> {
    let min = 2 * 800;
    if cfg.n < min {
        return Err(SynthError::TooShort { n: cfg.n, min });
    }
    // Spans live in [n/2, n), evenly spaced, non-overlapping.
    let mut spans = Vec::with_capacity(cfg.spans);
    let region = cfg.n - cfg.n / 2;
    if let Some(stride) = region.checked_div(cfg.spans) {
        if cfg.span_len == 0 || cfg.span_len > stride {
            return Err(SynthError::SpansDontFit {
                spans: cfg.spans,
                span_len: cfg.span_len,
                n: cfg.n,
            });
        }
        for k in 0..cfg.spans {
            let start = cfg.n / 2 + k * stride + (stride - cfg.span_len) / 2;
            spans.push((start, start + cfg.span_len));
        }
    }

    let mut rng = SplitMix64::new(cfg.seed).fork(0x5e71e5);
    let n_comp = cfg.base_freqs.len().max(1);
    // Deterministic per-component amplitude and initial phase.
    let amps: Vec<f64> = (0..n_comp).map(|_| rng.uniform(0.6, 1.0)).collect();
    let mut phases: Vec<f64> = (0..n_comp)
        .map(|_| rng.uniform(0.0, 2.0 * std::f64::consts::PI))
        .collect();

    let mut samples = Vec::with_capacity(cfg.n);
    for t in 0..cfg.n {
        let in_span = spans.iter().any(|&(s, e)| t >= s && t < e);
        let (freq_scale, amp_scale) = match (cfg.anomaly_kind, in_span) {
            (_, false) => (1.0, 1.0),
            (AnomalyKind::FrequencyShift, true) => (cfg.shift, 1.0),
            (AnomalyKind::AmplitudeShift, true) => (1.0, cfg.shift),
        };
        let mut v = 0.0;
        for (k, phase) in phases.iter_mut().enumerate() {
            let f = cfg.base_freqs.get(k).copied().unwrap_or(0.01);
            *phase += 2.0 * std::f64::consts::PI * f * freq_scale;
            v += amps[k] * amp_scale * phase.sin();
        }
        if cfg.noise_sigma > 0.0 {
            v += cfg.noise_sigma * gaussian(&mut rng);
        }
        samples.push(v);
    }
    Ok(SyntheticSeries {
        samples,
        anomaly_spans: spans,
    })
}

/// Extract consecutive prediction windows of 2H samples at the given
/// stride, with a label marking overlap with any anomaly span.
pub fn windows(series: &SyntheticSeries, h: usize, stride: usize) -> Vec<(Vec<f64>, bool)> {
    let mut out = Vec::new();
    let mut start = 0;
    while start + 2 * h <= series.samples.len() {
        let w = series.samples[start..start + 2 * h].to_vec();
        let label = series.overlaps_anomaly(start, start + 2 * h);
        out.push((w, label));
        start += stride;
    }
    out
}

/// 8x8 pixel-font glyphs for digits 0-9 (row bytes, MSB = leftmost pixel).
const DIGIT_FONT: [[u8; 8]; 10] = [
    [0x7C, 0xC6, 0xCE, 0xDE, 0xF6, 0xE6, 0x7C, 0x00],
    [0x30, 0x70, 0x30, 0x30, 0x30, 0x30, 0xFC, 0x00],
    [0x78, 0xCC, 0x0C, 0x38, 0x60, 0xCC, 0xFC, 0x00],
    [0x78, 0xCC, 0x0C, 0x38, 0x0C, 0xCC, 0x78, 0x00],
    [0x1C, 0x3C, 0x6C, 0xCC, 0xFE, 0x0C, 0x1E, 0x00],
    [0xFC, 0xC0, 0xF8, 0x0C, 0x0C, 0xCC, 0x78, 0x00],
    [0x38, 0x60, 0xC0, 0xF8, 0xCC, 0xCC, 0x78, 0x00],
    [0xFC, 0xCC, 0x0C, 0x18, 0x30, 0x30, 0x30, 0x00],
    [0x78, 0xCC, 0xCC, 0x78, 0xCC, 0xCC, 0x78, 0x00],
    [0x78, 0xCC, 0xCC, 0x7C, 0x0C, 0x18, 0x70, 0x00],
];

/// Procedural 28x28 digit corpus: jittered, intensity-varied, noisy
/// renderings of a pixel font. A stand-in distribution for classification
/// experiments when the real dataset is not on disk.
pub fn gen_digit_corpus(count: usize, seed: u64) -> (IdxImages, Vec<u8>) {
    let mut rng = SplitMix64::new(seed).fork(0xd161);
    let mut pixels = vec![0u8; count * 28 * 28];
    let mut labels = vec![0u8; count];
    for i in 0..count {
        let class = (rng.below(10)) as u8;
        labels[i] = class;
        let glyph = &DIGIT_FONT[class as usize];
        // 8x8 glyph doubled to 16x16, placed with +/-4 pixel jitter.
        let dx = 2 + rng.below(9) as usize; // 2..=10
        let dy = 2 + rng.below(9) as usize;
        let brightness = 160.0 + rng.next_f64() * 95.0;
        let img = &mut pixels[i * 784..(i + 1) * 784];
        for (gy, row) in glyph.iter().enumerate() {
            for gx in 0..8 {
                if row >> (7 - gx) & 1 == 1 {
                    for sy in 0..2 {
                        for sx in 0..2 {
                            // Occasional stroke dropout keeps the task from
                            // being pixel-perfect separable.
                            if rng.next_f64() < 0.12 {
                                continue;
                            }
                            let y = dy + gy * 2 + sy;
                            let x = dx + gx * 2 + sx;
                            let v = brightness * (0.7 + 0.3 * rng.next_f64());
                            img[y * 28 + x] = v as u8;
                        }
                    }
                }
            }
        }
        // Background speckle.
        for p in img.iter_mut() {
            let noise = rng.below(40) as i32 - 14;
            *p = (*p as i32 + noise).clamp(0, 255) as u8;
        }
    }
    (
        IdxImages {
            count,
            rows: 28,
            cols: 28,
            pixels,
        },
        labels,
    )
}
