//! Scalar metrics for the experiment suites.

/// Pearson correlation; 0 when either side has no variance.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "correlation needs equal lengths");
    let n = a.len();
    if n < 2 {
        return 0.0;
    }
    let nf = n as f64;
    let ma = a.iter().sum::<f64>() / nf;
    let mb = b.iter().sum::<f64>() / nf;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va <= 0.0 || vb <= 0.0 {
        return 0.0;
    }
    cov / (va.sqrt() * vb.sqrt())
}

/// ROC AUC via the rank statistic, with midranks for ties.
///
/// Returns 0.5 when either class is absent.
pub fn auc(scores: &[f64], labels: &[bool]) -> f64 {
    assert_eq!(scores.len(), labels.len(), "auc needs equal lengths");
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return 0.5;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| scores[i].partial_cmp(&scores[j]).expect("finite scores"));
    // Midrank assignment over tied runs.
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let midrank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            if labels[idx] {
                rank_sum_pos += midrank;
            }
        }
        i = j + 1;
    }
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    u / (n_pos as f64 * n_neg as f64)
}

/// Percentile by linear interpolation over the sorted sample, p in [0, 100].
pub fn percentile(xs: &[f64], p: f64) -> f64 {
    assert!(!xs.is_empty(), "percentile of an empty sample");
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let pos = (p.clamp(0.0, 100.0) / 100.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = pos - lo as f64;
        sorted[lo] * (1.0 - frac) + sorted[hi] * frac
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pearson_basics() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let up = [2.0, 4.0, 6.0, 8.0];
        let down = [8.0, 6.0, 4.0, 2.0];
        assert!((pearson(&a, &up) - 1.0).abs() < 1e-12);
        assert!((pearson(&a, &down) + 1.0).abs() < 1e-12);
        assert_eq!(pearson(&a, &[5.0, 5.0, 5.0, 5.0]), 0.0);
    }

    #[test]
    fn auc_separable_and_random() {
        // Perfectly separated: positives all score higher.
        let scores = [0.1, 0.2, 0.8, 0.9];
        let labels = [false, false, true, true];
        assert_eq!(auc(&scores, &labels), 1.0);
        // Inverted separation.
        let labels_inv = [true, true, false, false];
        assert_eq!(auc(&scores, &labels_inv), 0.0);
        // All tied scores: AUC 0.5 via midranks.
        let tied = [1.0, 1.0, 1.0, 1.0];
        assert_eq!(auc(&tied, &labels), 0.5);
        // Degenerate labels.
        assert_eq!(auc(&scores, &[false; 4]), 0.5);
    }

    #[test]
    fn auc_empirical_oracle_on_known_mixture() {
        // Brute-force pair counting oracle on a small mixed sample.
        let scores = [0.1, 0.4, 0.35, 0.8, 0.65, 0.2, 0.9, 0.5];
        let labels = [false, false, true, true, false, false, true, true];
        let mut wins = 0.0;
        let mut pairs = 0.0;
        for i in 0..scores.len() {
            for j in 0..scores.len() {
                if labels[i] && !labels[j] {
                    pairs += 1.0;
                    if scores[i] > scores[j] {
                        wins += 1.0;
                    } else if scores[i] == scores[j] {
                        wins += 0.5;
                    }
                }
            }
        }
        assert!((auc(&scores, &labels) - wins / pairs).abs() < 1e-12);
    }

    #[test]
    fn percentile_interpolates() {
        let xs = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(percentile(&xs, 0.0), 1.0);
        assert_eq!(percentile(&xs, 100.0), 4.0);
        assert_eq!(percentile(&xs, 50.0), 2.5);
        // P99 of a 0..999 ramp sits near the top.
        let ramp: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        let p99 = percentile(&ramp, 99.0);
        assert!((p99 - 989.01).abs() < 1e-9);
    }

    #[test]
    fn p99_threshold_gives_about_one_percent_fpr() {
        // Empirical percentile oracle: thresholding a normal sample at its
        // own P99 flags about 1% of it.
        let mut rng = phasemac_core::SplitMix64::new(77);
        let normal: Vec<f64> = (0..5000).map(|_| rng.next_f64()).collect();
        let thr = percentile(&normal, 99.0);
        let fp = normal.iter().filter(|&&s| s > thr).count();
        let rate = fp as f64 / normal.len() as f64;
        assert!(rate <= 0.012, "false positive rate {rate}");
        assert!(rate >= 0.005, "false positive rate {rate}");
    }
}
