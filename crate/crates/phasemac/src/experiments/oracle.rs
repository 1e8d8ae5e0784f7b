//! Randomized equivalence check: the phase-domain pipeline against the
//! integer dot-product oracle.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use anyhow::Result;
use phasemac_core::array::max_safe_dot_length;
use phasemac_core::pmac::{ref_dot, PmacConfig, PmacUnit};
use phasemac_core::SplitMix64;

use crate::config::ExperimentConfig;
use crate::outputs::atomic_write_str;

#[derive(Debug, Clone)]
pub struct OracleFailure {
    pub trial: u64,
    pub d: Vec<i8>,
    pub w: Vec<i8>,
    pub expected: i64,
    pub actual: i64,
}

impl std::fmt::Display for OracleFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let head = 16.min(self.d.len());
        write!(
            f,
            "trial {}: len {} d[..{head}]={:?} w[..{head}]={:?} expected {} got {}",
            self.trial,
            self.d.len(),
            &self.d[..head],
            &self.w[..head],
            self.expected,
            self.actual
        )
    }
}

#[derive(Debug, Clone)]
pub struct OracleOutcome {
    pub trials: u64,
    pub macs: u64,
    pub mismatches: u64,
    pub first_failure: Option<OracleFailure>,
    pub elapsed: Duration,
}

impl OracleOutcome {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

/// Drive `pipeline` over randomized vectors and compare against `ref_dot`.
///
/// Every 100k-th trial swaps in a boundary case: a vector right at the
/// saturation-safe length limit with full-scale magnitudes and mixed signs.
pub fn run_trials<F>(trials: u64, seed: u64, pmac_cfg: PmacConfig, mut pipeline: F) -> OracleOutcome
where
    F: FnMut(&[i8], &[i8]) -> i64,
{
    let started = Instant::now();
    let mut rng = SplitMix64::new(seed).fork(0x0bee_f00d);
    let max_safe = max_safe_dot_length(pmac_cfg.counter_bits, pmac_cfg.num_stages);
    let mut macs = 0u64;
    let mut mismatches = 0u64;
    let mut first_failure = None;
    let mut d: Vec<i8> = Vec::new();
    let mut w: Vec<i8> = Vec::new();

    for trial in 0..trials {
        d.clear();
        w.clear();
        let boundary = trial > 0 && trial % 100_000 == 0 && max_safe > 8;
        if boundary {
            // Full-scale magnitudes, random signs: stresses the counters
            // right below their capacity.
            let len = max_safe - (trial / 100_000 % 4) as usize;
            for _ in 0..len {
                d.push(if rng.next_u64() & 1 == 0 { 127 } else { -127 });
                w.push(if rng.next_u64() & 2 == 0 { 127 } else { -127 });
            }
        } else {
            let len = rng.below(48) as usize;
            for _ in 0..len {
                d.push(rng.next_i8());
                w.push(rng.next_i8());
            }
        }
        macs += d.len() as u64;
        let expected = ref_dot(&d, &w).expect("equal lengths");
        let actual = pipeline(&d, &w);
        if actual != expected {
            mismatches += 1;
            if first_failure.is_none() {
                first_failure = Some(OracleFailure {
                    trial,
                    d: d.clone(),
                    w: w.clone(),
                    expected,
                    actual,
                });
            }
        }
    }
    OracleOutcome {
        trials,
        macs,
        mismatches,
        first_failure,
        elapsed: started.elapsed(),
    }
}

/// The production pipeline: fold of `mac` on a fresh unit, then readout.
pub fn pmac_pipeline(cfg: PmacConfig) -> impl FnMut(&[i8], &[i8]) -> i64 {
    move |d: &[i8], w: &[i8]| {
        let mut unit = PmacUnit::new(cfg).expect("valid config");
        for (&a, &b) in d.iter().zip(w) {
            unit.mac(a, b).expect("trial vectors stay below capacity");
        }
        unit.readout(true)
    }
}

pub fn run_oracle(cfg: &ExperimentConfig) -> Result<OracleOutcome> {
    let trials = cfg.kv.get_u64("oracle_trials", 1_000_000)?;
    let outcome = run_trials(trials, cfg.seed, cfg.pmac, pmac_pipeline(cfg.pmac));

    let mut text = String::from("# phasemac oracle v1\n");
    let _ = writeln!(text, "trials={}", outcome.trials);
    let _ = writeln!(text, "macs={}", outcome.macs);
    let _ = writeln!(text, "mismatches={}", outcome.mismatches);
    let _ = writeln!(
        text,
        "verdict={}",
        if outcome.passed() { "PASS" } else { "FAIL" }
    );
    if let Some(fail) = &outcome.first_failure {
        let _ = writeln!(text, "first_counterexample={fail}");
    }
    atomic_write_str(&cfg.out_dir.join("oracle.txt"), &text)?;

    println!(
        "oracle: {} trials, {} MACs, {} mismatches in {:.2?}",
        outcome.trials, outcome.macs, outcome.mismatches, outcome.elapsed
    );
    if let Some(fail) = &outcome.first_failure {
        println!("first counterexample: {fail}");
    }
    Ok(outcome)
}
