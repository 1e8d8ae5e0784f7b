//! Batch-size sweep and efficiency reporting over the calibrated model.

use anyhow::Result;
use phasemac_core::array::{Int8Matrix, PmacArray};
use phasemac_core::energy::{
    batch_ratio_sweep, dmac_ratio_at, efficiency_report, ideal_ledger_at, memory_compute_ratio,
    metrics_csv, sweep_csv,
};
use phasemac_core::SplitMix64;

use crate::config::ExperimentConfig;
use crate::outputs::{atomic_write_str, batch_sweep_gnuplot};

/// One efficiency row at a mean-operand-activity point.
#[derive(Debug, Clone)]
pub struct ActivityRow {
    /// Activity as a percent label ("3", "10", "100").
    pub label: String,
    pub energy_per_mac_fj: f64,
    pub tops_per_watt: f64,
    pub microwatts: f64,
    /// Ledger-derived DMAC comparison.
    pub vs_dmac: f64,
    /// Closed-form DMAC comparison straight from the activity model.
    pub vs_dmac_exact: f64,
}

#[derive(Debug, Clone)]
pub struct EnergyOutcome {
    pub sweep: Vec<(u32, f64)>,
    /// First integer batch size where memory energy drops below compute.
    pub crossover_batch: u32,
    pub activity_rows: Vec<ActivityRow>,
    /// Simulated broadcast accounting: weight reads for one batched matmul
    /// vs the same work done column by column.
    pub sim_weight_reads_batched: u64,
    pub sim_weight_reads_unbatched: u64,
}

/// Drive a small batched product through the actual hardware model to show
/// the broadcast accounting the curve is built on.
fn simulate_broadcast(cfg: &ExperimentConfig, batch: usize) -> Result<(u64, u64)> {
    let mut rng = SplitMix64::new(cfg.seed).fork(0xb40adca57);
    let m = 16;
    let n = 25;
    let rows: Vec<Vec<i8>> = (0..m)
        .map(|_| (0..n).map(|_| rng.next_i8()).collect())
        .collect();
    let w = Int8Matrix::from_rows(&rows)?;
    let xs: Vec<i8> = (0..n * batch).map(|_| rng.next_i8()).collect();
    let x = Int8Matrix::from_flat(n, batch, xs)?;

    let mut batched = PmacArray::new(cfg.pmac);
    batched.batched_matmul(&w, &x)?;

    let mut unbatched = PmacArray::new(cfg.pmac);
    for j in 0..batch {
        unbatched.matvec(&w, &x.col(j))?;
    }
    Ok((
        batched.ledger().weight_reads,
        unbatched.ledger().weight_reads,
    ))
}

pub fn run_energy(cfg: &ExperimentConfig) -> Result<EnergyOutcome> {
    let p = &cfg.energy;
    let sweep = batch_ratio_sweep(&cfg.batches, p)?;

    let crossover_batch = (1u32..=1_000_000)
        .find(|&b| memory_compute_ratio(b, p).expect("b >= 1") < 1.0)
        .unwrap_or(0);

    let macs = 1_000_000u64;
    let mut activity_rows = Vec::new();
    for (label, activity) in [("3", 0.03), ("10", 0.10), ("100", 1.0)] {
        let ledger = ideal_ledger_at(activity, macs);
        let rep = efficiency_report(&ledger, macs, p)?;
        activity_rows.push(ActivityRow {
            label: label.to_string(),
            energy_per_mac_fj: rep.energy_per_mac_fj,
            tops_per_watt: rep.tops_per_watt,
            microwatts: rep.microwatts_at_rate,
            vs_dmac: rep.vs_dmac_ratio,
            vs_dmac_exact: dmac_ratio_at(activity, p)?,
        });
    }

    // Files: the sweep CSV, the metric triples, and the plot script.
    atomic_write_str(&cfg.out_dir.join("batch_sweep.csv"), &sweep_csv(&sweep))?;

    let mut rows: Vec<(String, f64, String)> = Vec::new();
    for r in &activity_rows {
        let a = &r.label;
        rows.push((
            format!("energy_per_mac_a{a}"),
            r.energy_per_mac_fj,
            "fJ".into(),
        ));
        rows.push((
            format!("tops_per_watt_a{a}"),
            r.tops_per_watt,
            "TOPS/W".into(),
        ));
        rows.push((format!("power_a{a}"), r.microwatts, "uW".into()));
        rows.push((format!("vs_dmac_a{a}"), r.vs_dmac_exact, "ratio".into()));
    }
    rows.push((
        "crossover_batch".into(),
        crossover_batch as f64,
        "batch".into(),
    ));
    rows.push((
        "ratio_batch_1".into(),
        memory_compute_ratio(1, p)?,
        "ratio".into(),
    ));
    rows.push((
        "ratio_batch_64".into(),
        memory_compute_ratio(64, p)?,
        "ratio".into(),
    ));
    let (sim_batched, sim_unbatched) = simulate_broadcast(cfg, 64)?;
    rows.push((
        "sim_weight_reads_batch64".into(),
        sim_batched as f64,
        "reads".into(),
    ));
    rows.push((
        "sim_weight_reads_64x_batch1".into(),
        sim_unbatched as f64,
        "reads".into(),
    ));
    atomic_write_str(&cfg.out_dir.join("efficiency.csv"), &metrics_csv(&rows))?;

    atomic_write_str(
        &cfg.out_dir.join("batch_sweep.gp"),
        &batch_sweep_gnuplot("batch_sweep.csv"),
    )?;

    println!(
        "energy: {} batch rows, crossover at batch {}, vs-DMAC at 10% = {:.3}, \
         simulated weight reads {}x amortized at batch 64",
        sweep.len(),
        crossover_batch,
        activity_rows[1].vs_dmac_exact,
        sim_unbatched / sim_batched.max(1)
    );
    Ok(EnergyOutcome {
        sweep,
        crossover_batch,
        activity_rows,
        sim_weight_reads_batched: sim_batched,
        sim_weight_reads_unbatched: sim_unbatched,
    })
}
