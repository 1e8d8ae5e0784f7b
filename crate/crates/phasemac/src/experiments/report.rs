//! Performance-comparison report: published figures side by side with the
//! live calibrated model and an arithmetic consistency check.

use std::fmt::Write as _;

use anyhow::Result;
use phasemac_core::energy::{
    efficiency_report, ideal_ledger_at, memory_compute_ratio, PUBLISHED_AREA_PER_BIT_UM2,
    PUBLISHED_MAC_AREA_UM2, PUBLISHED_MAC_RATE_HZ, PUBLISHED_POWER_UW, PUBLISHED_TOPS_PER_W,
    PUBLISHED_TOPS_PER_W_BIT,
};

use crate::config::ExperimentConfig;
use crate::outputs::atomic_write_str;

pub fn render_report(cfg: &ExperimentConfig) -> Result<String> {
    let p = &cfg.energy;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "== performance comparison =================================="
    );
    let _ = writeln!(s, "               this work        [2]          [3]");
    let _ = writeln!(s, "domain         phase            time         charge");
    let _ = writeln!(s, "process        28nm             65nm         40nm");
    let _ = writeln!(s, "resolution     8 b              1 b          3 b");
    let _ = writeln!(
        s,
        "mac area       {} um^2        13000 um^2*  12000 um^2",
        PUBLISHED_MAC_AREA_UM2 as u64
    );
    let _ = writeln!(
        s,
        "area per bit   {} um^2         13000 um^2*  4000 um^2",
        PUBLISHED_AREA_PER_BIT_UM2 as u64
    );
    let _ = writeln!(s, "application    MNIST/anomaly    MNIST        CIFAR10");
    let _ = writeln!(
        s,
        "power          {} uW (paper)   n.a.         228 uW**",
        PUBLISHED_POWER_UW as u64
    );
    let _ = writeln!(
        s,
        "mac rate       {} MHz (paper)  n.a.         1 GHz",
        (PUBLISHED_MAC_RATE_HZ / 1e6) as u64
    );
    let _ = writeln!(
        s,
        "efficiency     {} TOPS/W (paper) 77 TOPS/W   8.77 TOPS/W",
        PUBLISHED_TOPS_PER_W as u64
    );
    let _ = writeln!(
        s,
        "eff. per bit   {} TOPS/W*bit (paper) 77      26.3",
        PUBLISHED_TOPS_PER_W_BIT as u64
    );
    let _ = writeln!(s, "  * assuming 256 MAC ops     ** includes memory power");
    let _ = writeln!(
        s,
        "  all [2]/[3] figures and rows marked (paper) are published constants"
    );
    let _ = writeln!(s);

    let _ = writeln!(
        s,
        "== arithmetic consistency check ============================"
    );
    let derived = p.ops_per_mac as f64 * PUBLISHED_MAC_RATE_HZ / (PUBLISHED_POWER_UW * 1e-6) / 1e12;
    let _ = writeln!(
        s,
        "paper:   {} TOPS/W at {} uW, {} MHz, {} um^2 MAC area",
        PUBLISHED_TOPS_PER_W as u64,
        PUBLISHED_POWER_UW as u64,
        (PUBLISHED_MAC_RATE_HZ / 1e6) as u64,
        PUBLISHED_MAC_AREA_UM2 as u64
    );
    let _ = writeln!(
        s,
        "derived: {derived:.2} TOPS/W = {} OPS/MAC x {} MHz / {} uW",
        p.ops_per_mac,
        (PUBLISHED_MAC_RATE_HZ / 1e6) as u64,
        PUBLISHED_POWER_UW as u64
    );
    let _ = writeln!(
        s,
        "note:    the published efficiency and the power/rate arithmetic do\n\
         not meet under a 1- or 2-OPS/MAC convention alone; both figures are\n\
         reported, neither is adjusted."
    );
    let _ = writeln!(s);

    let _ = writeln!(
        s,
        "== live calibrated model ==================================="
    );
    let macs = 1_000_000u64;
    for (label, activity) in [("3%", 0.03), ("10%", 0.10), ("100%", 1.0)] {
        let rep = efficiency_report(&ideal_ledger_at(activity, macs), macs, p)?;
        let _ = writeln!(
            s,
            "activity {label:>4}: {:.2} fJ/MAC, {:.2} TOPS/W, {:.1} uW, vs-DMAC {:.2}x, {:.1} transitions/op",
            rep.energy_per_mac_fj,
            rep.tops_per_watt,
            rep.microwatts_at_rate,
            rep.vs_dmac_ratio,
            rep.transitions_per_op
        );
    }
    let crossover = (1u32..=1_000_000)
        .find(|&b| memory_compute_ratio(b, p).expect("b >= 1") < 1.0)
        .unwrap_or(0);
    let _ = writeln!(
        s,
        "batching: memory/compute ratio {:.3} at batch 1, {:.3} at batch 64, crossover at batch {crossover}",
        memory_compute_ratio(1, p)?,
        memory_compute_ratio(64, p)?
    );
    let _ = writeln!(
        s,
        "overheads (paper): 64x batching costs ~5% memory area and latency;\n\
         MAC area/speed overhead vs DMAC around 20%; replacing the DMAC cuts\n\
         ~66% of DLA power at DMAC-dominated operating points; normalized to\n\
         resolution, 48% higher efficiency and 26.6x smaller area than\n\
         conventional analog MACs."
    );
    Ok(s)
}

pub fn run_report(cfg: &ExperimentConfig) -> Result<String> {
    let text = render_report(cfg)?;
    atomic_write_str(&cfg.out_dir.join("report.txt"), &text)?;
    print!("{text}");
    Ok(text)
}
