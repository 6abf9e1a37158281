//! Characterizes every multiplier error mask over all 8-bit operand pairs
//! and prints the most and least accurate configurations.

use approxrv::circuits::MulConfig;
use approxrv::error_analysis::{error_stats_8x8, nontrivial_mred_range, sweep_configs};

fn main() {
    let rows = sweep_configs();
    let mut by_mred = rows.clone();
    by_mred.sort_by(|a, b| a.mred.total_cmp(&b.mred));

    println!("mask  ER       MRED      max ED  power(uW)");
    for r in by_mred.iter().take(4).chain(by_mred.iter().rev().take(3)) {
        println!(
            "0x{:02X}  {:6.2}%  {:7.4}%  {:6}  {:.1}",
            r.config,
            r.er * 100.0,
            r.mred * 100.0,
            r.max_ed,
            r.power_estimate_uw
        );
    }
    if let Some((lo, hi)) = nontrivial_mred_range(&rows) {
        println!(
            "MRED across approximate masks: {:.3}% .. {:.3}%",
            lo * 100.0,
            hi * 100.0
        );
    }

    let one = error_stats_8x8(MulConfig::with_mask(0x7E));
    println!(
        "mask 0x7E: ER {:.2}%, MRED {:.3}%",
        one.er * 100.0,
        one.mred * 100.0
    );
}
