//! Compares all kernels under the shipped per-application power tables.

use approxrv::compare::{compare, CompareConfig};
use approxrv::kernels::{KernelKind, KernelSpec};

fn main() {
    let kernels = KernelKind::ALL
        .iter()
        .map(|&k| KernelSpec::new(k, 0))
        .collect();
    let summary = compare(&CompareConfig::with_shipped_tables(kernels)).expect("all kernels run");
    println!(
        "{:<11} {:>9} {:>9} {:>7} {:>7} {:>7}",
        "app", "pJ/i acc", "pJ/i apx", "total%", "EXE%", "MUL%"
    );
    for a in &summary.apps {
        println!(
            "{:<11} {:>9.3} {:>9.3} {:>7.2} {:>7.2} {:>7.2}",
            a.app,
            a.accurate.energy.pj_per_instr,
            a.approximate.energy.pj_per_instr,
            a.total_improvement,
            a.exe_improvement,
            a.mul_improvement
        );
    }
    let s = summary.averages;
    println!(
        "{:<11} {:>9} {:>9} {:>7.2} {:>7.2} {:>7.2}",
        "average", "", "", s.avg_total_improvement, s.avg_exe_improvement, s.avg_mul_improvement
    );
}
