//! Shows the effect of switching off unselected circuit slots under the
//! event-based energy model.

use approxrv::compare::{run_kernel, CsrPreset, RunOptions};
use approxrv::energy::{CostModel, ModelKind};
use approxrv::isa::ExeUnit;
use approxrv::kernels::{KernelKind, KernelSpec};

fn main() {
    let gated = CostModel::builtin("event_default.json").expect("shipped model");
    let mut ungated = gated.clone();
    if let ModelKind::Event { gating, .. } = &mut ungated.kind {
        *gating = false;
    }
    let opts = RunOptions {
        csrs: CsrPreset::approximate_mul(0x007E_0003),
        ..RunOptions::default()
    };
    let spec = KernelSpec::new(KernelKind::MatmulInt, 0);
    for (name, model) in [("gated", &gated), ("ungated", &ungated)] {
        let r = run_kernel(&spec, model, &opts).expect("kernel runs");
        println!(
            "{name:>8}: {:.1} pJ total, {:.3} pJ/instr, accurate MUL slot {:.1} pJ",
            r.energy.total_energy_pj,
            r.energy.pj_per_instr,
            r.energy.slot_energy(ExeUnit::Mul, 0)
        );
    }
}
