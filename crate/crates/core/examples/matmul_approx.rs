//! Runs the integer matrix multiply accurately and with the approximate
//! multiplier, and reports the output error.

use approxrv::compare::{run_kernel, CsrPreset, RunOptions};
use approxrv::energy::CostModel;
use approxrv::error_analysis::app_output_error;
use approxrv::kernels::{KernelKind, KernelSpec};

fn main() {
    let spec = KernelSpec::new(KernelKind::MatmulInt, 7);
    let model = CostModel::builtin("tables_accurate.json").expect("shipped model");
    let run = |mulcsr| {
        let opts = RunOptions {
            csrs: CsrPreset::approximate_mul(mulcsr),
            ..RunOptions::default()
        };
        run_kernel(&spec, &model, &opts).expect("kernel runs")
    };
    let accurate = run(0);
    assert_eq!(accurate.outputs, spec.reference());
    for mulcsr in [0x007E_0003, 0x0055_0003, 0x0000_0003] {
        let approx = run(mulcsr);
        let err = app_output_error(&accurate.outputs, &approx.outputs).expect("same length");
        println!(
            "mulcsr 0x{mulcsr:08X}: ER {:5.1}%  MRED {:.4}%  max ED {}  (instret {} / {})",
            err.er * 100.0,
            err.mred * 100.0,
            err.max_ed,
            approx.summary.instret,
            accurate.summary.instret
        );
    }
    println!("first row accurate: {:?}", &accurate.outputs[..8]);
}
