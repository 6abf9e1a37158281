//! Switches the multiplier between circuits at run time with `csrrw`
//! and prints the instruction trace.

use approxrv::isa::csr::CSR_MULCSR;
use approxrv::isa::Mnemonic::*;
use approxrv::kernels::{Asm, Operands};
use approxrv::machine::{Machine, MachineConfig, MMIO_OUTPUT};

fn main() {
    let mut a = Asm::new();
    a.li(15, MMIO_OUTPUT as i32);
    a.li(10, 200);
    a.li(11, 123);
    // Accurate product.
    a.r(Mul, 12, 10, 11);
    a.sw(12, 0, 15);
    // Enable slot 1 (approximate) with every error line active.
    a.li(5, 0x0000_0003);
    a.emit(
        Csrrw,
        Operands {
            rd: 0,
            rs1: 5,
            rs2: 0,
            imm: CSR_MULCSR as i64,
        },
    );
    a.r(Mul, 12, 10, 11);
    a.sw(12, 0, 15);
    // Mask 0x7E: only the lowest controlled cell is approximate.
    a.li(5, 0x007E_0003);
    a.emit(
        Csrrw,
        Operands {
            rd: 0,
            rs1: 5,
            rs2: 0,
            imm: CSR_MULCSR as i64,
        },
    );
    a.r(Mul, 12, 10, 11);
    a.sw(12, 0, 15);
    a.sw(0, 4, 15);
    let words = a.finish().expect("program encodes");

    let image: Vec<u8> = words.iter().flat_map(|w| w.to_le_bytes()).collect();
    let mut m = Machine::load_program(MachineConfig::default(), &image).expect("image loads");
    let summary = m.run_with(10_000, |ev| println!("{}", ev.trace_line()));
    println!(
        "{:?} after {} instructions",
        summary.outcome, summary.instret
    );
    println!(
        "200 * 123: accurate {}, mask 0x00 {}, mask 0x7E {}",
        m.output()[0],
        m.output()[1],
        m.output()[2]
    );
}
