//! Harness around the `rrs-lib` RV32IM model used as an independent
//! decode/execute oracle.

use approxrv::isa::{DecodedInstr, Format, Mnemonic, RegisterFile};
use approxrv::kernels::{encode_for, Operands};
use approxrv::machine::{Machine, MachineConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rrs_lib::instruction_executor::InstructionExecutor;
use rrs_lib::instruction_string_outputter::InstructionStringOutputter;
use rrs_lib::memories::VecMemory;
use rrs_lib::HartState;

pub const MEM_BYTES: u32 = 64 << 10;
pub const PC: u32 = 0x1000;
pub const DATA: u32 = 0x8000;

/// Renders a decoded instruction the way the reference disassembler does.
pub fn render(d: &DecodedInstr, pc: u32) -> String {
    use Mnemonic::*;
    let m = d.mnemonic.name();
    match d.mnemonic {
        Fence => "fence".to_string(),
        Lui => format!("lui x{}, 0x{:08x}", d.rd, d.imm),
        Auipc => format!("auipc x{}, 0x{:08x}", d.rd, pc.wrapping_add(d.imm as u32)),
        Jal => format!("jal x{}, 0x{:08x}", d.rd, pc.wrapping_add(d.imm as u32)),
        Jalr => format!("jalr x{}, 0x{:03x}(x{})", d.rd, d.imm, d.rs1),
        Lb | Lh | Lw | Lbu | Lhu => format!("{m} x{}, {}(x{})", d.rd, d.imm, d.rs1),
        Sb | Sh | Sw => format!("{m} x{}, {}(x{})", d.rs2, d.imm, d.rs1),
        _ => match d.format {
            Format::R => format!("{m} x{}, x{}, x{}", d.rd, d.rs1, d.rs2),
            Format::I => format!("{m} x{}, x{}, {}", d.rd, d.rs1, d.imm),
            Format::B => format!(
                "{m} x{}, x{}, 0x{:08x}",
                d.rs1,
                d.rs2,
                pc.wrapping_add(d.imm as u32)
            ),
            f => panic!("unexpected format {f:?} for {m}"),
        },
    }
}

pub fn reference_disasm(word: u32, pc: u32) -> Option<String> {
    rrs_lib::process_instruction(&mut InstructionStringOutputter { insn_pc: pc }, word)
}

/// Mnemonics the reference model implements (everything but CSR and system).
pub fn covered() -> Vec<Mnemonic> {
    use Mnemonic::*;
    Mnemonic::ALL
        .iter()
        .copied()
        .filter(|m| {
            !matches!(
                m,
                Ecall | Ebreak | Csrrw | Csrrs | Csrrc | Csrrwi | Csrrsi | Csrrci
            )
        })
        .collect()
}

pub fn access_size(m: Mnemonic) -> Option<u32> {
    use Mnemonic::*;
    match m {
        Lb | Lbu | Sb => Some(1),
        Lh | Lhu | Sh => Some(2),
        Lw | Sw => Some(4),
        _ => None,
    }
}

pub fn interesting(rng: &mut ChaCha8Rng) -> u32 {
    const EDGES: [u32; 8] = [
        0,
        1,
        0xFFFF_FFFF,
        0x8000_0000,
        0x7FFF_FFFF,
        2,
        0xFFFF_FFFE,
        0x100,
    ];
    if rng.gen_bool(0.3) {
        EDGES[rng.gen_range(0..EDGES.len())]
    } else if rng.gen_bool(0.3) {
        rng.gen_range(0..256)
    } else {
        rng.gen()
    }
}

/// Random operands valid for `m`; immediates keep control transfers and
/// memory accesses aligned and inside memory.
pub fn random_operands(m: Mnemonic, rng: &mut ChaCha8Rng) -> Operands {
    use Mnemonic::*;
    let mut ops = Operands {
        rd: rng.gen_range(0..32),
        rs1: rng.gen_range(0..32),
        rs2: rng.gen_range(0..32),
        imm: rng.gen_range(-2048..2048),
    };
    match m {
        Slli | Srli | Srai => ops.imm = rng.gen_range(0..32),
        Lui | Auipc => ops.imm = rng.gen_range(0..1 << 20),
        Beq | Bne | Blt | Bge | Bltu | Bgeu => ops.imm = rng.gen_range(-256..256) * 4,
        Jal => ops.imm = rng.gen_range(-1000..1000) * 4,
        _ => {}
    }
    if let Some(size) = access_size(m) {
        ops.imm -= ops.imm.rem_euclid(size as i64);
        // The base register must not be x0, since its value is fixed up below.
        ops.rs1 = rng.gen_range(1..32);
    }
    if m == Jalr {
        ops.rs1 = rng.gen_range(1..32);
        ops.imm -= ops.imm.rem_euclid(4);
    }
    ops
}

pub struct Case {
    pub word: u32,
    pub regs: [u32; 32],
}

pub fn make_case(word: u32, d: &DecodedInstr, rng: &mut ChaCha8Rng, mut regs: [u32; 32]) -> Case {
    regs[0] = 0;
    if let Some(size) = access_size(d.mnemonic) {
        let offset = rng.gen_range(0..1024) * size;
        regs[d.rs1 as usize] = (DATA + offset).wrapping_sub(d.imm as u32);
    }
    if d.mnemonic == Mnemonic::Jalr {
        regs[d.rs1 as usize] = (PC + 4 * rng.gen_range(0..512)).wrapping_sub(d.imm as u32);
    }
    Case { word, regs }
}

pub fn initial_memory(word: u32) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(word as u64);
    let mut mem = vec![0u32; (MEM_BYTES / 4) as usize];
    for w in &mut mem[(DATA / 4) as usize..(DATA / 4 + 1024) as usize] {
        *w = rng.gen();
    }
    mem[(PC / 4) as usize] = word;
    mem
}

pub fn check_case(case: &Case) {
    let mem_words = initial_memory(case.word);

    let mut hart = HartState::new();
    hart.pc = PC;
    hart.registers = case.regs;
    let mut ref_mem = VecMemory::new(mem_words.clone());
    InstructionExecutor {
        hart_state: &mut hart,
        mem: &mut ref_mem,
    }
    .step()
    .unwrap_or_else(|e| panic!("reference rejected 0x{:08x}: {e:?}", case.word));

    let cfg = MachineConfig {
        mem_size: MEM_BYTES,
        registers: RegisterFile::Rv32I,
        ..MachineConfig::default()
    };
    let image: Vec<u8> = mem_words.iter().flat_map(|w| w.to_le_bytes()).collect();
    let mut m = Machine::load_program(cfg, &image).unwrap();
    m.set_pc(PC);
    for (i, v) in case.regs.iter().enumerate().skip(1) {
        m.set_reg(i, *v);
    }
    m.step()
        .unwrap_or_else(|e| panic!("simulator faulted on 0x{:08x}: {e}", case.word));

    let what = reference_disasm(case.word, PC).unwrap();
    assert_eq!(m.pc(), hart.pc, "pc after {what}");
    for r in 0..32 {
        assert_eq!(
            m.reg(r),
            hart.registers[r],
            "x{r} after {what} from {:08x?}",
            case.regs
        );
    }
    for (i, w) in ref_mem
        .mem
        .iter()
        .enumerate()
        .skip((DATA / 4) as usize)
        .take(1024)
    {
        assert_eq!(
            m.read_word(i as u32 * 4),
            Some(*w),
            "memory word {i} after {what}"
        );
    }
}

/// Checks a register-register instruction on one operand pair.
pub fn run_rr(m: Mnemonic, a: u32, b: u32) {
    let word = encode_for(m, Operands::r(3, 1, 2), RegisterFile::Rv32I).unwrap();
    let mut regs = [0u32; 32];
    regs[1] = a;
    regs[2] = b;
    check_case(&Case { word, regs });
}
