//! Memory, program loading, the pipeline timing model and the run loop.
//!
//! The pipeline is modeled functionally: every instruction retires in one
//! cycle plus a fixed extra latency for its class. Two MMIO words sit outside
//! RAM: a word store to [`MMIO_OUTPUT`] appends to the output channel and a
//! word store to [`MMIO_HALT`] halts with the stored value as exit code.

mod ihex;

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::hash::{Hash, Hasher};

use serde::Serialize;
use thiserror::Error;

pub use ihex::{parse_ihex, write_ihex, Segment};

use crate::isa::{
    address_gen, decode_for, execute_arith, CircuitSlotTable, CsrFile, CsrOp, DecodedInstr,
    ExeUnit, IsaError, Mnemonic, OpClass, RegisterFile, UnitSnapshot,
};

pub const MMIO_OUTPUT: u32 = 0xF000_0000;
pub const MMIO_HALT: u32 = 0xF000_0004;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Latencies {
    pub mul_cycles: u32,
    pub div_cycles: u32,
    pub branch_penalty: u32,
}

impl Default for Latencies {
    fn default() -> Self {
        Latencies {
            mul_cycles: 4,
            div_cycles: 32,
            branch_penalty: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MachineConfig {
    pub mem_size: u32,
    pub base: u32,
    pub clock_hz: f64,
    pub latencies: Latencies,
    pub max_cycles: u64,
    pub registers: RegisterFile,
    pub slots: CircuitSlotTable,
}

impl Default for MachineConfig {
    fn default() -> Self {
        MachineConfig {
            mem_size: 4 << 20,
            base: 0,
            clock_hz: 5.0e8,
            latencies: Latencies::default(),
            max_cycles: 100_000_000,
            registers: RegisterFile::Rv32E,
            slots: CircuitSlotTable::default(),
        }
    }
}

impl MachineConfig {
    pub fn validate(&self) -> Result<(), LoadError> {
        let bad = |why: &str| Err(LoadError::InvalidConfig(why.to_string()));
        if self.clock_hz.is_nan() || self.clock_hz <= 0.0 || !self.clock_hz.is_finite() {
            return bad("clock_hz must be positive");
        }
        let l = self.latencies;
        if l.mul_cycles == 0 || l.div_cycles == 0 || l.branch_penalty == 0 {
            return bad("latencies must be at least 1");
        }
        if self.mem_size == 0 || self.base.checked_add(self.mem_size - 1).is_none() {
            return bad("memory does not fit in the address space");
        }
        if self.base < MMIO_HALT + 4 && self.base + (self.mem_size - 1) >= MMIO_OUTPUT {
            return bad("memory overlaps the MMIO words");
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LoadError {
    #[error("program image is empty")]
    EmptyImage,
    #[error("image of {len} bytes at 0x{addr:08x} does not fit in memory")]
    ImageOverflow { addr: u32, len: usize },
    #[error("malformed Intel HEX at line {line}: {reason}")]
    MalformedHex { line: usize, reason: String },
    #[error("invalid machine configuration: {0}")]
    InvalidConfig(String),
}

/// Why a machine stopped abnormally.
#[derive(Clone, Debug, Error, PartialEq, Eq, Serialize)]
pub enum Fault {
    #[error("illegal instruction 0x{raw:08x} at pc 0x{pc:08x}")]
    IllegalInstruction { pc: u32, raw: u32 },
    #[error("configuration fault at pc 0x{pc:08x}: {reason}")]
    Configuration { pc: u32, reason: String },
    #[error("misaligned access to 0x{addr:08x} at pc 0x{pc:08x}")]
    Misaligned { pc: u32, addr: u32 },
    #[error("access to unmapped address 0x{addr:08x} at pc 0x{pc:08x}")]
    AccessFault { pc: u32, addr: u32 },
    #[error("{kind} at pc 0x{pc:08x}")]
    Trap { pc: u32, kind: String },
}

impl Fault {
    fn from_isa(pc: u32, raw: u32, err: IsaError) -> Self {
        match err {
            IsaError::IllegalInstruction(_)
            | IsaError::UnimplementedCsr(_)
            | IsaError::ReadOnlyCsr(_)
            | IsaError::NotArithmetic(_) => Fault::IllegalInstruction { pc, raw },
            e @ IsaError::EmptySlot { .. } => Fault::Configuration {
                pc,
                reason: e.to_string(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum HaltStatus {
    Running,
    Halted { exit_code: u32 },
    Faulted(Fault),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MemKind {
    Load,
    Store,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MemAccess {
    pub kind: MemKind,
    pub addr: u32,
    pub size: u8,
    pub value: u32,
}

/// One retired instruction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    /// Cycle counter after this instruction retired.
    pub cycle: u64,
    /// Cycles this instruction occupied.
    pub cycles: u32,
    pub pc: u32,
    pub next_pc: u32,
    pub raw: u32,
    pub mnemonic: Mnemonic,
    pub class: OpClass,
    pub reg_write: Option<(u8, u32)>,
    pub mem: Option<MemAccess>,
    /// Execution unit and slot the instruction ran on.
    pub active: Option<(ExeUnit, u8)>,
    pub approximate: bool,
    /// Routing of all three units at the time the instruction executed.
    pub units: UnitSnapshot,
    pub taken: bool,
}

impl TraceEvent {
    /// `cycle pc raw mnemonic [unit:slot]`
    pub fn trace_line(&self) -> String {
        let mut s = format!(
            "{} 0x{:08x} 0x{:08x} {}",
            self.cycle, self.pc, self.raw, self.mnemonic
        );
        if let Some((unit, slot)) = self.active {
            let _ = write!(s, " {unit}:{slot}");
        }
        s
    }
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.trace_line())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RunOutcome {
    Halted { exit_code: u32 },
    Faulted(Fault),
    Timeout,
}

impl RunOutcome {
    pub fn is_normal_halt(&self) -> bool {
        matches!(self, RunOutcome::Halted { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub instret: u64,
    pub cycle: u64,
    pub elapsed_s: f64,
    pub outcome: RunOutcome,
    /// Retired instructions per functional class.
    pub class_counts: BTreeMap<OpClass, u64>,
    /// Extra cycles beyond one per instruction, per class.
    pub extra_cycles: BTreeMap<OpClass, u64>,
}

/// Accumulates hashes of the retired PC sequence and of all memory addresses.
#[derive(Clone, Debug, Default)]
pub struct TraceDigest {
    pc: DefaultHasher,
    addr: DefaultHasher,
    pub instret: u64,
}

impl TraceDigest {
    pub fn observe(&mut self, ev: &TraceEvent) {
        ev.pc.hash(&mut self.pc);
        if let Some(m) = ev.mem {
            (m.addr, m.size, m.kind as u8).hash(&mut self.addr);
        }
        self.instret += 1;
    }

    pub fn pc_hash(&self) -> u64 {
        self.pc.finish()
    }

    pub fn addr_hash(&self) -> u64 {
        self.addr.finish()
    }
}

#[derive(Clone, Debug)]
pub struct Machine {
    config: MachineConfig,
    regs: [u32; 32],
    pc: u32,
    csrs: CsrFile,
    mem: Vec<u8>,
    halt: HaltStatus,
    output: Vec<u32>,
    class_counts: BTreeMap<OpClass, u64>,
    extra_cycles: BTreeMap<OpClass, u64>,
}

impl Machine {
    /// Creates a machine with zeroed memory and registers. Not runnable until
    /// a program is loaded.
    pub fn new(config: MachineConfig) -> Result<Self, LoadError> {
        config.validate()?;
        Ok(Machine {
            mem: vec![0; config.mem_size as usize],
            pc: config.base,
            config,
            regs: [0; 32],
            csrs: CsrFile::default(),
            halt: HaltStatus::Running,
            output: Vec::new(),
            class_counts: BTreeMap::new(),
            extra_cycles: BTreeMap::new(),
        })
    }

    /// Installs a little-endian raw image at `config.base` and resets state.
    pub fn load_program(config: MachineConfig, image: &[u8]) -> Result<Self, LoadError> {
        let base = config.base;
        Self::load_segments(
            config,
            &[Segment {
                addr: base,
                data: image.to_vec(),
            }],
        )
    }

    /// Installs an Intel HEX image (absolute addresses); execution starts at `config.base`.
    pub fn load_ihex(config: MachineConfig, text: &str) -> Result<Self, LoadError> {
        let segments = parse_ihex(text)?;
        Self::load_segments(config, &segments)
    }

    pub fn load_segments(config: MachineConfig, segments: &[Segment]) -> Result<Self, LoadError> {
        if segments.iter().all(|s| s.data.is_empty()) {
            return Err(LoadError::EmptyImage);
        }
        let mut m = Machine::new(config)?;
        for seg in segments {
            let offset = seg
                .addr
                .checked_sub(m.config.base)
                .map(|o| o as usize)
                .filter(|&o| o + seg.data.len() <= m.mem.len())
                .ok_or(LoadError::ImageOverflow {
                    addr: seg.addr,
                    len: seg.data.len(),
                })?;
            m.mem[offset..offset + seg.data.len()].copy_from_slice(&seg.data);
        }
        Ok(m)
    }

    pub fn config(&self) -> &MachineConfig {
        &self.config
    }

    pub fn pc(&self) -> u32 {
        self.pc
    }

    pub fn set_pc(&mut self, pc: u32) {
        self.pc = pc;
    }

    pub fn reg(&self, idx: usize) -> u32 {
        if idx == 0 {
            0
        } else {
            self.regs[idx]
        }
    }

    pub fn set_reg(&mut self, idx: usize, value: u32) {
        if idx != 0 {
            self.regs[idx] = value;
        }
    }

    pub fn csrs(&self) -> &CsrFile {
        &self.csrs
    }

    pub fn csrs_mut(&mut self) -> &mut CsrFile {
        &mut self.csrs
    }

    pub fn cycle(&self) -> u64 {
        self.csrs.cycle
    }

    pub fn instret(&self) -> u64 {
        self.csrs.instret
    }

    pub fn halt_status(&self) -> &HaltStatus {
        &self.halt
    }

    /// Words written to the output channel so far.
    pub fn output(&self) -> &[u32] {
        &self.output
    }

    pub fn elapsed_s(&self) -> f64 {
        self.csrs.cycle as f64 / self.config.clock_hz
    }

    fn ram_offset(&self, addr: u32, size: u32) -> Option<usize> {
        let off = addr.checked_sub(self.config.base)? as usize;
        (off + size as usize <= self.mem.len()).then_some(off)
    }

    fn read_mem(&self, pc: u32, addr: u32, size: u32) -> Result<u32, Fault> {
        if !addr.is_multiple_of(size) {
            return Err(Fault::Misaligned { pc, addr });
        }
        let off = self
            .ram_offset(addr, size)
            .ok_or(Fault::AccessFault { pc, addr })?;
        let mut buf = [0u8; 4];
        buf[..size as usize].copy_from_slice(&self.mem[off..off + size as usize]);
        Ok(u32::from_le_bytes(buf))
    }

    /// Reads a little-endian word from RAM.
    pub fn read_word(&self, addr: u32) -> Option<u32> {
        self.read_mem(self.pc, addr, 4).ok()
    }

    fn write_mem(&mut self, pc: u32, addr: u32, size: u32, value: u32) -> Result<(), Fault> {
        if !addr.is_multiple_of(size) {
            return Err(Fault::Misaligned { pc, addr });
        }
        if addr == MMIO_OUTPUT || addr == MMIO_HALT {
            if size != 4 {
                return Err(Fault::AccessFault { pc, addr });
            }
            if addr == MMIO_OUTPUT {
                self.output.push(value);
            } else {
                self.halt = HaltStatus::Halted { exit_code: value };
            }
            return Ok(());
        }
        let off = self
            .ram_offset(addr, size)
            .ok_or(Fault::AccessFault { pc, addr })?;
        self.mem[off..off + size as usize].copy_from_slice(&value.to_le_bytes()[..size as usize]);
        Ok(())
    }

    /// Executes one instruction. On error the machine is left faulted and the
    /// instruction does not retire.
    pub fn step(&mut self) -> Result<TraceEvent, Fault> {
        match &self.halt {
            HaltStatus::Running => {}
            HaltStatus::Halted { .. } => {
                return Err(Fault::Trap {
                    pc: self.pc,
                    kind: "step on halted machine".into(),
                })
            }
            HaltStatus::Faulted(f) => return Err(f.clone()),
        }
        match self.execute() {
            Ok(ev) => Ok(ev),
            Err(f) => {
                self.halt = HaltStatus::Faulted(f.clone());
                Err(f)
            }
        }
    }

    fn execute(&mut self) -> Result<TraceEvent, Fault> {
        use Mnemonic::*;
        let pc = self.pc;
        if !pc.is_multiple_of(4) {
            return Err(Fault::Misaligned { pc, addr: pc });
        }
        let raw = self.read_mem(pc, pc, 4)?;
        let instr: DecodedInstr = decode_for(raw, self.config.registers)
            .map_err(|_| Fault::IllegalInstruction { pc, raw })?;
        let units = self.config.slots.snapshot(&self.csrs);

        let rs1 = self.reg(instr.rs1 as usize);
        let rs2 = self.reg(instr.rs2 as usize);
        let fallthrough = pc.wrapping_add(4);
        let mut next_pc = fallthrough;
        let mut reg_write = None;
        let mut mem = None;
        let mut active = None;
        let mut approximate = false;
        let mut taken = false;

        match instr.mnemonic {
            Lui => reg_write = Some(instr.imm as u32),
            Auipc => reg_write = Some(address_gen(pc, instr.imm)),
            Jal => {
                reg_write = Some(fallthrough);
                next_pc = address_gen(pc, instr.imm);
                taken = true;
            }
            Jalr => {
                reg_write = Some(fallthrough);
                next_pc = address_gen(rs1, instr.imm) & !1;
                taken = true;
            }
            Beq | Bne | Blt | Bge | Bltu | Bgeu => {
                let cond = match instr.mnemonic {
                    Beq => rs1 == rs2,
                    Bne => rs1 != rs2,
                    Blt => (rs1 as i32) < (rs2 as i32),
                    Bge => (rs1 as i32) >= (rs2 as i32),
                    Bltu => rs1 < rs2,
                    _ => rs1 >= rs2,
                };
                if cond {
                    next_pc = address_gen(pc, instr.imm);
                    taken = true;
                }
            }
            Lb | Lh | Lw | Lbu | Lhu => {
                let addr = address_gen(rs1, instr.imm);
                let size = match instr.mnemonic {
                    Lb | Lbu => 1,
                    Lh | Lhu => 2,
                    _ => 4,
                };
                let v = self.read_mem(pc, addr, size)?;
                let v = match instr.mnemonic {
                    Lb => v as u8 as i8 as i32 as u32,
                    Lh => v as u16 as i16 as i32 as u32,
                    _ => v,
                };
                reg_write = Some(v);
                mem = Some(MemAccess {
                    kind: MemKind::Load,
                    addr,
                    size: size as u8,
                    value: v,
                });
            }
            Sb | Sh | Sw => {
                let addr = address_gen(rs1, instr.imm);
                let size = match instr.mnemonic {
                    Sb => 1,
                    Sh => 2,
                    _ => 4,
                };
                let value = match size {
                    1 => rs2 & 0xFF,
                    2 => rs2 & 0xFFFF,
                    _ => rs2,
                };
                self.write_mem(pc, addr, size, value)?;
                mem = Some(MemAccess {
                    kind: MemKind::Store,
                    addr,
                    size: size as u8,
                    value,
                });
            }
            Fence => {}
            Ecall | Ebreak => {
                return Err(Fault::Trap {
                    pc,
                    kind: instr.mnemonic.name().to_string(),
                })
            }
            Csrrw | Csrrs | Csrrc | Csrrwi | Csrrsi | Csrrci => {
                let (op, operand) = match instr.mnemonic {
                    Csrrw => (CsrOp::ReadWrite, rs1),
                    Csrrs => (CsrOp::ReadSet, rs1),
                    Csrrc => (CsrOp::ReadClear, rs1),
                    Csrrwi => (CsrOp::ReadWrite, instr.rs1 as u32),
                    Csrrsi => (CsrOp::ReadSet, instr.rs1 as u32),
                    _ => (CsrOp::ReadClear, instr.rs1 as u32),
                };
                let write = op == CsrOp::ReadWrite || instr.rs1 != 0;
                let old = self
                    .csrs
                    .access(op, instr.csr_addr(), operand, write)
                    .map_err(|e| Fault::from_isa(pc, raw, e))?;
                reg_write = Some(old);
            }
            _ => {
                let rhs = if instr.format == crate::isa::Format::R {
                    rs2
                } else {
                    instr.imm as u32
                };
                let r = execute_arith(&instr, rs1, rhs, &self.csrs, &self.config.slots)
                    .map_err(|e| Fault::from_isa(pc, raw, e))?;
                reg_write = Some(r.value);
                active = Some((r.unit, r.slot));
                approximate = r.approximate;
            }
        }

        let reg_write = match reg_write {
            Some(v) if instr.rd != 0 => {
                self.regs[instr.rd as usize] = v;
                Some((instr.rd, v))
            }
            _ => None,
        };

        let lat = self.config.latencies;
        let class = instr.class();
        let extra = match class {
            OpClass::Mul => lat.mul_cycles - 1,
            OpClass::Div => lat.div_cycles - 1,
            OpClass::Branch | OpClass::Jump if taken => lat.branch_penalty,
            _ => 0,
        };
        let cycles = 1 + extra;
        self.csrs.cycle += cycles as u64;
        self.csrs.instret += 1;
        *self.class_counts.entry(class).or_default() += 1;
        if extra > 0 {
            *self.extra_cycles.entry(class).or_default() += extra as u64;
        }
        self.pc = next_pc;

        Ok(TraceEvent {
            cycle: self.csrs.cycle,
            cycles,
            pc,
            next_pc,
            raw,
            mnemonic: instr.mnemonic,
            class,
            reg_write,
            mem,
            active,
            approximate,
            units,
            taken,
        })
    }

    /// Runs until halt, fault, or `max_cycles`.
    pub fn run(&mut self, max_cycles: u64) -> RunSummary {
        self.run_with(max_cycles, |_| {})
    }

    /// Like [`Machine::run`], handing every retired instruction to `observe`.
    pub fn run_with<F: FnMut(&TraceEvent)>(
        &mut self,
        max_cycles: u64,
        mut observe: F,
    ) -> RunSummary {
        let outcome = loop {
            match &self.halt {
                HaltStatus::Halted { exit_code } => {
                    break RunOutcome::Halted {
                        exit_code: *exit_code,
                    }
                }
                HaltStatus::Faulted(f) => break RunOutcome::Faulted(f.clone()),
                HaltStatus::Running => {}
            }
            if self.csrs.cycle >= max_cycles {
                break RunOutcome::Timeout;
            }
            if let Ok(ev) = self.step() {
                observe(&ev);
            }
        };
        self.summary(outcome)
    }

    fn summary(&self, outcome: RunOutcome) -> RunSummary {
        RunSummary {
            instret: self.csrs.instret,
            cycle: self.csrs.cycle,
            elapsed_s: self.elapsed_s(),
            outcome,
            class_counts: self.class_counts.clone(),
            extra_cycles: self.extra_cycles.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words_to_bytes(words: &[u32]) -> Vec<u8> {
        words.iter().flat_map(|w| w.to_le_bytes()).collect()
    }

    // lui x5, 0xF0000 ; addi x6, x0, 42 ; sw x6, 4(x5)
    const HALT_42: [u32; 3] = [0xF000_02B7, 0x02A0_0313, 0x0062_A223];

    fn run_words(words: &[u32]) -> (Machine, RunSummary) {
        let mut m =
            Machine::load_program(MachineConfig::default(), &words_to_bytes(words)).unwrap();
        let s = m.run(10_000);
        (m, s)
    }

    #[test]
    fn byte_order() {
        let m = Machine::load_program(MachineConfig::default(), &[0x73, 0x00, 0x10, 0x00]).unwrap();
        assert_eq!(m.read_word(0), Some(0x0010_0073));
        assert_eq!(
            crate::isa::decode(0x0010_0073).unwrap().mnemonic,
            Mnemonic::Ebreak
        );
    }

    #[test]
    fn empty_image_is_rejected() {
        assert_eq!(
            Machine::load_program(MachineConfig::default(), &[]).unwrap_err(),
            LoadError::EmptyImage
        );
    }

    #[test]
    fn oversized_image_is_rejected() {
        let cfg = MachineConfig {
            mem_size: 8,
            ..Default::default()
        };
        assert!(matches!(
            Machine::load_program(cfg, &[0; 12]),
            Err(LoadError::ImageOverflow { .. })
        ));
    }

    #[test]
    fn ihex_matches_binary() {
        let bin =
            Machine::load_program(MachineConfig::default(), &[0x33, 0x01, 0x31, 0x00]).unwrap();
        let hex = Machine::load_ihex(
            MachineConfig::default(),
            ":040000003301310097\n:00000001FF\n",
        )
        .unwrap();
        assert_eq!(bin.read_word(0), hex.read_word(0));
        assert_eq!(hex.read_word(0), Some(0x0031_0133));
    }

    #[test]
    fn mmio_halt() {
        let (m, s) = run_words(&HALT_42);
        assert_eq!(s.outcome, RunOutcome::Halted { exit_code: 42 });
        assert_eq!(s.instret, 3);
        assert_eq!(s.cycle, 3);
        assert_eq!(m.halt_status(), &HaltStatus::Halted { exit_code: 42 });
    }

    #[test]
    fn mul_costs_four_cycles() {
        // addi x10,x0,6 ; addi x11,x0,7 ; mul x10,x10,x11 ; then halt
        let mut prog = vec![0x0060_0513, 0x0070_0593, 0x02B5_0533];
        prog.extend_from_slice(&HALT_42);
        let mut m =
            Machine::load_program(MachineConfig::default(), &words_to_bytes(&prog)).unwrap();
        assert_eq!(m.step().unwrap().cycles, 1);
        assert_eq!(m.step().unwrap().cycles, 1);
        let ev = m.step().unwrap();
        assert_eq!((ev.cycles, ev.cycle), (4, 6));
        assert_eq!(m.reg(10), 42);
        assert_eq!(ev.trace_line(), "6 0x00000008 0x02b50533 mul MUL:0");
    }

    #[test]
    fn x0_is_hardwired() {
        // addi x0, x0, 5 ; then halt
        let mut prog = vec![0x0050_0013];
        prog.extend_from_slice(&HALT_42);
        let (m, _) = run_words(&prog);
        assert_eq!(m.reg(0), 0);
    }

    #[test]
    fn unmapped_read_faults() {
        // lui x5, 0x80000 ; lw x6, 0(x5)
        let (_, s) = run_words(&[0x8000_02B7, 0x0002_A303]);
        assert!(matches!(
            s.outcome,
            RunOutcome::Faulted(Fault::AccessFault {
                addr: 0x8000_0000,
                ..
            })
        ));
        assert_eq!(s.instret, 1);
    }

    #[test]
    fn misaligned_word_faults() {
        // lw x6, 2(x0)
        let (_, s) = run_words(&[0x0020_2303]);
        assert!(matches!(
            s.outcome,
            RunOutcome::Faulted(Fault::Misaligned { addr: 2, .. })
        ));
    }

    #[test]
    fn counter_write_is_illegal() {
        // csrrw x0, cycle, x5
        let (_, s) = run_words(&[0xC002_9073]);
        assert!(matches!(
            s.outcome,
            RunOutcome::Faulted(Fault::IllegalInstruction { .. })
        ));
    }

    #[test]
    fn empty_slot_is_configuration_fault() {
        // addi x5,x0,5 ; csrrw x0,mulcsr,x5 ; mul x10,x10,x11
        let (_, s) = run_words(&[0x0050_0293, 0x8012_9073, 0x02B5_0533]);
        assert!(matches!(
            s.outcome,
            RunOutcome::Faulted(Fault::Configuration { pc: 8, .. })
        ));
    }

    #[test]
    fn timeout() {
        // jal x0, 0
        let (_, s) = run_words(&[0x0000_006F]);
        assert_eq!(s.outcome, RunOutcome::Timeout);
        assert!(s.cycle >= 10_000);
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = MachineConfig {
            clock_hz: 0.0,
            ..Default::default()
        };
        assert!(Machine::new(cfg).is_err());
        let cfg = MachineConfig {
            latencies: Latencies {
                mul_cycles: 0,
                ..Default::default()
            },
            ..Default::default()
        };
        assert!(Machine::new(cfg).is_err());
    }
}
