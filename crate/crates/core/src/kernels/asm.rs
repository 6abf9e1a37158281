//! Instruction encoding and a minimal label-resolving program builder.

use std::collections::HashMap;

use thiserror::Error;

use crate::isa::{Mnemonic, RegisterFile};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error("register x{0} out of range")]
    Register(u8),
    #[error("immediate {imm} out of range for {mnemonic}")]
    Immediate { mnemonic: Mnemonic, imm: i64 },
    #[error("undefined label {0:?}")]
    UndefinedLabel(String),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
}

/// Operand fields. Unused fields are ignored by the encoder.
///
/// For CSR instructions `imm` is the CSR address and `rs1` is the source
/// register (or the 5-bit immediate in the `*i` forms). For `lui`/`auipc`
/// `imm` is the 20-bit upper immediate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Operands {
    pub rd: u8,
    pub rs1: u8,
    pub rs2: u8,
    pub imm: i64,
}

impl Operands {
    pub fn r(rd: u8, rs1: u8, rs2: u8) -> Self {
        Operands {
            rd,
            rs1,
            rs2,
            imm: 0,
        }
    }

    pub fn i(rd: u8, rs1: u8, imm: i64) -> Self {
        Operands {
            rd,
            rs1,
            rs2: 0,
            imm,
        }
    }

    pub fn s(rs2: u8, rs1: u8, imm: i64) -> Self {
        Operands {
            rd: 0,
            rs1,
            rs2,
            imm,
        }
    }
}

fn check_imm(m: Mnemonic, imm: i64, lo: i64, hi: i64, align: i64) -> Result<u32, EncodeError> {
    if imm < lo || imm > hi || imm % align != 0 {
        return Err(EncodeError::Immediate { mnemonic: m, imm });
    }
    Ok(imm as i32 as u32)
}

/// Canonical RV32IM encoding with RV32E register bounds.
pub fn encode(m: Mnemonic, ops: Operands) -> Result<u32, EncodeError> {
    encode_for(m, ops, RegisterFile::Rv32E)
}

pub fn encode_for(m: Mnemonic, ops: Operands, regs: RegisterFile) -> Result<u32, EncodeError> {
    use Mnemonic::*;
    let limit = regs.count();
    let reg = |r: u8| {
        if r < limit {
            Ok(r as u32)
        } else {
            Err(EncodeError::Register(r))
        }
    };

    let r_type = |f7: u32, f3: u32| -> Result<u32, EncodeError> {
        Ok(f7 << 25
            | reg(ops.rs2)? << 20
            | reg(ops.rs1)? << 15
            | f3 << 12
            | reg(ops.rd)? << 7
            | 0x33)
    };
    let i_type = |opcode: u32, f3: u32| -> Result<u32, EncodeError> {
        let imm = check_imm(m, ops.imm, -2048, 2047, 1)?;
        Ok((imm & 0xFFF) << 20 | reg(ops.rs1)? << 15 | f3 << 12 | reg(ops.rd)? << 7 | opcode)
    };
    let shift = |f7: u32, f3: u32| -> Result<u32, EncodeError> {
        let sh = check_imm(m, ops.imm, 0, 31, 1)?;
        Ok(f7 << 25 | sh << 20 | reg(ops.rs1)? << 15 | f3 << 12 | reg(ops.rd)? << 7 | 0x13)
    };
    let s_type = |f3: u32| -> Result<u32, EncodeError> {
        let imm = check_imm(m, ops.imm, -2048, 2047, 1)?;
        Ok((imm >> 5 & 0x7F) << 25
            | reg(ops.rs2)? << 20
            | reg(ops.rs1)? << 15
            | f3 << 12
            | (imm & 0x1F) << 7
            | 0x23)
    };
    let b_type = |f3: u32| -> Result<u32, EncodeError> {
        let imm = check_imm(m, ops.imm, -4096, 4094, 2)?;
        Ok((imm >> 12 & 1) << 31
            | (imm >> 5 & 0x3F) << 25
            | reg(ops.rs2)? << 20
            | reg(ops.rs1)? << 15
            | f3 << 12
            | (imm >> 1 & 0xF) << 8
            | (imm >> 11 & 1) << 7
            | 0x63)
    };
    let u_type = |opcode: u32| -> Result<u32, EncodeError> {
        let imm = check_imm(m, ops.imm, 0, 0xFFFFF, 1)?;
        Ok(imm << 12 | reg(ops.rd)? << 7 | opcode)
    };
    let csr = |f3: u32, imm_form: bool| -> Result<u32, EncodeError> {
        let addr = check_imm(m, ops.imm, 0, 0xFFF, 1)?;
        let src = if imm_form {
            check_imm(m, ops.rs1 as i64, 0, 31, 1)?
        } else {
            reg(ops.rs1)?
        };
        Ok(addr << 20 | src << 15 | f3 << 12 | reg(ops.rd)? << 7 | 0x73)
    };

    match m {
        Lui => u_type(0x37),
        Auipc => u_type(0x17),
        Jal => {
            let imm = check_imm(m, ops.imm, -(1 << 20), (1 << 20) - 2, 2)?;
            Ok((imm >> 20 & 1) << 31
                | (imm >> 1 & 0x3FF) << 21
                | (imm >> 11 & 1) << 20
                | (imm >> 12 & 0xFF) << 12
                | reg(ops.rd)? << 7
                | 0x6F)
        }
        Jalr => i_type(0x67, 0),
        Beq => b_type(0),
        Bne => b_type(1),
        Blt => b_type(4),
        Bge => b_type(5),
        Bltu => b_type(6),
        Bgeu => b_type(7),
        Lb => i_type(0x03, 0),
        Lh => i_type(0x03, 1),
        Lw => i_type(0x03, 2),
        Lbu => i_type(0x03, 4),
        Lhu => i_type(0x03, 5),
        Sb => s_type(0),
        Sh => s_type(1),
        Sw => s_type(2),
        Addi => i_type(0x13, 0),
        Slti => i_type(0x13, 2),
        Sltiu => i_type(0x13, 3),
        Xori => i_type(0x13, 4),
        Ori => i_type(0x13, 6),
        Andi => i_type(0x13, 7),
        Slli => shift(0x00, 1),
        Srli => shift(0x00, 5),
        Srai => shift(0x20, 5),
        Add => r_type(0x00, 0),
        Sub => r_type(0x20, 0),
        Sll => r_type(0x00, 1),
        Slt => r_type(0x00, 2),
        Sltu => r_type(0x00, 3),
        Xor => r_type(0x00, 4),
        Srl => r_type(0x00, 5),
        Sra => r_type(0x20, 5),
        Or => r_type(0x00, 6),
        And => r_type(0x00, 7),
        Mul => r_type(0x01, 0),
        Mulh => r_type(0x01, 1),
        Mulhsu => r_type(0x01, 2),
        Mulhu => r_type(0x01, 3),
        Div => r_type(0x01, 4),
        Divu => r_type(0x01, 5),
        Rem => r_type(0x01, 6),
        Remu => r_type(0x01, 7),
        Fence => Ok(0x0FF0_000F),
        Ecall => Ok(0x0000_0073),
        Ebreak => Ok(0x0010_0073),
        Csrrw => csr(1, false),
        Csrrs => csr(2, false),
        Csrrc => csr(3, false),
        Csrrwi => csr(5, true),
        Csrrsi => csr(6, true),
        Csrrci => csr(7, true),
    }
}

#[derive(Clone, Copy, Debug)]
enum Pending {
    Word(u32),
    Branch(Mnemonic, u8, u8, usize),
    Jal(u8, usize),
}

/// Straight-line program builder with forward/backward branch labels.
#[derive(Debug, Default)]
pub struct Asm {
    items: Vec<Pending>,
    labels: HashMap<String, usize>,
    label_ids: Vec<String>,
    errors: Vec<EncodeError>,
}

impl Asm {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of instructions emitted so far.
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    fn label_id(&mut self, name: &str) -> usize {
        if let Some(i) = self.label_ids.iter().position(|l| l == name) {
            i
        } else {
            self.label_ids.push(name.to_string());
            self.label_ids.len() - 1
        }
    }

    /// Binds `name` to the next instruction.
    pub fn label(&mut self, name: &str) -> &mut Self {
        if self
            .labels
            .insert(name.to_string(), self.items.len())
            .is_some()
        {
            self.errors
                .push(EncodeError::DuplicateLabel(name.to_string()));
        }
        self
    }

    pub fn emit(&mut self, m: Mnemonic, ops: Operands) -> &mut Self {
        match encode(m, ops) {
            Ok(w) => self.items.push(Pending::Word(w)),
            Err(e) => self.errors.push(e),
        }
        self
    }

    pub fn r(&mut self, m: Mnemonic, rd: u8, rs1: u8, rs2: u8) -> &mut Self {
        self.emit(m, Operands::r(rd, rs1, rs2))
    }

    pub fn i(&mut self, m: Mnemonic, rd: u8, rs1: u8, imm: i64) -> &mut Self {
        self.emit(m, Operands::i(rd, rs1, imm))
    }

    pub fn lw(&mut self, rd: u8, offset: i64, base: u8) -> &mut Self {
        self.emit(Mnemonic::Lw, Operands::i(rd, base, offset))
    }

    pub fn sw(&mut self, src: u8, offset: i64, base: u8) -> &mut Self {
        self.emit(Mnemonic::Sw, Operands::s(src, base, offset))
    }

    /// Loads a 32-bit constant (`lui` + `addi`, or a single `addi`).
    pub fn li(&mut self, rd: u8, value: i32) -> &mut Self {
        if (-2048..2048).contains(&value) {
            return self.i(Mnemonic::Addi, rd, 0, value as i64);
        }
        let lo = (value << 20) >> 20;
        let hi = ((value.wrapping_sub(lo) as u32) >> 12) as i64;
        self.emit(Mnemonic::Lui, Operands::i(rd, 0, hi));
        if lo != 0 {
            self.i(Mnemonic::Addi, rd, rd, lo as i64);
        }
        self
    }

    pub fn branch(&mut self, m: Mnemonic, rs1: u8, rs2: u8, target: &str) -> &mut Self {
        let id = self.label_id(target);
        self.items.push(Pending::Branch(m, rs1, rs2, id));
        self
    }

    pub fn jump(&mut self, rd: u8, target: &str) -> &mut Self {
        let id = self.label_id(target);
        self.items.push(Pending::Jal(rd, id));
        self
    }

    /// Resolves labels and returns the instruction words.
    pub fn finish(self) -> Result<Vec<u32>, EncodeError> {
        if let Some(e) = self.errors.into_iter().next() {
            return Err(e);
        }
        let target = |id: usize| -> Result<usize, EncodeError> {
            let name = &self.label_ids[id];
            self.labels
                .get(name)
                .copied()
                .ok_or_else(|| EncodeError::UndefinedLabel(name.clone()))
        };
        self.items
            .iter()
            .enumerate()
            .map(|(idx, item)| match *item {
                Pending::Word(w) => Ok(w),
                Pending::Branch(m, rs1, rs2, id) => {
                    let off = (target(id)? as i64 - idx as i64) * 4;
                    encode(
                        m,
                        Operands {
                            rd: 0,
                            rs1,
                            rs2,
                            imm: off,
                        },
                    )
                }
                Pending::Jal(rd, id) => {
                    let off = (target(id)? as i64 - idx as i64) * 4;
                    encode(Mnemonic::Jal, Operands::i(rd, 0, off))
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isa::decode;

    #[test]
    fn known_encodings() {
        assert_eq!(encode(Mnemonic::Add, Operands::r(1, 2, 3)), Ok(0x0031_00B3));
        assert_eq!(
            encode(Mnemonic::Mul, Operands::r(10, 10, 11)),
            Ok(0x02B5_0533)
        );
        assert_eq!(
            encode(
                Mnemonic::Csrrw,
                Operands {
                    rd: 0,
                    rs1: 5,
                    rs2: 0,
                    imm: 0x801
                }
            ),
            Ok(0x8012_9073)
        );
    }

    #[test]
    fn immediate_bounds() {
        assert!(matches!(
            encode(Mnemonic::Addi, Operands::i(1, 0, 2048)),
            Err(EncodeError::Immediate { .. })
        ));
        assert!(encode(Mnemonic::Addi, Operands::i(1, 0, -2048)).is_ok());
        assert!(encode(
            Mnemonic::Beq,
            Operands {
                imm: 3,
                ..Default::default()
            }
        )
        .is_err());
        assert_eq!(
            encode(Mnemonic::Add, Operands::r(16, 0, 0)),
            Err(EncodeError::Register(16))
        );
    }

    #[test]
    fn li_covers_edge_values() {
        for v in [
            0,
            1,
            -1,
            2047,
            -2048,
            2048,
            0x7FF_FFFF,
            i32::MIN,
            i32::MAX,
            -2049,
            0x1234_5800,
        ] {
            let mut a = Asm::new();
            a.li(5, v);
            let words = a.finish().unwrap();
            // Evaluate the sequence by hand.
            let mut reg = 0u32;
            for w in words {
                let d = decode(w).unwrap();
                reg = match d.mnemonic {
                    Mnemonic::Lui => d.imm as u32,
                    Mnemonic::Addi if d.rs1 == 0 => d.imm as u32,
                    Mnemonic::Addi => reg.wrapping_add(d.imm as u32),
                    m => panic!("unexpected {m}"),
                };
            }
            assert_eq!(reg, v as u32, "li {v}");
        }
    }

    #[test]
    fn labels_resolve_both_directions() {
        let mut a = Asm::new();
        a.label("top");
        a.branch(Mnemonic::Beq, 0, 0, "end");
        a.i(Mnemonic::Addi, 1, 1, 1);
        a.branch(Mnemonic::Bne, 1, 0, "top");
        a.label("end");
        let w = a.finish().unwrap();
        assert_eq!(decode(w[0]).unwrap().imm, 12);
        assert_eq!(decode(w[2]).unwrap().imm, -8);
    }

    #[test]
    fn undefined_label_is_error() {
        let mut a = Asm::new();
        a.jump(0, "nowhere");
        assert_eq!(
            a.finish(),
            Err(EncodeError::UndefinedLabel("nowhere".into()))
        );
    }
}
