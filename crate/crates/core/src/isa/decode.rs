//! RV32I + M instruction decoding.

use std::fmt;

use super::IsaError;

/// Encoding format of an instruction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Format {
    R,
    I,
    S,
    B,
    U,
    J,
    System,
}

/// Functional class, used for timing, energy and instruction-mix accounting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OpClass {
    Alu,
    Mul,
    Div,
    Load,
    Store,
    Branch,
    Jump,
    Csr,
    System,
}

impl OpClass {
    pub const ALL: [OpClass; 9] = [
        OpClass::Alu,
        OpClass::Mul,
        OpClass::Div,
        OpClass::Load,
        OpClass::Store,
        OpClass::Branch,
        OpClass::Jump,
        OpClass::Csr,
        OpClass::System,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OpClass::Alu => "alu",
            OpClass::Mul => "mul",
            OpClass::Div => "div",
            OpClass::Load => "load",
            OpClass::Store => "store",
            OpClass::Branch => "branch",
            OpClass::Jump => "jump",
            OpClass::Csr => "csr",
            OpClass::System => "system",
        }
    }
}

macro_rules! mnemonics {
    ($($variant:ident => $name:literal, $class:ident;)*) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Mnemonic {
            $($variant,)*
        }

        impl Mnemonic {
            pub const ALL: &'static [Mnemonic] = &[$(Mnemonic::$variant,)*];

            pub fn name(self) -> &'static str {
                match self {
                    $(Mnemonic::$variant => $name,)*
                }
            }

            pub fn class(self) -> OpClass {
                match self {
                    $(Mnemonic::$variant => OpClass::$class,)*
                }
            }
        }
    };
}

mnemonics! {
    Lui => "lui", Alu;
    Auipc => "auipc", Alu;
    Jal => "jal", Jump;
    Jalr => "jalr", Jump;
    Beq => "beq", Branch;
    Bne => "bne", Branch;
    Blt => "blt", Branch;
    Bge => "bge", Branch;
    Bltu => "bltu", Branch;
    Bgeu => "bgeu", Branch;
    Lb => "lb", Load;
    Lh => "lh", Load;
    Lw => "lw", Load;
    Lbu => "lbu", Load;
    Lhu => "lhu", Load;
    Sb => "sb", Store;
    Sh => "sh", Store;
    Sw => "sw", Store;
    Addi => "addi", Alu;
    Slti => "slti", Alu;
    Sltiu => "sltiu", Alu;
    Xori => "xori", Alu;
    Ori => "ori", Alu;
    Andi => "andi", Alu;
    Slli => "slli", Alu;
    Srli => "srli", Alu;
    Srai => "srai", Alu;
    Add => "add", Alu;
    Sub => "sub", Alu;
    Sll => "sll", Alu;
    Slt => "slt", Alu;
    Sltu => "sltu", Alu;
    Xor => "xor", Alu;
    Srl => "srl", Alu;
    Sra => "sra", Alu;
    Or => "or", Alu;
    And => "and", Alu;
    Mul => "mul", Mul;
    Mulh => "mulh", Mul;
    Mulhsu => "mulhsu", Mul;
    Mulhu => "mulhu", Mul;
    Div => "div", Div;
    Divu => "divu", Div;
    Rem => "rem", Div;
    Remu => "remu", Div;
    Fence => "fence", System;
    Ecall => "ecall", System;
    Ebreak => "ebreak", System;
    Csrrw => "csrrw", Csr;
    Csrrs => "csrrs", Csr;
    Csrrc => "csrrc", Csr;
    Csrrwi => "csrrwi", Csr;
    Csrrsi => "csrrsi", Csr;
    Csrrci => "csrrci", Csr;
}

impl fmt::Display for Mnemonic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A decoded instruction.
///
/// For CSR instructions `imm` holds the CSR address and, in the immediate
/// variants, `rs1` holds the 5-bit zero-extended immediate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DecodedInstr {
    pub format: Format,
    pub mnemonic: Mnemonic,
    pub rd: u8,
    pub rs1: u8,
    pub rs2: u8,
    pub imm: i32,
    pub raw: u32,
}

impl DecodedInstr {
    pub fn class(&self) -> OpClass {
        self.mnemonic.class()
    }

    pub fn csr_addr(&self) -> u16 {
        (self.imm as u32 & 0xFFF) as u16
    }
}

impl fmt::Display for DecodedInstr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Mnemonic::*;
        let m = self.mnemonic;
        match self.format {
            Format::R => write!(f, "{m} x{}, x{}, x{}", self.rd, self.rs1, self.rs2),
            Format::I => match m {
                Lb | Lh | Lw | Lbu | Lhu | Jalr => {
                    write!(f, "{m} x{}, {}(x{})", self.rd, self.imm, self.rs1)
                }
                _ => write!(f, "{m} x{}, x{}, {}", self.rd, self.rs1, self.imm),
            },
            Format::S => write!(f, "{m} x{}, {}(x{})", self.rs2, self.imm, self.rs1),
            Format::B => write!(f, "{m} x{}, x{}, {}", self.rs1, self.rs2, self.imm),
            Format::U => write!(f, "{m} x{}, 0x{:05x}", self.rd, (self.imm as u32) >> 12),
            Format::J => write!(f, "{m} x{}, {}", self.rd, self.imm),
            Format::System => match m {
                Csrrw | Csrrs | Csrrc => {
                    write!(
                        f,
                        "{m} x{}, 0x{:03x}, x{}",
                        self.rd,
                        self.csr_addr(),
                        self.rs1
                    )
                }
                Csrrwi | Csrrsi | Csrrci => {
                    write!(
                        f,
                        "{m} x{}, 0x{:03x}, {}",
                        self.rd,
                        self.csr_addr(),
                        self.rs1
                    )
                }
                _ => f.write_str(m.name()),
            },
        }
    }
}

/// Number of architectural registers.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize,
)]
pub enum RegisterFile {
    /// 16 registers.
    #[default]
    Rv32E,
    /// 32 registers.
    Rv32I,
}

impl RegisterFile {
    pub fn count(self) -> u8 {
        match self {
            RegisterFile::Rv32E => 16,
            RegisterFile::Rv32I => 32,
        }
    }
}

fn sext(value: u32, bits: u32) -> i32 {
    let shift = 32 - bits;
    ((value << shift) as i32) >> shift
}

/// Decodes with the default 16-register file.
pub fn decode(raw: u32) -> Result<DecodedInstr, IsaError> {
    decode_for(raw, RegisterFile::Rv32E)
}

pub fn decode_for(raw: u32, regs: RegisterFile) -> Result<DecodedInstr, IsaError> {
    use Mnemonic::*;
    let illegal = || IsaError::IllegalInstruction(raw);

    let opcode = raw & 0x7F;
    let rd = ((raw >> 7) & 0x1F) as u8;
    let funct3 = (raw >> 12) & 0x7;
    let rs1 = ((raw >> 15) & 0x1F) as u8;
    let rs2 = ((raw >> 20) & 0x1F) as u8;
    let funct7 = raw >> 25;

    let imm_i = sext(raw >> 20, 12);
    let imm_s = sext(((raw >> 25) << 5) | ((raw >> 7) & 0x1F), 12);
    let imm_b = sext(
        ((raw >> 31) << 12)
            | (((raw >> 7) & 1) << 11)
            | (((raw >> 25) & 0x3F) << 5)
            | (((raw >> 8) & 0xF) << 1),
        13,
    );
    let imm_u = (raw & 0xFFFF_F000) as i32;
    let imm_j = sext(
        ((raw >> 31) << 20)
            | (((raw >> 12) & 0xFF) << 12)
            | (((raw >> 20) & 1) << 11)
            | (((raw >> 21) & 0x3FF) << 1),
        21,
    );

    let make = |format, mnemonic, rd: u8, rs1: u8, rs2: u8, imm| DecodedInstr {
        format,
        mnemonic,
        rd,
        rs1,
        rs2,
        imm,
        raw,
    };

    let instr = match opcode {
        0x37 => make(Format::U, Lui, rd, 0, 0, imm_u),
        0x17 => make(Format::U, Auipc, rd, 0, 0, imm_u),
        0x6F => make(Format::J, Jal, rd, 0, 0, imm_j),
        0x67 if funct3 == 0 => make(Format::I, Jalr, rd, rs1, 0, imm_i),
        0x63 => {
            let m = match funct3 {
                0 => Beq,
                1 => Bne,
                4 => Blt,
                5 => Bge,
                6 => Bltu,
                7 => Bgeu,
                _ => return Err(illegal()),
            };
            make(Format::B, m, 0, rs1, rs2, imm_b)
        }
        0x03 => {
            let m = match funct3 {
                0 => Lb,
                1 => Lh,
                2 => Lw,
                4 => Lbu,
                5 => Lhu,
                _ => return Err(illegal()),
            };
            make(Format::I, m, rd, rs1, 0, imm_i)
        }
        0x23 => {
            let m = match funct3 {
                0 => Sb,
                1 => Sh,
                2 => Sw,
                _ => return Err(illegal()),
            };
            make(Format::S, m, 0, rs1, rs2, imm_s)
        }
        0x13 => {
            let shamt = (raw >> 20) as i32 & 0x1F;
            let (m, imm) = match (funct3, funct7) {
                (0, _) => (Addi, imm_i),
                (2, _) => (Slti, imm_i),
                (3, _) => (Sltiu, imm_i),
                (4, _) => (Xori, imm_i),
                (6, _) => (Ori, imm_i),
                (7, _) => (Andi, imm_i),
                (1, 0x00) => (Slli, shamt),
                (5, 0x00) => (Srli, shamt),
                (5, 0x20) => (Srai, shamt),
                _ => return Err(illegal()),
            };
            make(Format::I, m, rd, rs1, 0, imm)
        }
        0x33 => {
            let m = match (funct7, funct3) {
                (0x00, 0) => Add,
                (0x20, 0) => Sub,
                (0x00, 1) => Sll,
                (0x00, 2) => Slt,
                (0x00, 3) => Sltu,
                (0x00, 4) => Xor,
                (0x00, 5) => Srl,
                (0x20, 5) => Sra,
                (0x00, 6) => Or,
                (0x00, 7) => And,
                (0x01, 0) => Mul,
                (0x01, 1) => Mulh,
                (0x01, 2) => Mulhsu,
                (0x01, 3) => Mulhu,
                (0x01, 4) => Div,
                (0x01, 5) => Divu,
                (0x01, 6) => Rem,
                (0x01, 7) => Remu,
                _ => return Err(illegal()),
            };
            make(Format::R, m, rd, rs1, rs2, 0)
        }
        0x0F if funct3 == 0 => make(Format::System, Fence, 0, 0, 0, 0),
        0x73 => {
            let csr = ((raw >> 20) & 0xFFF) as i32;
            match funct3 {
                0 => match raw {
                    0x0000_0073 => make(Format::System, Ecall, 0, 0, 0, 0),
                    0x0010_0073 => make(Format::System, Ebreak, 0, 0, 0, 0),
                    _ => return Err(illegal()),
                },
                1 => make(Format::System, Csrrw, rd, rs1, 0, csr),
                2 => make(Format::System, Csrrs, rd, rs1, 0, csr),
                3 => make(Format::System, Csrrc, rd, rs1, 0, csr),
                5 => make(Format::System, Csrrwi, rd, rs1, 0, csr),
                6 => make(Format::System, Csrrsi, rd, rs1, 0, csr),
                7 => make(Format::System, Csrrci, rd, rs1, 0, csr),
                _ => return Err(illegal()),
            }
        }
        _ => return Err(illegal()),
    };

    let limit = regs.count();
    let uses_rs1_as_reg = !matches!(instr.mnemonic, Csrrwi | Csrrsi | Csrrci);
    let uses_rs2 = matches!(instr.format, Format::R | Format::S | Format::B);
    if instr.rd >= limit
        || (uses_rs1_as_reg && instr.rs1 >= limit)
        || (uses_rs2 && instr.rs2 >= limit)
    {
        return Err(illegal());
    }
    Ok(instr)
}
