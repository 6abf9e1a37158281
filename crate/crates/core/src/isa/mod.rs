//! RV32IEM decode/execute semantics and approximation control.

pub mod csr;
pub mod decode;
pub mod units;

use thiserror::Error;

pub use csr::{ApproxControlWord, CsrFile, CsrOp};
pub use decode::{decode, decode_for, DecodedInstr, Format, Mnemonic, OpClass, RegisterFile};
pub use units::{
    address_gen, execute_arith, unit_for, ArithResult, CircuitKind, CircuitSlotTable, ExeUnit,
    Selection, UnitSnapshot,
};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum IsaError {
    #[error("illegal instruction 0x{0:08x}")]
    IllegalInstruction(u32),
    #[error("unimplemented CSR 0x{0:03x}")]
    UnimplementedCsr(u16),
    #[error("write to read-only CSR 0x{0:03x}")]
    ReadOnlyCsr(u16),
    #[error("{unit} slot {slot} selected but no circuit is installed there")]
    EmptySlot { unit: ExeUnit, slot: u8 },
    #[error("{0} is not an arithmetic instruction")]
    NotArithmetic(Mnemonic),
}
