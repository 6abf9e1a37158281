//! Execution units, circuit slots, and CSR-driven routing of arithmetic.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::csr::{ApproxControlWord, CsrFile};
use super::decode::{DecodedInstr, Mnemonic};
use super::IsaError;
use crate::circuits::{csa32_add, exact_div, mul32_signed, AdderConfig, DivOp, MulConfig};

pub const SLOTS_PER_UNIT: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExeUnit {
    #[serde(rename = "ALU")]
    Alu,
    #[serde(rename = "MUL")]
    Mul,
    #[serde(rename = "DIV")]
    Div,
}

impl ExeUnit {
    pub const ALL: [ExeUnit; 3] = [ExeUnit::Alu, ExeUnit::Mul, ExeUnit::Div];

    pub fn name(self) -> &'static str {
        match self {
            ExeUnit::Alu => "ALU",
            ExeUnit::Mul => "MUL",
            ExeUnit::Div => "DIV",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ExeUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CircuitKind {
    Accurate,
    Approximate,
}

/// Which circuits sit in the four slots of each execution unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitSlotTable {
    slots: [[Option<CircuitKind>; SLOTS_PER_UNIT]; 3],
}

impl Default for CircuitSlotTable {
    /// ALU slot 0: error-controllable carry-select adder. MUL slot 0: accurate
    /// multiplier, slot 1: approximate multiplier. DIV slot 0: accurate divider.
    fn default() -> Self {
        use CircuitKind::*;
        CircuitSlotTable {
            slots: [
                [Some(Approximate), None, None, None],
                [Some(Accurate), Some(Approximate), None, None],
                [Some(Accurate), None, None, None],
            ],
        }
    }
}

impl CircuitSlotTable {
    pub fn empty() -> Self {
        CircuitSlotTable {
            slots: [[None; SLOTS_PER_UNIT]; 3],
        }
    }

    pub fn with_slot(mut self, unit: ExeUnit, slot: usize, kind: Option<CircuitKind>) -> Self {
        self.slots[unit.index()][slot] = kind;
        self
    }

    pub fn get(&self, unit: ExeUnit, slot: usize) -> Option<CircuitKind> {
        self.slots[unit.index()].get(slot).copied().flatten()
    }

    /// Occupied slots of a unit.
    pub fn occupied(&self, unit: ExeUnit) -> impl Iterator<Item = (usize, CircuitKind)> + '_ {
        self.slots[unit.index()]
            .iter()
            .enumerate()
            .filter_map(|(i, k)| k.map(|k| (i, k)))
    }

    /// Resolves the circuit a unit routes to under `word`.
    pub fn select(&self, unit: ExeUnit, word: ApproxControlWord) -> Selection {
        let slot = word.active_slot();
        let kind = self.get(unit, slot);
        let approximate = word.enable && kind == Some(CircuitKind::Approximate);
        Selection {
            unit,
            slot: slot as u8,
            kind,
            approximate,
            error_field: word.error_field,
            truncation: word.truncation,
        }
    }

    /// Selection of all three units for the current CSR contents.
    pub fn snapshot(&self, csrs: &CsrFile) -> UnitSnapshot {
        UnitSnapshot {
            alu: self.select(ExeUnit::Alu, csrs.alu_control()),
            mul: self.select(ExeUnit::Mul, csrs.mul_control()),
            div: self.select(ExeUnit::Div, csrs.div_control()),
        }
    }
}

/// The circuit a unit routes to, with the error settings it receives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Selection {
    pub unit: ExeUnit,
    pub slot: u8,
    /// `None` when the selected slot is empty.
    pub kind: Option<CircuitKind>,
    /// True when the selected circuit runs with its error lines applied.
    pub approximate: bool,
    pub error_field: u16,
    pub truncation: u8,
}

impl Selection {
    pub fn is_occupied(&self) -> bool {
        self.kind.is_some()
    }

    /// Multiplier configuration; the low 7 bits of the error field are the error lines.
    pub fn mul_config(&self) -> MulConfig {
        if self.approximate {
            MulConfig::new((self.error_field & 0x7F) as u8, self.truncation)
        } else {
            MulConfig::ACCURATE
        }
    }

    pub fn adder_config(&self) -> AdderConfig {
        if self.approximate {
            AdderConfig::from_error_field(self.error_field)
        } else {
            AdderConfig::ACCURATE
        }
    }

    fn require(self) -> Result<Self, IsaError> {
        if self.is_occupied() {
            Ok(self)
        } else {
            Err(IsaError::EmptySlot {
                unit: self.unit,
                slot: self.slot,
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct UnitSnapshot {
    pub alu: Selection,
    pub mul: Selection,
    pub div: Selection,
}

impl UnitSnapshot {
    pub fn get(&self, unit: ExeUnit) -> &Selection {
        match unit {
            ExeUnit::Alu => &self.alu,
            ExeUnit::Mul => &self.mul,
            ExeUnit::Div => &self.div,
        }
    }
}

/// Result of an arithmetic instruction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArithResult {
    pub value: u32,
    pub unit: ExeUnit,
    pub slot: u8,
    pub approximate: bool,
}

/// Unit an instruction's arithmetic runs on, if any.
pub fn unit_for(mnemonic: Mnemonic) -> Option<ExeUnit> {
    use Mnemonic::*;
    match mnemonic {
        Addi | Slti | Sltiu | Xori | Ori | Andi | Slli | Srli | Srai | Add | Sub | Sll | Slt
        | Sltu | Xor | Srl | Sra | Or | And => Some(ExeUnit::Alu),
        Mul | Mulh | Mulhsu | Mulhu => Some(ExeUnit::Mul),
        Div | Divu | Rem | Remu => Some(ExeUnit::Div),
        _ => None,
    }
}

/// Executes an OP / OP-IMM / M-extension instruction.
///
/// `rhs` is the second source register value for R-type instructions and the
/// sign-extended immediate for I-type ones.
pub fn execute_arith(
    instr: &DecodedInstr,
    lhs: u32,
    rhs: u32,
    csrs: &CsrFile,
    slots: &CircuitSlotTable,
) -> Result<ArithResult, IsaError> {
    use Mnemonic::*;
    let unit = unit_for(instr.mnemonic).ok_or(IsaError::NotArithmetic(instr.mnemonic))?;

    let sel = match (unit, instr.mnemonic) {
        // Unsigned-high variants never route to the approximate circuit.
        (ExeUnit::Mul, Mulhsu | Mulhu) => slots.select(ExeUnit::Mul, ApproxControlWord::default()),
        (ExeUnit::Alu, _) => slots.select(unit, csrs.alu_control()),
        (ExeUnit::Mul, _) => slots.select(unit, csrs.mul_control()),
        (ExeUnit::Div, _) => slots.select(unit, csrs.div_control()),
    }
    .require()?;

    let shamt = rhs & 0x1F;
    let value = match instr.mnemonic {
        Add | Addi => csa32_add(lhs, rhs, false, sel.adder_config()).0,
        Sub => csa32_add(lhs, !rhs, true, sel.adder_config()).0,
        Slt | Slti => ((lhs as i32) < (rhs as i32)) as u32,
        Sltu | Sltiu => (lhs < rhs) as u32,
        Xor | Xori => lhs ^ rhs,
        Or | Ori => lhs | rhs,
        And | Andi => lhs & rhs,
        Sll | Slli => lhs << shamt,
        Srl | Srli => lhs >> shamt,
        Sra | Srai => ((lhs as i32) >> shamt) as u32,
        Mul => mul32_signed(lhs as i32, rhs as i32, false, sel.mul_config()),
        Mulh => mul32_signed(lhs as i32, rhs as i32, true, sel.mul_config()),
        Mulhsu => ((lhs as i32 as i64).wrapping_mul(rhs as i64) >> 32) as u32,
        Mulhu => ((lhs as u64 * rhs as u64) >> 32) as u32,
        Div => exact_div(lhs, rhs, DivOp::Div),
        Divu => exact_div(lhs, rhs, DivOp::Divu),
        Rem => exact_div(lhs, rhs, DivOp::Rem),
        Remu => exact_div(lhs, rhs, DivOp::Remu),
        m => return Err(IsaError::NotArithmetic(m)),
    };
    Ok(ArithResult {
        value,
        unit,
        slot: sel.slot,
        approximate: sel.approximate,
    })
}

/// Effective-address and branch-target addition. Always exact.
#[inline]
pub fn address_gen(base: u32, offset: i32) -> u32 {
    base.wrapping_add(offset as u32)
}
