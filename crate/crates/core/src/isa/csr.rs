//! Approximation control words and the CSR file.

use std::fmt;

use super::IsaError;

pub const CSR_ALUCSR: u16 = 0x800;
pub const CSR_MULCSR: u16 = 0x801;
pub const CSR_DIVCSR: u16 = 0x802;
pub const CSR_CYCLE: u16 = 0xC00;
pub const CSR_INSTRET: u16 = 0xC02;
pub const CSR_CYCLEH: u16 = 0xC80;
pub const CSR_INSTRETH: u16 = 0xC82;

/// Decoded view of a 32-bit approximation CSR.
///
/// | bits  | field            |
/// |-------|------------------|
/// | 0     | `enable`         |
/// | 2:1   | `circuit_select` |
/// | 7:3   | `truncation`     |
/// | 11:8  | `custom_a`       |
/// | 15:12 | `custom_b`       |
/// | 31:16 | `error_field`    |
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ApproxControlWord {
    pub enable: bool,
    pub circuit_select: u8,
    pub truncation: u8,
    pub custom_a: u8,
    pub custom_b: u8,
    pub error_field: u16,
}

impl ApproxControlWord {
    pub fn decode(raw: u32) -> Self {
        ApproxControlWord {
            enable: raw & 1 != 0,
            circuit_select: ((raw >> 1) & 0x3) as u8,
            truncation: ((raw >> 3) & 0x1F) as u8,
            custom_a: ((raw >> 8) & 0xF) as u8,
            custom_b: ((raw >> 12) & 0xF) as u8,
            error_field: (raw >> 16) as u16,
        }
    }

    /// Packs the fields back; out-of-range field values are masked.
    pub fn encode(&self) -> u32 {
        self.enable as u32
            | ((self.circuit_select as u32 & 0x3) << 1)
            | ((self.truncation as u32 & 0x1F) << 3)
            | ((self.custom_a as u32 & 0xF) << 8)
            | ((self.custom_b as u32 & 0xF) << 12)
            | ((self.error_field as u32) << 16)
    }

    /// Slot the unit routes to: the selected circuit when enabled, slot 0 otherwise.
    pub fn active_slot(&self) -> usize {
        if self.enable {
            self.circuit_select as usize
        } else {
            0
        }
    }
}

impl From<u32> for ApproxControlWord {
    fn from(raw: u32) -> Self {
        Self::decode(raw)
    }
}

impl fmt::Display for ApproxControlWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "en={} slot={} trunc={} custom={:x}/{:x} err=0x{:04x}",
            self.enable as u8,
            self.circuit_select,
            self.truncation,
            self.custom_a,
            self.custom_b,
            self.error_field
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CsrOp {
    ReadWrite,
    ReadSet,
    ReadClear,
}

/// Approximation CSRs plus the read-only cycle/instret counters.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CsrFile {
    pub alucsr: u32,
    pub mulcsr: u32,
    pub divcsr: u32,
    pub cycle: u64,
    pub instret: u64,
}

impl CsrFile {
    pub fn alu_control(&self) -> ApproxControlWord {
        ApproxControlWord::decode(self.alucsr)
    }

    pub fn mul_control(&self) -> ApproxControlWord {
        ApproxControlWord::decode(self.mulcsr)
    }

    pub fn div_control(&self) -> ApproxControlWord {
        ApproxControlWord::decode(self.divcsr)
    }

    pub fn read(&self, addr: u16) -> Result<u32, IsaError> {
        Ok(match addr {
            CSR_ALUCSR => self.alucsr,
            CSR_MULCSR => self.mulcsr,
            CSR_DIVCSR => self.divcsr,
            CSR_CYCLE => self.cycle as u32,
            CSR_CYCLEH => (self.cycle >> 32) as u32,
            CSR_INSTRET => self.instret as u32,
            CSR_INSTRETH => (self.instret >> 32) as u32,
            _ => return Err(IsaError::UnimplementedCsr(addr)),
        })
    }

    fn slot_mut(&mut self, addr: u16) -> Result<&mut u32, IsaError> {
        match addr {
            CSR_ALUCSR => Ok(&mut self.alucsr),
            CSR_MULCSR => Ok(&mut self.mulcsr),
            CSR_DIVCSR => Ok(&mut self.divcsr),
            CSR_CYCLE | CSR_CYCLEH | CSR_INSTRET | CSR_INSTRETH => Err(IsaError::ReadOnlyCsr(addr)),
            _ => Err(IsaError::UnimplementedCsr(addr)),
        }
    }

    /// Read-modify-write access. Returns the previous value.
    ///
    /// `write` is false for `csrrs`/`csrrc` whose source is `x0` or a zero
    /// immediate; such accesses are legal on read-only counters.
    pub fn access(
        &mut self,
        op: CsrOp,
        addr: u16,
        operand: u32,
        write: bool,
    ) -> Result<u32, IsaError> {
        let old = self.read(addr)?;
        if write {
            let new = match op {
                CsrOp::ReadWrite => operand,
                CsrOp::ReadSet => old | operand,
                CsrOp::ReadClear => old & !operand,
            };
            *self.slot_mut(addr)? = new;
        }
        Ok(old)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_layout() {
        let w = ApproxControlWord::decode(0x007E_0003);
        assert!(w.enable);
        assert_eq!(w.circuit_select, 1);
        assert_eq!(w.error_field, 0x007E);
        assert_eq!(w.truncation, 0);

        let w = ApproxControlWord::decode(0x0001_FFFF);
        assert_eq!(
            w,
            ApproxControlWord {
                enable: true,
                circuit_select: 3,
                truncation: 31,
                custom_a: 0xF,
                custom_b: 0xF,
                error_field: 1
            }
        );
    }

    #[test]
    fn disabled_word_routes_to_slot_zero() {
        assert_eq!(ApproxControlWord::decode(0x0000_0006).active_slot(), 0);
        assert_eq!(ApproxControlWord::decode(0x0000_0007).active_slot(), 3);
    }

    #[test]
    fn csrrw_swaps_mulcsr() {
        let mut csrs = CsrFile {
            mulcsr: 0x11,
            ..CsrFile::default()
        };
        assert_eq!(
            csrs.access(CsrOp::ReadWrite, CSR_MULCSR, 0x007E_0003, true),
            Ok(0x11)
        );
        assert_eq!(csrs.mulcsr, 0x007E_0003);
    }

    #[test]
    fn set_and_clear() {
        let mut csrs = CsrFile::default();
        csrs.access(CsrOp::ReadSet, CSR_ALUCSR, 0b101, true)
            .unwrap();
        csrs.access(CsrOp::ReadClear, CSR_ALUCSR, 0b001, true)
            .unwrap();
        assert_eq!(csrs.alucsr, 0b100);
    }

    #[test]
    fn counters_are_read_only() {
        let mut csrs = CsrFile {
            instret: 0x1_0000_0007,
            ..Default::default()
        };
        assert_eq!(csrs.access(CsrOp::ReadSet, CSR_INSTRET, 0, false), Ok(7));
        assert_eq!(csrs.read(CSR_INSTRETH), Ok(1));
        assert_eq!(
            csrs.access(CsrOp::ReadWrite, CSR_CYCLE, 5, true),
            Err(IsaError::ReadOnlyCsr(CSR_CYCLE))
        );
        assert_eq!(
            csrs.access(CsrOp::ReadSet, 0x803, 0, false),
            Err(IsaError::UnimplementedCsr(0x803))
        );
    }
}
