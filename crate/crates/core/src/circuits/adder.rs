//! Error-controllable full adder and the adders built from it.
//!
//! Every full adder carries an error line. With the line high the cell is an
//! ordinary full adder. With the line low the sum output follows an
//! approximate truth table while the carry output stays exact, so any error
//! is confined to the cell's own bit weight and never propagates.

/// Error line of a single full-adder cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FullAdderMode {
    /// Error line high: exact full adder.
    Accurate,
    /// Error line low: sum taken from the approximate truth table.
    Approximate,
}

impl FullAdderMode {
    /// Mode for a raw error-line bit (1 = accurate).
    pub fn from_line(line: bool) -> Self {
        if line {
            FullAdderMode::Accurate
        } else {
            FullAdderMode::Approximate
        }
    }
}

/// Approximate-mode sum output, indexed by `a << 2 | b << 1 | cin`.
///
/// Carry-out is always the exact majority function; only the sum column is
/// replaceable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FaTruthTable {
    sum: [u8; 8],
}

impl FaTruthTable {
    /// Default table: `sum = a ? !b : cin`.
    ///
    /// Errs on rows 010 and 111 (-1) and on rows 011 and 101 (+1).
    pub const CALIBRATED: FaTruthTable = FaTruthTable {
        sum: [0, 1, 0, 1, 1, 1, 0, 0],
    };

    /// Alternative table: `sum = cin`.
    ///
    /// Errs whenever `a != b`; gives a higher error rate on the multiplier's
    /// final adder than [`FaTruthTable::CALIBRATED`].
    pub const SUM_EQUALS_CARRY_IN: FaTruthTable = FaTruthTable {
        sum: [0, 1, 0, 1, 0, 1, 0, 1],
    };

    /// Builds a table from an explicit sum column. Entries must be 0 or 1.
    pub const fn from_sum_column(sum: [u8; 8]) -> Self {
        FaTruthTable { sum }
    }

    #[inline]
    pub fn sum(&self, a: bool, b: bool, cin: bool) -> bool {
        self.sum[((a as usize) << 2) | ((b as usize) << 1) | cin as usize] != 0
    }
}

impl Default for FaTruthTable {
    fn default() -> Self {
        FaTruthTable::CALIBRATED
    }
}

#[inline]
fn majority(a: bool, b: bool, c: bool) -> bool {
    (a & b) | (a & c) | (b & c)
}

/// One full-adder cell using the default approximate truth table.
#[inline]
pub fn full_adder(a: bool, b: bool, cin: bool, mode: FullAdderMode) -> (bool, bool) {
    full_adder_with(&FaTruthTable::CALIBRATED, a, b, cin, mode)
}

/// One full-adder cell with an explicit approximate truth table.
#[inline]
pub fn full_adder_with(
    table: &FaTruthTable,
    a: bool,
    b: bool,
    cin: bool,
    mode: FullAdderMode,
) -> (bool, bool) {
    let cout = majority(a, b, cin);
    let sum = match mode {
        FullAdderMode::Accurate => a ^ b ^ cin,
        FullAdderMode::Approximate => table.sum(a, b, cin),
    };
    (sum, cout)
}

/// Ripples `width` full adders over the low bits of `x` and `y`.
///
/// Bit `i` of `lines` is the error line of cell `i` (1 = accurate).
#[inline]
pub(crate) fn ripple(
    table: &FaTruthTable,
    x: u64,
    y: u64,
    cin: bool,
    lines: u64,
    width: u32,
) -> (u64, bool) {
    let mut carry = cin;
    let mut sum = 0u64;
    for i in 0..width {
        let mode = FullAdderMode::from_line((lines >> i) & 1 == 1);
        let (s, c) = full_adder_with(table, (x >> i) & 1 == 1, (y >> i) & 1 == 1, carry, mode);
        sum |= (s as u64) << i;
        carry = c;
    }
    (sum, carry)
}

/// 4-bit error-controllable ripple-carry block (ECA).
pub fn eca4_add(x: u8, y: u8, cin: bool, error_lines: u8) -> (u8, bool) {
    eca4_add_with(&FaTruthTable::CALIBRATED, x, y, cin, error_lines)
}

pub fn eca4_add_with(table: &FaTruthTable, x: u8, y: u8, cin: bool, error_lines: u8) -> (u8, bool) {
    let (s, c) = ripple(
        table,
        (x & 0xF) as u64,
        (y & 0xF) as u64,
        cin,
        (error_lines & 0xF) as u64,
        4,
    );
    (s as u8, c)
}

/// Error-line configuration of the 32-bit ALU adder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AdderConfig {
    error_mask: u32,
}

impl AdderConfig {
    /// Bits 16..31 have no error line and are always accurate.
    pub const FORCED_ACCURATE: u32 = 0xFFFF_0000;

    pub const ACCURATE: AdderConfig = AdderConfig {
        error_mask: u32::MAX,
    };

    pub fn new(error_mask: u32) -> Self {
        AdderConfig {
            error_mask: error_mask | Self::FORCED_ACCURATE,
        }
    }

    /// Config from the 16-bit error field of an approximation CSR.
    pub fn from_error_field(field: u16) -> Self {
        Self::new(field as u32)
    }

    /// Effective mask, with the forced-accurate upper half applied.
    pub fn error_mask(&self) -> u32 {
        self.error_mask
    }

    pub fn is_accurate(&self) -> bool {
        self.error_mask == u32::MAX
    }
}

impl Default for AdderConfig {
    fn default() -> Self {
        AdderConfig::ACCURATE
    }
}

/// 32-bit carry-select adder built from eight ECA blocks.
///
/// Block 0 adds directly; blocks 1..7 are computed for both carry-in values
/// and the incoming carry selects between them.
pub fn csa32_add(x: u32, y: u32, cin: bool, cfg: AdderConfig) -> (u32, bool) {
    csa32_add_with(&FaTruthTable::CALIBRATED, x, y, cin, cfg)
}

pub fn csa32_add_with(
    table: &FaTruthTable,
    x: u32,
    y: u32,
    cin: bool,
    cfg: AdderConfig,
) -> (u32, bool) {
    let mask = cfg.error_mask();
    let nibble = |v: u32, k: u32| ((v >> (4 * k)) & 0xF) as u8;

    let (s0, mut carry) = eca4_add_with(table, nibble(x, 0), nibble(y, 0), cin, nibble(mask, 0));
    let mut sum = s0 as u32;
    for k in 1..8 {
        let (xa, yb, lines) = (nibble(x, k), nibble(y, k), nibble(mask, k));
        let lo = eca4_add_with(table, xa, yb, false, lines);
        let hi = eca4_add_with(table, xa, yb, true, lines);
        let (s, c) = if carry { hi } else { lo };
        sum |= (s as u32) << (4 * k);
        carry = c;
    }
    (sum, carry)
}

/// Flat 32-cell ripple-carry adder over the same full adders.
pub fn ripple32_add(x: u32, y: u32, cin: bool, cfg: AdderConfig) -> (u32, bool) {
    let (s, c) = ripple(
        &FaTruthTable::CALIBRATED,
        x as u64,
        y as u64,
        cin,
        cfg.error_mask() as u64,
        32,
    );
    (s as u32, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value(sum: bool, cout: bool) -> i32 {
        sum as i32 + 2 * cout as i32
    }

    #[test]
    fn approximate_rows_from_examples() {
        assert_eq!(
            full_adder(true, true, false, FullAdderMode::Approximate),
            (false, true)
        );
        assert_eq!(
            full_adder(false, true, false, FullAdderMode::Approximate),
            (false, false)
        );
        assert_eq!(
            full_adder(false, true, true, FullAdderMode::Accurate),
            (false, true)
        );
    }

    #[test]
    fn accurate_mode_is_exact_full_adder() {
        for row in 0..8u8 {
            let (a, b, c) = (row & 4 != 0, row & 2 != 0, row & 1 != 0);
            let (s, co) = full_adder(a, b, c, FullAdderMode::Accurate);
            assert_eq!(value(s, co), a as i32 + b as i32 + c as i32);
        }
    }

    #[test]
    fn both_tables_keep_balanced_errors() {
        for table in [FaTruthTable::CALIBRATED, FaTruthTable::SUM_EQUALS_CARRY_IN] {
            let mut errs: Vec<i32> = (0..8u8)
                .map(|row| {
                    let (a, b, c) = (row & 4 != 0, row & 2 != 0, row & 1 != 0);
                    let (s, co) = full_adder_with(&table, a, b, c, FullAdderMode::Approximate);
                    value(s, co) - (a as i32 + b as i32 + c as i32)
                })
                .collect();
            errs.sort();
            assert_eq!(errs, vec![-1, -1, 0, 0, 0, 0, 1, 1]);
        }
    }

    #[test]
    fn eca4_examples() {
        assert_eq!(eca4_add(0xF, 0x1, false, 0xF), (0x0, true));
        assert_eq!(eca4_add(0x0, 0x0, false, 0x0), (0x0, false));

        // 0101 + 0010, every cell approximate. Per-cell rows (a,b,cin):
        // bit0 (1,0,0) ok, bit1 (0,1,0) -1, bit2 (1,0,0) ok, bit3 (0,0,0) ok.
        let (s, c) = eca4_add(0x5, 0x2, false, 0x0);
        let got = s as i32 + ((c as i32) << 4);
        assert_eq!(got - 7, -2);
    }

    #[test]
    fn csa_wraps_when_accurate() {
        assert_eq!(
            csa32_add(0xFFFF_FFFF, 1, false, AdderConfig::ACCURATE),
            (0, true)
        );
    }

    #[test]
    fn upper_half_is_forced_accurate() {
        let cfg = AdderConfig::from_error_field(0);
        assert_eq!(cfg.error_mask(), 0xFFFF_0000);
        // Only the upper halves are nonzero so every approximate cell sees (0,0,0).
        assert_eq!(
            csa32_add(0x1234_0000, 0x4321_0000, false, cfg).0,
            0x5555_0000
        );
    }
}
