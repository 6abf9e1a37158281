//! Approximate 8x8 multiplier and its hierarchical 16/32-bit extensions.
//!
//! The partial products are reduced to two operands: the sum of the
//! even-indexed rows and the sum of the odd-indexed rows. Bits 0..3 of their
//! sum are added exactly. Bits 4..15 go through a 12-cell ripple of
//! error-controllable full adders, of which cells 4..10 take their error line
//! from [`MulConfig::error_mask`] and cells 11..15 are always accurate.

use super::adder::{ripple, FaTruthTable};

/// Number of controllable final-adder cells.
pub const CONTROL_BITS: u32 = 7;
/// Product bit position of the first controllable cell.
pub const FIRST_CONTROLLED_BIT: u32 = 4;
/// Number of distinct error-mask configurations.
pub const CONFIG_COUNT: usize = 1 << CONTROL_BITS;

/// Error-line mask and truncation setting of the approximate multiplier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MulConfig {
    error_mask: u8,
    truncation: u8,
}

impl MulConfig {
    pub const FULL_MASK: u8 = 0x7F;

    pub const ACCURATE: MulConfig = MulConfig {
        error_mask: Self::FULL_MASK,
        truncation: 0,
    };

    /// `error_mask` is reduced to 7 bits and `truncation` to 0..=31.
    pub fn new(error_mask: u8, truncation: u8) -> Self {
        MulConfig {
            error_mask: error_mask & Self::FULL_MASK,
            truncation: truncation & 0x1F,
        }
    }

    pub fn with_mask(error_mask: u8) -> Self {
        Self::new(error_mask, 0)
    }

    pub fn error_mask(&self) -> u8 {
        self.error_mask
    }

    pub fn truncation(&self) -> u8 {
        self.truncation
    }

    pub fn is_accurate(&self) -> bool {
        self.error_mask == Self::FULL_MASK && self.truncation == 0
    }

    /// Analytic worst-case error distance of one 8x8 product.
    ///
    /// Each approximate cell contributes at most one unit of its own weight.
    /// Truncation is not included.
    pub fn max_error_bound(&self) -> u32 {
        (0..CONTROL_BITS)
            .filter(|k| (self.error_mask >> k) & 1 == 0)
            .map(|k| 1u32 << (FIRST_CONTROLLED_BIT + k))
            .sum()
    }

    /// Product bits where an approximate cell sits.
    pub fn approximate_positions(&self) -> u16 {
        ((!self.error_mask & Self::FULL_MASK) as u16) << FIRST_CONTROLLED_BIT
    }
}

impl Default for MulConfig {
    fn default() -> Self {
        MulConfig::ACCURATE
    }
}

/// Splits the partial products of `a*b` into even-row and odd-row sums.
#[inline]
pub fn final_adder_operands(a: u8, b: u8) -> (u16, u16) {
    let (mut even, mut odd) = (0u16, 0u16);
    for i in 0..8 {
        if (b >> i) & 1 == 1 {
            let row = (a as u16) << i;
            if i % 2 == 0 {
                even += row;
            } else {
                odd += row;
            }
        }
    }
    (even, odd)
}

pub fn approx_mul8(a: u8, b: u8, cfg: MulConfig) -> u16 {
    approx_mul8_with(&FaTruthTable::CALIBRATED, a, b, cfg)
}

pub fn approx_mul8_with(table: &FaTruthTable, a: u8, b: u8, cfg: MulConfig) -> u16 {
    let (even, odd) = final_adder_operands(a, b);
    let low = (even & 0xF) + (odd & 0xF);
    let carry = low >> 4 != 0;
    // Cells 11..15 of the upper ripple are hard-wired accurate.
    let lines = cfg.error_mask as u64 | 0x1F << CONTROL_BITS;
    let (high, _) = ripple(
        table,
        (even >> 4) as u64,
        (odd >> 4) as u64,
        carry,
        lines,
        12,
    );
    let product = (high as u16) << 4 | (low & 0xF);
    truncate(product as u64, cfg.truncation) as u16
}

#[inline]
fn truncate(v: u64, bits: u8) -> u64 {
    if bits >= 64 {
        0
    } else {
        v & !((1u64 << bits) - 1)
    }
}

/// 16x16 multiply from four 8x8 blocks with exact recombination.
pub fn mul16(a: u16, b: u16, cfg: MulConfig) -> u32 {
    let (ah, al) = ((a >> 8) as u8, a as u8);
    let (bh, bl) = ((b >> 8) as u8, b as u8);
    let hh = approx_mul8(ah, bh, cfg) as u32;
    let hl = approx_mul8(ah, bl, cfg) as u32;
    let lh = approx_mul8(al, bh, cfg) as u32;
    let ll = approx_mul8(al, bl, cfg) as u32;
    (hh << 16)
        .wrapping_add(hl << 8)
        .wrapping_add(lh << 8)
        .wrapping_add(ll)
}

/// 32x32 multiply from four 16x16 blocks with exact recombination.
pub fn mul32(a: u32, b: u32, cfg: MulConfig) -> u64 {
    let (ah, al) = ((a >> 16) as u16, a as u16);
    let (bh, bl) = ((b >> 16) as u16, b as u16);
    let hh = mul16(ah, bh, cfg) as u64;
    let hl = mul16(ah, bl, cfg) as u64;
    let lh = mul16(al, bh, cfg) as u64;
    let ll = mul16(al, bl, cfg) as u64;
    (hh << 32)
        .wrapping_add(hl << 16)
        .wrapping_add(lh << 16)
        .wrapping_add(ll)
}

/// Signed multiply through a sign-magnitude wrapper around [`mul32`].
///
/// Returns the low word (`mul`) or the high word (`mulh`) of the 64-bit
/// product.
pub fn mul32_signed(a: i32, b: i32, high: bool, cfg: MulConfig) -> u32 {
    let magnitude = mul32(a.unsigned_abs(), b.unsigned_abs(), cfg);
    let product = if (a < 0) != (b < 0) {
        magnitude.wrapping_neg()
    } else {
        magnitude
    };
    if high {
        (product >> 32) as u32
    } else {
        product as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accurate_examples() {
        assert_eq!(approx_mul8(200, 123, MulConfig::ACCURATE), 24600);
        assert_eq!(mul16(0x0100, 0x0100, MulConfig::ACCURATE), 0x0001_0000);
        assert_eq!(
            mul32(0xFFFF_FFFF, 0xFFFF_FFFF, MulConfig::ACCURATE),
            0xFFFF_FFFE_0000_0001
        );
        assert_eq!(mul32(0xDEAD_BEEF, 1, MulConfig::ACCURATE), 0xDEAD_BEEF);
    }

    #[test]
    fn hierarchical_blocks_are_exact_with_full_mask() {
        for (a, b) in [(0xFFFFu16, 0xFFFFu16), (0x1234, 0xABCD), (0x8000, 3)] {
            assert_eq!(mul16(a, b, MulConfig::ACCURATE), a as u32 * b as u32);
        }
    }

    #[test]
    fn zero_operand_is_error_free() {
        for mask in 0..=0x7Fu8 {
            let cfg = MulConfig::with_mask(mask);
            for x in [0u8, 1, 77, 255] {
                assert_eq!(approx_mul8(0, x, cfg), 0);
                assert_eq!(approx_mul8(x, 0, cfg), 0);
            }
            assert_eq!(mul16(0xBEEF, 0, cfg), 0);
        }
    }

    #[test]
    fn calibrated_value_at_7e() {
        // Reference value from an independent numpy model of the same circuit.
        assert_eq!(approx_mul8(200, 123, MulConfig::with_mask(0x7E)), 24584);
        assert_eq!(approx_mul8(200, 123, MulConfig::with_mask(0x00)), 26504);
    }

    #[test]
    fn truncation_zeroes_low_bits() {
        let cfg = MulConfig::new(0x7F, 5);
        assert_eq!(approx_mul8(200, 123, cfg), 24600 & !0x1F);
        assert_eq!(approx_mul8(255, 255, MulConfig::new(0x7F, 16)), 0);
    }

    #[test]
    fn signed_examples() {
        let acc = MulConfig::ACCURATE;
        assert_eq!(mul32_signed(-3, 5, false, acc), 0xFFFF_FFF1);
        assert_eq!(mul32_signed(i32::MIN, -1, false, acc), 0x8000_0000);
        assert_eq!(mul32_signed(-1, -1, true, acc), 0);
        assert_eq!(mul32_signed(i32::MIN, i32::MIN, true, acc), 0x4000_0000);
    }

    #[test]
    fn bound_examples() {
        assert_eq!(MulConfig::with_mask(0x7F).max_error_bound(), 0);
        assert_eq!(MulConfig::with_mask(0x7E).max_error_bound(), 16);
        assert_eq!(MulConfig::with_mask(0x00).max_error_bound(), 2032);
    }
}
