//! Exact divider with RISC-V M-extension corner cases.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DivOp {
    Div,
    Divu,
    Rem,
    Remu,
}

/// Division by zero yields all ones (quotient) or the dividend (remainder);
/// `INT_MIN / -1` yields `INT_MIN` with remainder 0.
pub fn exact_div(a: u32, b: u32, op: DivOp) -> u32 {
    match op {
        DivOp::Div => {
            if b == 0 {
                u32::MAX
            } else {
                (a as i32).wrapping_div(b as i32) as u32
            }
        }
        DivOp::Divu => a.checked_div(b).unwrap_or(u32::MAX),
        DivOp::Rem => {
            if b == 0 {
                a
            } else {
                (a as i32).wrapping_rem(b as i32) as u32
            }
        }
        DivOp::Remu => a.checked_rem(b).unwrap_or(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_cases() {
        assert_eq!(exact_div(7, 0, DivOp::Div), 0xFFFF_FFFF);
        assert_eq!(exact_div(7, 0, DivOp::Divu), 0xFFFF_FFFF);
        assert_eq!(exact_div(7, 0, DivOp::Rem), 7);
        assert_eq!(exact_div(7, 0, DivOp::Remu), 7);
        assert_eq!(exact_div(0x8000_0000, 0xFFFF_FFFF, DivOp::Div), 0x8000_0000);
        assert_eq!(exact_div(0x8000_0000, 0xFFFF_FFFF, DivOp::Rem), 0);
        assert_eq!(exact_div(20, 5, DivOp::Divu), 4);
        assert_eq!(exact_div((-7i32) as u32, 2, DivOp::Div), (-3i32) as u32);
        assert_eq!(exact_div((-7i32) as u32, 2, DivOp::Rem), (-1i32) as u32);
    }
}
