//! Bit-accurate models of the execution-stage arithmetic circuits.

mod adder;
mod divider;
mod multiplier;

pub use adder::{
    csa32_add, csa32_add_with, eca4_add, eca4_add_with, full_adder, full_adder_with, ripple32_add,
    AdderConfig, FaTruthTable, FullAdderMode,
};
pub use divider::{exact_div, DivOp};
pub use multiplier::{
    approx_mul8, approx_mul8_with, final_adder_operands, mul16, mul32, mul32_signed, MulConfig,
    CONFIG_COUNT, CONTROL_BITS, FIRST_CONTROLLED_BIT,
};
