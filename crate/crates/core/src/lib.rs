//! Instruction-set simulator for an RV32IEM core whose arithmetic units can be
//! switched between accurate and approximate circuits at run time through
//! custom CSRs, together with circuit-level error analysis, energy accounting
//! and a set of generated benchmark kernels.

pub mod circuits;
pub mod compare;
pub mod energy;
pub mod error_analysis;
pub mod isa;
pub mod kernels;
pub mod machine;
