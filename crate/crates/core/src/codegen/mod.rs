//! Code generation: lowering to a register IR, optimization, register
//! allocation and assembly emission, plus re-parsing of emitted text.

mod allocate;
mod emit;
pub mod ir;
mod lower;
mod optimize;
mod parse;

pub use allocate::allocate;
pub use emit::{emit, header, instruction_text, AssemblyListing, ParamDecl};
pub use ir::{Dst, Instruction, IrProgram, Opcode, Reg, Src, TexTarget};
pub use lower::{lower, MAX_UNROLL};
pub use optimize::optimize;
pub use parse::parse_listing;
