//! A compiler for a Cg shading-language subset targeting `vs_1_1`, `arbvp1`
//! and `arbfp1`, with two interpreters (source-level and assembly-level) for
//! differential verification of every compilation.

pub mod corpus;
pub mod cli;
pub mod codegen;
pub mod diag;
pub mod frontend;
pub mod pipeline;
pub mod profiles;
pub mod sema;
pub mod stdlib;
pub mod types;
pub mod value;
pub mod vm;

pub use diag::{Code, Diagnostic, Diagnostics, Loc, Severity};
pub use pipeline::{compile, compile_str, CompileOptions, Compilation};
