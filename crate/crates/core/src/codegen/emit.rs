//! Assembly text for the target dialects.

use std::fmt::Write as _;

use super::ir::{mask_text, Instruction, IrProgram, Reg, Src};
use crate::profiles::ProfileKind;

/// A constant register declaration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamDecl {
    /// `def cN, ...` or `PARAM cN = {...};`
    Literal { reg: u32, value: [f32; 4] },
    /// `PARAM cN = program.local[I];`, fed from uniform register `I`.
    Local { reg: u32, index: u32 },
}

impl ParamDecl {
    pub fn reg(&self) -> u32 {
        match *self {
            ParamDecl::Literal { reg, .. } | ParamDecl::Local { reg, .. } => reg,
        }
    }
}

/// An emitted (or re-parsed) program. `instructions` use `Reg::Const` for
/// every constant register; pool entries have been placed after the
/// uniforms and appear in `params` as literals.
#[derive(Debug, Clone, PartialEq)]
pub struct AssemblyListing {
    pub kind: ProfileKind,
    pub text: String,
    pub instructions: Vec<Instruction>,
    pub params: Vec<ParamDecl>,
    /// Temporary registers used, `r0`/`R0` upwards.
    pub temps: u32,
}

impl AssemblyListing {
    /// Executable instructions, not counting the header, declarations and
    /// `END`.
    pub fn instruction_count(&self) -> usize {
        self.instructions.len()
    }

    pub fn header(&self) -> &'static str {
        header(self.kind)
    }

    pub fn literal(&self, reg: u32) -> Option<[f32; 4]> {
        self.params.iter().find_map(|p| match *p {
            ParamDecl::Literal { reg: r, value } if r == reg => Some(value),
            _ => None,
        })
    }
}

pub fn header(kind: ProfileKind) -> &'static str {
    match kind {
        ProfileKind::Vs11 => "vs.1.1",
        ProfileKind::ArbVp1 => "!!ARBvp1.0",
        ProfileKind::ArbFp1 => "!!ARBfp1.0",
    }
}

fn reg_text(kind: ProfileKind, r: &Reg) -> String {
    match (kind, r) {
        (_, Reg::Input(n) | Reg::Output(n)) => n.clone(),
        (_, Reg::Const(n)) => format!("c{n}"),
        (_, Reg::Pool(n)) => format!("k{n}"),
        (ProfileKind::Vs11, Reg::Temp(n)) => format!("r{n}"),
        (_, Reg::Temp(n)) => format!("R{n}"),
    }
}

fn src_text(kind: ProfileKind, s: &Src) -> String {
    format!("{}{}{}", if s.negate { "-" } else { "" }, reg_text(kind, &s.reg), s.swizzle_suffix())
}

/// One instruction line without trailing punctuation.
pub fn instruction_text(kind: ProfileKind, ins: &Instruction) -> String {
    let name = if kind == ProfileKind::Vs11 { ins.op.vs_name() } else { ins.op.arb_name() };
    let mut operands = Vec::new();
    if let Some(d) = &ins.dst {
        operands.push(format!("{}{}", reg_text(kind, &d.reg), mask_text(d.mask)));
    }
    operands.extend(ins.srcs.iter().map(|s| src_text(kind, s)));
    if let Some(t) = &ins.tex {
        operands.push(format!("texture[{}]", t.unit));
        operands.push(t.target_name().to_string());
    }
    format!("{name} {}", operands.join(", "))
}

fn number_list(v: &[f32; 4]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Emit an allocated program. Pool entry `k` becomes constant register
/// `uniform_registers + k`.
pub fn emit(ir: &IrProgram, kind: ProfileKind) -> AssemblyListing {
    let base = ir.uniform_registers;
    let mut params = Vec::new();
    if kind != ProfileKind::Vs11 {
        params.extend((0..base).map(|i| ParamDecl::Local { reg: i, index: i }));
    }
    params.extend(ir.pool.iter().enumerate().map(|(k, v)| ParamDecl::Literal { reg: base + k as u32, value: *v }));
    let place = |r: &mut Reg| {
        if let Reg::Pool(k) = r {
            *r = Reg::Const(base + *k);
        }
    };
    let mut instructions = ir.instrs.clone();
    for ins in &mut instructions {
        ins.srcs.iter_mut().for_each(|s| place(&mut s.reg));
    }

    let mut text = String::new();
    writeln!(text, "{}", header(kind)).unwrap();
    for p in &params {
        match (kind, p) {
            (ProfileKind::Vs11, ParamDecl::Literal { reg, value }) => writeln!(text, "def c{reg}, {}", number_list(value)),
            (_, ParamDecl::Literal { reg, value }) => writeln!(text, "PARAM c{reg} = {{{}}};", number_list(value)),
            (_, ParamDecl::Local { reg, index }) => writeln!(text, "PARAM c{reg} = program.local[{index}];"),
        }
        .unwrap();
    }
    if kind != ProfileKind::Vs11 {
        for t in 0..ir.temps {
            writeln!(text, "TEMP R{t};").unwrap();
        }
    }
    for ins in &instructions {
        let line = instruction_text(kind, ins);
        if kind == ProfileKind::Vs11 {
            writeln!(text, "{line}").unwrap();
        } else {
            writeln!(text, "{line};").unwrap();
        }
    }
    if kind != ProfileKind::Vs11 {
        writeln!(text, "END").unwrap();
    }
    AssemblyListing { kind, text, instructions, params, temps: ir.temps }
}
