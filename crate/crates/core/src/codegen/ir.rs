//! Straight-line vector IR shared by lowering, optimization, allocation,
//! emission and the assembly interpreter.

use std::fmt;

use crate::types::SamplerDim;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Opcode {
    Mov,
    Mul,
    Add,
    Mad,
    Dp3,
    Dp4,
    Rcp,
    Rsq,
    Lg2,
    Min,
    Max,
    Slt,
    Sge,
    Tex,
    Txp,
    Kil,
}

impl Opcode {
    pub const ALL: [Opcode; 16] = [
        Opcode::Mov,
        Opcode::Mul,
        Opcode::Add,
        Opcode::Mad,
        Opcode::Dp3,
        Opcode::Dp4,
        Opcode::Rcp,
        Opcode::Rsq,
        Opcode::Lg2,
        Opcode::Min,
        Opcode::Max,
        Opcode::Slt,
        Opcode::Sge,
        Opcode::Tex,
        Opcode::Txp,
        Opcode::Kil,
    ];

    /// Number of register sources (the texture operand of TEX/TXP is not
    /// counted).
    pub fn arity(self) -> usize {
        match self {
            Opcode::Mov | Opcode::Rcp | Opcode::Rsq | Opcode::Lg2 | Opcode::Tex | Opcode::Txp | Opcode::Kil => 1,
            Opcode::Mad => 3,
            _ => 2,
        }
    }

    pub fn has_dest(self) -> bool {
        self != Opcode::Kil
    }

    /// Reads one replicated component and writes the result to every
    /// masked lane.
    pub fn is_scalar(self) -> bool {
        matches!(self, Opcode::Rcp | Opcode::Rsq | Opcode::Lg2)
    }

    pub fn is_texture(self) -> bool {
        matches!(self, Opcode::Tex | Opcode::Txp)
    }

    /// Mnemonic in the ARB program formats.
    pub fn arb_name(self) -> &'static str {
        match self {
            Opcode::Mov => "MOV",
            Opcode::Mul => "MUL",
            Opcode::Add => "ADD",
            Opcode::Mad => "MAD",
            Opcode::Dp3 => "DP3",
            Opcode::Dp4 => "DP4",
            Opcode::Rcp => "RCP",
            Opcode::Rsq => "RSQ",
            Opcode::Lg2 => "LG2",
            Opcode::Min => "MIN",
            Opcode::Max => "MAX",
            Opcode::Slt => "SLT",
            Opcode::Sge => "SGE",
            Opcode::Tex => "TEX",
            Opcode::Txp => "TXP",
            Opcode::Kil => "KIL",
        }
    }

    /// Mnemonic in DirectX 8 vertex shader assembly. The texture and kill
    /// opcodes never appear in vertex programs; their names are only used
    /// when re-parsing hand-written listings.
    pub fn vs_name(self) -> &'static str {
        match self {
            Opcode::Mov => "mov",
            Opcode::Mul => "mul",
            Opcode::Add => "add",
            Opcode::Mad => "mad",
            Opcode::Dp3 => "dp3",
            Opcode::Dp4 => "dp4",
            Opcode::Rcp => "rcp",
            Opcode::Rsq => "rsq",
            Opcode::Lg2 => "log",
            Opcode::Min => "min",
            Opcode::Max => "max",
            Opcode::Slt => "slt",
            Opcode::Sge => "sge",
            Opcode::Tex => "tex",
            Opcode::Txp => "txp",
            Opcode::Kil => "kil",
        }
    }

    pub fn from_name(name: &str) -> Option<Opcode> {
        Opcode::ALL.into_iter().find(|op| op.arb_name().eq_ignore_ascii_case(name) || op.vs_name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reg {
    /// Varying input register by its profile name (`v0`, `fragment.color.primary`).
    Input(String),
    /// Output register by its profile name (`oPos`, `result.color`).
    Output(String),
    /// Constant register `cN`.
    Const(u32),
    /// Entry `N` of the literal-constant pool, placed after the uniforms
    /// at emission.
    Pool(u32),
    /// Temporary: virtual before allocation, physical after.
    Temp(u32),
}

impl Reg {
    pub fn as_temp(&self) -> Option<u32> {
        match self {
            Reg::Temp(t) => Some(*t),
            _ => None,
        }
    }
}

impl fmt::Display for Reg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reg::Input(n) | Reg::Output(n) => f.write_str(n),
            Reg::Const(n) => write!(f, "c{n}"),
            Reg::Pool(n) => write!(f, "k{n}"),
            Reg::Temp(n) => write!(f, "t{n}"),
        }
    }
}

pub const IDENTITY: [u8; 4] = [0, 1, 2, 3];
pub const FULL_MASK: u8 = 0b1111;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Src {
    pub reg: Reg,
    /// Source lane read for each of the four result lanes.
    pub swizzle: [u8; 4],
    pub negate: bool,
}

impl Src {
    pub fn new(reg: Reg) -> Self {
        Src { reg, swizzle: IDENTITY, negate: false }
    }

    pub fn replicate(reg: Reg, lane: u8) -> Self {
        Src { reg, swizzle: [lane; 4], negate: false }
    }

    pub fn negated(mut self) -> Self {
        self.negate = !self.negate;
        self
    }

    /// Suffix as printed: nothing for the identity, one letter when all
    /// four lanes agree, otherwise four letters.
    pub fn swizzle_suffix(&self) -> String {
        swizzle_text(&self.swizzle)
    }
}

pub fn swizzle_text(s: &[u8; 4]) -> String {
    const L: [char; 4] = ['x', 'y', 'z', 'w'];
    if *s == IDENTITY {
        String::new()
    } else if s.iter().all(|&c| c == s[0]) {
        format!(".{}", L[s[0] as usize])
    } else {
        format!(".{}", s.iter().map(|&c| L[c as usize]).collect::<String>())
    }
}

pub fn mask_text(mask: u8) -> String {
    if mask == FULL_MASK {
        return String::new();
    }
    let letters: String = (0..4).filter(|i| mask & (1 << i) != 0).map(|i| ['x', 'y', 'z', 'w'][i]).collect();
    format!(".{letters}")
}

impl fmt::Display for Src {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", if self.negate { "-" } else { "" }, self.reg, self.swizzle_suffix())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dst {
    pub reg: Reg,
    /// Bit `i` set when lane `i` is written.
    pub mask: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TexTarget {
    pub unit: u32,
    pub dim: SamplerDim,
}

impl TexTarget {
    pub fn target_name(&self) -> &'static str {
        match self.dim {
            SamplerDim::D2 => "2D",
            SamplerDim::D3 => "3D",
            SamplerDim::Cube => "CUBE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instruction {
    pub op: Opcode,
    pub dst: Option<Dst>,
    pub srcs: Vec<Src>,
    pub tex: Option<TexTarget>,
}

impl Instruction {
    pub fn new(op: Opcode, dst: Dst, srcs: Vec<Src>) -> Self {
        Instruction { op, dst: Some(dst), srcs, tex: None }
    }

    /// Lanes of source `i` that the instruction reads, given its opcode
    /// and destination mask.
    pub fn lanes_read(&self, i: usize) -> u8 {
        let s = &self.srcs[i];
        let via = |lanes: u8| (0..4).filter(|l| lanes & (1 << l) != 0).fold(0u8, |m, l| m | 1 << s.swizzle[l]);
        match self.op {
            Opcode::Dp3 => via(0b0111),
            Opcode::Dp4 | Opcode::Kil | Opcode::Txp => via(0b1111),
            Opcode::Rcp | Opcode::Rsq | Opcode::Lg2 => via(0b0001),
            Opcode::Tex => match self.tex.map(|t| t.dim) {
                Some(SamplerDim::D2) => via(0b0011),
                _ => via(0b0111),
            },
            _ => via(self.dst.as_ref().map_or(FULL_MASK, |d| d.mask)),
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.op.arb_name())?;
        let mut sep = " ";
        if let Some(d) = &self.dst {
            write!(f, " {}{}", d.reg, mask_text(d.mask))?;
            sep = ", ";
        }
        for s in &self.srcs {
            write!(f, "{sep}{s}")?;
            sep = ", ";
        }
        if let Some(t) = &self.tex {
            write!(f, ", texture[{}], {}", t.unit, t.target_name())?;
        }
        Ok(())
    }
}

/// A lowered program. Temporaries are single-assignment per lane: a lane of
/// a temporary is written by at most one instruction, before any read.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IrProgram {
    pub instrs: Vec<Instruction>,
    /// Literal constants; `Reg::Pool(i)` names entry `i`.
    pub pool: Vec<[f32; 4]>,
    /// Constant registers taken by uniforms; the pool starts here.
    pub uniform_registers: u32,
    /// Number of temporaries (virtual before allocation).
    pub temps: u32,
}

impl IrProgram {
    /// Index of a pool entry equal (bitwise) to `v`, adding it if needed.
    pub fn intern(&mut self, v: [f32; 4]) -> u32 {
        let bits = |a: &[f32; 4]| a.map(f32::to_bits);
        if let Some(i) = self.pool.iter().position(|p| bits(p) == bits(&v)) {
            return i as u32;
        }
        self.pool.push(v);
        (self.pool.len() - 1) as u32
    }

    pub fn new_temp(&mut self) -> u32 {
        self.temps += 1;
        self.temps - 1
    }
}

impl fmt::Display for IrProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.pool.iter().enumerate() {
            writeln!(f, "k{i} = {{{}, {}, {}, {}}}", p[0], p[1], p[2], p[3])?;
        }
        for ins in &self.instrs {
            writeln!(f, "{ins}")?;
        }
        Ok(())
    }
}
