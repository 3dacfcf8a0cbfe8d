//! Assembly-level interpreter: executes a listing on a register machine
//! with four binary32 lanes per register.

use std::collections::BTreeMap;

use super::{uniform_components, ExecError, ExecResult, ShadeInput};
use crate::codegen::{AssemblyListing, Instruction, Opcode, ParamDecl, Reg, Src};
use crate::profiles::{lookup_profile, BindingTable, ProfileKind, UniformSlot};
use crate::stdlib::{dot_f32, log2_f32, rsqrt_f32};
use crate::types::{SamplerDim, Type};
use crate::value::EvalError;

type Lanes = [Option<f32>; 4];

/// Register file of one invocation. A lane that was never written reads as
/// an error rather than a default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MachineState {
    pub inputs: BTreeMap<String, Lanes>,
    pub outputs: BTreeMap<String, Lanes>,
    pub constants: BTreeMap<u32, Lanes>,
    pub temps: BTreeMap<u32, Lanes>,
    pub discarded: bool,
}

impl MachineState {
    fn file(&self, r: &Reg) -> Option<&Lanes> {
        match r {
            Reg::Input(n) => self.inputs.get(n),
            Reg::Output(n) => self.outputs.get(n),
            Reg::Const(c) => self.constants.get(c),
            Reg::Temp(t) => self.temps.get(t),
            Reg::Pool(_) => None,
        }
    }

    /// Source value with swizzle and negation applied, reading only the
    /// result positions in `positions`; the rest are zero.
    pub fn read(&self, s: &Src, positions: u8) -> Result<[f32; 4], ExecError> {
        let regs = self.file(&s.reg);
        let mut out = [0.0; 4];
        for (p, slot) in out.iter_mut().enumerate() {
            if positions & (1 << p) == 0 {
                continue;
            }
            let lane = s.swizzle[p] as usize;
            let v = regs.and_then(|r| r[lane]).ok_or_else(|| {
                ExecError::Uninitialized(format!("{}.{}", s.reg, ['x', 'y', 'z', 'w'][lane]))
            })?;
            *slot = if s.negate { -v } else { v };
        }
        Ok(out)
    }

    fn write(&mut self, r: &Reg, mask: u8, v: [f32; 4]) {
        let file = match r {
            Reg::Output(n) => self.outputs.entry(n.clone()).or_insert([Some(0.0), Some(0.0), Some(0.0), Some(1.0)]),
            Reg::Temp(t) => self.temps.entry(*t).or_insert([None; 4]),
            Reg::Input(n) => self.inputs.entry(n.clone()).or_insert([None; 4]),
            Reg::Const(c) => self.constants.entry(*c).or_insert([None; 4]),
            Reg::Pool(_) => return,
        };
        for l in 0..4 {
            if mask & (1 << l) != 0 {
                file[l] = Some(v[l]);
            }
        }
    }
}

fn positions(ins: &Instruction) -> u8 {
    match ins.op {
        Opcode::Dp3 => 0b0111,
        Opcode::Dp4 | Opcode::Kil | Opcode::Txp => 0b1111,
        Opcode::Rcp | Opcode::Rsq | Opcode::Lg2 => 0b0001,
        Opcode::Tex => match ins.tex.map(|t| t.dim) {
            Some(SamplerDim::D2) => 0b0011,
            _ => 0b0111,
        },
        _ => ins.dst.as_ref().map_or(0b1111, |d| d.mask),
    }
}

/// Place uniform components into per-register lanes following the binding
/// layout: one register per scalar or vector, one per matrix row, arrays
/// and records in order.
fn layout(ty: &Type, comps: &[f32], next: &mut u32, regs: &mut BTreeMap<u32, Lanes>) -> usize {
    match ty {
        Type::Scalar(_) | Type::Vector(..) => {
            let n = ty.component_count();
            let mut lanes = [None; 4];
            for (l, v) in comps[..n].iter().enumerate() {
                lanes[l] = Some(*v);
            }
            regs.insert(*next, lanes);
            *next += 1;
            n
        }
        Type::Matrix(_, r, c) => {
            let c = *c as usize;
            for row in 0..*r as usize {
                let mut lanes = [None; 4];
                for (l, v) in comps[row * c..(row + 1) * c].iter().enumerate() {
                    lanes[l] = Some(*v);
                }
                regs.insert(*next, lanes);
                *next += 1;
            }
            *r as usize * c
        }
        Type::Array(e, n) => {
            let mut used = 0;
            for _ in 0..*n {
                used += layout(e, &comps[used..], next, regs);
            }
            used
        }
        Type::Record(r) => {
            let mut used = 0;
            for f in &r.fields {
                used += layout(&f.ty, &comps[used..], next, regs);
            }
            used
        }
        Type::Sampler(_) | Type::Void => 0,
    }
}

fn profile_name(kind: ProfileKind) -> &'static str {
    match kind {
        ProfileKind::Vs11 => "vs_1_1",
        ProfileKind::ArbVp1 => "arbvp1",
        ProfileKind::ArbFp1 => "arbfp1",
    }
}

/// Execute `listing` on `input`. `bindings` says which register holds each
/// varying, uniform and output; it must come from the compilation that
/// produced the listing (or one with the same interface).
pub fn run_asm(listing: &AssemblyListing, input: &ShadeInput, bindings: &BindingTable) -> Result<ExecResult, ExecError> {
    let limits = lookup_profile(profile_name(listing.kind)).map(|p| p.limits).ok();
    let mut m = MachineState::default();
    for b in &bindings.inputs {
        let v = input.varying(&b.semantic).ok_or_else(|| ExecError::MissingVarying(b.semantic.clone()))?;
        m.inputs.insert(b.register.clone(), v.map(Some));
    }
    let mut uniform_regs = BTreeMap::new();
    for u in &bindings.uniforms {
        if let UniformSlot::Constants { base, .. } = u.slot {
            let comps = uniform_components(input, &u.name, &u.ty)?;
            let mut next = base;
            layout(&u.ty, comps, &mut next, &mut uniform_regs);
        }
    }
    if listing.kind == ProfileKind::Vs11 {
        m.constants = uniform_regs.clone();
    }
    for p in &listing.params {
        match *p {
            ParamDecl::Literal { reg, value } => {
                m.constants.insert(reg, value.map(Some));
            }
            ParamDecl::Local { reg, index } => {
                m.constants.insert(reg, uniform_regs.get(&index).copied().unwrap_or([None; 4]));
            }
        }
    }
    for b in &bindings.outputs {
        m.outputs.insert(b.register.clone(), [Some(0.0), Some(0.0), Some(0.0), Some(1.0)]);
    }

    for ins in &listing.instructions {
        check_ranges(ins, limits.map(|l| (l.max_constants, l.max_temps)), &m)?;
        step(&mut m, ins, input)?;
        if m.discarded {
            return Ok(ExecResult::discarded());
        }
    }

    let mut result = ExecResult::default();
    for b in &bindings.outputs {
        let lanes = m.outputs.get(&b.register).copied().unwrap_or([Some(0.0), Some(0.0), Some(0.0), Some(1.0)]);
        result.outputs.insert(b.semantic.clone(), lanes.map(|l| l.unwrap_or(0.0)));
    }
    Ok(result)
}

fn check_ranges(ins: &Instruction, limits: Option<(u32, u32)>, m: &MachineState) -> Result<(), ExecError> {
    let Some((max_c, max_t)) = limits else { return Ok(()) };
    let regs = ins.srcs.iter().map(|s| &s.reg).chain(ins.dst.as_ref().map(|d| &d.reg));
    for r in regs {
        let bad = match r {
            Reg::Const(c) => *c >= max_c,
            Reg::Temp(t) => *t >= max_t,
            Reg::Output(n) => !m.outputs.contains_key(n),
            _ => false,
        };
        if bad {
            return Err(ExecError::RegisterOutOfRange(r.to_string()));
        }
    }
    Ok(())
}

/// Execute one instruction.
pub fn step(m: &mut MachineState, ins: &Instruction, input: &ShadeInput) -> Result<(), ExecError> {
    let pos = positions(ins);
    let srcs = ins.srcs.iter().map(|s| m.read(s, pos)).collect::<Result<Vec<_>, _>>()?;
    let lanewise = |f: &dyn Fn(usize) -> f32| -> [f32; 4] { std::array::from_fn(f) };
    let v: [f32; 4] = match ins.op {
        Opcode::Mov => srcs[0],
        Opcode::Add => lanewise(&|l| srcs[0][l] + srcs[1][l]),
        Opcode::Mul => lanewise(&|l| srcs[0][l] * srcs[1][l]),
        Opcode::Mad => lanewise(&|l| srcs[0][l] * srcs[1][l] + srcs[2][l]),
        Opcode::Min => lanewise(&|l| srcs[0][l].min(srcs[1][l])),
        Opcode::Max => lanewise(&|l| srcs[0][l].max(srcs[1][l])),
        Opcode::Slt => lanewise(&|l| if srcs[0][l] < srcs[1][l] { 1.0 } else { 0.0 }),
        Opcode::Sge => lanewise(&|l| if srcs[0][l] >= srcs[1][l] { 1.0 } else { 0.0 }),
        Opcode::Dp3 => [dot_f32(&srcs[0][..3], &srcs[1][..3]); 4],
        Opcode::Dp4 => [dot_f32(&srcs[0], &srcs[1]); 4],
        Opcode::Rcp => [1.0 / srcs[0][0]; 4],
        Opcode::Rsq => [rsqrt_f32(srcs[0][0]); 4],
        Opcode::Lg2 => [log2_f32(srcs[0][0]); 4],
        Opcode::Tex | Opcode::Txp => {
            let t = ins.tex.ok_or_else(|| ExecError::UnknownOpcode(format!("{} without a texture", ins.op.arb_name())))?;
            let img = input.textures.get(&t.unit).ok_or(EvalError::MissingTexture(t.unit))?;
            let c = srcs[0];
            match (ins.op, t.dim) {
                (Opcode::Tex, SamplerDim::D2) => img.sample_2d(c[0], c[1]),
                (Opcode::Tex, SamplerDim::D3) => img.sample_3d(c[0], c[1], c[2]),
                (_, SamplerDim::Cube) => img.sample_cube([c[0], c[1], c[2]]),
                (_, SamplerDim::D2) => img.sample_2d_proj(c),
                (_, SamplerDim::D3) => img.sample_3d_proj(c),
            }
        }
        Opcode::Kil => {
            if srcs[0].iter().any(|x| *x < 0.0) {
                m.discarded = true;
            }
            return Ok(());
        }
    };
    if let Some(d) = &ins.dst {
        m.write(&d.reg, d.mask, v);
    }
    Ok(())
}
