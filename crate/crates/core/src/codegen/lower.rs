//! Lowering by symbolic execution.
//!
//! The typed tree is executed with values whose components are either
//! known at compile time or live in a register lane. Known operands fold
//! through the same arithmetic the source interpreter uses, so folded
//! results are bit-identical to it. Operations on register lanes emit
//! instructions. Calls are inlined, loops are unrolled and `if` statements
//! pick their branch, which requires every condition to be known; the
//! profile validator has already rejected programs where that fails.

use std::collections::HashMap;

use super::ir::{Dst, Instruction, IrProgram, Opcode, Reg, Src, TexTarget};
use crate::diag::{Code, Diagnostic, Diagnostics, Loc};
use crate::profiles::{is_discard_only, BindingTable, ProfileDescriptor, UniformSlot, UniformSource};
use crate::sema::{
    BinaryOp, CallArg, Callee, Expr, ExprKind, FuncId, LAccess, LValue, LogicalOp, Stmt, StmtKind, TypedTree, UnaryOp,
    VarId,
};
use crate::stdlib::{dot_f32, eval_builtin, log2_f32, rsqrt_f32, BuiltinOp, TextureUnits};
use crate::types::{Base, SamplerDim, Type};
use crate::value::{self, ArithOp, CmpOp, Value, FIXED_MAX, FIXED_MIN};

/// Unrolling stops with a capacity error past this many iterations of a
/// single loop.
pub const MAX_UNROLL: u64 = 4096;
/// Lowering gives up once the IR grows past this many instructions.
const MAX_LOWERED: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Comp {
    F(f32),
    I(i32),
    B(bool),
    /// Lane `lane` of interned register `reg`, optionally negated.
    R { reg: u32, lane: u8, neg: bool },
}

impl Comp {
    fn is_known(&self) -> bool {
        !matches!(self, Comp::R { .. })
    }

    fn as_f32(&self) -> Option<f32> {
        match *self {
            Comp::F(x) => Some(x),
            Comp::I(i) => Some(i as f32),
            Comp::B(b) => Some(if b { 1.0 } else { 0.0 }),
            Comp::R { .. } => None,
        }
    }

    fn negated(self) -> Comp {
        match self {
            Comp::F(x) => Comp::F(-x),
            Comp::I(i) => Comp::I(i.wrapping_neg()),
            Comp::B(b) => Comp::B(b),
            Comp::R { reg, lane, neg } => Comp::R { reg, lane, neg: !neg },
        }
    }
}

#[derive(Debug, Clone)]
enum Sym {
    Num(Vec<Comp>),
    Agg(Vec<Sym>),
    Sampler(u32),
    Void,
}

fn sym_of(v: &Value) -> Sym {
    match v {
        Value::Float(x) => Sym::Num(x.iter().map(|&c| Comp::F(c)).collect()),
        Value::Int(x) => Sym::Num(x.iter().map(|&c| Comp::I(c)).collect()),
        Value::Bool(x) => Sym::Num(x.iter().map(|&c| Comp::B(c)).collect()),
        Value::Sampler(u) => Sym::Sampler(*u),
        Value::Aggregate(items) => Sym::Agg(items.iter().map(sym_of).collect()),
    }
}

/// The value of fully known components.
fn known(comps: &[Comp]) -> Option<Value> {
    match comps.first()? {
        Comp::F(_) => comps.iter().map(|c| if let Comp::F(x) = c { Some(*x) } else { None }).collect::<Option<_>>().map(Value::Float),
        Comp::I(_) => comps.iter().map(|c| if let Comp::I(x) = c { Some(*x) } else { None }).collect::<Option<_>>().map(Value::Int),
        Comp::B(_) => comps.iter().map(|c| if let Comp::B(x) = c { Some(*x) } else { None }).collect::<Option<_>>().map(Value::Bool),
        Comp::R { .. } => None,
    }
}

fn known_sym(s: &Sym) -> Option<Value> {
    match s {
        Sym::Num(c) => known(c),
        Sym::Agg(items) => items.iter().map(known_sym).collect::<Option<_>>().map(Value::Aggregate),
        Sym::Sampler(u) => Some(Value::Sampler(*u)),
        Sym::Void => None,
    }
}

fn out_default(ty: &Type) -> Value {
    match ty {
        Type::Scalar(_) | Type::Vector(..) => {
            let lanes = [0.0, 0.0, 0.0, 1.0];
            let comps = &lanes[..ty.component_count()];
            match ty.base() {
                Some(Base::Int) => Value::Int(comps.iter().map(|x| *x as i32).collect()),
                Some(Base::Bool) => Value::Bool(comps.iter().map(|x| *x != 0.0).collect()),
                _ => Value::Float(comps.to_vec()),
            }
        }
        _ => Value::zero(ty),
    }
}

/// Swizzle reading `lanes[i]` for result lane `i`; the remaining lanes
/// follow the identity, or the single lane when all agree.
fn swizzle_for(lanes: &[u8]) -> [u8; 4] {
    if lanes.iter().all(|&l| l == lanes[0]) {
        return [lanes[0]; 4];
    }
    let mut s = [0, 1, 2, 3];
    s[..lanes.len()].copy_from_slice(lanes);
    s
}

fn masked_swizzle(pairs: &[(usize, u8)]) -> [u8; 4] {
    if pairs.iter().all(|p| p.1 == pairs[0].1) {
        return [pairs[0].1; 4];
    }
    let mut s = [0, 1, 2, 3];
    for &(dst, src) in pairs {
        s[dst] = src;
    }
    s
}

fn mask_of(n: usize) -> u8 {
    ((1u16 << n) - 1) as u8
}

enum Stop {
    /// An unconditional `discard` was reached; nothing after it runs.
    Discard,
    Diag(Diagnostic),
}

impl From<Diagnostic> for Stop {
    fn from(d: Diagnostic) -> Self {
        Stop::Diag(d)
    }
}

type L<T> = Result<T, Stop>;

fn diag<T>(code: Code, loc: Loc, msg: impl Into<String>) -> L<T> {
    Err(Stop::Diag(Diagnostic::error(code, loc, msg)))
}

fn eval_err<T>(e: value::EvalError, loc: Loc) -> L<T> {
    diag(Code::TypeMismatch, loc, format!("constant evaluation failed: {e}"))
}

enum Flow {
    Normal,
    Break,
    Continue,
    Return(Sym),
}

struct Frame {
    func: FuncId,
    vals: Vec<Sym>,
}

struct Place {
    var: VarId,
    segs: Vec<usize>,
    comps: Option<Vec<u8>>,
}

struct Lowerer<'a> {
    tree: &'a TypedTree,
    bindings: &'a BindingTable,
    ir: IrProgram,
    regs: Vec<Reg>,
    reg_ids: HashMap<Reg, u32>,
    globals: Vec<Sym>,
}

/// Lower the entry of `tree` to IR. The program must have passed profile
/// validation and `bindings` must come from the same tree and profile.
pub fn lower(tree: &TypedTree, bindings: &BindingTable, _profile: &ProfileDescriptor) -> Result<IrProgram, Diagnostics> {
    let mut lw = Lowerer {
        tree,
        bindings,
        ir: IrProgram { uniform_registers: bindings.constant_registers(), ..Default::default() },
        regs: Vec::new(),
        reg_ids: HashMap::new(),
        globals: Vec::new(),
    };
    match lw.run() {
        Ok(()) | Err(Stop::Discard) => Ok(lw.ir),
        Err(Stop::Diag(d)) => Err(Diagnostics::single(d)),
    }
}

impl Lowerer<'_> {
    fn reg(&mut self, r: Reg) -> u32 {
        if let Some(&id) = self.reg_ids.get(&r) {
            return id;
        }
        self.regs.push(r.clone());
        self.reg_ids.insert(r, (self.regs.len() - 1) as u32);
        (self.regs.len() - 1) as u32
    }

    fn lanes_of(&mut self, r: Reg, n: usize) -> Vec<Comp> {
        let id = self.reg(r);
        (0..n as u8).map(|lane| Comp::R { reg: id, lane, neg: false }).collect()
    }

    fn push(&mut self, ins: Instruction, loc: Loc) -> L<()> {
        if self.ir.instrs.len() >= MAX_LOWERED {
            return diag(Code::Capacity, loc, format!("program expands to more than {MAX_LOWERED} instructions"));
        }
        self.ir.instrs.push(ins);
        Ok(())
    }

    // ----- entry interface -------------------------------------------------

    fn run(&mut self) -> L<()> {
        let tree = self.tree;
        let entry = tree.entry_fn();
        let mut frame = Frame { func: tree.entry, vals: entry.locals.iter().map(|l| sym_of(&Value::zero(&l.ty))).collect() };
        for p in &entry.params {
            let v = if p.is_uniform() {
                self.uniform_sym(UniformSource::Param(p.var), &p.ty, p.loc)?
            } else if p.is_varying_input() {
                let Some(b) = self.bindings.input_for(p.var) else {
                    return diag(Code::BadSemantic, p.loc, format!("`{}` has no input binding", p.name));
                };
                let comps = self.lanes_of(Reg::Input(b.register.clone()), p.ty.component_count());
                Sym::Num(self.finish(comps, &p.ty, p.loc)?)
            } else {
                sym_of(&out_default(&p.ty))
            };
            frame.vals[p.var] = v;
        }
        for (i, g) in tree.globals.iter().enumerate() {
            let v = match &g.init {
                None => self.uniform_sym(UniformSource::Global(i), &g.ty, g.loc)?,
                Some(e) => {
                    let mut scratch = Frame { func: tree.entry, vals: Vec::new() };
                    self.expr(&mut scratch, e)?
                }
            };
            self.globals.push(v);
        }
        let ret = match self.stmts(&mut frame, &entry.body)? {
            Flow::Return(v) => v,
            _ => Sym::Void,
        };
        for b in &self.bindings.outputs {
            let value = match b.param {
                Some(var) => frame.vals[var].clone(),
                None => ret.clone(),
            };
            let Sym::Num(comps) = value else {
                return diag(Code::Unsupported, entry.loc, format!("output `{}` is not numeric", b.name));
            };
            self.write_output(&b.register, &comps, entry.loc)?;
        }
        Ok(())
    }

    fn uniform_sym(&mut self, source: UniformSource, ty: &Type, loc: Loc) -> L<Sym> {
        let Some(b) = self.bindings.uniform_for(source) else {
            return diag(Code::Undeclared, loc, "uniform has no binding");
        };
        match b.slot {
            UniformSlot::Texture { unit, .. } => Ok(Sym::Sampler(unit)),
            UniformSlot::Constants { base, .. } => {
                let mut next = base;
                self.uniform_layout(ty, &mut next, loc)
            }
        }
    }

    fn uniform_layout(&mut self, ty: &Type, next: &mut u32, loc: Loc) -> L<Sym> {
        Ok(match ty {
            Type::Scalar(_) | Type::Vector(..) => {
                *next += 1;
                let comps = self.lanes_of(Reg::Const(*next - 1), ty.component_count());
                Sym::Num(self.finish(comps, ty, loc)?)
            }
            Type::Matrix(_, r, c) => {
                let mut comps = Vec::new();
                for _ in 0..*r {
                    *next += 1;
                    comps.extend(self.lanes_of(Reg::Const(*next - 1), *c as usize));
                }
                Sym::Num(self.finish(comps, ty, loc)?)
            }
            Type::Array(e, n) => Sym::Agg((0..*n).map(|_| self.uniform_layout(e, next, loc)).collect::<L<_>>()?),
            Type::Record(r) => Sym::Agg(r.fields.iter().map(|f| self.uniform_layout(&f.ty, next, loc)).collect::<L<_>>()?),
            Type::Sampler(_) | Type::Void => return diag(Code::Unsupported, loc, format!("uniform of type {ty}")),
        })
    }

    fn write_output(&mut self, register: &str, comps: &[Comp], loc: Loc) -> L<()> {
        let out = Reg::Output(register.to_string());
        let mut groups: Vec<(Option<(u32, bool)>, Vec<(usize, Comp)>)> = Vec::new();
        for (i, c) in comps.iter().enumerate().take(4) {
            let key = match *c {
                Comp::R { reg, neg, .. } => Some((reg, neg)),
                _ => None,
            };
            match groups.iter_mut().find(|g| g.0 == key) {
                Some(g) => g.1.push((i, *c)),
                None => groups.push((key, vec![(i, *c)])),
            }
        }
        for (key, lanes) in groups {
            let mask = lanes.iter().fold(0u8, |m, (i, _)| m | 1 << i);
            let src = match key {
                Some((reg, neg)) => {
                    let pairs: Vec<(usize, u8)> =
                        lanes.iter().map(|(i, c)| (*i, if let Comp::R { lane, .. } = c { *lane } else { 0 })).collect();
                    Src { reg: self.regs[reg as usize].clone(), swizzle: masked_swizzle(&pairs), negate: neg }
                }
                None => {
                    let mut vals = [None; 4];
                    for (i, c) in &lanes {
                        vals[*i] = c.as_f32();
                    }
                    self.pool_src(vals)
                }
            };
            self.push(Instruction::new(Opcode::Mov, Dst { reg: out.clone(), mask }, vec![src]), loc)?;
        }
        Ok(())
    }

    // ----- operands and instruction helpers --------------------------------

    /// A pool constant holding the given lane values.
    fn pool_src(&mut self, vals: [Option<f32>; 4]) -> Src {
        let mut uniq: Vec<f32> = Vec::new();
        for v in vals.iter().flatten() {
            if !uniq.iter().any(|u| u.to_bits() == v.to_bits()) {
                uniq.push(*v);
            }
        }
        if uniq.is_empty() {
            uniq.push(0.0);
        }
        let mut entry = [*uniq.last().unwrap(); 4];
        entry[..uniq.len()].copy_from_slice(&uniq);
        let pairs: Vec<(usize, u8)> = vals
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (i, uniq.iter().position(|u| u.to_bits() == v.to_bits()).unwrap() as u8)))
            .collect();
        let idx = self.ir.intern(entry);
        Src { reg: Reg::Pool(idx), swizzle: if pairs.is_empty() { [0; 4] } else { masked_swizzle(&pairs) }, negate: false }
    }

    fn const_src(&mut self, comps: &[Comp]) -> Src {
        let mut vals = [None; 4];
        for (i, c) in comps.iter().enumerate() {
            vals[i] = c.as_f32();
        }
        let mut src = self.pool_src(vals);
        // Lanes past the value repeat the last one so scalars print as `.x`.
        let n = comps.len();
        if n < 4 {
            let lanes: Vec<u8> = src.swizzle[..n].to_vec();
            src.swizzle = swizzle_for(&lanes);
        }
        src
    }

    /// A source operand reading `comps` in lanes 0..n.
    fn operand(&mut self, comps: &[Comp], loc: Loc) -> L<Src> {
        debug_assert!(!comps.is_empty() && comps.len() <= 4);
        if comps.iter().all(Comp::is_known) {
            return Ok(self.const_src(comps));
        }
        if let Comp::R { reg, neg, .. } = comps[0] {
            let lanes: Option<Vec<u8>> = comps
                .iter()
                .map(|c| match *c {
                    Comp::R { reg: r, lane, neg: n } if r == reg && n == neg => Some(lane),
                    _ => None,
                })
                .collect();
            if let Some(lanes) = lanes {
                return Ok(Src { reg: self.regs[reg as usize].clone(), swizzle: swizzle_for(&lanes), negate: neg });
            }
        }
        // Mixed sources: gather into a fresh temporary.
        let t = self.ir.new_temp();
        let tr = Reg::Temp(t);
        let mut groups: Vec<(Option<(u32, bool)>, Vec<usize>)> = Vec::new();
        for (i, c) in comps.iter().enumerate() {
            let key = match *c {
                Comp::R { reg, neg, .. } => Some((reg, neg)),
                _ => None,
            };
            match groups.iter_mut().find(|g| g.0 == key) {
                Some(g) => g.1.push(i),
                None => groups.push((key, vec![i])),
            }
        }
        for (key, lanes) in groups {
            let mask = lanes.iter().fold(0u8, |m, i| m | 1 << i);
            let src = match key {
                Some((reg, neg)) => {
                    let pairs: Vec<(usize, u8)> =
                        lanes.iter().map(|&i| (i, if let Comp::R { lane, .. } = comps[i] { lane } else { 0 })).collect();
                    Src { reg: self.regs[reg as usize].clone(), swizzle: masked_swizzle(&pairs), negate: neg }
                }
                None => {
                    let mut vals = [None; 4];
                    for &i in &lanes {
                        vals[i] = comps[i].as_f32();
                    }
                    self.pool_src(vals)
                }
            };
            self.push(Instruction::new(Opcode::Mov, Dst { reg: tr.clone(), mask }, vec![src]), loc)?;
        }
        let n = comps.len();
        Ok(Src { reg: tr, swizzle: if n == 1 { [0; 4] } else { swizzle_for(&(0..n as u8).collect::<Vec<_>>()) }, negate: false })
    }

    /// Emit a component-wise instruction over equally long operands, in
    /// chunks of four lanes.
    fn emit(&mut self, op: Opcode, args: &[&[Comp]], loc: Loc) -> L<Vec<Comp>> {
        let n = args[0].len();
        let mut out = Vec::with_capacity(n);
        for start in (0..n).step_by(4) {
            let len = (n - start).min(4);
            let srcs = args.iter().map(|a| self.operand(&a[start..start + len], loc)).collect::<L<Vec<_>>>()?;
            let t = self.ir.new_temp();
            self.push(Instruction::new(op, Dst { reg: Reg::Temp(t), mask: mask_of(len) }, srcs), loc)?;
            out.extend(self.lanes_of(Reg::Temp(t), len));
        }
        Ok(out)
    }

    /// One scalar instruction per lane, results gathered in one temporary.
    fn emit_scalar(&mut self, op: Opcode, comps: &[Comp], fold: fn(f32) -> f32, loc: Loc) -> L<Vec<Comp>> {
        let mut out = Vec::with_capacity(comps.len());
        let mut temp: Option<u32> = None;
        for (i, c) in comps.iter().enumerate() {
            if let Comp::F(x) = c {
                out.push(Comp::F(fold(*x)));
                continue;
            }
            let src = self.operand(std::slice::from_ref(c), loc)?;
            let t = match temp {
                Some(t) if i % 4 != 0 => t,
                _ => self.ir.new_temp(),
            };
            temp = Some(t);
            let lane = (i % 4) as u8;
            self.push(Instruction::new(op, Dst { reg: Reg::Temp(t), mask: 1 << lane }, vec![src]), loc)?;
            let id = self.reg(Reg::Temp(t));
            out.push(Comp::R { reg: id, lane, neg: false });
        }
        Ok(out)
    }

    fn smear(c: Comp, n: usize) -> Vec<Comp> {
        vec![c; n]
    }

    fn one(n: usize) -> Vec<Comp> {
        vec![Comp::F(1.0); n]
    }

    fn neg(comps: &[Comp]) -> Vec<Comp> {
        comps.iter().map(|c| c.negated()).collect()
    }

    /// `1 - x` for 0/1-valued lanes.
    fn complement(&mut self, x: &[Comp], loc: Loc) -> L<Vec<Comp>> {
        if let Some(v) = known(x) {
            let b: Vec<bool> = (0..v.len()).map(|i| v.component_f32(i).unwrap_or(0.0) == 0.0).collect();
            return Ok(b.into_iter().map(Comp::B).collect());
        }
        self.emit(Opcode::Add, &[&Self::one(x.len()), &Self::neg(x)], loc)
    }

    /// Saturate lanes to the `fixed` range when `ty` has a `fixed` base.
    fn finish(&mut self, comps: Vec<Comp>, ty: &Type, loc: Loc) -> L<Vec<Comp>> {
        if ty.base() != Some(Base::Fixed) {
            return Ok(comps);
        }
        if comps.iter().all(Comp::is_known) {
            return Ok(comps.into_iter().map(|c| Comp::F(value::saturate_fixed(c.as_f32().unwrap()))).collect());
        }
        let n = comps.len();
        let lo = self.emit(Opcode::Max, &[&comps, &Self::smear(Comp::F(FIXED_MIN), n)], loc)?;
        self.emit(Opcode::Min, &[&lo, &Self::smear(Comp::F(FIXED_MAX), n)], loc)
    }

    // ----- operations --------------------------------------------------------

    fn arith(&mut self, op: ArithOp, a: &[Comp], b: &[Comp], base: Option<Base>, loc: Loc) -> L<Vec<Comp>> {
        if let (Some(x), Some(y)) = (known(a), known(b)) {
            return match value::arith(op, &x, &y) {
                Ok(v) => Ok(comps_of(&v)),
                Err(e) => eval_err(e, loc),
            };
        }
        let is_int = base == Some(Base::Int);
        match op {
            ArithOp::Add => self.emit(Opcode::Add, &[a, b], loc),
            ArithOp::Sub => self.emit(Opcode::Add, &[a, &Self::neg(b)], loc),
            ArithOp::Mul => {
                let is_one = |c: &[Comp]| c.iter().all(|x| matches!(x, Comp::F(v) if *v == 1.0) || matches!(x, Comp::I(1)));
                if is_one(b) {
                    return Ok(a.to_vec());
                }
                if is_one(a) {
                    return Ok(b.to_vec());
                }
                self.emit(Opcode::Mul, &[a, b], loc)
            }
            ArithOp::Div if !is_int => {
                let recip = match known(b) {
                    Some(v) => v.to_f32s().into_iter().map(|x| Comp::F(1.0 / x)).collect(),
                    None => self.emit_scalar(Opcode::Rcp, b, |x| 1.0 / x, loc)?,
                };
                self.emit(Opcode::Mul, &[a, &recip], loc)
            }
            ArithOp::Div | ArithOp::Mod => {
                let what = if op == ArithOp::Div { "integer division" } else { "`%`" };
                diag(Code::Unsupported, loc, format!("{what} on runtime values has no instruction in these profiles"))
            }
        }
    }

    fn compare(&mut self, op: CmpOp, a: &[Comp], b: &[Comp], loc: Loc) -> L<Vec<Comp>> {
        if let (Some(x), Some(y)) = (known(a), known(b)) {
            return match value::compare(op, &x, &y) {
                Ok(v) => Ok(comps_of(&v)),
                Err(e) => eval_err(e, loc),
            };
        }
        match op {
            CmpOp::Lt => self.emit(Opcode::Slt, &[a, b], loc),
            CmpOp::Gt => self.emit(Opcode::Slt, &[b, a], loc),
            CmpOp::Le => self.emit(Opcode::Sge, &[b, a], loc),
            CmpOp::Ge => self.emit(Opcode::Sge, &[a, b], loc),
            CmpOp::Eq | CmpOp::Ne => {
                let ge = self.emit(Opcode::Sge, &[a, b], loc)?;
                let le = self.emit(Opcode::Sge, &[b, a], loc)?;
                let eq = self.emit(Opcode::Mul, &[&ge, &le], loc)?;
                if op == CmpOp::Eq {
                    Ok(eq)
                } else {
                    self.complement(&eq, loc)
                }
            }
        }
    }

    /// `x != 0` for runtime lanes.
    fn nonzero(&mut self, x: &[Comp], loc: Loc) -> L<Vec<Comp>> {
        let zero = vec![Comp::F(0.0); x.len()];
        let below = self.emit(Opcode::Slt, &[x, &zero], loc)?;
        let above = self.emit(Opcode::Slt, &[&Self::neg(x), &zero], loc)?;
        self.emit(Opcode::Add, &[&below, &above], loc)
    }

    fn convert(&mut self, comps: Vec<Comp>, from: Option<Base>, to: &Type, loc: Loc) -> L<Vec<Comp>> {
        let Some(tb) = to.base() else { return diag(Code::TypeMismatch, loc, format!("conversion to {to}")) };
        if let Some(v) = known(&comps) {
            return match value::convert(&v, tb) {
                Ok(v) => Ok(comps_of(&v)),
                Err(e) => eval_err(e, loc),
            };
        }
        let from = from.unwrap_or(Base::Float);
        match tb {
            Base::Fixed if from != Base::Fixed => self.finish(comps, to, loc),
            Base::Int if from.is_real() => {
                diag(Code::Unsupported, loc, "conversion of a runtime real value to int has no instruction in these profiles")
            }
            Base::Bool if from != Base::Bool => self.nonzero(&comps, loc),
            _ => Ok(comps),
        }
    }

    fn select(&mut self, c: Comp, a: Sym, b: Sym, loc: Loc) -> L<Sym> {
        match (a, b) {
            (Sym::Num(a), Sym::Num(b)) => {
                if a == b {
                    return Ok(Sym::Num(a));
                }
                let n = a.len();
                let cs = Self::smear(c, n);
                let left = self.arith(ArithOp::Mul, &cs, &a, None, loc)?;
                let nc = self.complement(&cs, loc)?;
                let nc = nc.into_iter().map(|x| if let Comp::B(b) = x { Comp::F(if b { 1.0 } else { 0.0 }) } else { x }).collect::<Vec<_>>();
                let right = self.arith(ArithOp::Mul, &nc, &b, None, loc)?;
                Ok(Sym::Num(self.emit(Opcode::Add, &[&left, &right], loc)?))
            }
            (Sym::Agg(a), Sym::Agg(b)) => {
                let mut out = Vec::with_capacity(a.len());
                for (x, y) in a.into_iter().zip(b) {
                    out.push(self.select(c, x, y, loc)?);
                }
                Ok(Sym::Agg(out))
            }
            _ => diag(Code::NeedsBranching, loc, "selecting between samplers depends on runtime data"),
        }
    }

    /// Dot product written to `dst` (a temp and lane) when not foldable.
    fn dot(&mut self, a: &[Comp], b: &[Comp], dst: Option<(u32, u8)>, loc: Loc) -> L<Comp> {
        if let (Some(x), Some(y)) = (known(a), known(b)) {
            return Ok(Comp::F(dot_f32(&x.to_f32s(), &y.to_f32s())));
        }
        let (t, lane) = match dst {
            Some(d) => d,
            None => (self.ir.new_temp(), 0),
        };
        let target = Dst { reg: Reg::Temp(t), mask: 1 << lane };
        match a.len() {
            1 => {
                let srcs = vec![self.operand(a, loc)?, self.operand(b, loc)?];
                self.push(Instruction::new(Opcode::Mul, target, srcs), loc)?;
            }
            2 => {
                let p = self.emit(Opcode::Mul, &[a, b], loc)?;
                let srcs = vec![self.operand(&p[..1], loc)?, self.operand(&p[1..], loc)?];
                self.push(Instruction::new(Opcode::Add, target, srcs), loc)?;
            }
            n => {
                let op = if n == 3 { Opcode::Dp3 } else { Opcode::Dp4 };
                let srcs = vec![self.operand(a, loc)?, self.operand(b, loc)?];
                self.push(Instruction::new(op, target, srcs), loc)?;
            }
        }
        let id = self.reg(Reg::Temp(t));
        Ok(Comp::R { reg: id, lane, neg: false })
    }

    /// Row vector times matrix: `v0*row0 + v1*row1 + ...`, the same
    /// association as a dot product with each column.
    fn vec_mat(&mut self, v: &[Comp], m: &[Comp], cols: usize, loc: Loc) -> L<Vec<Comp>> {
        let mut acc = self.arith(ArithOp::Mul, &Self::smear(v[0], cols), &m[..cols], None, loc)?;
        for i in 1..v.len() {
            let term = self.arith(ArithOp::Mul, &Self::smear(v[i], cols), &m[i * cols..(i + 1) * cols], None, loc)?;
            acc = self.arith(ArithOp::Add, &acc, &term, None, loc)?;
        }
        Ok(acc)
    }

    fn builtin(&mut self, sig: &crate::sema::FunctionSignature, op: BuiltinOp, args: Vec<Sym>, ty: &Type, loc: Loc) -> L<Sym> {
        if !op.is_texture_fetch() {
            if let Some(vals) = args.iter().map(known_sym).collect::<Option<Vec<_>>>() {
                return match eval_builtin(sig, &vals, &TextureUnits::new()) {
                    Ok(v) => Ok(Sym::Num(self.finish(comps_of(&v), ty, loc)?)),
                    Err(e) => eval_err(e, loc),
                };
            }
        }
        let num = |s: &Sym| match s {
            Sym::Num(c) => c.clone(),
            _ => Vec::new(),
        };
        let a = args.first().map(num).unwrap_or_default();
        let b = args.get(1).map(num).unwrap_or_default();
        let p = |i: usize| &sig.params[i].ty;
        let out = match op {
            BuiltinOp::MulMatVec => {
                let Type::Matrix(_, r, c) = *p(0) else { unreachable!() };
                let t = self.ir.new_temp();
                let c = c as usize;
                let mut out = Vec::new();
                for i in 0..r as usize {
                    out.push(self.dot(&a[i * c..(i + 1) * c], &b, Some((t, i as u8)), loc)?);
                }
                out
            }
            BuiltinOp::MulVecMat => {
                let Type::Matrix(_, _, c) = *p(1) else { unreachable!() };
                self.vec_mat(&a, &b, c as usize, loc)?
            }
            BuiltinOp::MulMatMat => {
                let (Type::Matrix(_, r, k), Type::Matrix(_, _, c)) = (p(0), p(1)) else { unreachable!() };
                let (k, c) = (*k as usize, *c as usize);
                let mut out = Vec::new();
                for i in 0..*r as usize {
                    out.extend(self.vec_mat(&a[i * k..(i + 1) * k], &b, c, loc)?);
                }
                out
            }
            BuiltinOp::Dot => vec![self.dot(&a, &b, None, loc)?],
            BuiltinOp::Abs => self.emit(Opcode::Max, &[&a, &Self::neg(&a)], loc)?,
            BuiltinOp::Min => self.emit(Opcode::Min, &[&a, &b], loc)?,
            BuiltinOp::Max => self.emit(Opcode::Max, &[&a, &b], loc)?,
            BuiltinOp::Log2 => self.emit_scalar(Opcode::Lg2, &a, log2_f32, loc)?,
            BuiltinOp::Rsqrt => self.emit_scalar(Opcode::Rsq, &a, rsqrt_f32, loc)?,
            BuiltinOp::Reflect => {
                let d = self.dot(&b, &a, None, loc)?;
                let s = self.arith(ArithOp::Mul, &[Comp::F(2.0)], &[d], None, loc)?;
                let sn = self.arith(ArithOp::Mul, &Self::smear(s[0], b.len()), &b, None, loc)?;
                self.arith(ArithOp::Sub, &a, &sn, None, loc)?
            }
            BuiltinOp::Tex2D | BuiltinOp::Tex2DProj | BuiltinOp::Tex3D | BuiltinOp::Tex3DProj | BuiltinOp::TexCube => {
                let Sym::Sampler(unit) = args[0] else {
                    return diag(Code::TypeMismatch, loc, "texture fetch without a sampler");
                };
                let (opcode, dim) = match op {
                    BuiltinOp::Tex2D => (Opcode::Tex, SamplerDim::D2),
                    BuiltinOp::Tex2DProj => (Opcode::Txp, SamplerDim::D2),
                    BuiltinOp::Tex3D => (Opcode::Tex, SamplerDim::D3),
                    BuiltinOp::Tex3DProj => (Opcode::Txp, SamplerDim::D3),
                    _ => (Opcode::Tex, SamplerDim::Cube),
                };
                let coord = self.operand(&b, loc)?;
                let t = self.ir.new_temp();
                let ins = Instruction {
                    op: opcode,
                    dst: Some(Dst { reg: Reg::Temp(t), mask: 0b1111 }),
                    srcs: vec![coord],
                    tex: Some(TexTarget { unit, dim }),
                };
                self.push(ins, loc)?;
                self.lanes_of(Reg::Temp(t), 4)
            }
        };
        Ok(Sym::Num(self.finish(out, ty, loc)?))
    }

    // ----- statements ----------------------------------------------------------

    fn stmts(&mut self, frame: &mut Frame, list: &[Stmt]) -> L<Flow> {
        for s in list {
            match self.stmt(frame, s)? {
                Flow::Normal => {}
                other => return Ok(other),
            }
        }
        Ok(Flow::Normal)
    }

    fn known_cond(&mut self, frame: &mut Frame, e: &Expr) -> L<Result<bool, Comp>> {
        match self.expr(frame, e)? {
            Sym::Num(c) if c.len() == 1 => match c[0] {
                Comp::B(b) => Ok(Ok(b)),
                other => Ok(Err(other)),
            },
            _ => diag(Code::TypeMismatch, e.loc, "condition is not a bool scalar"),
        }
    }

    fn stmt(&mut self, frame: &mut Frame, s: &Stmt) -> L<Flow> {
        match &s.kind {
            StmtKind::Local { var, init } => {
                let ty = &self.tree.functions[frame.func].locals[*var].ty;
                frame.vals[*var] = match init {
                    Some(e) => self.expr(frame, e)?,
                    None => sym_of(&Value::zero(ty)),
                };
                Ok(Flow::Normal)
            }
            StmtKind::Expr(e) => {
                self.expr(frame, e)?;
                Ok(Flow::Normal)
            }
            StmtKind::If { cond, then, otherwise } => match self.known_cond(frame, cond)? {
                Ok(true) => self.stmts(frame, then),
                Ok(false) => self.stmts(frame, otherwise),
                Err(c) if is_discard_only(then, otherwise) => {
                    let src = self.operand(&[c.negated()], s.loc)?;
                    self.push(Instruction { op: Opcode::Kil, dst: None, srcs: vec![src], tex: None }, s.loc)?;
                    Ok(Flow::Normal)
                }
                Err(_) => diag(Code::NeedsBranching, cond.loc, "`if` condition depends on runtime data"),
            },
            StmtKind::Loop { init, cond, step, body, test_first } => {
                if let Flow::Return(v) = self.stmts(frame, init)? {
                    return Ok(Flow::Return(v));
                }
                let mut first = true;
                let mut iterations = 0u64;
                loop {
                    if *test_first || !first {
                        if let Some(c) = cond {
                            match self.known_cond(frame, c)? {
                                Ok(true) => {}
                                Ok(false) => break,
                                Err(_) => return diag(Code::NeedsBranching, c.loc, "loop condition depends on runtime data"),
                            }
                        }
                    }
                    first = false;
                    iterations += 1;
                    if iterations > MAX_UNROLL {
                        return diag(Code::Capacity, s.loc, format!("loop runs more than {MAX_UNROLL} iterations"));
                    }
                    match self.stmts(frame, body)? {
                        Flow::Break => break,
                        Flow::Return(v) => return Ok(Flow::Return(v)),
                        Flow::Normal | Flow::Continue => {}
                    }
                    if let Some(e) = step {
                        self.expr(frame, e)?;
                    }
                }
                Ok(Flow::Normal)
            }
            StmtKind::Break => Ok(Flow::Break),
            StmtKind::Continue => Ok(Flow::Continue),
            StmtKind::Return(e) => Ok(Flow::Return(match e {
                Some(e) => self.expr(frame, e)?,
                None => Sym::Void,
            })),
            StmtKind::Discard => {
                let src = self.operand(&[Comp::F(-1.0)], s.loc)?;
                self.push(Instruction { op: Opcode::Kil, dst: None, srcs: vec![src], tex: None }, s.loc)?;
                Err(Stop::Discard)
            }
            StmtKind::Block(b) => self.stmts(frame, b),
        }
    }

    // ----- places ----------------------------------------------------------------

    fn known_index(&mut self, frame: &mut Frame, e: &Expr, extent: usize) -> L<usize> {
        match self.expr(frame, e)? {
            Sym::Num(c) if c.len() == 1 => match c[0] {
                Comp::I(i) if i >= 0 && (i as usize) < extent => Ok(i as usize),
                Comp::I(i) => diag(Code::TypeMismatch, e.loc, format!("index {i} out of range for extent {extent}")),
                _ => diag(Code::VariableIndex, e.loc, "index depends on runtime data"),
            },
            _ => diag(Code::TypeMismatch, e.loc, "index is not an int scalar"),
        }
    }

    fn place(&mut self, frame: &mut Frame, lv: &LValue, loc: Loc) -> L<Place> {
        let mut ty = self.tree.functions[frame.func].locals[lv.var].ty.clone();
        let mut p = Place { var: lv.var, segs: Vec::new(), comps: None };
        let compose = |existing: Option<Vec<u8>>, sel: &[u8]| match existing {
            None => sel.to_vec(),
            Some(e) => sel.iter().map(|&i| e[i as usize]).collect(),
        };
        for a in &lv.path {
            match (&ty, a) {
                (Type::Record(r), LAccess::Field(i)) => {
                    p.segs.push(*i);
                    ty = r.fields[*i].ty.clone();
                }
                (Type::Array(e, n), LAccess::Index(x)) => {
                    let i = self.known_index(frame, x, *n as usize)?;
                    p.segs.push(i);
                    ty = (**e).clone();
                }
                (Type::Vector(b, n), LAccess::Index(x)) => {
                    let i = self.known_index(frame, x, *n as usize)?;
                    p.comps = Some(compose(p.comps.take(), &[i as u8]));
                    ty = Type::Scalar(*b);
                }
                (Type::Matrix(b, r, c), LAccess::Index(x)) => {
                    let i = self.known_index(frame, x, *r as usize)?;
                    let row: Vec<u8> = (0..*c).map(|k| i as u8 * c + k).collect();
                    p.comps = Some(compose(p.comps.take(), &row));
                    ty = Type::Vector(*b, *c);
                }
                (Type::Matrix(b, _, c), LAccess::MatElem(r, k)) => {
                    p.comps = Some(compose(p.comps.take(), &[r * c + k]));
                    ty = Type::Scalar(*b);
                }
                (_, LAccess::Swizzle(sw)) => {
                    p.comps = Some(compose(p.comps.take(), sw));
                    ty = lv.ty.clone();
                }
                _ => return diag(Code::TypeMismatch, loc, format!("bad access path on {ty}")),
            }
        }
        Ok(p)
    }

    fn get(&self, frame: &Frame, p: &Place) -> Sym {
        let mut v = &frame.vals[p.var];
        for &s in &p.segs {
            if let Sym::Agg(items) = v {
                v = &items[s];
            }
        }
        match (&p.comps, v) {
            (Some(c), Sym::Num(x)) => Sym::Num(c.iter().map(|&i| x[i as usize]).collect()),
            _ => v.clone(),
        }
    }

    fn set(&self, frame: &mut Frame, p: &Place, value: Sym) {
        let mut v = &mut frame.vals[p.var];
        for &s in &p.segs {
            if let Sym::Agg(items) = v {
                v = &mut items[s];
            }
        }
        match (&p.comps, v, value) {
            (Some(c), Sym::Num(x), Sym::Num(src)) => {
                for (k, &i) in c.iter().enumerate() {
                    x[i as usize] = src[k];
                }
            }
            (_, slot, value) => *slot = value,
        }
    }

    // ----- expressions --------------------------------------------------------------

    fn num(&mut self, frame: &mut Frame, e: &Expr) -> L<Vec<Comp>> {
        match self.expr(frame, e)? {
            Sym::Num(c) => Ok(c),
            _ => diag(Code::TypeMismatch, e.loc, format!("expected a numeric value of type {}", e.ty)),
        }
    }

    fn expr(&mut self, frame: &mut Frame, e: &Expr) -> L<Sym> {
        let loc = e.loc;
        Ok(match &e.kind {
            ExprKind::Const(v) => sym_of(v),
            ExprKind::Local(v) => frame.vals[*v].clone(),
            ExprKind::Global(g) => self.globals[*g].clone(),
            ExprKind::Convert(x) => {
                let c = self.num(frame, x)?;
                Sym::Num(self.convert(c, x.ty.base(), &e.ty, loc)?)
            }
            ExprKind::Smear(x) => {
                let c = self.num(frame, x)?;
                Sym::Num(Self::smear(c[0], e.ty.component_count()))
            }
            ExprKind::Construct(args) => {
                let mut comps = Vec::new();
                let mut all_same_base = true;
                for a in args {
                    all_same_base &= a.ty.base() == e.ty.base();
                    comps.extend(self.num(frame, a)?);
                }
                if all_same_base {
                    Sym::Num(comps)
                } else {
                    Sym::Num(self.finish(comps, &e.ty, loc)?)
                }
            }
            ExprKind::Swizzle(x, sel) => {
                let c = self.num(frame, x)?;
                Sym::Num(sel.iter().map(|&i| c[i as usize]).collect())
            }
            ExprKind::Field(x, i) => match self.expr(frame, x)? {
                Sym::Agg(mut items) => items.swap_remove(*i),
                _ => return diag(Code::TypeMismatch, loc, "field of a non-record"),
            },
            ExprKind::Index(x, i) => {
                let base = self.expr(frame, x)?;
                match (&x.ty, base) {
                    (Type::Array(_, n), Sym::Agg(mut items)) => {
                        let i = self.known_index(frame, i, *n as usize)?;
                        items.swap_remove(i)
                    }
                    (Type::Vector(_, n), Sym::Num(c)) => {
                        let i = self.known_index(frame, i, *n as usize)?;
                        Sym::Num(vec![c[i]])
                    }
                    (Type::Matrix(_, r, cols), Sym::Num(c)) => {
                        let i = self.known_index(frame, i, *r as usize)?;
                        let cols = *cols as usize;
                        Sym::Num(c[i * cols..(i + 1) * cols].to_vec())
                    }
                    (t, _) => return diag(Code::TypeMismatch, loc, format!("cannot index {t}")),
                }
            }
            ExprKind::MatElem(x, r, c) => {
                let Type::Matrix(_, _, cols) = x.ty else { return diag(Code::TypeMismatch, loc, "not a matrix") };
                let comps = self.num(frame, x)?;
                Sym::Num(vec![comps[(r * cols + c) as usize]])
            }
            ExprKind::Unary(op, x) => {
                let c = self.num(frame, x)?;
                let r = match op {
                    UnaryOp::Neg => Self::neg(&c),
                    UnaryOp::Not => self.complement(&c, loc)?,
                };
                Sym::Num(self.finish(r, &e.ty, loc)?)
            }
            ExprKind::Binary(op, a, b) => {
                let x = self.num(frame, a)?;
                let y = self.num(frame, b)?;
                let r = match op {
                    BinaryOp::Arith(op) => self.arith(*op, &x, &y, a.ty.base(), loc)?,
                    BinaryOp::Cmp(op) => self.compare(*op, &x, &y, loc)?,
                };
                Sym::Num(self.finish(r, &e.ty, loc)?)
            }
            ExprKind::Logical(op, a, b) => {
                let x = self.num(frame, a)?[0];
                let r = match (op, x) {
                    (LogicalOp::And, Comp::B(false)) => Comp::B(false),
                    (LogicalOp::Or, Comp::B(true)) => Comp::B(true),
                    (_, Comp::B(_)) => self.num(frame, b)?[0],
                    _ => {
                        let y = self.num(frame, b)?[0];
                        match (op, y) {
                            (LogicalOp::And, Comp::B(true)) | (LogicalOp::Or, Comp::B(false)) => x,
                            (LogicalOp::And, Comp::B(false)) => Comp::B(false),
                            (LogicalOp::Or, Comp::B(true)) => Comp::B(true),
                            (LogicalOp::And, _) => self.emit(Opcode::Mul, &[&[x], &[y]], loc)?[0],
                            (LogicalOp::Or, _) => self.emit(Opcode::Max, &[&[x], &[y]], loc)?[0],
                        }
                    }
                };
                Sym::Num(vec![r])
            }
            ExprKind::Select(c, a, b) => match self.known_cond(frame, c)? {
                Ok(true) => self.expr(frame, a)?,
                Ok(false) => self.expr(frame, b)?,
                Err(cond) => {
                    let x = self.expr(frame, a)?;
                    let y = self.expr(frame, b)?;
                    self.select(cond, x, y, loc)?
                }
            },
            ExprKind::Assign { target, op, value } => {
                let place = self.place(frame, target, loc)?;
                let v = self.expr(frame, value)?;
                let new = match (op, v) {
                    (None, v) => v,
                    (Some(op), Sym::Num(v)) => {
                        let Sym::Num(old) = self.get(frame, &place) else {
                            return diag(Code::TypeMismatch, loc, "compound assignment to an aggregate");
                        };
                        let r = self.arith(*op, &old, &v, target.ty.base(), loc)?;
                        Sym::Num(self.finish(r, &target.ty, loc)?)
                    }
                    _ => return diag(Code::TypeMismatch, loc, "compound assignment of an aggregate"),
                };
                self.set(frame, &place, new);
                self.get(frame, &place)
            }
            ExprKind::IncDec { target, increment, post } => {
                let place = self.place(frame, target, loc)?;
                let Sym::Num(old) = self.get(frame, &place) else {
                    return diag(Code::TypeMismatch, loc, "increment of an aggregate");
                };
                let one: Vec<Comp> = old.iter().map(|c| if matches!(c, Comp::I(_)) { Comp::I(1) } else { Comp::F(1.0) }).collect();
                let one = if target.ty.base() == Some(Base::Int) { vec![Comp::I(1); old.len()] } else { one };
                let op = if *increment { ArithOp::Add } else { ArithOp::Sub };
                let r = self.arith(op, &old, &one, target.ty.base(), loc)?;
                let new = self.finish(r, &target.ty, loc)?;
                self.set(frame, &place, Sym::Num(new.clone()));
                Sym::Num(if *post { old } else { new })
            }
            ExprKind::Call { callee: Callee::Builtin { sig, op }, args } => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    match a {
                        CallArg::In(x) => vals.push(self.expr(frame, x)?),
                        _ => return diag(Code::TypeMismatch, loc, "built-ins take no out arguments"),
                    }
                }
                self.builtin(sig, *op, vals, &e.ty, loc)?
            }
            ExprKind::Call { callee: Callee::User(id), args } => self.call_user(frame, *id, args, loc)?,
            ExprKind::Comma(a, b) => {
                self.expr(frame, a)?;
                self.expr(frame, b)?
            }
        })
    }

    fn call_user(&mut self, frame: &mut Frame, id: FuncId, args: &[CallArg], loc: Loc) -> L<Sym> {
        let tree = self.tree;
        let callee = &tree.functions[id];
        let mut inner = Frame { func: id, vals: callee.locals.iter().map(|l| sym_of(&Value::zero(&l.ty))).collect() };
        let mut places = Vec::new();
        for (a, p) in args.iter().zip(&callee.params) {
            match a {
                CallArg::In(x) => inner.vals[p.var] = self.expr(frame, x)?,
                CallArg::InOut(lv) => {
                    let place = self.place(frame, lv, loc)?;
                    inner.vals[p.var] = self.get(frame, &place);
                    places.push((place, p.var));
                }
                CallArg::Out(lv) => {
                    let place = self.place(frame, lv, loc)?;
                    inner.vals[p.var] = sym_of(&out_default(&p.ty));
                    places.push((place, p.var));
                }
            }
        }
        let ret = match self.stmts(&mut inner, &callee.body)? {
            Flow::Return(v) => v,
            _ => Sym::Void,
        };
        for (place, var) in places {
            let v = std::mem::replace(&mut inner.vals[var], Sym::Void);
            self.set(frame, &place, v);
        }
        Ok(ret)
    }
}

fn comps_of(v: &Value) -> Vec<Comp> {
    match sym_of(v) {
        Sym::Num(c) => c,
        _ => Vec::new(),
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::corpus;
    use crate::frontend::{parse_source, SourceUnit};
    use crate::profiles::{bind_all, lookup_profile, validate};
    use std::collections::BTreeMap;

    pub(crate) fn lower_src(src: &str, entry: &str, profile: &str) -> Result<IrProgram, Diagnostics> {
        let t = parse_source(&SourceUnit::new("t.cg", src), &BTreeMap::new(), &BTreeMap::new()).unwrap();
        let t = crate::sema::check(&t, entry).unwrap();
        let p = lookup_profile(profile).unwrap();
        assert!(validate(&t, &p).ok());
        let b = bind_all(&t, &p).unwrap();
        lower(&t, &b, &p)
    }

    fn ops(ir: &IrProgram) -> Vec<Opcode> {
        ir.instrs.iter().map(|i| i.op).collect()
    }

    #[test]
    fn simple_transform_shape() {
        let ir = lower_src(corpus::SIMPLE_TRANSFORM, "simpleTransform", "vs_1_1").unwrap();
        use Opcode::*;
        // The matrix product lands in a temporary and is moved out; the
        // optimizer removes that move.
        assert_eq!(ops(&ir), vec![Dp4, Dp4, Dp4, Dp4, Mul, Mov, Mov, Mov, Mov]);
        assert_eq!(ir.instrs[0].srcs[0], Src::new(Reg::Const(1)));
        assert_eq!(ir.instrs[0].srcs[1], Src::new(Reg::Input("v0".into())));
        assert_eq!(ir.instrs[4].srcs[0], Src::replicate(Reg::Const(0), 0));
        assert!(ir.pool.is_empty());
    }

    #[test]
    fn bright_light_map_decal_shape() {
        let ir = lower_src(corpus::BRIGHT_LIGHT_MAP_DECAL, "brightLightMapDecal", "arbfp1").unwrap();
        use Opcode::*;
        assert_eq!(ops(&ir), vec![Txp, Txp, Mul, Mul, Mul, Mov]);
        assert_eq!(ir.pool, vec![[2.0; 4]]);
        assert_eq!(ir.instrs[2].srcs[0], Src::replicate(Reg::Pool(0), 0));
    }

    #[test]
    fn loops_unroll_and_fold() {
        let src = "float4 main(float4 c : COLOR) : COLOR { float4 s = c; \
                   for (int i = 0; i < 3; i++) { if (i == 1) continue; s = s * 2; } return s; }";
        let ir = lower_src(src, "main", "arbfp1").unwrap();
        assert_eq!(ops(&ir), vec![Opcode::Mul, Opcode::Mul, Opcode::Mov]);
    }

    #[test]
    fn runtime_integer_division_is_unsupported() {
        let src = "float4 main(float4 c : COLOR, uniform int k) : COLOR { int j = k / 2; return c * j; }";
        assert!(lower_src(src, "main", "arbfp1").unwrap_err().has_code(Code::Unsupported));
    }

    #[test]
    fn conditional_discard_becomes_kil() {
        let src = "float4 main(float4 c : COLOR) : COLOR { if (c.w < 0.5) discard; return c; }";
        let ir = lower_src(src, "main", "arbfp1").unwrap();
        assert_eq!(ops(&ir), vec![Opcode::Slt, Opcode::Kil, Opcode::Mov]);
        assert!(ir.instrs[1].srcs[0].negate);
    }

    #[test]
    fn unroll_cap() {
        let src = "float4 main(float4 c : COLOR) : COLOR { float4 s = c; for (int i = 0; i < 100000; i++) s = s + 1; return s; }";
        assert!(lower_src(src, "main", "arbfp1").unwrap_err().has_code(Code::Capacity));
    }
}
