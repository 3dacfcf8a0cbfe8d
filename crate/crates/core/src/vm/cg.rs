//! Source-level interpreter: evaluates the typed tree with C-like
//! semantics. All continuous types compute in binary32 and `fixed` values
//! saturate after every operation.

use super::{flat_len, uniform_components, ExecError, ExecResult, ShadeInput};
use crate::profiles::normalize_semantic;
use crate::sema::{
    BinaryOp, CallArg, Callee, Expr, ExprKind, FuncId, LAccess, LValue, LogicalOp, Stmt, StmtKind, TypedTree, UnaryOp,
    VarId,
};
use crate::stdlib::{eval_builtin, TextureUnits};
use crate::types::{Base, Type};
use crate::value::{arith, compare, convert, finish, negate, not, saturate_fixed, ArithOp, EvalError, Value};

const STEP_LIMIT: u64 = 10_000_000;

/// Why evaluation stopped early.
enum Stop {
    Discard,
    Error(ExecError),
}

impl From<ExecError> for Stop {
    fn from(e: ExecError) -> Self {
        Stop::Error(e)
    }
}

impl From<EvalError> for Stop {
    fn from(e: EvalError) -> Self {
        Stop::Error(ExecError::Eval(e))
    }
}

type R<T> = Result<T, Stop>;

enum Flow {
    Normal,
    Break,
    Continue,
    Return(Option<Value>),
}

struct Frame {
    func: FuncId,
    vals: Vec<Value>,
    /// `out` parameters that have not been written yet.
    unwritten: Vec<bool>,
}

/// A resolved assignable location: aggregate indices from the variable,
/// then an optional component selection.
struct Place {
    var: VarId,
    segs: Vec<usize>,
    comps: Option<Vec<u8>>,
}

struct Interp<'a> {
    tree: &'a TypedTree,
    textures: &'a TextureUnits,
    globals: Vec<Value>,
    steps: u64,
}

/// Build a typed value from flattened row-major components.
pub(crate) fn value_from_flat(ty: &Type, comps: &[f32]) -> Value {
    match ty {
        Type::Scalar(b) | Type::Vector(b, _) | Type::Matrix(b, _, _) => match b {
            Base::Bool => Value::Bool(comps.iter().map(|x| *x != 0.0).collect()),
            Base::Int => Value::Int(comps.iter().map(|x| *x as i32).collect()),
            Base::Fixed => Value::Float(comps.iter().map(|x| saturate_fixed(*x)).collect()),
            _ => Value::Float(comps.to_vec()),
        },
        Type::Array(e, n) => {
            let k = flat_len(e);
            Value::Aggregate((0..*n as usize).map(|i| value_from_flat(e, &comps[i * k..(i + 1) * k])).collect())
        }
        Type::Record(r) => {
            let mut at = 0;
            Value::Aggregate(
                r.fields
                    .iter()
                    .map(|f| {
                        let k = flat_len(&f.ty);
                        at += k;
                        value_from_flat(&f.ty, &comps[at - k..at])
                    })
                    .collect(),
            )
        }
        Type::Sampler(_) | Type::Void => Value::zero(ty),
    }
}

/// Starting value of an `out` parameter: the leading lanes of (0, 0, 0, 1)
/// for scalars and vectors, zero otherwise.
fn out_default(ty: &Type) -> Value {
    match ty {
        Type::Scalar(_) | Type::Vector(..) => {
            let n = ty.component_count();
            let lanes = [0.0, 0.0, 0.0, 1.0];
            value_from_flat(ty, &lanes[..n])
        }
        _ => Value::zero(ty),
    }
}

fn pad4(v: &Value) -> [f32; 4] {
    let mut out = [0.0, 0.0, 0.0, 1.0];
    for (i, x) in v.to_f32s().into_iter().take(4).enumerate() {
        out[i] = x;
    }
    out
}

fn one_like(v: &Value) -> Value {
    match v {
        Value::Int(x) => Value::Int(vec![1; x.len()]),
        _ => Value::Float(vec![1.0; v.len()]),
    }
}

fn compose(existing: Option<Vec<u8>>, sel: &[u8]) -> Vec<u8> {
    match existing {
        None => sel.to_vec(),
        Some(e) => sel.iter().map(|&i| e[i as usize]).collect(),
    }
}

fn range_check(index: i64, extent: usize) -> Result<usize, EvalError> {
    if index < 0 || index as usize >= extent {
        Err(EvalError::IndexOutOfRange { index, extent })
    } else {
        Ok(index as usize)
    }
}

/// Evaluate the entry function of `tree` on `input`.
pub fn run_cg(tree: &TypedTree, input: &ShadeInput) -> Result<ExecResult, ExecError> {
    let mut it = Interp { tree, textures: &input.textures, globals: Vec::new(), steps: 0 };
    let entry = tree.entry_fn();
    let mut next_unit = 0u32;
    let mut sampler = || {
        next_unit += 1;
        Value::Sampler(next_unit - 1)
    };
    let mut frame =
        Frame { func: tree.entry, vals: entry.locals.iter().map(|l| Value::zero(&l.ty)).collect(), unwritten: vec![false; entry.locals.len()] };
    for p in &entry.params {
        let v = if p.ty.is_sampler() {
            sampler()
        } else if p.is_uniform() {
            value_from_flat(&p.ty, uniform_components(input, &p.name, &p.ty)?)
        } else if p.is_varying_input() {
            let sem = normalize_semantic(p.semantic.as_deref().unwrap_or(&p.name));
            let reg = input.varying.get(&sem).ok_or(ExecError::MissingVarying(sem))?;
            value_from_flat(&p.ty, &reg[..p.ty.component_count().min(4)])
        } else {
            frame.unwritten[p.var] = true;
            out_default(&p.ty)
        };
        frame.vals[p.var] = v;
    }
    for g in &tree.globals {
        let v = match &g.init {
            None if g.ty.is_sampler() => sampler(),
            None => value_from_flat(&g.ty, uniform_components(input, &g.name, &g.ty)?),
            Some(e) => {
                let mut scratch = Frame { func: tree.entry, vals: Vec::new(), unwritten: Vec::new() };
                match it.expr(&mut scratch, e) {
                    Ok(v) => v,
                    Err(Stop::Error(e)) => return Err(e),
                    Err(Stop::Discard) => return Ok(ExecResult::discarded()),
                }
            }
        };
        it.globals.push(v);
    }
    let ret = match it.body(&mut frame) {
        Ok(v) => v,
        Err(Stop::Discard) => return Ok(ExecResult::discarded()),
        Err(Stop::Error(e)) => return Err(e),
    };
    let mut result = ExecResult::default();
    for p in entry.params.iter().filter(|p| p.is_output()) {
        let sem = normalize_semantic(p.semantic.as_deref().unwrap_or(&p.name));
        result.outputs.insert(sem, pad4(&frame.vals[p.var]));
    }
    if let Some(v) = ret {
        let sem = normalize_semantic(entry.return_semantic.as_deref().unwrap_or("return"));
        result.outputs.insert(sem, pad4(&v));
    }
    Ok(result)
}

impl Interp<'_> {
    fn body(&mut self, frame: &mut Frame) -> R<Option<Value>> {
        let f = &self.tree.functions[frame.func];
        match self.stmts(frame, &f.body)? {
            Flow::Return(v) => Ok(v),
            _ => Ok(None),
        }
    }

    fn tick(&mut self) -> R<()> {
        self.steps += 1;
        if self.steps > STEP_LIMIT {
            return Err(ExecError::StepLimit(STEP_LIMIT).into());
        }
        Ok(())
    }

    fn stmts(&mut self, frame: &mut Frame, list: &[Stmt]) -> R<Flow> {
        for s in list {
            match self.stmt(frame, s)? {
                Flow::Normal => {}
                other => return Ok(other),
            }
        }
        Ok(Flow::Normal)
    }

    fn cond(&mut self, frame: &mut Frame, e: &Expr) -> R<bool> {
        let v = self.expr(frame, e)?;
        v.as_bool().ok_or_else(|| EvalError::Mismatch(format!("condition {v} is not a bool")).into())
    }

    fn stmt(&mut self, frame: &mut Frame, s: &Stmt) -> R<Flow> {
        self.tick()?;
        match &s.kind {
            StmtKind::Local { var, init } => {
                let ty = &self.tree.functions[frame.func].locals[*var].ty;
                frame.vals[*var] = match init {
                    Some(e) => self.expr(frame, e)?,
                    None => Value::zero(ty),
                };
                Ok(Flow::Normal)
            }
            StmtKind::Expr(e) => {
                self.expr(frame, e)?;
                Ok(Flow::Normal)
            }
            StmtKind::If { cond, then, otherwise } => {
                if self.cond(frame, cond)? {
                    self.stmts(frame, then)
                } else {
                    self.stmts(frame, otherwise)
                }
            }
            StmtKind::Loop { init, cond, step, body, test_first } => {
                if let Flow::Return(v) = self.stmts(frame, init)? {
                    return Ok(Flow::Return(v));
                }
                let mut first = true;
                loop {
                    self.tick()?;
                    if *test_first || !first {
                        if let Some(c) = cond {
                            if !self.cond(frame, c)? {
                                break;
                            }
                        }
                    }
                    first = false;
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
            StmtKind::Return(e) => {
                let v = match e {
                    Some(e) => Some(self.expr(frame, e)?),
                    None => None,
                };
                Ok(Flow::Return(v))
            }
            StmtKind::Discard => Err(Stop::Discard),
            StmtKind::Block(b) => self.stmts(frame, b),
        }
    }

    fn read_var(&self, frame: &Frame, var: VarId) -> R<Value> {
        if frame.unwritten[var] {
            let name = self.tree.functions[frame.func].locals[var].name.clone();
            return Err(ExecError::UnwrittenOut(name).into());
        }
        Ok(frame.vals[var].clone())
    }

    fn index_value(&mut self, frame: &mut Frame, e: &Expr) -> R<i64> {
        let v = self.expr(frame, e)?;
        v.as_int().ok_or_else(|| EvalError::Mismatch(format!("index {v} is not an int")).into())
    }

    fn place(&mut self, frame: &mut Frame, lv: &LValue) -> R<Place> {
        let mut ty = self.tree.functions[frame.func].locals[lv.var].ty.clone();
        let mut place = Place { var: lv.var, segs: Vec::new(), comps: None };
        for a in &lv.path {
            match (&ty, a) {
                (Type::Record(r), LAccess::Field(i)) => {
                    place.segs.push(*i);
                    ty = r.fields[*i].ty.clone();
                }
                (Type::Array(e, n), LAccess::Index(x)) => {
                    let i = range_check(self.index_value(frame, x)?, *n as usize)?;
                    place.segs.push(i);
                    ty = (**e).clone();
                }
                (Type::Vector(b, n), LAccess::Index(x)) => {
                    let i = range_check(self.index_value(frame, x)?, *n as usize)?;
                    place.comps = Some(compose(place.comps.take(), &[i as u8]));
                    ty = Type::Scalar(*b);
                }
                (Type::Matrix(b, r, c), LAccess::Index(x)) => {
                    let i = range_check(self.index_value(frame, x)?, *r as usize)?;
                    let row: Vec<u8> = (0..*c).map(|k| i as u8 * c + k).collect();
                    place.comps = Some(compose(place.comps.take(), &row));
                    ty = Type::Vector(*b, *c);
                }
                (Type::Matrix(b, _, c), LAccess::MatElem(r, k)) => {
                    place.comps = Some(compose(place.comps.take(), &[r * c + k]));
                    ty = Type::Scalar(*b);
                }
                (_, LAccess::Swizzle(sw)) => {
                    place.comps = Some(compose(place.comps.take(), sw));
                    ty = lv.ty.clone();
                }
                _ => return Err(EvalError::Mismatch(format!("bad access path on {ty}")).into()),
            }
        }
        Ok(place)
    }

    fn get(&self, frame: &Frame, p: &Place) -> R<Value> {
        let mut v = &frame.vals[p.var];
        if frame.unwritten[p.var] {
            return self.read_var(frame, p.var);
        }
        for &s in &p.segs {
            let Value::Aggregate(items) = v else { return Err(EvalError::Mismatch("not an aggregate".into()).into()) };
            v = &items[s];
        }
        Ok(match &p.comps {
            Some(c) => v.select(c)?,
            None => v.clone(),
        })
    }

    fn set(&self, frame: &mut Frame, p: &Place, value: Value) -> R<()> {
        frame.unwritten[p.var] = false;
        let mut v = &mut frame.vals[p.var];
        for &s in &p.segs {
            let Value::Aggregate(items) = v else { return Err(EvalError::Mismatch("not an aggregate".into()).into()) };
            v = &mut items[s];
        }
        match &p.comps {
            Some(c) => v.write_components(c, &value)?,
            None => *v = value,
        }
        Ok(())
    }

    fn expr(&mut self, frame: &mut Frame, e: &Expr) -> R<Value> {
        Ok(match &e.kind {
            ExprKind::Const(v) => v.clone(),
            ExprKind::Local(v) => self.read_var(frame, *v)?,
            ExprKind::Global(g) => self.globals[*g].clone(),
            ExprKind::Convert(x) => {
                let v = self.expr(frame, x)?;
                let base = e.ty.base().ok_or_else(|| EvalError::Mismatch(format!("convert to {}", e.ty)))?;
                convert(&v, base)?
            }
            ExprKind::Smear(x) => {
                let v = self.expr(frame, x)?;
                v.smear(e.ty.component_count())?
            }
            ExprKind::Construct(args) => {
                let parts = args.iter().map(|a| self.expr(frame, a)).collect::<R<Vec<_>>>()?;
                finish(Value::concat(&parts)?, &e.ty)
            }
            ExprKind::Swizzle(x, comps) => self.expr(frame, x)?.select(comps)?,
            ExprKind::Field(x, i) => match self.expr(frame, x)? {
                Value::Aggregate(mut items) => items.swap_remove(*i),
                other => return Err(EvalError::Mismatch(format!("field of {other}")).into()),
            },
            ExprKind::Index(x, i) => {
                let base = self.expr(frame, x)?;
                let i = self.index_value(frame, i)?;
                match (&x.ty, base) {
                    (Type::Array(_, n), Value::Aggregate(mut items)) => items.swap_remove(range_check(i, *n as usize)?),
                    (Type::Vector(_, n), v) => v.select(&[range_check(i, *n as usize)? as u8])?,
                    (Type::Matrix(_, r, c), v) => v.slice(range_check(i, *r as usize)? * *c as usize, *c as usize)?,
                    (t, _) => return Err(EvalError::Mismatch(format!("cannot index {t}")).into()),
                }
            }
            ExprKind::MatElem(x, r, c) => {
                let Type::Matrix(_, _, cols) = x.ty else {
                    return Err(EvalError::Mismatch("matrix element of non-matrix".into()).into());
                };
                self.expr(frame, x)?.select(&[r * cols + c])?
            }
            ExprKind::Unary(op, x) => {
                let v = self.expr(frame, x)?;
                let r = match op {
                    UnaryOp::Neg => negate(&v)?,
                    UnaryOp::Not => not(&v)?,
                };
                finish(r, &e.ty)
            }
            ExprKind::Binary(op, a, b) => {
                let a = self.expr(frame, a)?;
                let b = self.expr(frame, b)?;
                let r = match op {
                    BinaryOp::Arith(op) => arith(*op, &a, &b)?,
                    BinaryOp::Cmp(op) => compare(*op, &a, &b)?,
                };
                finish(r, &e.ty)
            }
            ExprKind::Logical(op, a, b) => {
                let lhs = self.cond(frame, a)?;
                let r = match (op, lhs) {
                    (LogicalOp::And, false) => false,
                    (LogicalOp::Or, true) => true,
                    _ => self.cond(frame, b)?,
                };
                Value::Bool(vec![r])
            }
            ExprKind::Select(c, a, b) => {
                if self.cond(frame, c)? {
                    self.expr(frame, a)?
                } else {
                    self.expr(frame, b)?
                }
            }
            ExprKind::Assign { target, op, value } => {
                let place = self.place(frame, target)?;
                let v = self.expr(frame, value)?;
                let new = match op {
                    None => v,
                    Some(op) => finish(arith(*op, &self.get(frame, &place)?, &v)?, &target.ty),
                };
                self.set(frame, &place, new)?;
                self.get(frame, &place)?
            }
            ExprKind::IncDec { target, increment, post } => {
                let place = self.place(frame, target)?;
                let old = self.get(frame, &place)?;
                let op = if *increment { ArithOp::Add } else { ArithOp::Sub };
                let new = finish(arith(op, &old, &one_like(&old))?, &target.ty);
                self.set(frame, &place, new.clone())?;
                if *post {
                    old
                } else {
                    new
                }
            }
            ExprKind::Call { callee: Callee::Builtin { sig, .. }, args } => {
                let vals = args
                    .iter()
                    .map(|a| match a {
                        CallArg::In(x) => self.expr(frame, x),
                        _ => Err(EvalError::Mismatch("built-ins take no out arguments".into()).into()),
                    })
                    .collect::<R<Vec<_>>>()?;
                finish(eval_builtin(sig, &vals, self.textures)?, &e.ty)
            }
            ExprKind::Call { callee: Callee::User(id), args } => self.call_user(frame, *id, args)?,
            ExprKind::Comma(a, b) => {
                self.expr(frame, a)?;
                self.expr(frame, b)?
            }
        })
    }

    fn call_user(&mut self, frame: &mut Frame, id: FuncId, args: &[CallArg]) -> R<Value> {
        self.tick()?;
        let callee = &self.tree.functions[id];
        let mut inner = Frame {
            func: id,
            vals: callee.locals.iter().map(|l| Value::zero(&l.ty)).collect(),
            unwritten: vec![false; callee.locals.len()],
        };
        let mut places = Vec::new();
        for (a, p) in args.iter().zip(&callee.params) {
            match a {
                CallArg::In(x) => inner.vals[p.var] = self.expr(frame, x)?,
                CallArg::InOut(lv) => {
                    let place = self.place(frame, lv)?;
                    inner.vals[p.var] = self.get(frame, &place)?;
                    places.push((place, p.var));
                }
                CallArg::Out(lv) => {
                    let place = self.place(frame, lv)?;
                    inner.vals[p.var] = out_default(&p.ty);
                    inner.unwritten[p.var] = true;
                    places.push((place, p.var));
                }
            }
        }
        let ret = self.body(&mut inner)?;
        for (place, var) in places {
            let v = std::mem::replace(&mut inner.vals[var], Value::Bool(Vec::new()));
            self.set(frame, &place, v)?;
        }
        Ok(ret.unwrap_or(Value::Aggregate(Vec::new())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::frontend::{parse_source, SourceUnit};
    use crate::stdlib::texture::TextureImage;
    use std::collections::BTreeMap;

    fn tree(src: &str, entry: &str) -> TypedTree {
        let t = parse_source(&SourceUnit::new("t.cg", src), &BTreeMap::new(), &BTreeMap::new()).unwrap();
        crate::sema::check(&t, entry).unwrap()
    }

    fn identity() -> Vec<f32> {
        (0..16).map(|i| if i % 5 == 0 { 1.0 } else { 0.0 }).collect()
    }

    fn vertex_input(brightness: f32) -> ShadeInput {
        ShadeInput::default()
            .with_varying("POSITION", [1.0, 2.0, 3.0, 1.0])
            .with_varying("COLOR0", [0.25, 0.5, 0.75, 1.0])
            .with_varying("TEXCOORD0", [0.1, 0.2, 0.0, 1.0])
            .with_varying("TEXCOORD1", [0.3, 0.4, 0.0, 1.0])
            .with_uniform("brightness", vec![brightness])
            .with_uniform("modelViewProjection", identity())
    }

    #[test]
    fn simple_transform_identity() {
        let t = tree(corpus::SIMPLE_TRANSFORM, "simpleTransform");
        let r = run_cg(&t, &vertex_input(1.0)).unwrap();
        assert_eq!(r.output("POSITION"), Some([1.0, 2.0, 3.0, 1.0]));
        assert_eq!(r.output("COLOR0"), Some([0.25, 0.5, 0.75, 1.0]));
        assert_eq!(r.output("TEXCOORD0"), Some([0.1, 0.2, 0.0, 1.0]));
        assert_eq!(r.output("TEXCOORD1"), Some([0.3, 0.4, 0.0, 1.0]));
    }

    #[test]
    fn zero_brightness_annihilates() {
        let t = tree(corpus::SIMPLE_TRANSFORM, "simpleTransform");
        let r = run_cg(&t, &vertex_input(0.0)).unwrap();
        assert_eq!(r.output("COLOR0"), Some([0.0; 4]));
    }

    #[test]
    fn white_textures_half_gray() {
        let t = tree(corpus::BRIGHT_LIGHT_MAP_DECAL, "brightLightMapDecal");
        let white = TextureImage::solid(2, 2, [1.0; 4]);
        let inp = ShadeInput::default()
            .with_varying("COLOR", [0.5; 4])
            .with_varying("TEXCOORD0", [0.3, 0.3, 0.0, 1.0])
            .with_varying("TEXCOORD1", [0.7, 0.7, 0.0, 1.0])
            .with_texture(0, white.clone())
            .with_texture(1, white);
        // 2 * 0.5 * 1 * 1
        assert_eq!(run_cg(&t, &inp).unwrap().output("COLOR"), Some([1.0; 4]));
    }

    #[test]
    fn missing_inputs_are_errors() {
        let t = tree(corpus::SIMPLE_TRANSFORM, "simpleTransform");
        let mut inp = vertex_input(1.0);
        inp.uniform.remove("brightness");
        assert_eq!(run_cg(&t, &inp).unwrap_err(), ExecError::MissingUniform("brightness".into()));
        let t = tree(corpus::BRIGHT_LIGHT_MAP_DECAL, "brightLightMapDecal");
        let inp = ShadeInput::default()
            .with_varying("COLOR", [0.5; 4])
            .with_varying("TEXCOORD0", [0.3; 4])
            .with_varying("TEXCOORD1", [0.3; 4]);
        assert!(matches!(run_cg(&t, &inp), Err(ExecError::Eval(EvalError::MissingTexture(0)))));
    }

    #[test]
    fn write_mask_keeps_other_lanes() {
        let t = tree("float4 main(float4 c : COLOR) : COLOR { float4 r = c; r.yw = float2(7, 9); return r; }", "main");
        let r = run_cg(&t, &ShadeInput::default().with_varying("COLOR", [1.0, 2.0, 3.0, 4.0])).unwrap();
        assert_eq!(r.output("COLOR"), Some([1.0, 7.0, 3.0, 9.0]));
    }

    #[test]
    fn inout_round_trip_and_loops() {
        let src = "void bump(inout float4 v, float k) { v.x += k; v = v * 2; } \
                   float4 main(float4 c : COLOR) : COLOR { for (int i = 0; i < 3; i++) bump(c, i); return c; }";
        let t = tree(src, "main");
        let r = run_cg(&t, &ShadeInput::default().with_varying("COLOR", [0.0, 1.0, 0.0, 0.0])).unwrap();
        // x: ((0+0)*2+1)*2+2 = 4, then *2 = 8; y: 1*8
        assert_eq!(r.output("COLOR"), Some([8.0, 8.0, 0.0, 0.0]));
    }

    #[test]
    fn discard_sets_flag() {
        let t = tree("float4 main(float4 c : COLOR) : COLOR { if (c.x < 0.5) discard; return c; }", "main");
        assert!(run_cg(&t, &ShadeInput::default().with_varying("COLOR", [0.0; 4])).unwrap().discarded);
        let r = run_cg(&t, &ShadeInput::default().with_varying("COLOR", [1.0; 4])).unwrap();
        assert!(!r.discarded && r.output("COLOR") == Some([1.0; 4]));
    }

    #[test]
    fn fixed_saturates() {
        let t = tree("float4 main(float4 c : COLOR) : COLOR { fixed4 f = c * 4; return f; }", "main");
        let r = run_cg(&t, &ShadeInput::default().with_varying("COLOR", [1.0, -1.0, 0.25, 0.0])).unwrap();
        let o = r.output("COLOR").unwrap();
        assert_eq!(o, [crate::value::FIXED_MAX, -2.0, 1.0, 0.0]);
        // A literal operand converts to `fixed` first, so it saturates too.
        let t = tree("float4 main(float4 c : COLOR) : COLOR { fixed4 f = c; return f * 4; }", "main");
        let r = run_cg(&t, &ShadeInput::default().with_varying("COLOR", [0.25; 4])).unwrap();
        assert_eq!(r.output("COLOR"), Some([0.25 * crate::value::FIXED_MAX; 4]));
    }

    #[test]
    fn out_defaults_and_padding() {
        let t = tree("void main(float2 a : TEXCOORD0, out float2 o : TEXCOORD0) { o.x = a.y; o.y = 3; }", "main");
        let r = run_cg(&t, &ShadeInput::default().with_varying("TEXCOORD0", [5.0, 6.0, 0.0, 1.0])).unwrap();
        assert_eq!(r.output("TEXCOORD0"), Some([6.0, 3.0, 0.0, 1.0]));
    }
}
