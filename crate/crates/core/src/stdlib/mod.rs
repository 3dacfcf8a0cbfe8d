//! The built-in function catalogue and its reference evaluators.
//!
//! Each overload carries a [`BuiltinOp`]. The interpreter dispatches on it to
//! evaluate a call and the code generator dispatches on it to pick a lowering
//! template, so the two can never disagree about which function a call names.

pub mod texture;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::sema::overload::FunctionSignature;
use crate::types::{Base, SamplerDim, Type};
use crate::value::{EvalError, EvalResult, Value};

pub use texture::{texel_index, TextureError, TextureImage};

/// Texture images indexed by unit.
pub type TextureUnits = BTreeMap<u32, TextureImage>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinOp {
    /// `mul(M, v)`: v is a column vector.
    MulMatVec,
    /// `mul(v, M)`: v is a row vector.
    MulVecMat,
    MulMatMat,
    Dot,
    Abs,
    Log2,
    Rsqrt,
    Reflect,
    Min,
    Max,
    Tex2D,
    Tex2DProj,
    Tex3D,
    Tex3DProj,
    TexCube,
}

impl BuiltinOp {
    /// True for texture fetches, which only fragment profiles can lower.
    pub fn is_texture_fetch(self) -> bool {
        matches!(
            self,
            BuiltinOp::Tex2D | BuiltinOp::Tex2DProj | BuiltinOp::Tex3D | BuiltinOp::Tex3DProj | BuiltinOp::TexCube
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuiltinOverload {
    pub sig: FunctionSignature,
    pub op: BuiltinOp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuiltinDescriptor {
    pub name: &'static str,
    pub overloads: Vec<BuiltinOverload>,
}

fn vec_or_scalar(base: Base, n: u8) -> Type {
    if n == 1 {
        Type::Scalar(base)
    } else {
        Type::Vector(base, n)
    }
}

fn build_catalogue() -> Vec<BuiltinDescriptor> {
    let f = Base::Float;
    let mut out = Vec::new();
    let mut add = |name: &'static str, list: Vec<(Vec<Type>, Type, BuiltinOp)>| {
        let overloads = list
            .into_iter()
            .map(|(params, ret, op)| BuiltinOverload { sig: FunctionSignature::builtin(name, &params, ret), op })
            .collect();
        out.push(BuiltinDescriptor { name, overloads });
    };

    let mut mul = Vec::new();
    for r in 1..=4u8 {
        for c in 1..=4u8 {
            let m = Type::Matrix(f, r, c);
            mul.push((vec![m.clone(), vec_or_scalar(f, c)], vec_or_scalar(f, r), BuiltinOp::MulMatVec));
            mul.push((vec![vec_or_scalar(f, r), m], vec_or_scalar(f, c), BuiltinOp::MulVecMat));
            for k in 1..=4u8 {
                mul.push((vec![Type::Matrix(f, r, k), Type::Matrix(f, k, c)], Type::Matrix(f, r, c), BuiltinOp::MulMatMat));
            }
        }
    }
    add("mul", mul);

    add("dot", (1..=4).map(|n| (vec![vec_or_scalar(f, n); 2], Type::FLOAT, BuiltinOp::Dot)).collect());

    let componentwise = |bases: &[Base], arity: usize, op: BuiltinOp| -> Vec<(Vec<Type>, Type, BuiltinOp)> {
        let mut v = Vec::new();
        for &b in bases {
            for n in 1..=4 {
                let t = vec_or_scalar(b, n);
                v.push((vec![t.clone(); arity], t, op));
            }
        }
        v
    };
    add("abs", componentwise(&[Base::Int, f], 1, BuiltinOp::Abs));
    add("log2", componentwise(&[f], 1, BuiltinOp::Log2));
    add("rsqrt", componentwise(&[f], 1, BuiltinOp::Rsqrt));
    add("min", componentwise(&[Base::Int, f], 2, BuiltinOp::Min));
    add("max", componentwise(&[Base::Int, f], 2, BuiltinOp::Max));
    add("reflect", (2..=4).map(|n| (vec![Type::float(n); 2], Type::float(n), BuiltinOp::Reflect)).collect());

    let s2 = Type::Sampler(SamplerDim::D2);
    let s3 = Type::Sampler(SamplerDim::D3);
    let sc = Type::Sampler(SamplerDim::Cube);
    add("tex2D", vec![(vec![s2.clone(), Type::float(2)], Type::float(4), BuiltinOp::Tex2D)]);
    add("tex2Dproj", vec![(vec![s2, Type::float(4)], Type::float(4), BuiltinOp::Tex2DProj)]);
    add("tex3D", vec![(vec![s3.clone(), Type::float(3)], Type::float(4), BuiltinOp::Tex3D)]);
    add("tex3Dproj", vec![(vec![s3, Type::float(4)], Type::float(4), BuiltinOp::Tex3DProj)]);
    add("texCUBE", vec![(vec![sc, Type::float(3)], Type::float(4), BuiltinOp::TexCube)]);
    out
}

pub fn catalogue() -> &'static [BuiltinDescriptor] {
    static CATALOGUE: OnceLock<Vec<BuiltinDescriptor>> = OnceLock::new();
    CATALOGUE.get_or_init(build_catalogue)
}

pub fn lookup(name: &str) -> Option<&'static BuiltinDescriptor> {
    catalogue().iter().find(|d| d.name == name)
}

/// All overloads of `name`; empty if `name` is not a built-in.
pub fn builtin_signatures(name: &str) -> Vec<FunctionSignature> {
    lookup(name).map(|d| d.overloads.iter().map(|o| o.sig.clone()).collect()).unwrap_or_default()
}

/// The operation behind a resolved built-in signature.
pub fn op_of(sig: &FunctionSignature) -> Option<BuiltinOp> {
    lookup(&sig.name)?.overloads.iter().find(|o| &o.sig == sig).map(|o| o.op)
}

fn floats(v: &Value) -> EvalResult<&[f32]> {
    match v {
        Value::Float(x) => Ok(x),
        other => Err(EvalError::Mismatch(format!("expected float operand, got {other}"))),
    }
}

fn four(v: &[f32]) -> EvalResult<[f32; 4]> {
    v.try_into().map_err(|_| EvalError::Mismatch(format!("expected 4 components, got {}", v.len())))
}

fn texture<'a>(units: &'a TextureUnits, sampler: &Value) -> EvalResult<&'a TextureImage> {
    match sampler {
        Value::Sampler(u) => units.get(u).ok_or(EvalError::MissingTexture(*u)),
        other => Err(EvalError::Mismatch(format!("expected sampler, got {other}"))),
    }
}

/// Sum of products in index order, the same order DP3/DP4 use.
pub fn dot_f32(a: &[f32], b: &[f32]) -> f32 {
    let mut acc = a[0] * b[0];
    for i in 1..a.len() {
        acc += a[i] * b[i];
    }
    acc
}

/// `log2` evaluated in double precision, rounded to binary32.
pub fn log2_f32(x: f32) -> f32 {
    (x as f64).log2() as f32
}

/// `1/sqrt(x)` evaluated in double precision, rounded to binary32.
pub fn rsqrt_f32(x: f32) -> f32 {
    (1.0 / (x as f64).sqrt()) as f32
}

/// Evaluate a built-in on arguments already converted to `sig`'s parameter
/// types.
pub fn eval_builtin(sig: &FunctionSignature, args: &[Value], textures: &TextureUnits) -> EvalResult<Value> {
    let op = op_of(sig).ok_or_else(|| EvalError::Mismatch(format!("`{sig}` is not a built-in")))?;
    let param = |i: usize| &sig.params[i].ty;
    match op {
        BuiltinOp::MulMatVec => {
            let Type::Matrix(_, r, c) = *param(0) else { unreachable!() };
            let (m, v) = (floats(&args[0])?, floats(&args[1])?);
            let c = c as usize;
            Ok(Value::Float((0..r as usize).map(|i| dot_f32(&m[i * c..(i + 1) * c], v)).collect()))
        }
        BuiltinOp::MulVecMat => {
            let Type::Matrix(_, r, c) = *param(1) else { unreachable!() };
            let (v, m) = (floats(&args[0])?, floats(&args[1])?);
            let c = c as usize;
            let out = (0..c)
                .map(|j| {
                    let col: Vec<f32> = (0..r as usize).map(|i| m[i * c + j]).collect();
                    dot_f32(v, &col)
                })
                .collect();
            Ok(Value::Float(out))
        }
        BuiltinOp::MulMatMat => {
            let (Type::Matrix(_, r, k), Type::Matrix(_, _, c)) = (param(0), param(1)) else { unreachable!() };
            let (a, b) = (floats(&args[0])?, floats(&args[1])?);
            let (r, k, c) = (*r as usize, *k as usize, *c as usize);
            let mut out = Vec::with_capacity(r * c);
            for i in 0..r {
                for j in 0..c {
                    let col: Vec<f32> = (0..k).map(|t| b[t * c + j]).collect();
                    out.push(dot_f32(&a[i * k..(i + 1) * k], &col));
                }
            }
            Ok(Value::Float(out))
        }
        BuiltinOp::Dot => Ok(Value::float(dot_f32(floats(&args[0])?, floats(&args[1])?))),
        BuiltinOp::Abs => match &args[0] {
            Value::Int(x) => Ok(Value::Int(x.iter().map(|p| p.wrapping_abs()).collect())),
            v => Ok(Value::Float(floats(v)?.iter().map(|p| p.abs()).collect())),
        },
        BuiltinOp::Log2 => Ok(Value::Float(floats(&args[0])?.iter().map(|&x| log2_f32(x)).collect())),
        BuiltinOp::Rsqrt => Ok(Value::Float(floats(&args[0])?.iter().map(|&x| rsqrt_f32(x)).collect())),
        BuiltinOp::Min | BuiltinOp::Max => {
            let pick_min = op == BuiltinOp::Min;
            match (&args[0], &args[1]) {
                (Value::Int(a), Value::Int(b)) => Ok(Value::Int(
                    a.iter().zip(b).map(|(p, q)| if pick_min { *p.min(q) } else { *p.max(q) }).collect(),
                )),
                (a, b) => Ok(Value::Float(
                    floats(a)?
                        .iter()
                        .zip(floats(b)?)
                        .map(|(p, q)| if pick_min { p.min(*q) } else { p.max(*q) })
                        .collect(),
                )),
            }
        }
        BuiltinOp::Reflect => {
            let (i, n) = (floats(&args[0])?, floats(&args[1])?);
            let s = 2.0 * dot_f32(n, i);
            Ok(Value::Float(i.iter().zip(n).map(|(a, b)| a - s * b).collect()))
        }
        BuiltinOp::Tex2D => {
            let c = floats(&args[1])?;
            Ok(Value::Float(texture(textures, &args[0])?.sample_2d(c[0], c[1]).to_vec()))
        }
        BuiltinOp::Tex2DProj => {
            let c = four(floats(&args[1])?)?;
            Ok(Value::Float(texture(textures, &args[0])?.sample_2d_proj(c).to_vec()))
        }
        BuiltinOp::Tex3D => {
            let c = floats(&args[1])?;
            Ok(Value::Float(texture(textures, &args[0])?.sample_3d(c[0], c[1], c[2]).to_vec()))
        }
        BuiltinOp::Tex3DProj => {
            let c = four(floats(&args[1])?)?;
            Ok(Value::Float(texture(textures, &args[0])?.sample_3d_proj(c).to_vec()))
        }
        BuiltinOp::TexCube => {
            let c = floats(&args[1])?;
            Ok(Value::Float(texture(textures, &args[0])?.sample_cube([c[0], c[1], c[2]]).to_vec()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sema::overload::resolve_overload;

    fn call(name: &str, args: &[Type], vals: &[Value]) -> Value {
        let cands = builtin_signatures(name);
        let sig = resolve_overload(name, args, &cands).unwrap();
        eval_builtin(sig, vals, &TextureUnits::new()).unwrap()
    }

    #[test]
    fn catalogue_lookups() {
        let m44 = Type::mat(Base::Float, 4, 4);
        let mul = builtin_signatures("mul");
        let sig = resolve_overload("mul", &[m44.clone(), Type::float(4)], &mul).unwrap();
        assert_eq!(sig.ret, Type::float(4));
        assert_eq!(op_of(sig), Some(BuiltinOp::MulMatVec));
        let proj = builtin_signatures("tex2Dproj");
        assert_eq!(proj.len(), 1);
        assert_eq!(proj[0].ret, Type::float(4));
        assert!(builtin_signatures("strlen").is_empty());
        let dot = builtin_signatures("dot");
        assert_eq!(resolve_overload("dot", &[Type::float(3), Type::float(3)], &dot).unwrap().ret, Type::FLOAT);
    }

    #[test]
    fn every_overload_has_an_op() {
        for d in catalogue() {
            for o in &d.overloads {
                assert_eq!(op_of(&o.sig), Some(o.op), "{}", o.sig);
            }
        }
    }

    #[test]
    fn identity_mul() {
        let mut id = vec![0.0; 16];
        for i in 0..4 {
            id[i * 5] = 1.0;
        }
        let v = Value::Float(vec![1.0, 2.0, 3.0, 4.0]);
        let out = call("mul", &[Type::mat(Base::Float, 4, 4), Type::float(4)], &[Value::Float(id), v.clone()]);
        assert_eq!(out, v);
    }

    #[test]
    fn row_vector_mul_uses_columns() {
        // [1 2] * [[1,2,3],[4,5,6]] = [9, 12, 15]
        let m = Value::Float(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let out = call("mul", &[Type::float(2), Type::mat(Base::Float, 2, 3)], &[Value::Float(vec![1.0, 2.0]), m]);
        assert_eq!(out, Value::Float(vec![9.0, 12.0, 15.0]));
    }

    #[test]
    fn matrix_product() {
        let a = Value::Float(vec![1.0, 2.0, 3.0, 4.0]);
        let b = Value::Float(vec![0.0, 1.0, 1.0, 0.0]);
        let t = Type::mat(Base::Float, 2, 2);
        assert_eq!(call("mul", &[t.clone(), t], &[a, b]), Value::Float(vec![2.0, 1.0, 4.0, 3.0]));
    }

    #[test]
    fn reflect_and_scalar_math() {
        let i = Value::Float(vec![1.0, -1.0, 0.0]);
        let n = Value::Float(vec![0.0, 1.0, 0.0]);
        assert_eq!(call("reflect", &[Type::float(3), Type::float(3)], &[i, n]), Value::Float(vec![1.0, 1.0, 0.0]));
        assert_eq!(call("rsqrt", &[Type::FLOAT], &[Value::float(4.0)]), Value::float(0.5));
        assert_eq!(call("log2", &[Type::FLOAT], &[Value::float(8.0)]), Value::float(3.0));
        assert!(rsqrt_f32(-1.0).is_nan());
        assert_eq!(call("abs", &[Type::INT], &[Value::Int(vec![-3])]), Value::Int(vec![3]));
    }

    #[test]
    fn missing_texture_is_an_error() {
        let sig = &builtin_signatures("tex2D")[0];
        let err = eval_builtin(sig, &[Value::Sampler(2), Value::Float(vec![0.0, 0.0])], &TextureUnits::new());
        assert_eq!(err, Err(EvalError::MissingTexture(2)));
    }
}
