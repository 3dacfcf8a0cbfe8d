//! Runtime values and their component-wise arithmetic.
//!
//! Both interpreters and the code generator's constant folder evaluate through
//! these functions, so a folded constant is bit-identical to what the
//! source-level interpreter computes. All continuous types (`half`, `float`,
//! `double`, `fixed`) are stored as binary32; `fixed` additionally saturates
//! to `[-2, 2)` after every operation (see [`finish`]).

use std::fmt;

use crate::types::{Base, Type};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    /// Components of a scalar, vector or row-major matrix of a continuous base.
    Float(Vec<f32>),
    Int(Vec<i32>),
    Bool(Vec<bool>),
    /// A bound texture unit.
    Sampler(u32),
    /// Array elements or record fields.
    Aggregate(Vec<Value>),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("integer division by zero")]
    DivideByZero,
    #[error("index {index} out of range for extent {extent}")]
    IndexOutOfRange { index: i64, extent: usize },
    #[error("operand mismatch: {0}")]
    Mismatch(String),
    #[error("no texture bound to unit {0}")]
    MissingTexture(u32),
}

pub type EvalResult<T> = Result<T, EvalError>;

/// Largest binary32 strictly below 2.0: the top of the `fixed` range.
pub const FIXED_MAX: f32 = 1.999_999_9;
pub const FIXED_MIN: f32 = -2.0;

pub fn saturate_fixed(x: f32) -> f32 {
    if x.is_nan() {
        x
    } else {
        x.clamp(FIXED_MIN, FIXED_MAX)
    }
}

/// Apply the storage rule of `ty` to a freshly computed value.
pub fn finish(v: Value, ty: &Type) -> Value {
    match (v, ty.base()) {
        (Value::Float(c), Some(Base::Fixed)) => Value::Float(c.into_iter().map(saturate_fixed).collect()),
        (v, _) => v,
    }
}

impl Value {
    /// The zero value of a type: numeric zeros, `false`, unit 0, recursively.
    pub fn zero(ty: &Type) -> Value {
        match ty {
            Type::Scalar(b) | Type::Vector(b, _) | Type::Matrix(b, _, _) => {
                let n = ty.component_count();
                match b {
                    Base::Bool => Value::Bool(vec![false; n]),
                    Base::Int => Value::Int(vec![0; n]),
                    _ => Value::Float(vec![0.0; n]),
                }
            }
            Type::Sampler(_) => Value::Sampler(0),
            Type::Array(e, n) => Value::Aggregate(vec![Value::zero(e); *n as usize]),
            Type::Record(r) => Value::Aggregate(r.fields.iter().map(|f| Value::zero(&f.ty)).collect()),
            Type::Void => Value::Aggregate(Vec::new()),
        }
    }

    pub fn float(x: f32) -> Value {
        Value::Float(vec![x])
    }

    pub fn len(&self) -> usize {
        match self {
            Value::Float(v) => v.len(),
            Value::Int(v) => v.len(),
            Value::Bool(v) => v.len(),
            Value::Sampler(_) => 1,
            Value::Aggregate(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Component `i` widened to f32 (ints exactly up to 2^24, bools as 0/1).
    pub fn component_f32(&self, i: usize) -> Option<f32> {
        match self {
            Value::Float(v) => v.get(i).copied(),
            Value::Int(v) => v.get(i).map(|x| *x as f32),
            Value::Bool(v) => v.get(i).map(|b| if *b { 1.0 } else { 0.0 }),
            _ => None,
        }
    }

    /// All numeric components as f32.
    pub fn to_f32s(&self) -> Vec<f32> {
        (0..self.len()).filter_map(|i| self.component_f32(i)).collect()
    }

    /// Scalar truth value (bool scalars only).
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(v) if v.len() == 1 => Some(v[0]),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(v) if v.len() == 1 => Some(v[0] as i64),
            _ => None,
        }
    }

    /// Select components by index (swizzle).
    pub fn select(&self, comps: &[u8]) -> EvalResult<Value> {
        let pick = |i: &u8| *i as usize;
        let oob = |i: usize| EvalError::IndexOutOfRange { index: i as i64, extent: self.len() };
        Ok(match self {
            Value::Float(v) => Value::Float(comps.iter().map(|i| v.get(pick(i)).copied().ok_or(oob(pick(i)))).collect::<Result<_, _>>()?),
            Value::Int(v) => Value::Int(comps.iter().map(|i| v.get(pick(i)).copied().ok_or(oob(pick(i)))).collect::<Result<_, _>>()?),
            Value::Bool(v) => Value::Bool(comps.iter().map(|i| v.get(pick(i)).copied().ok_or(oob(pick(i)))).collect::<Result<_, _>>()?),
            other => return Err(EvalError::Mismatch(format!("cannot select components of {other}"))),
        })
    }

    /// Write `src` components into positions `comps`.
    pub fn write_components(&mut self, comps: &[u8], src: &Value) -> EvalResult<()> {
        if comps.len() != src.len() {
            return Err(EvalError::Mismatch("write mask length".into()));
        }
        for (k, &i) in comps.iter().enumerate() {
            let i = i as usize;
            let extent = self.len();
            match (&mut *self, src) {
                (Value::Float(d), Value::Float(s)) if i < d.len() => d[i] = s[k],
                (Value::Int(d), Value::Int(s)) if i < d.len() => d[i] = s[k],
                (Value::Bool(d), Value::Bool(s)) if i < d.len() => d[i] = s[k],
                _ => return Err(EvalError::IndexOutOfRange { index: i as i64, extent }),
            }
        }
        Ok(())
    }

    /// Contiguous component range `[start, start+len)`.
    pub fn slice(&self, start: usize, len: usize) -> EvalResult<Value> {
        let comps: Vec<u8> = (start..start + len).map(|i| i as u8).collect();
        self.select(&comps)
    }

    /// Concatenate numeric values of the same kind.
    pub fn concat(parts: &[Value]) -> EvalResult<Value> {
        match parts.first() {
            Some(Value::Float(_)) | None => {
                let mut out = Vec::new();
                for p in parts {
                    match p {
                        Value::Float(v) => out.extend_from_slice(v),
                        other => return Err(EvalError::Mismatch(format!("concat float with {other}"))),
                    }
                }
                Ok(Value::Float(out))
            }
            Some(Value::Int(_)) => {
                let mut out = Vec::new();
                for p in parts {
                    match p {
                        Value::Int(v) => out.extend_from_slice(v),
                        other => return Err(EvalError::Mismatch(format!("concat int with {other}"))),
                    }
                }
                Ok(Value::Int(out))
            }
            Some(Value::Bool(_)) => {
                let mut out = Vec::new();
                for p in parts {
                    match p {
                        Value::Bool(v) => out.extend_from_slice(v),
                        other => return Err(EvalError::Mismatch(format!("concat bool with {other}"))),
                    }
                }
                Ok(Value::Bool(out))
            }
            Some(other) => Err(EvalError::Mismatch(format!("concat {other}"))),
        }
    }

    /// Replicate a one-component value `n` times.
    pub fn smear(&self, n: usize) -> EvalResult<Value> {
        if self.len() != 1 {
            return Err(EvalError::Mismatch("smear of non-scalar".into()));
        }
        self.select(&vec![0u8; n])
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, v: &[T]) -> fmt::Result {
            f.write_str("(")?;
            for (i, x) in v.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")
        }
        match self {
            Value::Float(v) => list(f, v),
            Value::Int(v) => list(f, v),
            Value::Bool(v) => list(f, v),
            Value::Sampler(u) => write!(f, "texture[{u}]"),
            Value::Aggregate(v) => list(f, v),
        }
    }
}

/// Convert numeric components to `base` (explicit-cast semantics: float to
/// int truncates toward zero and saturates; nonzero to bool is true).
pub fn convert(v: &Value, base: Base) -> EvalResult<Value> {
    let out = match (v, base) {
        (Value::Float(c), Base::Int) => Value::Int(c.iter().map(|x| *x as i32).collect()),
        (Value::Float(c), Base::Bool) => Value::Bool(c.iter().map(|x| *x != 0.0).collect()),
        (Value::Float(c), b) if b.is_real() => Value::Float(c.clone()),
        (Value::Int(c), Base::Int) => Value::Int(c.clone()),
        (Value::Int(c), Base::Bool) => Value::Bool(c.iter().map(|x| *x != 0).collect()),
        (Value::Int(c), _) => Value::Float(c.iter().map(|x| *x as f32).collect()),
        (Value::Bool(c), Base::Bool) => Value::Bool(c.clone()),
        (Value::Bool(c), Base::Int) => Value::Int(c.iter().map(|b| *b as i32).collect()),
        (Value::Bool(c), _) => Value::Float(c.iter().map(|b| if *b { 1.0 } else { 0.0 }).collect()),
        (other, _) => return Err(EvalError::Mismatch(format!("cannot convert {other}"))),
    };
    if base == Base::Fixed {
        return Ok(finish(out, &Type::Scalar(Base::Fixed)));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
}

fn zip<T: Copy, U>(a: &[T], b: &[T], f: impl Fn(T, T) -> EvalResult<U>) -> EvalResult<Vec<U>> {
    if a.len() != b.len() {
        return Err(EvalError::Mismatch(format!("length {} vs {}", a.len(), b.len())));
    }
    a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect()
}

/// Component-wise arithmetic on same-kind, same-length operands.
pub fn arith(op: ArithOp, a: &Value, b: &Value) -> EvalResult<Value> {
    match (a, b) {
        (Value::Float(x), Value::Float(y)) => Ok(Value::Float(zip(x, y, |p, q| {
            Ok(match op {
                ArithOp::Add => p + q,
                ArithOp::Sub => p - q,
                ArithOp::Mul => p * q,
                ArithOp::Div => p / q,
                ArithOp::Mod => p % q,
            })
        })?)),
        (Value::Int(x), Value::Int(y)) => Ok(Value::Int(zip(x, y, |p, q| match op {
            ArithOp::Add => Ok(p.wrapping_add(q)),
            ArithOp::Sub => Ok(p.wrapping_sub(q)),
            ArithOp::Mul => Ok(p.wrapping_mul(q)),
            ArithOp::Div => p.checked_div(q).ok_or(EvalError::DivideByZero),
            ArithOp::Mod => p.checked_rem(q).ok_or(EvalError::DivideByZero),
        })?)),
        _ => Err(EvalError::Mismatch(format!("arithmetic on {a} and {b}"))),
    }
}

pub fn compare(op: CmpOp, a: &Value, b: &Value) -> EvalResult<Value> {
    fn cmp<T: PartialOrd>(op: CmpOp, p: T, q: T) -> bool {
        match op {
            CmpOp::Lt => p < q,
            CmpOp::Gt => p > q,
            CmpOp::Le => p <= q,
            CmpOp::Ge => p >= q,
            CmpOp::Eq => p == q,
            CmpOp::Ne => p != q,
        }
    }
    match (a, b) {
        (Value::Float(x), Value::Float(y)) => Ok(Value::Bool(zip(x, y, |p, q| Ok(cmp(op, p, q)))?)),
        (Value::Int(x), Value::Int(y)) => Ok(Value::Bool(zip(x, y, |p, q| Ok(cmp(op, p, q)))?)),
        (Value::Bool(x), Value::Bool(y)) if matches!(op, CmpOp::Eq | CmpOp::Ne) => {
            Ok(Value::Bool(zip(x, y, |p, q| Ok(cmp(op, p, q)))?))
        }
        _ => Err(EvalError::Mismatch(format!("comparison of {a} and {b}"))),
    }
}

pub fn negate(a: &Value) -> EvalResult<Value> {
    match a {
        Value::Float(x) => Ok(Value::Float(x.iter().map(|p| -p).collect())),
        Value::Int(x) => Ok(Value::Int(x.iter().map(|p| p.wrapping_neg()).collect())),
        _ => Err(EvalError::Mismatch(format!("negation of {a}"))),
    }
}

pub fn not(a: &Value) -> EvalResult<Value> {
    match a {
        Value::Bool(x) => Ok(Value::Bool(x.iter().map(|p| !p).collect())),
        _ => Err(EvalError::Mismatch(format!("logical not of {a}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn int_to_float_is_exact_up_to_2_pow_24() {
        for n in [0i32, 1, -1, 12345, (1 << 24) - 1, 1 << 24, -(1 << 24)] {
            let v = convert(&Value::Int(vec![n]), Base::Float).unwrap();
            assert_eq!(v, Value::Float(vec![n as f32]));
            assert_eq!(v.component_f32(0).unwrap() as i64, n as i64);
        }
    }

    #[test]
    fn fixed_saturates() {
        let v = finish(Value::Float(vec![5.0, -3.0, 1.0, 2.0]), &Type::vec(Base::Fixed, 4));
        assert_eq!(v, Value::Float(vec![FIXED_MAX, -2.0, 1.0, FIXED_MAX]));
        assert!(FIXED_MAX < 2.0);
        assert_eq!(f32::from_bits(FIXED_MAX.to_bits() + 1), 2.0);
    }

    #[test]
    fn int_division_by_zero_is_an_error() {
        let e = arith(ArithOp::Div, &Value::Int(vec![1]), &Value::Int(vec![0])).unwrap_err();
        assert_eq!(e, EvalError::DivideByZero);
    }

    #[test]
    fn select_and_write() {
        let mut v = Value::Float(vec![4.0, -2.0, 5.0, 3.0]);
        assert_eq!(v.select(&[0, 1]).unwrap(), Value::Float(vec![4.0, -2.0]));
        v.write_components(&[0, 3], &Value::Float(vec![9.0, 8.0])).unwrap();
        assert_eq!(v, Value::Float(vec![9.0, -2.0, 5.0, 8.0]));
    }
}
