//! The semantic type lattice.

use std::fmt;
use std::sync::Arc;

/// Scalar base type. Declaration order is the implicit promotion order for
/// numeric bases: `int < fixed < half < float < double`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Base {
    Bool,
    Int,
    Fixed,
    Half,
    Float,
    Double,
}

impl Base {
    pub const NUMERIC: [Base; 5] = [Base::Int, Base::Fixed, Base::Half, Base::Float, Base::Double];

    pub fn name(self) -> &'static str {
        match self {
            Base::Bool => "bool",
            Base::Int => "int",
            Base::Fixed => "fixed",
            Base::Half => "half",
            Base::Float => "float",
            Base::Double => "double",
        }
    }

    pub fn from_name(s: &str) -> Option<Base> {
        Some(match s {
            "bool" => Base::Bool,
            "int" => Base::Int,
            "fixed" => Base::Fixed,
            "half" => Base::Half,
            "float" => Base::Float,
            "double" => Base::Double,
            _ => return None,
        })
    }

    pub fn is_numeric(self) -> bool {
        self != Base::Bool
    }

    /// Continuous (non-integer, non-bool) base.
    pub fn is_real(self) -> bool {
        matches!(self, Base::Fixed | Base::Half | Base::Float | Base::Double)
    }

    /// Implicit promotion `self -> to` (strictly widening, numeric only).
    pub fn promotes_to(self, to: Base) -> bool {
        self.is_numeric() && to.is_numeric() && self < to
    }

    /// Narrowing allowed in assignment contexts: between continuous bases.
    pub fn narrows_to(self, to: Base) -> bool {
        self.is_real() && to.is_real() && self > to
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplerDim {
    D2,
    D3,
    Cube,
}

impl SamplerDim {
    pub fn suffix(self) -> &'static str {
        match self {
            SamplerDim::D2 => "2D",
            SamplerDim::D3 => "3D",
            SamplerDim::Cube => "CUBE",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordField {
    pub name: String,
    pub ty: Type,
    pub semantic: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordType {
    pub name: String,
    pub fields: Vec<RecordField>,
}

impl RecordType {
    pub fn field(&self, name: &str) -> Option<(usize, &RecordField)> {
        self.fields.iter().enumerate().find(|(_, f)| f.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[derive(Default)]
pub enum Type {
    #[default]
    Void,
    Scalar(Base),
    /// `baseN`, N in 1..=4. `float1` is a distinct name from `float` but
    /// converts identically.
    Vector(Base, u8),
    /// `baseRxC`: R rows of C columns, both in 1..=4.
    Matrix(Base, u8, u8),
    Sampler(SamplerDim),
    Array(Box<Type>, u32),
    Record(Arc<RecordType>),
}


impl Type {
    pub const FLOAT: Type = Type::Scalar(Base::Float);
    pub const BOOL: Type = Type::Scalar(Base::Bool);
    pub const INT: Type = Type::Scalar(Base::Int);

    pub fn vec(base: Base, n: u8) -> Type {
        debug_assert!((1..=4).contains(&n));
        Type::Vector(base, n)
    }

    pub fn float(n: u8) -> Type {
        Type::vec(Base::Float, n)
    }

    pub fn mat(base: Base, rows: u8, cols: u8) -> Type {
        debug_assert!((1..=4).contains(&rows) && (1..=4).contains(&cols));
        Type::Matrix(base, rows, cols)
    }

    pub fn base(&self) -> Option<Base> {
        match self {
            Type::Scalar(b) | Type::Vector(b, _) | Type::Matrix(b, _, _) => Some(*b),
            _ => None,
        }
    }

    /// Same shape with a different base.
    pub fn with_base(&self, base: Base) -> Type {
        match self {
            Type::Scalar(_) => Type::Scalar(base),
            Type::Vector(_, n) => Type::Vector(base, *n),
            Type::Matrix(_, r, c) => Type::Matrix(base, *r, *c),
            other => other.clone(),
        }
    }

    /// Scalar, vector or matrix.
    pub fn is_numeric_shape(&self) -> bool {
        self.base().is_some()
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self, Type::Scalar(_))
    }

    /// Scalar or vector of length 1; these convert interchangeably.
    pub fn is_scalar_like(&self) -> bool {
        matches!(self, Type::Scalar(_) | Type::Vector(_, 1))
    }

    /// Components of a scalar/vector/matrix value.
    pub fn component_count(&self) -> usize {
        match self {
            Type::Scalar(_) => 1,
            Type::Vector(_, n) => *n as usize,
            Type::Matrix(_, r, c) => (*r as usize) * (*c as usize),
            _ => 0,
        }
    }

    /// Vector length, treating scalars as length 1.
    pub fn vector_len(&self) -> Option<u8> {
        match self {
            Type::Scalar(_) => Some(1),
            Type::Vector(_, n) => Some(*n),
            _ => None,
        }
    }

    pub fn is_sampler(&self) -> bool {
        matches!(self, Type::Sampler(_))
    }

    /// True if the type is or contains a sampler.
    pub fn contains_sampler(&self) -> bool {
        match self {
            Type::Sampler(_) => true,
            Type::Array(e, _) => e.contains_sampler(),
            Type::Record(r) => r.fields.iter().any(|f| f.ty.contains_sampler()),
            _ => false,
        }
    }

    /// Same shape ignoring the base, with `float` ~ `float1`.
    pub fn same_shape(&self, other: &Type) -> bool {
        match (self, other) {
            (a, b) if a.is_scalar_like() && b.is_scalar_like() => true,
            (Type::Vector(_, a), Type::Vector(_, b)) => a == b,
            (Type::Matrix(_, r1, c1), Type::Matrix(_, r2, c2)) => r1 == r2 && c1 == c2,
            _ => false,
        }
    }

    /// Every bound the type invariants demand (dims in 1..=4).
    pub fn is_well_formed(&self) -> bool {
        match self {
            Type::Vector(_, n) => (1..=4).contains(n),
            Type::Matrix(_, r, c) => (1..=4).contains(r) && (1..=4).contains(c),
            Type::Array(e, n) => *n > 0 && e.is_well_formed(),
            Type::Record(r) => r.fields.iter().all(|f| f.ty.is_well_formed()),
            _ => true,
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Void => f.write_str("void"),
            Type::Scalar(b) => f.write_str(b.name()),
            Type::Vector(b, n) => write!(f, "{}{n}", b.name()),
            Type::Matrix(b, r, c) => write!(f, "{}{r}x{c}", b.name()),
            Type::Sampler(d) => write!(f, "sampler{}", d.suffix()),
            Type::Array(e, n) => write!(f, "{e}[{n}]"),
            Type::Record(r) => write!(f, "{}", r.name),
        }
    }
}

/// Resolve a built-in type name (`float`, `half3`, `float4x4`, `sampler2D`, `void`).
pub fn builtin_type(name: &str) -> Option<Type> {
    match name {
        "void" => return Some(Type::Void),
        "sampler2D" => return Some(Type::Sampler(SamplerDim::D2)),
        "sampler3D" => return Some(Type::Sampler(SamplerDim::D3)),
        "samplerCUBE" => return Some(Type::Sampler(SamplerDim::Cube)),
        _ => {}
    }
    let split = name.find(|c: char| c.is_ascii_digit()).unwrap_or(name.len());
    let base = Base::from_name(&name[..split])?;
    let dims = &name[split..];
    let digit = |c: u8| (b'1'..=b'4').contains(&c).then(|| c - b'0');
    match dims.as_bytes() {
        [] => Some(Type::Scalar(base)),
        [n] => Some(Type::Vector(base, digit(*n)?)),
        [r, b'x', c] => Some(Type::Matrix(base, digit(*r)?, digit(*c)?)),
        _ => None,
    }
}

pub fn is_builtin_type_name(name: &str) -> bool {
    builtin_type(name).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_names() {
        assert_eq!(builtin_type("float4"), Some(Type::float(4)));
        assert_eq!(builtin_type("float"), Some(Type::FLOAT));
        assert_eq!(builtin_type("float4x4"), Some(Type::mat(Base::Float, 4, 4)));
        assert_eq!(builtin_type("half2x3"), Some(Type::mat(Base::Half, 2, 3)));
        assert_eq!(builtin_type("sampler2D"), Some(Type::Sampler(SamplerDim::D2)));
        assert_eq!(builtin_type("float5"), None);
        assert_eq!(builtin_type("float0"), None);
        assert_eq!(builtin_type("float4x"), None);
        assert_eq!(builtin_type("vec4"), None);
    }

    #[test]
    fn float1_is_distinct_but_same_shape_as_float() {
        let f1 = builtin_type("float1").unwrap();
        assert_ne!(f1, Type::FLOAT);
        assert!(f1.same_shape(&Type::FLOAT));
    }

    #[test]
    fn promotion_order() {
        assert!(Base::Int.promotes_to(Base::Float));
        assert!(Base::Float.promotes_to(Base::Double));
        assert!(Base::Half.promotes_to(Base::Float));
        assert!(Base::Fixed.promotes_to(Base::Float));
        assert!(!Base::Float.promotes_to(Base::Int));
        assert!(!Base::Bool.promotes_to(Base::Int));
        assert!(Base::Float.narrows_to(Base::Half));
        assert!(!Base::Float.narrows_to(Base::Int));
    }

    #[test]
    fn display_round_trips_through_builtin_type() {
        for name in ["float", "half3", "fixed4x2", "double1", "int2", "bool4", "sampler3D", "samplerCUBE"] {
            assert_eq!(builtin_type(name).unwrap().to_string(), name);
        }
    }
}
