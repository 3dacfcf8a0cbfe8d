//! Implicit conversions and overload resolution.
//!
//! Conversion table (fixed, so resolution is reproducible):
//!
//! | from → to                                   | conversions |
//! |---------------------------------------------|-------------|
//! | identical type (`float` ≡ `float1`)         | 0           |
//! | same shape, wider numeric base              | 1           |
//! | scalar → vector/matrix, same base (smear)   | 1           |
//! | scalar → vector/matrix, wider base          | 2           |
//!
//! Numeric bases widen along `int < fixed < half < float < double`. A call
//! resolves to the viable candidate with the fewest total conversions; a tie
//! at the minimum is an ambiguity, never broken by declaration order.

use std::fmt;

use crate::types::{Base, Type};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Qualifier {
    /// Plain input (`in` or nothing).
    None,
    Uniform,
    Out,
    InOut,
}

impl Qualifier {
    pub fn writes_back(self) -> bool {
        matches!(self, Qualifier::Out | Qualifier::InOut)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Origin {
    User,
    Builtin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSig {
    pub ty: Type,
    pub qualifier: Qualifier,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSignature {
    pub name: String,
    pub params: Vec<ParamSig>,
    pub ret: Type,
    pub origin: Origin,
}

impl FunctionSignature {
    pub fn builtin(name: &str, params: &[Type], ret: Type) -> Self {
        FunctionSignature {
            name: name.to_string(),
            params: params.iter().map(|t| ParamSig { ty: t.clone(), qualifier: Qualifier::None }).collect(),
            ret,
            origin: Origin::Builtin,
        }
    }

    pub fn param_types(&self) -> Vec<Type> {
        self.params.iter().map(|p| p.ty.clone()).collect()
    }
}

impl fmt::Display for FunctionSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}(", self.ret, self.name)?;
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match p.qualifier {
                Qualifier::Out => f.write_str("out ")?,
                Qualifier::InOut => f.write_str("inout ")?,
                Qualifier::Uniform => f.write_str("uniform ")?,
                Qualifier::None => {}
            }
            write!(f, "{}", p.ty)?;
        }
        f.write_str(")")
    }
}

/// Number of implicit conversions needed to pass `from` where `to` is
/// expected, or `None` if no implicit conversion exists.
pub fn conversion_cost(from: &Type, to: &Type) -> Option<u32> {
    if from == to {
        return Some(0);
    }
    match (from.base(), to.base()) {
        (Some(fb), Some(tb)) => {
            let base_cost = if fb == tb {
                0
            } else if fb.promotes_to(tb) {
                1
            } else {
                return None;
            };
            if from.same_shape(to) {
                Some(base_cost)
            } else if from.is_scalar_like() && !to.is_scalar_like() {
                Some(base_cost + 1)
            } else {
                None
            }
        }
        _ => match (from, to) {
            (Type::Record(a), Type::Record(b)) if a.name == b.name => Some(0),
            _ => None,
        },
    }
}

/// Conversion allowed when assigning/initializing/returning: everything
/// [`conversion_cost`] allows plus narrowing between continuous bases.
pub fn assignable(from: &Type, to: &Type) -> bool {
    if conversion_cost(from, to).is_some() {
        return true;
    }
    match (from.base(), to.base()) {
        (Some(fb), Some(tb)) if fb.narrows_to(tb) => {
            from.same_shape(to) || (from.is_scalar_like() && !to.is_scalar_like())
        }
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ResolveError {
    NoViable { name: String, args: Vec<Type> },
    Ambiguous { name: String, args: Vec<Type>, candidates: Vec<FunctionSignature> },
}

impl fmt::Display for ResolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |args: &[Type]| args.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ");
        match self {
            ResolveError::NoViable { name, args } => write!(f, "no overload of `{name}` accepts ({})", list(args)),
            ResolveError::Ambiguous { name, args, candidates } => {
                write!(f, "call of `{name}` with ({}) is ambiguous between ", list(args))?;
                let c: Vec<String> = candidates.iter().map(|c| c.to_string()).collect();
                f.write_str(&c.join(" and "))
            }
        }
    }
}

/// Pick the best candidate for a call. Output parameters (`out`/`inout`)
/// accept only identical argument types.
pub fn resolve_overload<'c>(
    name: &str,
    args: &[Type],
    candidates: &'c [FunctionSignature],
) -> Result<&'c FunctionSignature, ResolveError> {
    let mut best: Option<u32> = None;
    let mut winners: Vec<&FunctionSignature> = Vec::new();
    for cand in candidates {
        if cand.params.len() != args.len() {
            continue;
        }
        let mut total = 0;
        let mut viable = true;
        for (a, p) in args.iter().zip(&cand.params) {
            let cost = if p.qualifier.writes_back() {
                conversion_cost(a, &p.ty).filter(|c| *c == 0)
            } else {
                conversion_cost(a, &p.ty)
            };
            match cost {
                Some(c) => total += c,
                None => {
                    viable = false;
                    break;
                }
            }
        }
        if !viable {
            continue;
        }
        match best {
            Some(b) if total > b => {}
            Some(b) if total == b => winners.push(cand),
            _ => {
                best = Some(total);
                winners.clear();
                winners.push(cand);
            }
        }
    }
    match winners.len() {
        0 => Err(ResolveError::NoViable { name: name.to_string(), args: args.to_vec() }),
        1 => Ok(winners[0]),
        _ => Err(ResolveError::Ambiguous {
            name: name.to_string(),
            args: args.to_vec(),
            candidates: winners.into_iter().cloned().collect(),
        }),
    }
}

/// Operand shapes considered for built-in operators: scalars, vectors of
/// length 2..4 (`float1` matches the scalar form) and all matrices.
fn operator_shapes(base: Base, with_matrices: bool) -> Vec<Type> {
    let mut v = vec![Type::Scalar(base)];
    v.extend((2..=4).map(|n| Type::Vector(base, n)));
    if with_matrices {
        for r in 1..=4 {
            for c in 1..=4 {
                v.push(Type::Matrix(base, r, c));
            }
        }
    }
    v
}

fn bool_of(t: &Type) -> Type {
    t.with_base(Base::Bool)
}

/// Candidate signatures for a component-wise arithmetic operator.
pub fn arithmetic_candidates(op: &str) -> Vec<FunctionSignature> {
    let mut out = Vec::new();
    for base in Base::NUMERIC {
        for t in operator_shapes(base, true) {
            out.push(FunctionSignature::builtin(op, &[t.clone(), t.clone()], t));
        }
    }
    out
}

/// Candidates for relational and equality operators: numeric operands,
/// bool-shaped result; `==`/`!=` also accept bools.
pub fn comparison_candidates(op: &str, equality: bool) -> Vec<FunctionSignature> {
    let mut bases: Vec<Base> = Base::NUMERIC.to_vec();
    if equality {
        bases.push(Base::Bool);
    }
    let mut out = Vec::new();
    for base in bases {
        for t in operator_shapes(base, false) {
            out.push(FunctionSignature::builtin(op, &[t.clone(), t.clone()], bool_of(&t)));
        }
    }
    out
}

/// Candidates unifying the two arms of `?:` (any base, including bool).
pub fn select_candidates() -> Vec<FunctionSignature> {
    let mut out = Vec::new();
    for base in [Base::Bool, Base::Int, Base::Fixed, Base::Half, Base::Float, Base::Double] {
        for t in operator_shapes(base, true) {
            out.push(FunctionSignature::builtin("?:", &[t.clone(), t.clone()], t));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn costs() {
        let f = Type::FLOAT;
        assert_eq!(conversion_cost(&f, &f), Some(0));
        assert_eq!(conversion_cost(&f, &Type::float(1)), Some(0));
        assert_eq!(conversion_cost(&Type::INT, &f), Some(1));
        assert_eq!(conversion_cost(&f, &Type::float(4)), Some(1));
        assert_eq!(conversion_cost(&Type::INT, &Type::float(4)), Some(2));
        assert_eq!(conversion_cost(&Type::float(4), &f), None);
        assert_eq!(conversion_cost(&f, &Type::INT), None);
        assert_eq!(conversion_cost(&Type::float(3), &Type::float(4)), None);
    }

    #[test]
    fn scalar_times_vector_smears() {
        let cands = arithmetic_candidates("*");
        let sig = resolve_overload("*", &[Type::FLOAT, Type::float(4)], &cands).unwrap();
        assert_eq!(sig.ret, Type::float(4));
        assert_eq!(sig.params[0].ty, Type::float(4));
    }

    #[test]
    fn mixed_bases_pick_the_wider_one() {
        let cands = arithmetic_candidates("+");
        let sig = resolve_overload("+", &[Type::INT, Type::float(4)], &cands).unwrap();
        assert_eq!(sig.ret, Type::float(4));
        let sig = resolve_overload("+", &[Type::Scalar(Base::Half), Type::FLOAT], &cands).unwrap();
        assert_eq!(sig.ret, Type::FLOAT);
        let sig = resolve_overload("+", &[Type::INT, Type::INT], &cands).unwrap();
        assert_eq!(sig.ret, Type::INT);
    }

    #[test]
    fn ambiguity_is_reported() {
        let a = FunctionSignature::builtin("f", &[Type::FLOAT, Type::Scalar(Base::Double)], Type::Void);
        let b = FunctionSignature::builtin("f", &[Type::Scalar(Base::Double), Type::FLOAT], Type::Void);
        let err = resolve_overload("f", &[Type::FLOAT, Type::FLOAT], &[a.clone(), b.clone()]).unwrap_err();
        assert!(matches!(err, ResolveError::Ambiguous { .. }));
        let err2 = resolve_overload("f", &[Type::FLOAT, Type::FLOAT], &[b, a]).unwrap_err();
        assert!(matches!(err2, ResolveError::Ambiguous { .. }));
    }

    #[test]
    fn out_parameters_need_exact_types() {
        let mut sig = FunctionSignature::builtin("g", &[Type::FLOAT], Type::Void);
        sig.params[0].qualifier = Qualifier::Out;
        assert!(resolve_overload("g", &[Type::INT], std::slice::from_ref(&sig)).is_err());
        assert!(resolve_overload("g", &[Type::FLOAT], std::slice::from_ref(&sig)).is_ok());
    }

    #[test]
    fn vector_length_mismatch_has_no_candidate() {
        let cands = arithmetic_candidates("+");
        assert!(matches!(
            resolve_overload("+", &[Type::float(3), Type::float(4)], &cands),
            Err(ResolveError::NoViable { .. })
        ));
    }
}
