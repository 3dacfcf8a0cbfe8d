//! Swizzle and write-mask typing.

use std::fmt;

use crate::diag::{Code, Diagnostic, Loc};
use crate::types::Type;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LetterSet {
    Xyzw,
    Rgba,
}

/// A parsed component selector such as `.xy` or `.bgra`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Swizzle {
    pub components: Vec<u8>,
    pub letters: LetterSet,
}

impl Swizzle {
    pub fn parse(text: &str) -> Result<Swizzle, String> {
        if text.is_empty() || text.len() > 4 {
            return Err(format!("swizzle `{text}` must have 1 to 4 components"));
        }
        let mut letters = None;
        let mut components = Vec::with_capacity(text.len());
        for c in text.chars() {
            let (set, idx) = match c {
                'x' => (LetterSet::Xyzw, 0),
                'y' => (LetterSet::Xyzw, 1),
                'z' => (LetterSet::Xyzw, 2),
                'w' => (LetterSet::Xyzw, 3),
                'r' => (LetterSet::Rgba, 0),
                'g' => (LetterSet::Rgba, 1),
                'b' => (LetterSet::Rgba, 2),
                'a' => (LetterSet::Rgba, 3),
                other => return Err(format!("invalid swizzle letter `{other}` in `{text}`")),
            };
            match letters {
                None => letters = Some(set),
                Some(s) if s != set => return Err(format!("swizzle `{text}` mixes .xyzw and .rgba letters")),
                _ => {}
            }
            components.push(idx);
        }
        Ok(Swizzle { components, letters: letters.unwrap() })
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `self` applied after `inner`: `(v.inner).self == v.(inner ∘ self)`.
    pub fn compose(inner: &Swizzle, outer: &Swizzle) -> Option<Swizzle> {
        let components = outer
            .components
            .iter()
            .map(|&i| inner.components.get(i as usize).copied())
            .collect::<Option<Vec<_>>>()?;
        Some(Swizzle { components, letters: inner.letters })
    }
}

impl fmt::Display for Swizzle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let table = match self.letters {
            LetterSet::Xyzw => ['x', 'y', 'z', 'w'],
            LetterSet::Rgba => ['r', 'g', 'b', 'a'],
        };
        for &c in &self.components {
            write!(f, "{}", table[c as usize])?;
        }
        Ok(())
    }
}

/// Type of `base.text` for a scalar or vector `base`.
///
/// Scalars accept any swizzle whose components are all `x`/`r`.
pub fn swizzle_type(base: &Type, text: &str) -> Result<(Type, Swizzle), String> {
    let (elem, len) = match base {
        Type::Scalar(b) => (*b, 1),
        Type::Vector(b, n) => (*b, *n),
        other => return Err(format!("cannot swizzle a value of type {other}")),
    };
    let sw = Swizzle::parse(text)?;
    if let Some(bad) = sw.components.iter().find(|&&c| c >= len) {
        return Err(format!("component {} of `.{text}` is out of range for {base}", bad));
    }
    let ty = if sw.len() == 1 { Type::Scalar(elem) } else { Type::Vector(elem, sw.len() as u8) };
    Ok((ty, sw))
}

/// Component set written by `lhs.mask = ...`; duplicates are rejected.
pub fn validate_write_mask(lhs: &Type, mask: &Swizzle) -> Result<Vec<u8>, String> {
    let len = match lhs {
        Type::Vector(_, n) => *n,
        Type::Scalar(_) => 1,
        other => return Err(format!("cannot write-mask a value of type {other}")),
    };
    let mut seen = [false; 4];
    for &c in &mask.components {
        if c >= len {
            return Err(format!("write mask `.{mask}` out of range for {lhs}"));
        }
        if std::mem::replace(&mut seen[c as usize], true) {
            return Err(format!("write mask `.{mask}` names a component twice"));
        }
    }
    Ok(mask.components.clone())
}

/// Check a masked assignment: the mask must be valid and the right-hand side
/// must have as many components as the mask.
pub fn check_masked_assignment(lhs: &Type, mask: &Swizzle, rhs_len: usize, loc: Loc) -> Result<Vec<u8>, Diagnostic> {
    let comps = validate_write_mask(lhs, mask).map_err(|m| Diagnostic::error(Code::WriteMask, loc, m))?;
    if rhs_len != comps.len() {
        return Err(Diagnostic::error(
            Code::WriteMask,
            loc,
            format!("write mask `.{mask}` selects {} components but {} are assigned", comps.len(), rhs_len),
        ));
    }
    Ok(comps)
}
