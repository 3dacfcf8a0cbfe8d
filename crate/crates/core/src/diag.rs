//! Diagnostics shared by every compiler stage.
//!
//! Every diagnostic carries a stable [`Code`] whose string form (`E_*`) is
//! part of the tool's public contract: tests and the json-lines output assert
//! on codes, never on message prose.

use std::fmt;

use serde::Serialize;

/// A position in the original source text (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct Loc {
    pub line: u32,
    pub col: u32,
}

impl Loc {
    pub const fn new(line: u32, col: u32) -> Self {
        Loc { line, col }
    }
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

macro_rules! codes {
    ($($variant:ident => $text:literal,)*) => {
        /// The fixed enumeration of diagnostic codes.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum Code {
            $($variant,)*
        }

        impl Code {
            pub const ALL: &'static [Code] = &[$(Code::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(Code::$variant => $text,)*
                }
            }
        }
    };
}

codes! {
    // preprocessor
    PpUnterminatedConditional => "E_PP_UNTERMINATED_IF",
    PpUnknownInclude => "E_PP_UNKNOWN_INCLUDE",
    PpUnterminatedComment => "E_PP_UNTERMINATED_COMMENT",
    PpDirective => "E_PP_DIRECTIVE",
    // lexer / parser
    IllegalChar => "E_LEX_CHAR",
    BadNumber => "E_LEX_NUMBER",
    Syntax => "E_SYNTAX",
    Reserved => "E_RESERVED",
    // semantic analysis
    Undeclared => "E_UNDECLARED",
    Redefinition => "E_REDEFINITION",
    TypeMismatch => "E_TYPE_MISMATCH",
    NotAssignable => "E_NOT_ASSIGNABLE",
    UniformWrite => "E_UNIFORM_WRITE",
    Recursion => "E_RECURSION",
    Swizzle => "E_SWIZZLE",
    WriteMask => "E_WRITE_MASK",
    NoOverload => "E_NO_OVERLOAD",
    Ambiguous => "E_AMBIGUOUS",
    Unsupported => "E_UNSUPPORTED",
    UnassignedOut => "E_UNASSIGNED_OUT",
    NoEntry => "E_NO_ENTRY",
    Qualifier => "E_QUALIFIER",
    BadControl => "E_BAD_CONTROL",
    // profiles
    UnknownProfile => "E_UNKNOWN_PROFILE",
    UnimplementedProfile => "E_UNIMPLEMENTED_PROFILE",
    TexInVertex => "E_TEX_IN_VERTEX",
    FragTexcoordOut => "E_FRAG_TEXCOORD_OUT",
    DiscardInVertex => "E_DISCARD_IN_VERTEX",
    TexUnits => "E_TEXUNITS",
    NeedsBranching => "E_NEEDS_BRANCHING",
    VariableIndex => "E_VARIABLE_INDEX",
    Capacity => "E_CAPACITY",
    BadSemantic => "E_BAD_SEMANTIC",
    DuplicateSemantic => "E_DUP_SEMANTIC",
    BadLimit => "E_BAD_LIMIT",
    // assembly re-parsing
    AsmParse => "E_ASM_PARSE",
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Code {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub message: String,
    pub loc: Loc,
}

impl Diagnostic {
    pub fn error(code: Code, loc: Loc, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, code, message: message.into(), loc }
    }

    pub fn warning(code: Code, loc: Loc, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, code, message: message.into(), loc }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// One json-lines record: `{code, severity, line, column, message}`.
    pub fn to_json_line(&self) -> String {
        serde_json::json!({
            "code": self.code.as_str(),
            "severity": self.severity,
            "line": self.loc.line,
            "column": self.loc.col,
            "message": self.message,
        })
        .to_string()
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}: {sev} {}: {}", self.loc, self.code, self.message)
    }
}

/// A non-empty batch of diagnostics returned by a failing stage.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct Diagnostics(pub Vec<Diagnostic>);

impl Diagnostics {
    pub fn single(d: Diagnostic) -> Self {
        Diagnostics(vec![d])
    }

    pub fn has_code(&self, code: Code) -> bool {
        self.0.iter().any(|d| d.code == code)
    }

    pub fn codes(&self) -> Vec<Code> {
        self.0.iter().map(|d| d.code).collect()
    }
}

impl From<Diagnostic> for Diagnostics {
    fn from(d: Diagnostic) -> Self {
        Diagnostics::single(d)
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

pub type Result<T> = std::result::Result<T, Diagnostics>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_unique_and_prefixed() {
        let mut seen = std::collections::HashSet::new();
        for c in Code::ALL {
            assert!(c.as_str().starts_with("E_"));
            assert!(seen.insert(c.as_str()), "duplicate {}", c);
        }
    }

    #[test]
    fn json_line_has_required_fields() {
        let d = Diagnostic::error(Code::Recursion, Loc::new(3, 7), "f calls itself");
        let v: serde_json::Value = serde_json::from_str(&d.to_json_line()).unwrap();
        assert_eq!(v["code"], "E_RECURSION");
        assert_eq!(v["severity"], "error");
        assert_eq!(v["line"], 3);
        assert_eq!(v["column"], 7);
        assert_eq!(v["message"], "f calls itself");
    }
}
