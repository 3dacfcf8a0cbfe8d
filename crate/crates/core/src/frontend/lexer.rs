use std::fmt;

use super::preprocess::SourceUnit;
use crate::diag::{Code, Diagnostic, Loc, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Ident,
    Keyword,
    /// A C/C++ word reserved for future use.
    Reserved,
    IntLit,
    FloatLit,
    Op,
    Punct,
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub loc: Loc,
}

impl Token {
    pub fn is(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.kind == kind && self.lexeme == lexeme
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TokenKind::Eof => f.write_str("end of input"),
            _ => write!(f, "`{}`", self.lexeme),
        }
    }
}

pub const KEYWORDS: &[&str] = &[
    "if", "else", "for", "while", "do", "break", "continue", "return", "discard", "uniform", "in", "out", "inout",
    "struct", "true", "false", "const",
];

/// C and C++ words the language keeps reserved but does not implement.
pub const RESERVED: &[&str] = &[
    "asm", "auto", "case", "catch", "char", "class", "const_cast", "default", "delete", "dynamic_cast", "enum",
    "explicit", "export", "extern", "friend", "goto", "inline", "long", "mutable", "namespace", "new", "operator",
    "private", "protected", "public", "register", "reinterpret_cast", "restrict", "short", "signed", "sizeof",
    "static", "static_cast", "switch", "template", "this", "throw", "try", "typedef", "typeid", "typename", "union",
    "unsigned", "using", "virtual", "volatile", "wchar_t",
];

const OPERATORS: &[&str] = &[
    "<<=", ">>=", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "==", "!=", "<=", ">=", "&&", "||",
    "<<", ">>", "->", "::", "+", "-", "*", "/", "%", "=", "<", ">", "!", "&", "|", "^", "~", "?", ":", ".",
];

const PUNCTUATION: &[char] = &['(', ')', '{', '}', '[', ']', ',', ';'];

/// Maximal-munch tokenization of preprocessed text. The result always ends
/// with an [`TokenKind::Eof`] token.
/// True for C/C++ words that Cg reserves but does not implement.
pub fn is_reserved(word: &str) -> bool {
    RESERVED.contains(&word)
}

pub fn tokenize(source: &SourceUnit) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    for (idx, line) in source.text.split('\n').enumerate() {
        let line_no = source.origin(idx as u32 + 1).map_or(idx as u32 + 1, |o| o.line);
        lex_line(line, line_no, &mut tokens)?;
    }
    let last = source.line_map.last().map_or(1, |o| o.line);
    tokens.push(Token { kind: TokenKind::Eof, lexeme: String::new(), loc: Loc::new(last, 1) });
    Ok(tokens)
}

fn lex_line(line: &str, line_no: u32, out: &mut Vec<Token>) -> Result<()> {
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let loc = Loc::new(line_no, i as u32 + 1);
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let lexeme: String = chars[start..i].iter().collect();
            let kind = if KEYWORDS.contains(&lexeme.as_str()) {
                TokenKind::Keyword
            } else if RESERVED.contains(&lexeme.as_str()) {
                TokenKind::Reserved
            } else {
                TokenKind::Ident
            };
            out.push(Token { kind, lexeme, loc });
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let (tok, next) = lex_number(&chars, i, loc)?;
            out.push(tok);
            i = next;
            continue;
        }
        if PUNCTUATION.contains(&c) {
            out.push(Token { kind: TokenKind::Punct, lexeme: c.to_string(), loc });
            i += 1;
            continue;
        }
        if let Some(op) = OPERATORS
            .iter()
            .find(|op| chars[i..].iter().take(op.len()).copied().eq(op.chars()))
        {
            out.push(Token { kind: TokenKind::Op, lexeme: op.to_string(), loc });
            i += op.len();
            continue;
        }
        return Err(Diagnostic::error(Code::IllegalChar, loc, format!("illegal character `{c}`")).into());
    }
    Ok(())
}

fn lex_number(chars: &[char], start: usize, loc: Loc) -> Result<(Token, usize)> {
    let mut i = start;
    let digits = |i: &mut usize| {
        let s = *i;
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
        }
        *i > s
    };
    let mut is_float = false;
    let int_part = digits(&mut i);
    if chars.get(i) == Some(&'.') {
        is_float = true;
        i += 1;
        let frac = digits(&mut i);
        if !int_part && !frac {
            return Err(bad_number(chars, start, i, loc));
        }
    }
    if matches!(chars.get(i), Some('e' | 'E')) {
        is_float = true;
        i += 1;
        if matches!(chars.get(i), Some('+' | '-')) {
            i += 1;
        }
        if !digits(&mut i) {
            return Err(bad_number(chars, start, i, loc));
        }
    }
    if matches!(chars.get(i), Some('f' | 'F' | 'h' | 'H' | 'x' | 'X')) {
        is_float = true;
        i += 1;
    }
    if chars.get(i).is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_' || *c == '.') {
        while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '.') {
            i += 1;
        }
        return Err(bad_number(chars, start, i, loc));
    }
    let lexeme: String = chars[start..i].iter().collect();
    let kind = if is_float { TokenKind::FloatLit } else { TokenKind::IntLit };
    Ok((Token { kind, lexeme, loc }, i))
}

fn bad_number(chars: &[char], start: usize, end: usize, loc: Loc) -> crate::diag::Diagnostics {
    let text: String = chars[start..end.min(chars.len())].iter().collect();
    Diagnostic::error(Code::BadNumber, loc, format!("malformed numeric literal `{text}`")).into()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex(s: &str) -> Vec<(TokenKind, String)> {
        tokenize(&SourceUnit::new("t", s))
            .unwrap()
            .into_iter()
            .filter(|t| t.kind != TokenKind::Eof)
            .map(|t| (t.kind, t.lexeme))
            .collect()
    }

    fn k(kind: TokenKind, s: &str) -> (TokenKind, String) {
        (kind, s.to_string())
    }

    #[test]
    fn swizzle_assignment() {
        use TokenKind::*;
        assert_eq!(
            lex("vec1.xw = vec3;"),
            vec![k(Ident, "vec1"), k(Op, "."), k(Ident, "xw"), k(Op, "="), k(Ident, "vec3"), k(Punct, ";")]
        );
    }

    #[test]
    fn reserved_word() {
        assert_eq!(lex("goto"), vec![k(TokenKind::Reserved, "goto")]);
        assert_eq!(lex("switch"), vec![k(TokenKind::Reserved, "switch")]);
    }

    #[test]
    fn float_times_ident() {
        use TokenKind::*;
        assert_eq!(lex("2.0 * color"), vec![k(FloatLit, "2.0"), k(Op, "*"), k(Ident, "color")]);
    }

    #[test]
    fn type_names_are_identifiers() {
        assert_eq!(lex("float4x4 sampler2D"), vec![k(TokenKind::Ident, "float4x4"), k(TokenKind::Ident, "sampler2D")]);
    }

    #[test]
    fn numeric_forms() {
        use TokenKind::*;
        assert_eq!(
            lex("1 .5 5. 1e3 2.5e-2 1.5h 0.25x 3f"),
            vec![
                k(IntLit, "1"),
                k(FloatLit, ".5"),
                k(FloatLit, "5."),
                k(FloatLit, "1e3"),
                k(FloatLit, "2.5e-2"),
                k(FloatLit, "1.5h"),
                k(FloatLit, "0.25x"),
                k(FloatLit, "3f"),
            ]
        );
    }

    #[test]
    fn maximal_munch_operators() {
        use TokenKind::*;
        assert_eq!(
            lex("a+++b<<=c"),
            vec![k(Ident, "a"), k(Op, "++"), k(Op, "+"), k(Ident, "b"), k(Op, "<<="), k(Ident, "c")]
        );
    }

    #[test]
    fn errors() {
        let e = tokenize(&SourceUnit::new("t", "float a = 1.2.3;")).unwrap_err();
        assert!(e.has_code(Code::BadNumber));
        let e = tokenize(&SourceUnit::new("t", "float a = 1e;")).unwrap_err();
        assert!(e.has_code(Code::BadNumber));
        let e = tokenize(&SourceUnit::new("t", "float a = @;")).unwrap_err();
        assert!(e.has_code(Code::IllegalChar));
        assert_eq!(e.0[0].loc, Loc::new(1, 11));
    }

    #[test]
    fn locations_are_one_based() {
        let toks = tokenize(&SourceUnit::new("t", "a\n  b")).unwrap();
        assert_eq!(toks[0].loc, Loc::new(1, 1));
        assert_eq!(toks[1].loc, Loc::new(2, 3));
    }
}
