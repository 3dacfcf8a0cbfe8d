//! A small C-style preprocessor.
//!
//! Supports `#include`, object- and function-like `#define`, `#undef`,
//! `#ifdef`, `#ifndef`, `#if`/`#elif` over integer expressions with
//! `defined`, `#else`, `#endif`. Stringizing, token pasting and variadic
//! macros are not implemented. Comments become a single space (block comments
//! keep their newlines so line numbers survive).

use std::collections::{BTreeMap, HashMap};

use crate::diag::{Code, Diagnostic, Diagnostics, Loc, Result};

const MAX_INCLUDE_DEPTH: usize = 32;
const MAX_EXPANSION_DEPTH: usize = 64;

/// Where an expanded line came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineOrigin {
    pub file: String,
    pub line: u32,
}

/// Source text plus a map from each of its lines back to the original file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceUnit {
    pub name: String,
    pub text: String,
    /// One entry per line of `text` (`text.split('\n')`).
    pub line_map: Vec<LineOrigin>,
}

impl SourceUnit {
    pub fn new(name: impl Into<String>, text: impl Into<String>) -> Self {
        let name = name.into();
        let text = text.into();
        let line_map = (1..=text.split('\n').count() as u32)
            .map(|line| LineOrigin { file: name.clone(), line })
            .collect();
        SourceUnit { name, text, line_map }
    }

    /// Original line for a 1-based line of the expanded text.
    pub fn origin(&self, line: u32) -> Option<&LineOrigin> {
        self.line_map.get(line.checked_sub(1)? as usize)
    }
}

#[derive(Debug, Clone)]
struct Macro {
    params: Option<Vec<String>>,
    body: String,
}

struct Cond {
    parent_active: bool,
    taken: bool,
    active: bool,
    seen_else: bool,
    loc: Loc,
}

struct Pre<'a> {
    includes: &'a BTreeMap<String, String>,
    macros: HashMap<String, Macro>,
    out: Vec<String>,
    map: Vec<LineOrigin>,
}

/// Expand directives and strip comments.
pub fn preprocess(
    source: &SourceUnit,
    includes: &BTreeMap<String, String>,
    predefines: &BTreeMap<String, String>,
) -> Result<SourceUnit> {
    let mut pre = Pre {
        includes,
        macros: predefines
            .iter()
            .map(|(k, v)| (k.clone(), Macro { params: None, body: v.clone() }))
            .collect(),
        out: Vec::new(),
        map: Vec::new(),
    };
    let origins: Vec<LineOrigin> = source.line_map.clone();
    pre.run(&source.text, &origins, 0)?;
    Ok(SourceUnit { name: source.name.clone(), text: pre.out.join("\n"), line_map: pre.map })
}

/// Replace comments with a single space, keeping any newlines a block
/// comment spans.
pub fn strip_comments(text: &str) -> std::result::Result<String, Loc> {
    let bytes: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    while i < bytes.len() {
        let c = bytes[i];
        if c == '/' && bytes.get(i + 1) == Some(&'/') {
            while i < bytes.len() && bytes[i] != '\n' {
                i += 1;
            }
            out.push(' ');
            continue;
        }
        if c == '/' && bytes.get(i + 1) == Some(&'*') {
            let start = Loc::new(line, col);
            i += 2;
            out.push(' ');
            loop {
                match bytes.get(i) {
                    None => return Err(start),
                    Some('*') if bytes.get(i + 1) == Some(&'/') => {
                        i += 2;
                        col += 2;
                        break;
                    }
                    Some('\n') => {
                        out.push('\n');
                        line += 1;
                        col = 1;
                        i += 1;
                    }
                    Some(_) => {
                        i += 1;
                        col += 1;
                    }
                }
            }
            continue;
        }
        out.push(c);
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
        i += 1;
    }
    Ok(out)
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn pp_error(code: Code, origin: &LineOrigin, msg: impl Into<String>) -> Diagnostics {
    Diagnostic::error(code, Loc::new(origin.line, 1), msg).into()
}

impl Pre<'_> {
    fn run(&mut self, text: &str, origins: &[LineOrigin], depth: usize) -> Result<()> {
        let fallback = |i: usize| {
            origins.get(i).cloned().unwrap_or_else(|| LineOrigin {
                file: origins.last().map(|o| o.file.clone()).unwrap_or_default(),
                line: i as u32 + 1,
            })
        };
        let stripped = strip_comments(text).map_err(|loc| {
            let o = fallback(loc.line as usize - 1);
            Diagnostics::from(Diagnostic::error(
                Code::PpUnterminatedComment,
                Loc::new(o.line, loc.col),
                "unterminated /* comment",
            ))
        })?;
        let lines: Vec<&str> = stripped.split('\n').collect();
        let mut conds: Vec<Cond> = Vec::new();
        let mut i = 0;
        while i < lines.len() {
            let origin = fallback(i);
            let active = conds.last().is_none_or(|c| c.active);
            let trimmed = lines[i].trim_start();
            if let Some(directive) = trimmed.strip_prefix('#') {
                // Splice backslash continuations.
                let mut full = directive.to_string();
                while full.ends_with('\\') && i + 1 < lines.len() {
                    full.pop();
                    i += 1;
                    full.push(' ');
                    full.push_str(lines[i]);
                }
                self.directive(&full, &origin, active, &mut conds, depth)?;
                i += 1;
                continue;
            }
            if active {
                let expanded = self.expand(lines[i], &mut Vec::new(), &origin)?;
                self.out.push(expanded);
                self.map.push(origin);
            }
            i += 1;
        }
        if let Some(c) = conds.last() {
            return Err(Diagnostic::error(
                Code::PpUnterminatedConditional,
                c.loc,
                "conditional directive without matching #endif",
            )
            .into());
        }
        Ok(())
    }

    fn directive(
        &mut self,
        text: &str,
        origin: &LineOrigin,
        active: bool,
        conds: &mut Vec<Cond>,
        depth: usize,
    ) -> Result<()> {
        let text = text.trim();
        let name_end = text.find(|c: char| !is_ident_char(c)).unwrap_or(text.len());
        let (name, rest) = text.split_at(name_end);
        let rest = rest.trim();
        let loc = Loc::new(origin.line, 1);
        match name {
            "ifdef" | "ifndef" | "if" => {
                let value = if !active {
                    false
                } else if name == "if" {
                    self.eval_if(rest, origin)?
                } else {
                    let defined = self.macros.contains_key(first_ident(rest));
                    (name == "ifdef") == defined
                };
                conds.push(Cond { parent_active: active, taken: value, active: value, seen_else: false, loc });
            }
            "elif" => {
                let parent_active = match conds.last() {
                    Some(c) if !c.seen_else => c.parent_active,
                    _ => return Err(pp_error(Code::PpDirective, origin, "#elif without #if")),
                };
                let taken = conds.last().unwrap().taken;
                let value = parent_active && !taken && self.eval_if(rest, origin)?;
                let c = conds.last_mut().unwrap();
                c.active = value;
                c.taken |= value;
            }
            "else" => match conds.last_mut() {
                Some(c) if !c.seen_else => {
                    c.active = c.parent_active && !c.taken;
                    c.taken = true;
                    c.seen_else = true;
                }
                _ => return Err(pp_error(Code::PpDirective, origin, "#else without #if")),
            },
            "endif" => {
                if conds.pop().is_none() {
                    return Err(pp_error(Code::PpDirective, origin, "#endif without #if"));
                }
            }
            _ if !active => {}
            "define" => self.define(rest, origin)?,
            "undef" => {
                self.macros.remove(first_ident(rest));
            }
            "include" => {
                let file = rest
                    .strip_prefix('"')
                    .and_then(|r| r.split_once('"'))
                    .or_else(|| rest.strip_prefix('<').and_then(|r| r.split_once('>')))
                    .map(|(f, _)| f)
                    .ok_or_else(|| pp_error(Code::PpDirective, origin, "malformed #include"))?;
                let body = self.includes.get(file).ok_or_else(|| {
                    pp_error(Code::PpUnknownInclude, origin, format!("unknown include `{file}`"))
                })?;
                if depth >= MAX_INCLUDE_DEPTH {
                    return Err(pp_error(Code::PpDirective, origin, "#include nested too deeply"));
                }
                let origins = SourceUnit::new(file, body.as_str()).line_map;
                self.run(body, &origins, depth + 1)?;
            }
            "pragma" | "" => {}
            other => {
                return Err(pp_error(Code::PpDirective, origin, format!("unknown directive #{other}")));
            }
        }
        Ok(())
    }

    fn define(&mut self, rest: &str, origin: &LineOrigin) -> Result<()> {
        let name = first_ident(rest);
        if name.is_empty() {
            return Err(pp_error(Code::PpDirective, origin, "#define needs a name"));
        }
        let after = &rest[name.len()..];
        let mac = if let Some(params) = after.strip_prefix('(') {
            let (list, body) = params
                .split_once(')')
                .ok_or_else(|| pp_error(Code::PpDirective, origin, "unterminated macro parameter list"))?;
            let params: Vec<String> = if list.trim().is_empty() {
                Vec::new()
            } else {
                list.split(',').map(|p| p.trim().to_string()).collect()
            };
            if params.iter().any(|p| p.is_empty() || !p.chars().all(is_ident_char)) {
                return Err(pp_error(Code::PpDirective, origin, "bad macro parameter"));
            }
            Macro { params: Some(params), body: body.trim().to_string() }
        } else {
            Macro { params: None, body: after.trim().to_string() }
        };
        self.macros.insert(name.to_string(), mac);
        Ok(())
    }

    fn expand(&self, line: &str, disabled: &mut Vec<String>, origin: &LineOrigin) -> Result<String> {
        if disabled.len() > MAX_EXPANSION_DEPTH {
            return Err(pp_error(Code::PpDirective, origin, "macro expansion too deep"));
        }
        let chars: Vec<char> = line.chars().collect();
        let mut out = String::with_capacity(line.len());
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
                // numeric token: never expand its suffix letters
                while i < chars.len() {
                    let d = chars[i];
                    let exp_sign = (d == '+' || d == '-') && matches!(chars[i - 1], 'e' | 'E');
                    if is_ident_char(d) || d == '.' || exp_sign {
                        out.push(d);
                        i += 1;
                    } else {
                        break;
                    }
                }
                continue;
            }
            if !is_ident_start(c) {
                out.push(c);
                i += 1;
                continue;
            }
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            let ident: String = chars[start..i].iter().collect();
            let Some(mac) = self.macros.get(&ident).filter(|_| !disabled.contains(&ident)) else {
                out.push_str(&ident);
                continue;
            };
            let body = match &mac.params {
                None => mac.body.clone(),
                Some(params) => {
                    let mut j = i;
                    while j < chars.len() && chars[j].is_whitespace() {
                        j += 1;
                    }
                    if chars.get(j) != Some(&'(') {
                        out.push_str(&ident);
                        continue;
                    }
                    let (args, end) = split_args(&chars, j + 1).ok_or_else(|| {
                        pp_error(Code::PpDirective, origin, format!("unterminated call of macro `{ident}`"))
                    })?;
                    i = end;
                    let args: Vec<String> =
                        if params.is_empty() && args.len() == 1 && args[0].trim().is_empty() { Vec::new() } else { args };
                    if args.len() != params.len() {
                        return Err(pp_error(
                            Code::PpDirective,
                            origin,
                            format!("macro `{ident}` expects {} arguments, got {}", params.len(), args.len()),
                        ));
                    }
                    let mut expanded_args = Vec::with_capacity(args.len());
                    for a in &args {
                        expanded_args.push(self.expand(a.trim(), disabled, origin)?);
                    }
                    substitute(&mac.body, params, &expanded_args)
                }
            };
            disabled.push(ident);
            let rescanned = self.expand(&body, disabled, origin)?;
            disabled.pop();
            out.push_str(&rescanned);
        }
        Ok(out)
    }

    fn eval_if(&self, expr: &str, origin: &LineOrigin) -> Result<bool> {
        // Resolve `defined` before macro expansion.
        let chars: Vec<char> = expr.chars().collect();
        let mut resolved = String::new();
        let mut i = 0;
        while i < chars.len() {
            if is_ident_start(chars[i]) {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                if word != "defined" {
                    resolved.push_str(&word);
                    continue;
                }
                while i < chars.len() && chars[i].is_whitespace() {
                    i += 1;
                }
                let paren = chars.get(i) == Some(&'(');
                if paren {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_whitespace() {
                    i += 1;
                }
                let s = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                let name: String = chars[s..i].iter().collect();
                if paren {
                    while i < chars.len() && chars[i].is_whitespace() {
                        i += 1;
                    }
                    if chars.get(i) != Some(&')') {
                        return Err(pp_error(Code::PpDirective, origin, "malformed defined()"));
                    }
                    i += 1;
                }
                resolved.push_str(if self.macros.contains_key(&name) { " 1 " } else { " 0 " });
            } else {
                resolved.push(chars[i]);
                i += 1;
            }
        }
        let expanded = self.expand(&resolved, &mut Vec::new(), origin)?;
        let toks = if_tokens(&expanded).ok_or_else(|| pp_error(Code::PpDirective, origin, "bad #if expression"))?;
        let mut p = IfParser { toks: &toks, pos: 0 };
        let v = p.ternary().ok_or_else(|| pp_error(Code::PpDirective, origin, "bad #if expression"))?;
        if p.pos != toks.len() {
            return Err(pp_error(Code::PpDirective, origin, "trailing tokens in #if expression"));
        }
        Ok(v != 0)
    }
}

fn first_ident(s: &str) -> &str {
    let s = s.trim_start();
    let end = s.find(|c: char| !is_ident_char(c)).unwrap_or(s.len());
    &s[..end]
}

/// Split macro arguments at top-level commas; `start` is just past `(`.
fn split_args(chars: &[char], start: usize) -> Option<(Vec<String>, usize)> {
    let mut depth = 0;
    let mut args = vec![String::new()];
    let mut i = start;
    while i < chars.len() {
        let c = chars[i];
        match c {
            '(' => depth += 1,
            ')' if depth == 0 => return Some((args, i + 1)),
            ')' => depth -= 1,
            ',' if depth == 0 => {
                args.push(String::new());
                i += 1;
                continue;
            }
            _ => {}
        }
        args.last_mut().unwrap().push(c);
        i += 1;
    }
    None
}

fn substitute(body: &str, params: &[String], args: &[String]) -> String {
    let chars: Vec<char> = body.chars().collect();
    let mut out = String::new();
    let mut i = 0;
    while i < chars.len() {
        if is_ident_start(chars[i]) {
            let s = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            let word: String = chars[s..i].iter().collect();
            match params.iter().position(|p| *p == word) {
                Some(k) => out.push_str(&args[k]),
                None => out.push_str(&word),
            }
        } else {
            out.push(chars[i]);
            i += 1;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
enum IfTok {
    Num(i64),
    Op(&'static str),
}

fn if_tokens(s: &str) -> Option<Vec<IfTok>> {
    const OPS: &[&str] = &[
        "&&", "||", "==", "!=", "<=", ">=", "<<", ">>", "!", "<", ">", "+", "-", "*", "/", "%", "(", ")", "?", ":",
    ];
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    'outer: while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let s = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let n: String = chars[s..i].iter().collect();
            while i < chars.len() && matches!(chars[i], 'u' | 'U' | 'l' | 'L') {
                i += 1;
            }
            out.push(IfTok::Num(n.parse().ok()?));
            continue;
        }
        if is_ident_start(c) {
            // Unknown identifiers evaluate to zero, as in C.
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            out.push(IfTok::Num(0));
            continue;
        }
        for op in OPS {
            let len = op.len();
            if i + len <= chars.len() && chars[i..i + len].iter().copied().eq(op.chars()) {
                out.push(IfTok::Op(op));
                i += len;
                continue 'outer;
            }
        }
        return None;
    }
    Some(out)
}

struct IfParser<'a> {
    toks: &'a [IfTok],
    pos: usize,
}

impl IfParser<'_> {
    fn peek_op(&self) -> Option<&'static str> {
        match self.toks.get(self.pos) {
            Some(IfTok::Op(o)) => Some(o),
            _ => None,
        }
    }

    fn eat(&mut self, op: &str) -> bool {
        if self.peek_op() == Some(op) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ternary(&mut self) -> Option<i64> {
        let c = self.binary(0)?;
        if self.eat("?") {
            let a = self.ternary()?;
            if !self.eat(":") {
                return None;
            }
            let b = self.ternary()?;
            return Some(if c != 0 { a } else { b });
        }
        Some(c)
    }

    fn binary(&mut self, min_prec: u8) -> Option<i64> {
        let mut lhs = self.unary()?;
        loop {
            let Some(op) = self.peek_op() else { break };
            let prec = match op {
                "||" => 1,
                "&&" => 2,
                "==" | "!=" => 3,
                "<" | ">" | "<=" | ">=" => 4,
                "<<" | ">>" => 5,
                "+" | "-" => 6,
                "*" | "/" | "%" => 7,
                _ => break,
            };
            if prec < min_prec.max(1) {
                break;
            }
            self.pos += 1;
            let rhs = self.binary(prec + 1)?;
            lhs = match op {
                "||" => (lhs != 0 || rhs != 0) as i64,
                "&&" => (lhs != 0 && rhs != 0) as i64,
                "==" => (lhs == rhs) as i64,
                "!=" => (lhs != rhs) as i64,
                "<" => (lhs < rhs) as i64,
                ">" => (lhs > rhs) as i64,
                "<=" => (lhs <= rhs) as i64,
                ">=" => (lhs >= rhs) as i64,
                "<<" => lhs.checked_shl(rhs as u32)?,
                ">>" => lhs.checked_shr(rhs as u32)?,
                "+" => lhs.wrapping_add(rhs),
                "-" => lhs.wrapping_sub(rhs),
                "*" => lhs.wrapping_mul(rhs),
                "/" => lhs.checked_div(rhs)?,
                "%" => lhs.checked_rem(rhs)?,
                _ => unreachable!(),
            };
        }
        Some(lhs)
    }

    fn unary(&mut self) -> Option<i64> {
        if self.eat("!") {
            return Some((self.unary()? == 0) as i64);
        }
        if self.eat("-") {
            return Some(self.unary()?.wrapping_neg());
        }
        if self.eat("+") {
            return self.unary();
        }
        if self.eat("(") {
            let v = self.ternary()?;
            return self.eat(")").then_some(v);
        }
        match self.toks.get(self.pos) {
            Some(IfTok::Num(n)) => {
                self.pos += 1;
                Some(*n)
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(text: &str) -> Result<SourceUnit> {
        preprocess(&SourceUnit::new("t.cg", text), &BTreeMap::new(), &BTreeMap::new())
    }

    #[test]
    fn object_macro_substitution() {
        assert_eq!(pp("#define N 2\nfloat x = N;").unwrap().text, "float x = 2;");
    }

    #[test]
    fn false_ifdef_branch_is_removed() {
        let out = pp("#ifdef A\nfloat y;\n#endif").unwrap();
        assert_eq!(out.text, "");
        assert_eq!(out.line_map.len(), 0);
    }

    #[test]
    fn comments_become_spaces() {
        let out = pp("float4 v; /* note */ // tail").unwrap();
        assert_eq!(out.text.trim_end(), "float4 v;");
        assert!(!out.text.contains("note") && !out.text.contains("tail"));
    }

    #[test]
    fn block_comment_keeps_line_numbers() {
        let out = pp("a /* x\ny */ b\nc").unwrap();
        assert_eq!(out.text.lines().count(), 3);
        assert_eq!(out.line_map[2].line, 3);
    }

    #[test]
    fn function_like_macro() {
        let out = pp("#define SCALE(a, b) ((a) * (b))\nfloat x = SCALE(1.0, y + 2);").unwrap();
        assert_eq!(out.text, "float x = ((1.0) * (y + 2));");
    }

    #[test]
    fn function_like_macro_name_without_parens_is_left_alone() {
        assert_eq!(pp("#define F(a) a\nfloat F;").unwrap().text, "float F;");
    }

    #[test]
    fn self_referential_macro_terminates() {
        assert_eq!(pp("#define X X + 1\nX").unwrap().text, "X + 1");
    }

    #[test]
    fn numeric_suffix_not_expanded() {
        assert_eq!(pp("#define f oops\nhalf h = 1.5f;").unwrap().text, "half h = 1.5f;");
    }

    #[test]
    fn if_defined_else_and_ifndef() {
        let src = "#define A\n#if defined(A) && !defined(B)\none\n#else\ntwo\n#endif\n#ifndef A\nthree\n#endif";
        assert_eq!(pp(src).unwrap().text, "one");
    }

    #[test]
    fn elif_chain() {
        let src = "#define V 2\n#if V == 1\na\n#elif V == 2\nb\n#elif V == 2\nc\n#else\nd\n#endif";
        assert_eq!(pp(src).unwrap().text, "b");
    }

    #[test]
    fn undef_removes_macro() {
        assert_eq!(pp("#define N 2\n#undef N\nN").unwrap().text, "N");
    }

    #[test]
    fn include_is_spliced_with_origins() {
        let mut inc = BTreeMap::new();
        inc.insert("common.cgh".to_string(), "float k;\nfloat j;".to_string());
        let src = SourceUnit::new("main.cg", "#include \"common.cgh\"\nfloat m;");
        let out = preprocess(&src, &inc, &BTreeMap::new()).unwrap();
        assert_eq!(out.text, "float k;\nfloat j;\nfloat m;");
        assert_eq!(out.line_map[1], LineOrigin { file: "common.cgh".into(), line: 2 });
        assert_eq!(out.line_map[2], LineOrigin { file: "main.cg".into(), line: 2 });
    }

    #[test]
    fn predefines_are_object_macros() {
        let mut defs = BTreeMap::new();
        defs.insert("LIGHTS".to_string(), "3".to_string());
        let out = preprocess(&SourceUnit::new("t", "int n = LIGHTS;"), &BTreeMap::new(), &defs).unwrap();
        assert_eq!(out.text, "int n = 3;");
    }

    #[test]
    fn errors() {
        assert!(pp("#ifdef A\nx").unwrap_err().has_code(Code::PpUnterminatedConditional));
        assert!(pp("#include \"nope.h\"").unwrap_err().has_code(Code::PpUnknownInclude));
        assert!(pp("a /* never closed").unwrap_err().has_code(Code::PpUnterminatedComment));
        assert!(pp("#endif").unwrap_err().has_code(Code::PpDirective));
        assert!(pp("#frobnicate").unwrap_err().has_code(Code::PpDirective));
    }

    #[test]
    fn unknown_directive_in_dead_branch_is_ignored() {
        assert_eq!(pp("#if 0\n#frobnicate\n#endif\nx").unwrap().text, "x");
    }

    #[test]
    fn idempotent_without_directives() {
        let text = "float4 main(float4 c : COLOR) : COLOR\n{\n    return c;\n}\n";
        let once = pp(text).unwrap();
        assert_eq!(once.text, text);
        let twice = preprocess(&once, &BTreeMap::new(), &BTreeMap::new()).unwrap();
        assert_eq!(twice.text, once.text);
    }
}
