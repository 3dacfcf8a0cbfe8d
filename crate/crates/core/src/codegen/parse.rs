//! Re-parsing of assembly listings, so hand-edited programs can be run on
//! the assembly interpreter.

use std::collections::HashMap;

use super::emit::{AssemblyListing, ParamDecl};
use super::ir::{Dst, Instruction, Opcode, Reg, Src, TexTarget, IDENTITY};
use crate::diag::{Code, Diagnostic, Loc};
use crate::profiles::ProfileKind;
use crate::types::SamplerDim;

type P<T> = Result<T, Diagnostic>;

fn err<T>(line: usize, msg: impl Into<String>) -> P<T> {
    Err(Diagnostic::error(Code::AsmParse, Loc::new(line as u32, 1), msg))
}

fn strip_comment(line: &str) -> &str {
    let cut = [line.find('#'), line.find("//")].into_iter().flatten().min();
    match cut {
        Some(i) => &line[..i],
        None => line,
    }
    .trim()
}

fn lane(c: char) -> Option<u8> {
    "xyzw".find(c).map(|i| i as u8)
}

/// Split `name.suffix` when the suffix is a swizzle or mask.
fn split_suffix(op: &str) -> (&str, Option<&str>) {
    if let Some(i) = op.rfind('.') {
        let suffix = &op[i + 1..];
        if i > 0 && (1..=4).contains(&suffix.len()) && suffix.chars().all(|c| lane(c).is_some()) {
            return (&op[..i], Some(suffix));
        }
    }
    (op, None)
}

struct Parser {
    kind: ProfileKind,
    params: Vec<ParamDecl>,
    consts: HashMap<String, u32>,
    temps: HashMap<String, u32>,
    max_temp: Option<u32>,
}

fn numbered(name: &str, prefix: &str) -> Option<u32> {
    name.strip_prefix(prefix).filter(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit())).and_then(|d| d.parse().ok())
}

impl Parser {
    fn reg(&mut self, name: &str, line: usize) -> P<Reg> {
        let r = if self.kind == ProfileKind::Vs11 {
            if let Some(n) = numbered(name, "v") {
                Reg::Input(format!("v{n}"))
            } else if let Some(n) = numbered(name, "c") {
                Reg::Const(n)
            } else if let Some(n) = numbered(name, "r") {
                Reg::Temp(n)
            } else if name.starts_with('o') && name.len() > 1 {
                Reg::Output(name.to_string())
            } else {
                return err(line, format!("unknown register `{name}`"));
            }
        } else if let Some(&c) = self.consts.get(name) {
            Reg::Const(c)
        } else if let Some(&t) = self.temps.get(name) {
            Reg::Temp(t)
        } else if name.starts_with("fragment.") || name.starts_with("vertex.") {
            Reg::Input(name.to_string())
        } else if name.starts_with("result.") {
            Reg::Output(name.to_string())
        } else {
            return err(line, format!("undeclared register `{name}`"));
        };
        if let Reg::Temp(t) = r {
            self.max_temp = Some(self.max_temp.map_or(t, |m| m.max(t)));
        }
        Ok(r)
    }

    fn src(&mut self, text: &str, line: usize) -> P<Src> {
        let (negate, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest.trim()),
            None => (false, text),
        };
        let (name, suffix) = split_suffix(body);
        let reg = self.reg(name, line)?;
        let swizzle = match suffix {
            None => IDENTITY,
            Some(s) => {
                let l: Vec<u8> = s.chars().filter_map(lane).collect();
                let mut sw = [*l.last().unwrap(); 4];
                sw[..l.len()].copy_from_slice(&l);
                sw
            }
        };
        Ok(Src { reg, swizzle, negate })
    }

    fn dst(&mut self, text: &str, line: usize) -> P<Dst> {
        let (name, suffix) = split_suffix(text);
        let mask = match suffix {
            None => 0b1111,
            Some(s) => {
                let l: Vec<u8> = s.chars().filter_map(lane).collect();
                if l.windows(2).any(|w| w[0] >= w[1]) {
                    return err(line, format!("write mask `.{s}` must list lanes in order"));
                }
                l.iter().fold(0, |m, x| m | 1 << x)
            }
        };
        Ok(Dst { reg: self.reg(name, line)?, mask })
    }

    fn numbers(text: &str, line: usize) -> P<[f32; 4]> {
        let v: Vec<f32> = text.split(',').map(|x| x.trim().parse::<f32>()).collect::<Result<_, _>>().or_else(|_| {
            err(line, format!("bad number list `{text}`"))
        })?;
        match v.len() {
            1 => Ok([v[0]; 4]),
            4 => Ok([v[0], v[1], v[2], v[3]]),
            n => err(line, format!("expected 1 or 4 numbers, got {n}")),
        }
    }

    fn declare_const(&mut self, name: &str, decl: impl FnOnce(u32) -> ParamDecl, line: usize) -> P<()> {
        if self.consts.contains_key(name) {
            return err(line, format!("`{name}` declared twice"));
        }
        let reg = numbered(name, "c").unwrap_or_else(|| self.consts.values().max().map_or(0, |m| m + 1));
        self.consts.insert(name.to_string(), reg);
        self.params.push(decl(reg));
        Ok(())
    }

    fn declaration(&mut self, line_text: &str, line: usize) -> P<bool> {
        if self.kind == ProfileKind::Vs11 {
            let Some(rest) = line_text.strip_prefix("def ") else { return Ok(false) };
            let Some((name, nums)) = rest.split_once(',') else { return err(line, "`def` needs a register and values") };
            let name = name.trim();
            let Some(reg) = numbered(name, "c") else { return err(line, format!("`def` target `{name}` is not a constant")) };
            let value = Self::numbers(nums, line)?;
            self.params.push(ParamDecl::Literal { reg, value });
            return Ok(true);
        }
        if let Some(rest) = line_text.strip_prefix("TEMP ") {
            for name in rest.trim_end_matches(';').split(',') {
                let name = name.trim();
                let t = numbered(name, "R").unwrap_or(self.temps.len() as u32);
                self.temps.insert(name.to_string(), t);
            }
            return Ok(true);
        }
        if let Some(rest) = line_text.strip_prefix("PARAM ") {
            let Some((name, value)) = rest.trim_end_matches(';').split_once('=') else {
                return err(line, "`PARAM` needs `name = value`");
            };
            let (name, value) = (name.trim(), value.trim());
            if let Some(inner) = value.strip_prefix('{').and_then(|v| v.strip_suffix('}')) {
                let value = Self::numbers(inner, line)?;
                self.declare_const(name, |reg| ParamDecl::Literal { reg, value }, line)?;
            } else if let Some(idx) = value.strip_prefix("program.local[").and_then(|v| v.strip_suffix(']')) {
                let Ok(index) = idx.trim().parse() else { return err(line, format!("bad local index `{idx}`")) };
                self.declare_const(name, |reg| ParamDecl::Local { reg, index }, line)?;
            } else {
                return err(line, format!("unsupported PARAM binding `{value}`"));
            }
            return Ok(true);
        }
        Ok(false)
    }

    fn instruction(&mut self, text: &str, line: usize) -> P<Instruction> {
        let text = if self.kind == ProfileKind::Vs11 {
            text
        } else {
            match text.strip_suffix(';') {
                Some(t) => t.trim(),
                None => return err(line, "missing `;`"),
            }
        };
        let (name, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
        let op = Opcode::ALL
            .into_iter()
            .find(|o| if self.kind == ProfileKind::Vs11 { o.vs_name() == name } else { o.arb_name() == name });
        let Some(op) = op else { return err(line, format!("unknown opcode `{name}`")) };
        let mut operands: Vec<&str> = rest.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        let expected = op.arity() + usize::from(op.has_dest()) + if op.is_texture() { 2 } else { 0 };
        if operands.len() != expected {
            return err(line, format!("`{name}` takes {expected} operands, got {}", operands.len()));
        }
        let tex = if op.is_texture() {
            let target = operands.pop().unwrap();
            let unit = operands.pop().unwrap();
            let dim = match target {
                "2D" => SamplerDim::D2,
                "3D" => SamplerDim::D3,
                "CUBE" => SamplerDim::Cube,
                t => return err(line, format!("unknown texture target `{t}`")),
            };
            let Some(unit) = unit.strip_prefix("texture[").and_then(|u| u.strip_suffix(']')).and_then(|u| u.parse().ok())
            else {
                return err(line, format!("bad texture operand `{unit}`"));
            };
            Some(TexTarget { unit, dim })
        } else {
            None
        };
        let dst = if op.has_dest() { Some(self.dst(operands.remove(0), line)?) } else { None };
        let srcs = operands.iter().map(|o| self.src(o, line)).collect::<P<Vec<_>>>()?;
        Ok(Instruction { op, dst, srcs, tex })
    }
}

/// Parse a listing in any of the three dialects, chosen by its header.
pub fn parse_listing(text: &str) -> P<AssemblyListing> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, strip_comment(l))).filter(|(_, l)| !l.is_empty());
    let Some((hl, head)) = lines.next() else { return err(1, "empty listing") };
    let kind = match head {
        "vs.1.1" => ProfileKind::Vs11,
        "!!ARBvp1.0" => ProfileKind::ArbVp1,
        "!!ARBfp1.0" => ProfileKind::ArbFp1,
        h => return err(hl, format!("unknown header `{h}`")),
    };
    let mut p = Parser { kind, params: Vec::new(), consts: HashMap::new(), temps: HashMap::new(), max_temp: None };
    let mut instructions = Vec::new();
    let mut ended = false;
    let statements = lines.flat_map(|(line, l)| {
        if kind == ProfileKind::Vs11 {
            return vec![(line, l.to_string())];
        }
        // ARB text is free-form: several `;`-terminated statements may
        // share a line.
        let mut parts: Vec<(usize, String)> = l.split_inclusive(';').map(|s| (line, s.trim().to_string())).collect();
        parts.retain(|(_, s)| !s.is_empty());
        parts
    });
    for (line, l) in statements {
        let l = l.as_str();
        if ended {
            return err(line, "text after END");
        }
        if kind != ProfileKind::Vs11 && l == "END" {
            ended = true;
            continue;
        }
        if p.declaration(l, line)? {
            continue;
        }
        instructions.push(p.instruction(l, line)?);
    }
    if kind != ProfileKind::Vs11 && !ended {
        return err(text.lines().count().max(1), "missing END");
    }
    let temps = if kind == ProfileKind::Vs11 {
        p.max_temp.map_or(0, |m| m + 1)
    } else {
        p.temps.values().max().map_or(0, |m| m + 1)
    };
    Ok(AssemblyListing { kind, text: text.to_string(), instructions, params: p.params, temps })
}
