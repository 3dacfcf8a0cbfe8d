//! Canonical source printer. Parentheses are emitted only where C precedence
//! requires them, except that a conditional expression nested inside any
//! other expression is always parenthesized.

use std::fmt::Write;

use super::ast::*;

pub fn pretty(tree: &SyntaxTree) -> String {
    let mut p = Printer { out: String::new(), indent: 0 };
    for (i, d) in tree.decls.iter().enumerate() {
        if i > 0 {
            p.out.push('\n');
        }
        p.decl(d);
    }
    p.out
}

/// Print one expression in canonical form.
pub fn pretty_expr(e: &Expr) -> String {
    let mut s = String::new();
    expr(&mut s, e, 0);
    s
}

struct Printer {
    out: String,
    indent: usize,
}

fn dims(out: &mut String, dims: &[u32]) {
    for d in dims {
        let _ = write!(out, "[{d}]");
    }
}

fn semantic(out: &mut String, sem: &Option<String>) {
    if let Some(s) = sem {
        let _ = write!(out, " : {s}");
    }
}

impl Printer {
    fn line(&mut self) {
        for _ in 0..self.indent {
            self.out.push_str("    ");
        }
    }

    fn decl(&mut self, d: &Decl) {
        match d {
            Decl::Function(f) => {
                let _ = write!(self.out, "{} {}(", f.return_ty.name, f.name);
                for (i, p) in f.params.iter().enumerate() {
                    if i > 0 {
                        self.out.push_str(", ");
                    }
                    if let Some(q) = p.qualifier.keyword() {
                        let _ = write!(self.out, "{q} ");
                    }
                    let _ = write!(self.out, "{} {}", p.ty.name, p.name);
                    dims(&mut self.out, &p.dims);
                    semantic(&mut self.out, &p.semantic);
                }
                self.out.push(')');
                semantic(&mut self.out, &f.return_semantic);
                match &f.body {
                    None => self.out.push_str(";\n"),
                    Some(b) => {
                        self.out.push('\n');
                        self.block(b);
                        self.out.push('\n');
                    }
                }
            }
            Decl::Record(r) => {
                let _ = writeln!(self.out, "struct {} {{", r.name);
                for f in &r.fields {
                    let _ = write!(self.out, "    {} {}", f.ty.name, f.name);
                    dims(&mut self.out, &f.dims);
                    semantic(&mut self.out, &f.semantic);
                    self.out.push_str(";\n");
                }
                self.out.push_str("};\n");
            }
            Decl::Global(g) => {
                self.decl_stmt(g);
                self.out.push('\n');
            }
        }
    }

    fn decl_stmt(&mut self, d: &DeclStmt) {
        if d.uniform {
            self.out.push_str("uniform ");
        }
        if d.is_const {
            self.out.push_str("const ");
        }
        self.out.push_str(&d.ty.name);
        for (i, v) in d.vars.iter().enumerate() {
            self.out.push_str(if i == 0 { " " } else { ", " });
            self.out.push_str(&v.name);
            dims(&mut self.out, &v.dims);
            semantic(&mut self.out, &v.semantic);
            if let Some(init) = &v.init {
                self.out.push_str(" = ");
                expr(&mut self.out, init, 2);
            }
        }
        self.out.push(';');
    }

    fn block(&mut self, b: &Block) {
        self.line();
        if b.stmts.is_empty() {
            self.out.push_str("{ }");
            return;
        }
        self.out.push_str("{\n");
        self.indent += 1;
        for s in &b.stmts {
            self.stmt(s);
        }
        self.indent -= 1;
        self.line();
        self.out.push('}');
    }

    /// A nested statement on its own line(s).
    fn stmt(&mut self, s: &Stmt) {
        if let StmtKind::Block(b) = &s.kind {
            self.block(b);
            self.out.push('\n');
            return;
        }
        self.line();
        self.stmt_inline(s);
        self.out.push('\n');
    }

    fn body(&mut self, s: &Stmt) {
        if let StmtKind::Block(b) = &s.kind {
            self.out.push('\n');
            self.block(b);
        } else {
            self.out.push('\n');
            self.indent += 1;
            self.line();
            self.stmt_inline(s);
            self.indent -= 1;
        }
    }

    fn stmt_inline(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::Decl(d) => self.decl_stmt(d),
            StmtKind::Expr(e) => {
                expr(&mut self.out, e, 0);
                self.out.push(';');
            }
            StmtKind::If { cond, then, otherwise } => {
                self.out.push_str("if (");
                expr(&mut self.out, cond, 0);
                self.out.push(')');
                self.body(then);
                if let Some(o) = otherwise {
                    self.out.push('\n');
                    self.line();
                    self.out.push_str("else");
                    self.body(o);
                }
            }
            StmtKind::For { init, cond, step, body } => {
                self.out.push_str("for (");
                match init {
                    Some(i) => self.stmt_inline(i),
                    None => self.out.push(';'),
                }
                if let Some(c) = cond {
                    self.out.push(' ');
                    expr(&mut self.out, c, 0);
                }
                self.out.push(';');
                if let Some(st) = step {
                    self.out.push(' ');
                    expr(&mut self.out, st, 0);
                }
                self.out.push(')');
                self.body(body);
            }
            StmtKind::While { cond, body } => {
                self.out.push_str("while (");
                expr(&mut self.out, cond, 0);
                self.out.push(')');
                self.body(body);
            }
            StmtKind::DoWhile { body, cond } => {
                self.out.push_str("do");
                self.body(body);
                self.out.push('\n');
                self.line();
                self.out.push_str("while (");
                expr(&mut self.out, cond, 0);
                self.out.push_str(");");
            }
            StmtKind::Break => self.out.push_str("break;"),
            StmtKind::Continue => self.out.push_str("continue;"),
            StmtKind::Discard => self.out.push_str("discard;"),
            StmtKind::Return(None) => self.out.push_str("return;"),
            StmtKind::Return(Some(e)) => {
                self.out.push_str("return ");
                expr(&mut self.out, e, 0);
                self.out.push(';');
            }
            StmtKind::Empty => self.out.push(';'),
            StmtKind::Block(b) => {
                // Only reached through `for` init, which never holds a block.
                let saved = self.indent;
                self.indent = 0;
                self.block(b);
                self.indent = saved;
            }
        }
    }
}

// Precedence levels: 1 comma, 2 assignment, 3 conditional, 4..13 binary,
// 14 prefix unary and casts, 15 postfix.
fn prec(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Comma { .. } => 1,
        ExprKind::Assign { .. } => 2,
        ExprKind::Cond { .. } => 3,
        ExprKind::Binary { op, .. } => op.precedence(),
        ExprKind::Unary { op, .. } if !op.is_postfix() => 14,
        ExprKind::Cast { .. } => 14,
        _ => 15,
    }
}

fn float_text(v: f64) -> String {
    let s = format!("{v:?}");
    if s.contains(['.', 'e', 'E']) || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

/// Print `e`, parenthesizing it if it binds more loosely than `min`.
fn expr(out: &mut String, e: &Expr, min: u8) {
    let p = prec(e);
    let paren = p < min || (min > 0 && matches!(e.kind, ExprKind::Cond { .. }));
    if paren {
        out.push('(');
    }
    match &e.kind {
        ExprKind::IntLit(v) => {
            let _ = write!(out, "{v}");
        }
        ExprKind::FloatLit(v, suffix) => {
            out.push_str(&float_text(*v));
            out.push_str(match suffix {
                FloatSuffix::None => "",
                FloatSuffix::F => "f",
                FloatSuffix::H => "h",
                FloatSuffix::X => "x",
            });
        }
        ExprKind::BoolLit(b) => out.push_str(if *b { "true" } else { "false" }),
        ExprKind::Ident(name) => out.push_str(name),
        ExprKind::Call { callee, args } => {
            out.push_str(callee);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                expr(out, a, 2);
            }
            out.push(')');
        }
        ExprKind::Cast { ty, expr: inner } => {
            let _ = write!(out, "({})", ty.name);
            expr(out, inner, 15);
        }
        ExprKind::Unary { op, expr: inner } if op.is_postfix() => {
            expr(out, inner, 15);
            out.push_str(op.symbol());
        }
        ExprKind::Unary { op, expr: inner } => {
            out.push_str(op.symbol());
            // Nested prefix operators are always parenthesized so `- -x`
            // never prints as `--x`.
            let nested_prefix = matches!(&inner.kind, ExprKind::Unary { op, .. } if !op.is_postfix())
                || matches!(inner.kind, ExprKind::Cast { .. });
            expr(out, inner, if nested_prefix { 15 } else { 14 });
        }
        ExprKind::Binary { op, lhs, rhs } => {
            let p = op.precedence();
            expr(out, lhs, p);
            let _ = write!(out, " {} ", op.symbol());
            expr(out, rhs, p + 1);
        }
        ExprKind::Assign { op, lhs, rhs } => {
            expr(out, lhs, 3);
            match op {
                None => out.push_str(" = "),
                Some(op) => {
                    let _ = write!(out, " {}= ", op.symbol());
                }
            }
            expr(out, rhs, 2);
        }
        ExprKind::Cond { cond, then, otherwise } => {
            expr(out, cond, 4);
            out.push_str(" ? ");
            expr(out, then, 1);
            out.push_str(" : ");
            expr(out, otherwise, 2);
        }
        ExprKind::Comma { lhs, rhs } => {
            expr(out, lhs, 1);
            out.push_str(", ");
            expr(out, rhs, 2);
        }
        ExprKind::Member { base, name } => {
            expr(out, base, 15);
            out.push('.');
            out.push_str(name);
        }
        ExprKind::Index { base, index } => {
            expr(out, base, 15);
            out.push('[');
            expr(out, index, 0);
            out.push(']');
        }
    }
    if paren {
        out.push(')');
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{lexer::tokenize, parser::parse, preprocess::SourceUnit};

    fn parse_src(s: &str) -> SyntaxTree {
        parse(&tokenize(&SourceUnit::new("t", s)).unwrap()).unwrap()
    }

    fn round_trip(s: &str) {
        let t = parse_src(s);
        let printed = pretty(&t);
        let again = parse_src(&printed);
        assert_eq!(t.without_locations(), again.without_locations(), "printed:\n{printed}");
    }

    #[test]
    fn statement_text_is_canonical() {
        let t = parse_src("void f(float brightness, float4 color) { oColor   =  brightness*color; }");
        let printed = pretty(&t);
        assert!(printed.contains("    oColor = brightness * color;\n"), "{printed}");
    }

    #[test]
    fn empty_body() {
        let printed = pretty(&parse_src("void f() {}"));
        assert_eq!(printed, "void f()\n{ }\n");
    }

    #[test]
    fn nested_conditional_is_parenthesized() {
        let t = parse_src("void f() { x = a ? b ? c : d : e ? g : h; }");
        let printed = pretty(&t);
        assert!(printed.contains("x = (a ? (b ? c : d) : (e ? g : h));"), "{printed}");
        round_trip("void f() { x = a ? b ? c : d : e ? g : h; }");
    }

    #[test]
    fn round_trips() {
        round_trip(crate::corpus::SIMPLE_TRANSFORM);
        round_trip(crate::corpus::BRIGHT_LIGHT_MAP_DECAL);
        round_trip("void f() { x = -(-y); z = - -w; a = (a + b) * c - d / (e - g); q = !(!p); }");
        round_trip("void f() { x = (float)-y; y = (float4)(x); i++; --j; k = i++ + ++j; }");
        round_trip("void f() { for (;;) { } for (int i = 0, j = 1; i < 3; i++, j++) x += i; }");
        round_trip("void f() { if (a) if (b) x = 1; else x = 2; else { x = 3; } }");
        round_trip("void f() { do x++; while (x < 3); while (x) ; }");
        round_trip("void f() { a = b = c; a = (b, c); m[1][2] = v.xyz.x; }");
        round_trip("void f() { x = 1e-7; y = 0.5h; z = 2.0x; w = 3.0f; u = 1e30; }");
    }
}
