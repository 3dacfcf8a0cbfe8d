//! Recursive-descent parser with precedence climbing for binary operators.
//!
//! On a syntax error inside a statement the parser records the diagnostic,
//! skips to the next `;` (or past a balanced `{ ... }`) and carries on, so one
//! run can report several independent errors.

use std::collections::HashSet;

use super::ast::*;
use super::lexer::{Token, TokenKind};
use crate::diag::{Code, Diagnostic, Diagnostics, Loc, Result};
use crate::types::is_builtin_type_name;

type PResult<T> = std::result::Result<T, Diagnostic>;

pub fn parse(tokens: &[Token]) -> Result<SyntaxTree> {
    if tokens.last().map(|t| t.kind) != Some(TokenKind::Eof) {
        let loc = tokens.last().map_or(Loc::default(), |t| t.loc);
        return Err(Diagnostic::error(Code::Syntax, loc, "token stream lacks end-of-input marker").into());
    }
    let mut p = Parser { toks: tokens, pos: 0, diags: Vec::new(), records: HashSet::new() };
    let mut decls = Vec::new();
    while !p.at_eof() {
        match p.top_level() {
            Ok(Some(d)) => decls.push(d),
            Ok(None) => {}
            Err(d) => {
                p.diags.push(d);
                p.resync();
            }
        }
    }
    if p.diags.is_empty() {
        Ok(SyntaxTree { decls })
    } else {
        Err(Diagnostics(p.diags))
    }
}

struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
    diags: Vec<Diagnostic>,
    records: HashSet<String>,
}

fn unexpected(tok: &Token, expected: &[&str]) -> Diagnostic {
    if tok.kind == TokenKind::Reserved {
        return Diagnostic::error(
            Code::Reserved,
            tok.loc,
            format!("`{}` is a reserved word and is not supported", tok.lexeme),
        );
    }
    let list = expected.iter().map(|e| format!("`{e}`")).collect::<Vec<_>>().join(", ");
    let msg = if expected.len() == 1 {
        format!("expected {list}, found {tok}")
    } else {
        format!("expected one of {list}, found {tok}")
    };
    Diagnostic::error(Code::Syntax, tok.loc, msg)
}

impl<'t> Parser<'t> {
    fn peek(&self) -> &'t Token {
        &self.toks[self.pos.min(self.toks.len() - 1)]
    }

    fn peek_at(&self, n: usize) -> &'t Token {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)]
    }

    fn at_eof(&self) -> bool {
        self.peek().kind == TokenKind::Eof
    }

    fn bump(&mut self) -> &'t Token {
        let t = self.peek();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn check(&self, lexeme: &str) -> bool {
        let t = self.peek();
        matches!(t.kind, TokenKind::Op | TokenKind::Punct | TokenKind::Keyword) && t.lexeme == lexeme
    }

    fn eat(&mut self, lexeme: &str) -> bool {
        if self.check(lexeme) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lexeme: &str) -> PResult<&'t Token> {
        if self.check(lexeme) {
            Ok(self.bump())
        } else {
            Err(unexpected(self.peek(), &[lexeme]))
        }
    }

    fn ident(&mut self) -> PResult<&'t Token> {
        if self.peek().kind == TokenKind::Ident {
            Ok(self.bump())
        } else {
            Err(unexpected(self.peek(), &["identifier"]))
        }
    }

    fn is_type_name(&self, tok: &Token) -> bool {
        tok.kind == TokenKind::Ident && (is_builtin_type_name(&tok.lexeme) || self.records.contains(&tok.lexeme))
    }

    /// Skip to just past the next `;` at brace depth zero, or past a balanced
    /// brace group.
    fn resync(&mut self) {
        let mut depth = 0usize;
        while !self.at_eof() {
            let t = self.bump();
            if t.kind != TokenKind::Punct {
                continue;
            }
            match t.lexeme.as_str() {
                "{" => depth += 1,
                "}" if depth <= 1 => {
                    if depth == 1 {
                        self.eat(";");
                    }
                    return;
                }
                "}" => depth -= 1,
                ";" if depth == 0 => return,
                _ => {}
            }
        }
    }

    fn top_level(&mut self) -> PResult<Option<Decl>> {
        let start = self.peek();
        if self.eat(";") {
            return Ok(None);
        }
        if start.is(TokenKind::Keyword, "struct") {
            return self.record().map(|r| Some(Decl::Record(r)));
        }
        let uniform = self.eat("uniform");
        let is_const = self.eat("const");
        let ty = self.type_name()?;
        let name = self.ident()?;
        if self.check("(") && !uniform && !is_const {
            return self.function(ty, name).map(|f| Some(Decl::Function(f)));
        }
        let decl = self.declarators(uniform, is_const, ty, name, start.loc)?;
        Ok(Some(Decl::Global(decl)))
    }

    fn type_name(&mut self) -> PResult<TypeName> {
        let t = self.peek();
        if self.is_type_name(t) {
            self.bump();
            Ok(TypeName { name: t.lexeme.clone(), loc: t.loc })
        } else {
            Err(unexpected(t, &["type name"]))
        }
    }

    fn record(&mut self) -> PResult<RecordDecl> {
        let kw = self.expect("struct")?;
        let name = self.ident()?;
        // Register early so fields may not refer to it but later decls can.
        self.expect("{")?;
        let mut fields = Vec::new();
        while !self.check("}") {
            let ty = self.type_name()?;
            let fname = self.ident()?;
            let dims = self.dims()?;
            let semantic = self.semantic()?;
            self.expect(";")?;
            fields.push(RecordField { ty, name: fname.lexeme.clone(), dims, semantic, loc: fname.loc });
        }
        self.expect("}")?;
        self.expect(";")?;
        self.records.insert(name.lexeme.clone());
        Ok(RecordDecl { name: name.lexeme.clone(), fields, loc: kw.loc })
    }

    fn dims(&mut self) -> PResult<Vec<u32>> {
        let mut dims = Vec::new();
        while self.eat("[") {
            let t = self.peek();
            if t.kind != TokenKind::IntLit {
                return Err(unexpected(t, &["integer array extent"]));
            }
            self.bump();
            let n: u32 = t
                .lexeme
                .parse()
                .ok()
                .filter(|n| *n > 0)
                .ok_or_else(|| Diagnostic::error(Code::Syntax, t.loc, "array extent must be a positive integer"))?;
            dims.push(n);
            self.expect("]")?;
        }
        Ok(dims)
    }

    fn semantic(&mut self) -> PResult<Option<String>> {
        if self.eat(":") {
            Ok(Some(self.ident()?.lexeme.clone()))
        } else {
            Ok(None)
        }
    }

    fn function(&mut self, return_ty: TypeName, name: &Token) -> PResult<FunctionDecl> {
        self.expect("(")?;
        let mut params = Vec::new();
        let void_only = self.peek().is(TokenKind::Ident, "void") && self.peek_at(1).is(TokenKind::Punct, ")");
        if void_only {
            self.bump();
        }
        if !self.check(")") {
            loop {
                params.push(self.param()?);
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(")")?;
        let return_semantic = self.semantic()?;
        let body = if self.eat(";") { None } else { Some(self.block()?) };
        Ok(FunctionDecl { return_ty, name: name.lexeme.clone(), params, return_semantic, body, loc: name.loc })
    }

    fn param(&mut self) -> PResult<Param> {
        let loc = self.peek().loc;
        let qualifier = if self.eat("uniform") {
            ParamQualifier::Uniform
        } else if self.eat("inout") {
            ParamQualifier::InOut
        } else if self.eat("out") {
            ParamQualifier::Out
        } else if self.eat("in") {
            ParamQualifier::In
        } else {
            ParamQualifier::None
        };
        if matches!(self.peek().lexeme.as_str(), "uniform" | "out" | "inout" | "in") && self.peek().kind == TokenKind::Keyword {
            return Err(Diagnostic::error(Code::Qualifier, self.peek().loc, "conflicting parameter qualifiers"));
        }
        let ty = self.type_name()?;
        let name = self.ident()?;
        let dims = self.dims()?;
        let semantic = self.semantic()?;
        Ok(Param { qualifier, ty, name: name.lexeme.clone(), dims, semantic, loc })
    }

    fn declarators(
        &mut self,
        uniform: bool,
        is_const: bool,
        ty: TypeName,
        first: &Token,
        loc: Loc,
    ) -> PResult<DeclStmt> {
        let mut vars = Vec::new();
        let mut name = first;
        loop {
            let dims = self.dims()?;
            let semantic = self.semantic()?;
            let init = if self.eat("=") { Some(self.assign()?) } else { None };
            vars.push(Declarator { name: name.lexeme.clone(), dims, semantic, init, loc: name.loc });
            if !self.eat(",") {
                break;
            }
            name = self.ident()?;
        }
        self.expect(";")?;
        Ok(DeclStmt { uniform, is_const, ty, vars, loc })
    }

    fn block(&mut self) -> PResult<Block> {
        self.expect("{")?;
        let mut stmts = Vec::new();
        while !self.check("}") {
            if self.at_eof() {
                return Err(unexpected(self.peek(), &["}"]));
            }
            match self.statement() {
                Ok(s) => stmts.push(s),
                Err(d) => {
                    self.diags.push(d);
                    self.resync_statement();
                }
            }
        }
        self.expect("}")?;
        Ok(Block { stmts })
    }

    /// Statement-level recovery: like `resync` but never consumes the `}`
    /// closing the enclosing block.
    fn resync_statement(&mut self) {
        let mut depth = 0usize;
        while !self.at_eof() {
            let t = self.peek();
            if t.kind == TokenKind::Punct {
                match t.lexeme.as_str() {
                    "{" => depth += 1,
                    "}" if depth == 0 => return,
                    "}" => {
                        depth -= 1;
                        if depth == 0 {
                            self.bump();
                            return;
                        }
                    }
                    ";" if depth == 0 => {
                        self.bump();
                        return;
                    }
                    _ => {}
                }
            }
            self.bump();
        }
    }

    fn is_decl_start(&self) -> bool {
        let t = self.peek();
        t.is(TokenKind::Keyword, "const")
            || (self.is_type_name(t) && self.peek_at(1).kind == TokenKind::Ident)
    }

    fn statement(&mut self) -> PResult<Stmt> {
        let t = self.peek();
        let loc = t.loc;
        if t.kind == TokenKind::Reserved {
            return Err(unexpected(t, &[]));
        }
        let kind = match (t.kind, t.lexeme.as_str()) {
            (TokenKind::Punct, "{") => StmtKind::Block(self.block()?),
            (TokenKind::Punct, ";") => {
                self.bump();
                StmtKind::Empty
            }
            (TokenKind::Keyword, "if") => {
                self.bump();
                self.expect("(")?;
                let cond = self.expr()?;
                self.expect(")")?;
                let then = Box::new(self.statement()?);
                let otherwise = if self.eat("else") { Some(Box::new(self.statement()?)) } else { None };
                StmtKind::If { cond, then, otherwise }
            }
            (TokenKind::Keyword, "for") => {
                self.bump();
                self.expect("(")?;
                let init = if self.eat(";") {
                    None
                } else if self.is_decl_start() {
                    let loc = self.peek().loc;
                    let d = self.local_decl()?;
                    Some(Box::new(Stmt { kind: StmtKind::Decl(d), loc }))
                } else {
                    let loc = self.peek().loc;
                    let e = self.expr()?;
                    self.expect(";")?;
                    Some(Box::new(Stmt { kind: StmtKind::Expr(e), loc }))
                };
                let cond = if self.check(";") { None } else { Some(self.expr()?) };
                self.expect(";")?;
                let step = if self.check(")") { None } else { Some(self.expr()?) };
                self.expect(")")?;
                let body = Box::new(self.statement()?);
                StmtKind::For { init, cond, step, body }
            }
            (TokenKind::Keyword, "while") => {
                self.bump();
                self.expect("(")?;
                let cond = self.expr()?;
                self.expect(")")?;
                StmtKind::While { cond, body: Box::new(self.statement()?) }
            }
            (TokenKind::Keyword, "do") => {
                self.bump();
                let body = Box::new(self.statement()?);
                self.expect("while")?;
                self.expect("(")?;
                let cond = self.expr()?;
                self.expect(")")?;
                self.expect(";")?;
                StmtKind::DoWhile { body, cond }
            }
            (TokenKind::Keyword, "break") => {
                self.bump();
                self.expect(";")?;
                StmtKind::Break
            }
            (TokenKind::Keyword, "continue") => {
                self.bump();
                self.expect(";")?;
                StmtKind::Continue
            }
            (TokenKind::Keyword, "discard") => {
                self.bump();
                self.expect(";")?;
                StmtKind::Discard
            }
            (TokenKind::Keyword, "return") => {
                self.bump();
                let value = if self.check(";") { None } else { Some(self.expr()?) };
                self.expect(";")?;
                StmtKind::Return(value)
            }
            _ if self.is_decl_start() => StmtKind::Decl(self.local_decl()?),
            _ => {
                let e = self.expr()?;
                self.expect(";")?;
                StmtKind::Expr(e)
            }
        };
        Ok(Stmt { kind, loc })
    }

    fn local_decl(&mut self) -> PResult<DeclStmt> {
        let loc = self.peek().loc;
        let is_const = self.eat("const");
        let ty = self.type_name()?;
        let name = self.ident()?;
        self.declarators(false, is_const, ty, name, loc)
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.assign()?;
        while self.check(",") {
            let loc = self.bump().loc;
            let rhs = self.assign()?;
            lhs = Expr::new(ExprKind::Comma { lhs: Box::new(lhs), rhs: Box::new(rhs) }, loc);
        }
        Ok(lhs)
    }

    fn assign(&mut self) -> PResult<Expr> {
        let lhs = self.conditional()?;
        let t = self.peek();
        if t.kind != TokenKind::Op {
            return Ok(lhs);
        }
        let op = match t.lexeme.as_str() {
            "=" => None,
            s if s.len() >= 2 && s.ends_with('=') && !matches!(s, "==" | "!=" | "<=" | ">=") => {
                Some(BinaryOp::from_symbol(&s[..s.len() - 1]).expect("compound operator"))
            }
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.assign()?;
        Ok(Expr::new(ExprKind::Assign { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, t.loc))
    }

    fn conditional(&mut self) -> PResult<Expr> {
        let cond = self.binary(BinaryOp::Or.precedence())?;
        if !self.check("?") {
            return Ok(cond);
        }
        let loc = self.bump().loc;
        let then = self.expr()?;
        self.expect(":")?;
        let otherwise = self.assign()?;
        Ok(Expr::new(
            ExprKind::Cond { cond: Box::new(cond), then: Box::new(then), otherwise: Box::new(otherwise) },
            loc,
        ))
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let t = self.peek();
            if t.kind != TokenKind::Op {
                break;
            }
            let Some(op) = BinaryOp::from_symbol(&t.lexeme) else { break };
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.bump();
            let rhs = self.binary(prec + 1)?;
            lhs = Expr::new(ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, t.loc);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let t = self.peek();
        if t.kind == TokenKind::Op {
            let op = match t.lexeme.as_str() {
                "-" => Some(UnaryOp::Neg),
                "+" => Some(UnaryOp::Plus),
                "!" => Some(UnaryOp::Not),
                "~" => Some(UnaryOp::BitNot),
                "++" => Some(UnaryOp::PreInc),
                "--" => Some(UnaryOp::PreDec),
                _ => None,
            };
            if let Some(op) = op {
                self.bump();
                let expr = self.unary()?;
                return Ok(Expr::new(ExprKind::Unary { op, expr: Box::new(expr) }, t.loc));
            }
        }
        if self.check("(") && self.is_type_name(self.peek_at(1)) && self.peek_at(2).is(TokenKind::Punct, ")") {
            self.bump();
            let ty = self.type_name()?;
            self.expect(")")?;
            let expr = self.unary()?;
            return Ok(Expr::new(ExprKind::Cast { ty, expr: Box::new(expr) }, t.loc));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            let t = self.peek();
            if self.eat(".") {
                let name = self.ident()?;
                e = Expr::new(ExprKind::Member { base: Box::new(e), name: name.lexeme.clone() }, t.loc);
            } else if self.eat("[") {
                let index = self.expr()?;
                self.expect("]")?;
                e = Expr::new(ExprKind::Index { base: Box::new(e), index: Box::new(index) }, t.loc);
            } else if t.is(TokenKind::Op, "++") || t.is(TokenKind::Op, "--") {
                self.bump();
                let op = if t.lexeme == "++" { UnaryOp::PostInc } else { UnaryOp::PostDec };
                e = Expr::new(ExprKind::Unary { op, expr: Box::new(e) }, t.loc);
            } else {
                return Ok(e);
            }
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let t = self.peek();
        let kind = match t.kind {
            TokenKind::IntLit => {
                self.bump();
                let v = t.lexeme.parse::<i64>().map_err(|_| {
                    Diagnostic::error(Code::BadNumber, t.loc, format!("integer literal `{}` out of range", t.lexeme))
                })?;
                ExprKind::IntLit(v)
            }
            TokenKind::FloatLit => {
                self.bump();
                let (digits, suffix) = match t.lexeme.chars().last() {
                    Some('f' | 'F') => (&t.lexeme[..t.lexeme.len() - 1], FloatSuffix::F),
                    Some('h' | 'H') => (&t.lexeme[..t.lexeme.len() - 1], FloatSuffix::H),
                    Some('x' | 'X') => (&t.lexeme[..t.lexeme.len() - 1], FloatSuffix::X),
                    _ => (t.lexeme.as_str(), FloatSuffix::None),
                };
                let v = digits.parse::<f64>().map_err(|_| {
                    Diagnostic::error(Code::BadNumber, t.loc, format!("malformed float literal `{}`", t.lexeme))
                })?;
                ExprKind::FloatLit(v, suffix)
            }
            TokenKind::Keyword if t.lexeme == "true" || t.lexeme == "false" => {
                self.bump();
                ExprKind::BoolLit(t.lexeme == "true")
            }
            TokenKind::Ident => {
                self.bump();
                if self.eat("(") {
                    let mut args = Vec::new();
                    if !self.check(")") {
                        loop {
                            args.push(self.assign()?);
                            if !self.eat(",") {
                                break;
                            }
                        }
                    }
                    self.expect(")")?;
                    ExprKind::Call { callee: t.lexeme.clone(), args }
                } else {
                    ExprKind::Ident(t.lexeme.clone())
                }
            }
            TokenKind::Punct if t.lexeme == "(" => {
                self.bump();
                let e = self.expr()?;
                self.expect(")")?;
                return Ok(e);
            }
            _ => return Err(unexpected(t, &["expression"])),
        };
        Ok(Expr::new(kind, t.loc))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{lexer::tokenize, preprocess::SourceUnit};

    fn parse_src(s: &str) -> Result<SyntaxTree> {
        parse(&tokenize(&SourceUnit::new("t", s))?)
    }

    #[test]
    fn simple_transform_shape() {
        let tree = parse_src(crate::corpus::SIMPLE_TRANSFORM).unwrap();
        let Decl::Function(f) = &tree.decls[0] else { panic!() };
        assert_eq!(f.name, "simpleTransform");
        assert_eq!(f.params.len(), 10);
        assert_eq!(f.params.iter().filter(|p| p.qualifier == ParamQualifier::Out).count(), 4);
        assert_eq!(f.params.iter().filter(|p| p.qualifier == ParamQualifier::Uniform).count(), 2);
        assert_eq!(f.params[0].semantic.as_deref(), Some("POSITION"));
        assert_eq!(f.body.as_ref().unwrap().stmts.len(), 4);
    }

    #[test]
    fn return_semantic_is_captured() {
        let tree = parse_src(crate::corpus::BRIGHT_LIGHT_MAP_DECAL).unwrap();
        let Decl::Function(f) = &tree.decls[0] else { panic!() };
        assert_eq!(f.return_semantic.as_deref(), Some("COLOR"));
        assert_eq!(f.params.len(), 5);
    }

    #[test]
    fn constructor_initializer() {
        let tree = parse_src("void f() { float4 vec1 = float4(4.0, -2.0, 5.0, 3.0); }").unwrap();
        let Decl::Function(f) = &tree.decls[0] else { panic!() };
        let StmtKind::Decl(d) = &f.body.as_ref().unwrap().stmts[0].kind else { panic!() };
        assert_eq!(d.ty.name, "float4");
        let Some(Expr { kind: ExprKind::Call { callee, args }, .. }) = &d.vars[0].init else { panic!() };
        assert_eq!(callee, "float4");
        assert_eq!(args.len(), 4);
    }

    #[test]
    fn switch_is_reserved() {
        let e = parse_src("void f(int x) { switch (x) { } }").unwrap_err();
        assert_eq!(e.codes(), vec![Code::Reserved]);
    }

    #[test]
    fn reserved_words_never_produce_generic_errors() {
        for word in crate::frontend::lexer::RESERVED {
            let src = format!("void f() {{ {word} x; }}");
            let e = parse_src(&src).unwrap_err();
            assert!(e.codes().iter().all(|c| *c == Code::Reserved), "{word}: {e}");
            let src = format!("{word} int g;");
            let e = parse_src(&src).unwrap_err();
            assert!(e.has_code(Code::Reserved), "{word}: {e}");
        }
    }

    #[test]
    fn precedence_is_c_like() {
        let tree = parse_src("void f() { a = b + c * d.x; }").unwrap();
        let Decl::Function(f) = &tree.decls[0] else { panic!() };
        let StmtKind::Expr(e) = &f.body.as_ref().unwrap().stmts[0].kind else { panic!() };
        let ExprKind::Assign { rhs, .. } = &e.kind else { panic!() };
        let ExprKind::Binary { op: BinaryOp::Add, rhs: mul, .. } = &rhs.kind else { panic!() };
        let ExprKind::Binary { op: BinaryOp::Mul, rhs: member, .. } = &mul.kind else { panic!() };
        assert!(matches!(member.kind, ExprKind::Member { .. }));
    }

    #[test]
    fn control_flow_forms() {
        let src = "void f() { for (int i = 0; i < 4; i++) { if (i == 2) break; else continue; } \
                   while (true) { } do { } while (false); discard; return; }";
        let tree = parse_src(src).unwrap();
        let Decl::Function(f) = &tree.decls[0] else { panic!() };
        assert_eq!(f.body.as_ref().unwrap().stmts.len(), 5);
    }

    #[test]
    fn casts_and_compound_assign() {
        let tree = parse_src("void f() { x += (float)i; y = -(float4)z; }").unwrap();
        let Decl::Function(f) = &tree.decls[0] else { panic!() };
        assert_eq!(f.body.as_ref().unwrap().stmts.len(), 2);
    }

    #[test]
    fn records_and_globals() {
        let src = "struct Light { float3 pos; float4 color : COLOR; }; uniform Light l; float g = 1.0, h;";
        let tree = parse_src(src).unwrap();
        assert_eq!(tree.decls.len(), 3);
        let Decl::Global(g) = &tree.decls[2] else { panic!() };
        assert_eq!(g.vars.len(), 2);
    }

    #[test]
    fn syntax_error_has_expected_set_and_recovers() {
        let e = parse_src("void f() { a = ; b = 1 }").unwrap_err();
        assert_eq!(e.0.len(), 2);
        assert!(e.0.iter().all(|d| d.code == Code::Syntax));
        assert!(e.0[1].message.contains("`;`"), "{}", e.0[1].message);
    }

    #[test]
    fn missing_eof_marker() {
        assert!(parse(&[]).is_err());
    }
}
