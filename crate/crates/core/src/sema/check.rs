//! The type checker: syntax tree in, typed tree out.

use std::collections::HashMap;
use std::sync::Arc;

use super::overload::{
    arithmetic_candidates, assignable, comparison_candidates, conversion_cost, resolve_overload, select_candidates,
    FunctionSignature, Origin, ParamSig, Qualifier, ResolveError,
};
use super::recursion::{detect_recursion, CallGraph};
use super::swizzle::{swizzle_type, validate_write_mask, Swizzle};
use super::*;
use crate::diag::{Code, Diagnostic, Diagnostics, Loc};
use crate::frontend::ast;
use crate::stdlib;
use crate::types::{builtin_type, Base, RecordField, RecordType, Type};
use crate::value::{finish, ArithOp, CmpOp, Value};

type CResult<T> = Result<T, Diagnostic>;

fn err<T>(code: Code, loc: Loc, msg: impl Into<String>) -> CResult<T> {
    Err(Diagnostic::error(code, loc, msg))
}

/// Type-check `tree` with `entry` as the entry function.
pub fn check(tree: &ast::SyntaxTree, entry: &str) -> crate::diag::Result<TypedTree> {
    let mut c = Checker::default();
    c.declare_all(tree);
    c.check_bodies(tree);
    c.finish(entry)
}

#[derive(Default)]
struct Scope {
    vars: HashMap<String, VarId>,
}

#[derive(Default)]
struct FnCtx {
    locals: Vec<LocalVar>,
    /// Qualifier of each parameter (by VarId); `None` for plain locals.
    param_quals: Vec<Qualifier>,
    scopes: Vec<Scope>,
    ret: Type,
    loop_depth: u32,
    has_discard: bool,
    callees: Vec<FuncId>,
    global_init: bool,
}

#[derive(Default)]
struct Checker {
    records: HashMap<String, Arc<RecordType>>,
    record_list: Vec<Arc<RecordType>>,
    globals: Vec<Global>,
    global_names: HashMap<String, GlobalId>,
    functions: Vec<Function>,
    /// Which functions have a body (prototypes are merged into definitions).
    defined: Vec<bool>,
    fn_names: HashMap<String, Vec<FuncId>>,
    diags: Vec<Diagnostic>,
    ctx: FnCtx,
}

impl Checker {
    fn report(&mut self, d: Diagnostic) {
        self.diags.push(d);
    }

    // ---- declarations -------------------------------------------------

    fn resolve_type(&self, name: &ast::TypeName, dims: &[u32]) -> CResult<Type> {
        let mut ty = if let Some(t) = builtin_type(&name.name) {
            t
        } else if let Some(r) = self.records.get(&name.name) {
            Type::Record(r.clone())
        } else if crate::frontend::lexer::is_reserved(&name.name) {
            return err(Code::Reserved, name.loc, format!("`{}` is reserved", name.name));
        } else {
            return err(Code::Undeclared, name.loc, format!("unknown type `{}`", name.name));
        };
        for &n in dims.iter().rev() {
            if n == 0 {
                return err(Code::TypeMismatch, name.loc, "array extent must be positive");
            }
            ty = Type::Array(Box::new(ty), n);
        }
        Ok(ty)
    }

    fn declare_all(&mut self, tree: &ast::SyntaxTree) {
        for decl in &tree.decls {
            let r = match decl {
                ast::Decl::Record(r) => self.declare_record(r),
                ast::Decl::Function(f) => self.declare_function(f),
                ast::Decl::Global(g) => self.declare_global(g),
            };
            if let Err(d) = r {
                self.report(d);
            }
        }
    }

    fn declare_record(&mut self, r: &ast::RecordDecl) -> CResult<()> {
        if self.records.contains_key(&r.name) || builtin_type(&r.name).is_some() {
            return err(Code::Redefinition, r.loc, format!("type `{}` is already defined", r.name));
        }
        let mut fields: Vec<RecordField> = Vec::new();
        for f in &r.fields {
            if fields.iter().any(|g| g.name == f.name) {
                return err(Code::Redefinition, f.loc, format!("field `{}` declared twice", f.name));
            }
            let ty = self.resolve_type(&f.ty, &f.dims)?;
            if ty == Type::Void {
                return err(Code::TypeMismatch, f.loc, "field of type void");
            }
            fields.push(RecordField { name: f.name.clone(), ty, semantic: f.semantic.clone() });
        }
        let rec = Arc::new(RecordType { name: r.name.clone(), fields });
        self.records.insert(r.name.clone(), rec.clone());
        self.record_list.push(rec);
        Ok(())
    }

    fn declare_function(&mut self, f: &ast::FunctionDecl) -> CResult<()> {
        let ret = self.resolve_type(&f.return_ty, &[])?;
        let mut params = Vec::new();
        for (i, p) in f.params.iter().enumerate() {
            let ty = self.resolve_type(&p.ty, &p.dims)?;
            if ty == Type::Void {
                return err(Code::TypeMismatch, p.loc, format!("parameter `{}` has type void", p.name));
            }
            if params.iter().any(|q: &Param| q.name == p.name) {
                return err(Code::Redefinition, p.loc, format!("parameter `{}` declared twice", p.name));
            }
            let qualifier = match p.qualifier {
                ast::ParamQualifier::None | ast::ParamQualifier::In => Qualifier::None,
                ast::ParamQualifier::Uniform => Qualifier::Uniform,
                ast::ParamQualifier::Out => Qualifier::Out,
                ast::ParamQualifier::InOut => Qualifier::InOut,
            };
            if ty.contains_sampler() && qualifier.writes_back() {
                return err(Code::Qualifier, p.loc, "sampler parameters cannot be `out` or `inout`");
            }
            params.push(Param { name: p.name.clone(), ty, qualifier, semantic: p.semantic.clone(), var: i, loc: p.loc });
        }
        let sig = FunctionSignature {
            name: f.name.clone(),
            params: params.iter().map(|p| ParamSig { ty: p.ty.clone(), qualifier: p.qualifier }).collect(),
            ret: ret.clone(),
            origin: Origin::User,
        };
        if builtin_type(&f.name).is_some() || self.records.contains_key(&f.name) {
            return err(Code::Redefinition, f.loc, format!("`{}` names a type", f.name));
        }
        // A prototype followed by its definition (or vice versa) is one function.
        let existing = self.fn_names.get(&f.name).and_then(|ids| {
            ids.iter().copied().find(|&id| self.functions[id].sig.param_types() == sig.param_types())
        });
        if let Some(id) = existing {
            if self.functions[id].sig != sig {
                return err(Code::Redefinition, f.loc, format!("`{}` redeclared with a different signature", f.name));
            }
            if f.body.is_some() {
                if self.defined[id] {
                    return err(Code::Redefinition, f.loc, format!("function `{}` is defined twice", f.name));
                }
                self.defined[id] = true;
                let func = &mut self.functions[id];
                func.params = params;
                func.return_semantic = f.return_semantic.clone();
                func.loc = f.loc;
            }
            return Ok(());
        }
        let id = self.functions.len();
        self.functions.push(Function {
            name: f.name.clone(),
            sig,
            params,
            ret,
            return_semantic: f.return_semantic.clone(),
            locals: Vec::new(),
            body: Vec::new(),
            callees: Vec::new(),
            has_discard: false,
            loc: f.loc,
        });
        self.defined.push(f.body.is_some());
        self.fn_names.entry(f.name.clone()).or_default().push(id);
        Ok(())
    }

    fn declare_global(&mut self, g: &ast::DeclStmt) -> CResult<()> {
        for v in &g.vars {
            let ty = self.resolve_type(&g.ty, &v.dims)?;
            if ty == Type::Void {
                return err(Code::TypeMismatch, v.loc, format!("global `{}` has type void", v.name));
            }
            if self.global_names.contains_key(&v.name) {
                return err(Code::Redefinition, v.loc, format!("global `{}` declared twice", v.name));
            }
            let init = match &v.init {
                Some(e) if g.uniform => {
                    return err(Code::Qualifier, e.loc, "uniform globals take their value from the application")
                }
                Some(e) => {
                    self.ctx = FnCtx { global_init: true, ..FnCtx::default() };
                    let checked = self.expr(e)?;
                    Some(self.coerce(checked, &ty, e.loc)?)
                }
                None if g.is_const => return err(Code::TypeMismatch, v.loc, "const global needs an initializer"),
                None => None,
            };
            self.global_names.insert(v.name.clone(), self.globals.len());
            self.globals.push(Global { name: v.name.clone(), ty, init, semantic: v.semantic.clone(), loc: v.loc });
        }
        Ok(())
    }

    // ---- bodies -------------------------------------------------------

    fn check_bodies(&mut self, tree: &ast::SyntaxTree) {
        for decl in &tree.decls {
            let ast::Decl::Function(f) = decl else { continue };
            let Some(body) = &f.body else { continue };
            let Some(id) = self.find_declared(f) else { continue };
            let func = &self.functions[id];
            let mut ctx = FnCtx { ret: func.ret.clone(), scopes: vec![Scope::default()], ..FnCtx::default() };
            for p in &func.params {
                ctx.scopes[0].vars.insert(p.name.clone(), ctx.locals.len());
                ctx.locals.push(LocalVar { name: p.name.clone(), ty: p.ty.clone(), is_const: false, loc: p.loc });
                ctx.param_quals.push(p.qualifier);
            }
            self.ctx = ctx;
            let errors_before = self.diags.len();
            let stmts = self.block(&body.stmts);
            let ctx = std::mem::take(&mut self.ctx);
            let func = &mut self.functions[id];
            func.body = stmts;
            func.locals = ctx.locals;
            func.callees = ctx.callees;
            func.has_discard = ctx.has_discard;
            // Flow facts about a body with dropped statements would be noise.
            if self.diags.len() > errors_before {
                continue;
            }
            if func.ret != Type::Void && flow::falls_through(&func.body) {
                let msg = format!("function `{}` can reach its end without returning a value", func.name);
                self.report(Diagnostic::error(Code::BadControl, f.loc, msg));
            }
            let func = self.functions[id].clone();
            for d in flow::check_out_params(&func) {
                self.report(d);
            }
        }
    }

    fn find_declared(&self, f: &ast::FunctionDecl) -> Option<FuncId> {
        let ids = self.fn_names.get(&f.name)?;
        ids.iter().copied().find(|&id| {
            let func = &self.functions[id];
            func.params.len() == f.params.len()
                && func.params.iter().zip(&f.params).all(|(p, q)| self.resolve_type(&q.ty, &q.dims).ok().as_ref() == Some(&p.ty))
        })
    }

    fn finish(mut self, entry: &str) -> crate::diag::Result<TypedTree> {
        // Calls to prototypes that never receive a body.
        for (id, f) in self.functions.iter().enumerate() {
            if !self.defined[id] {
                let called = self.functions.iter().any(|g| g.callees.contains(&id));
                if called || f.name == entry {
                    self.diags.push(Diagnostic::error(
                        Code::Undeclared,
                        f.loc,
                        format!("function `{}` is declared but never defined", f.name),
                    ));
                }
            }
        }
        let mut graph = CallGraph::new(self.functions.iter().map(|f| f.name.clone()).collect());
        for (i, f) in self.functions.iter().enumerate() {
            for &c in &f.callees {
                graph.add_call(i, c);
            }
        }
        if let Err(cycle) = detect_recursion(&graph) {
            let names: Vec<&str> = cycle.iter().map(|&i| graph.names[i].as_str()).collect();
            let mut path = names.join(" -> ");
            path.push_str(" -> ");
            path.push_str(names[0]);
            self.diags.push(Diagnostic::error(
                Code::Recursion,
                self.functions[cycle[0]].loc,
                format!("recursive call cycle: {path}"),
            ));
        }
        let entry_id = match self.fn_names.get(entry).map(|v| v.as_slice()) {
            Some([id]) => Some(*id),
            Some(_) => {
                self.diags.push(Diagnostic::error(Code::Ambiguous, Loc::default(), format!("entry `{entry}` is overloaded")));
                None
            }
            None => {
                self.diags.push(Diagnostic::error(Code::NoEntry, Loc::default(), format!("no function named `{entry}`")));
                None
            }
        };
        if let Some(id) = entry_id {
            let f = &self.functions[id];
            for p in &f.params {
                if !p.is_uniform() && matches!(p.ty, Type::Record(_) | Type::Array(..)) {
                    self.diags.push(Diagnostic::error(
                        Code::Unsupported,
                        p.loc,
                        format!("entry parameter `{}` of type {} is not supported", p.name, p.ty),
                    ));
                }
            }
            if matches!(f.ret, Type::Record(_) | Type::Array(..) | Type::Sampler(_)) {
                self.diags.push(Diagnostic::error(Code::Unsupported, f.loc, format!("entry return type {} is not supported", f.ret)));
            }
        }
        if !self.diags.is_empty() {
            self.diags.sort_by_key(|d| d.loc);
            return Err(Diagnostics(self.diags));
        }
        let entry = entry_id.unwrap();
        let mut tree = TypedTree {
            functions: self.functions,
            globals: self.globals,
            records: self.record_list,
            entry,
            uses_discard: false,
        };
        let reach = tree.reachable();
        tree.uses_discard = tree.functions.iter().enumerate().any(|(i, f)| reach[i] && f.has_discard);
        Ok(tree)
    }

    // ---- statements ---------------------------------------------------

    fn block(&mut self, stmts: &[ast::Stmt]) -> Vec<Stmt> {
        self.ctx.scopes.push(Scope::default());
        let mut out = Vec::new();
        for s in stmts {
            match self.stmt(s) {
                Ok(mut list) => out.append(&mut list),
                Err(d) => self.report(d),
            }
        }
        self.ctx.scopes.pop();
        out
    }

    /// A sub-statement in its own scope, as a statement list.
    fn body(&mut self, s: &ast::Stmt) -> Vec<Stmt> {
        match &s.kind {
            ast::StmtKind::Block(b) => self.block(&b.stmts),
            _ => self.block(std::slice::from_ref(s)),
        }
    }

    fn condition(&mut self, e: &ast::Expr) -> CResult<Expr> {
        let c = self.expr(e)?;
        if c.ty != Type::BOOL {
            return err(Code::TypeMismatch, e.loc, format!("condition must be bool, found {}", c.ty));
        }
        Ok(c)
    }

    fn stmt(&mut self, s: &ast::Stmt) -> CResult<Vec<Stmt>> {
        let loc = s.loc;
        let one = |kind| Ok(vec![Stmt { kind, loc }]);
        match &s.kind {
            ast::StmtKind::Decl(d) => self.local_decl(d),
            ast::StmtKind::Expr(e) => one(StmtKind::Expr(self.expr(e)?)),
            ast::StmtKind::If { cond, then, otherwise } => {
                let cond = self.condition(cond)?;
                let then = self.body(then);
                let otherwise = otherwise.as_ref().map(|o| self.body(o)).unwrap_or_default();
                one(StmtKind::If { cond, then, otherwise })
            }
            ast::StmtKind::For { init, cond, step, body } => {
                self.ctx.scopes.push(Scope::default());
                let r = (|| {
                    let init = match init {
                        Some(i) => self.stmt(i)?,
                        None => Vec::new(),
                    };
                    let cond = cond.as_ref().map(|c| self.condition(c)).transpose()?;
                    let step = step.as_ref().map(|e| self.expr(e)).transpose()?;
                    self.ctx.loop_depth += 1;
                    let body = self.body(body);
                    self.ctx.loop_depth -= 1;
                    Ok(StmtKind::Loop { init, cond, step, body, test_first: true })
                })();
                self.ctx.scopes.pop();
                one(r?)
            }
            ast::StmtKind::While { cond, body } => {
                let cond = self.condition(cond)?;
                self.ctx.loop_depth += 1;
                let body = self.body(body);
                self.ctx.loop_depth -= 1;
                one(StmtKind::Loop { init: Vec::new(), cond: Some(cond), step: None, body, test_first: true })
            }
            ast::StmtKind::DoWhile { body, cond } => {
                self.ctx.loop_depth += 1;
                let body = self.body(body);
                self.ctx.loop_depth -= 1;
                let cond = self.condition(cond)?;
                one(StmtKind::Loop { init: Vec::new(), cond: Some(cond), step: None, body, test_first: false })
            }
            ast::StmtKind::Break | ast::StmtKind::Continue => {
                if self.ctx.loop_depth == 0 {
                    let word = if matches!(s.kind, ast::StmtKind::Break) { "break" } else { "continue" };
                    return err(Code::BadControl, loc, format!("`{word}` outside of a loop"));
                }
                one(if matches!(s.kind, ast::StmtKind::Break) { StmtKind::Break } else { StmtKind::Continue })
            }
            ast::StmtKind::Return(value) => {
                let ret = self.ctx.ret.clone();
                match (value, &ret) {
                    (None, Type::Void) => one(StmtKind::Return(None)),
                    (None, _) => err(Code::TypeMismatch, loc, format!("function must return a value of type {ret}")),
                    (Some(e), Type::Void) => err(Code::TypeMismatch, e.loc, "void function cannot return a value"),
                    (Some(e), _) => {
                        let v = self.expr(e)?;
                        let v = self.coerce(v, &ret, e.loc)?;
                        one(StmtKind::Return(Some(v)))
                    }
                }
            }
            ast::StmtKind::Discard => {
                self.ctx.has_discard = true;
                one(StmtKind::Discard)
            }
            ast::StmtKind::Block(b) => one(StmtKind::Block(self.block(&b.stmts))),
            ast::StmtKind::Empty => Ok(Vec::new()),
        }
    }

    fn local_decl(&mut self, d: &ast::DeclStmt) -> CResult<Vec<Stmt>> {
        if d.uniform {
            return err(Code::Qualifier, d.loc, "local variables cannot be uniform");
        }
        let mut out = Vec::new();
        for v in &d.vars {
            let ty = self.resolve_type(&d.ty, &v.dims)?;
            if ty == Type::Void {
                return err(Code::TypeMismatch, v.loc, format!("variable `{}` has type void", v.name));
            }
            if self.ctx.scopes.last().unwrap().vars.contains_key(&v.name) {
                return err(Code::Redefinition, v.loc, format!("`{}` is already declared in this scope", v.name));
            }
            // The initializer cannot see the variable it initializes.
            let init = match &v.init {
                Some(e) => {
                    let x = self.expr(e)?;
                    Some(self.coerce(x, &ty, e.loc)?)
                }
                None if d.is_const => return err(Code::TypeMismatch, v.loc, "const variable needs an initializer"),
                None => None,
            };
            let var = self.ctx.locals.len();
            self.ctx.locals.push(LocalVar { name: v.name.clone(), ty, is_const: d.is_const, loc: v.loc });
            self.ctx.param_quals.push(Qualifier::None);
            self.ctx.scopes.last_mut().unwrap().vars.insert(v.name.clone(), var);
            out.push(Stmt { kind: StmtKind::Local { var, init }, loc: v.loc });
        }
        Ok(out)
    }

    // ---- conversions --------------------------------------------------

    /// Insert the implicit conversion from `e` to `to` allowed in
    /// assignment contexts.
    fn coerce(&self, e: Expr, to: &Type, loc: Loc) -> CResult<Expr> {
        if &e.ty == to {
            return Ok(e);
        }
        if !assignable(&e.ty, to) {
            return err(Code::TypeMismatch, loc, format!("cannot convert {} to {}", e.ty, to));
        }
        Ok(convert_to(e, to))
    }

    /// Apply the argument conversions of a resolved signature.
    fn coerce_args(&self, args: Vec<Expr>, sig: &FunctionSignature) -> Vec<Expr> {
        args.into_iter().zip(&sig.params).map(|(a, p)| convert_to(a, &p.ty)).collect()
    }

    // ---- expressions --------------------------------------------------

    fn lookup_var(&self, name: &str) -> Option<VarId> {
        self.ctx.scopes.iter().rev().find_map(|s| s.vars.get(name).copied())
    }

    fn expr(&mut self, e: &ast::Expr) -> CResult<Expr> {
        let loc = e.loc;
        match &e.kind {
            ast::ExprKind::IntLit(n) => {
                let v = i32::try_from(*n).map_err(|_| Diagnostic::error(Code::BadNumber, loc, format!("integer literal {n} is out of range")))?;
                Ok(Expr::new(ExprKind::Const(Value::Int(vec![v])), Type::INT, loc))
            }
            ast::ExprKind::FloatLit(x, suffix) => {
                let base = match suffix {
                    ast::FloatSuffix::H => Base::Half,
                    ast::FloatSuffix::X => Base::Fixed,
                    _ => Base::Float,
                };
                let ty = Type::Scalar(base);
                let v = finish(Value::float(*x as f32), &ty);
                Ok(Expr::new(ExprKind::Const(v), ty, loc))
            }
            ast::ExprKind::BoolLit(b) => Ok(Expr::new(ExprKind::Const(Value::Bool(vec![*b])), Type::BOOL, loc)),
            ast::ExprKind::Ident(name) => {
                if let Some(v) = self.lookup_var(name) {
                    let ty = self.ctx.locals[v].ty.clone();
                    return Ok(Expr::new(ExprKind::Local(v), ty, loc));
                }
                if let Some(&g) = self.global_names.get(name) {
                    return Ok(Expr::new(ExprKind::Global(g), self.globals[g].ty.clone(), loc));
                }
                if self.fn_names.contains_key(name) || stdlib::lookup(name).is_some() {
                    return err(Code::Unsupported, loc, format!("function `{name}` used as a value"));
                }
                err(Code::Undeclared, loc, format!("undeclared identifier `{name}`"))
            }
            ast::ExprKind::Call { callee, args } => self.call(callee, args, loc),
            ast::ExprKind::Cast { ty, expr } => {
                let to = self.resolve_type(ty, &[])?;
                let inner = self.expr(expr)?;
                cast(inner, &to, loc)
            }
            ast::ExprKind::Unary { op, expr } => self.unary(*op, expr, loc),
            ast::ExprKind::Binary { op, lhs, rhs } => self.binary(*op, lhs, rhs, loc),
            ast::ExprKind::Assign { op, lhs, rhs } => self.assign(*op, lhs, rhs, loc),
            ast::ExprKind::Cond { cond, then, otherwise } => {
                let c = self.condition(cond)?;
                let a = self.expr(then)?;
                let b = self.expr(otherwise)?;
                let (a, b, ty) = if a.ty == b.ty {
                    let ty = a.ty.clone();
                    (a, b, ty)
                } else {
                    let cands = select_candidates();
                    let sig = resolve_overload("?:", &[a.ty.clone(), b.ty.clone()], &cands)
                        .map_err(|e| operator_error(e, loc))?;
                    let ty = sig.ret.clone();
                    (convert_to(a, &ty), convert_to(b, &ty), ty)
                };
                Ok(Expr::new(ExprKind::Select(Box::new(c), Box::new(a), Box::new(b)), ty, loc))
            }
            ast::ExprKind::Comma { lhs, rhs } => {
                let a = self.expr(lhs)?;
                let b = self.expr(rhs)?;
                let ty = b.ty.clone();
                Ok(Expr::new(ExprKind::Comma(Box::new(a), Box::new(b)), ty, loc))
            }
            ast::ExprKind::Member { base, name } => {
                let b = self.expr(base)?;
                self.member(b, name, loc)
            }
            ast::ExprKind::Index { base, index } => {
                let b = self.expr(base)?;
                let i = self.expr(index)?;
                index_expr(b, i, loc)
            }
        }
    }

    fn member(&self, b: Expr, name: &str, loc: Loc) -> CResult<Expr> {
        match &b.ty {
            Type::Record(r) => match r.field(name) {
                Some((i, f)) => {
                    let ty = f.ty.clone();
                    Ok(Expr::new(ExprKind::Field(Box::new(b), i), ty, loc))
                }
                None => err(Code::Undeclared, loc, format!("`{}` has no field `{name}`", r.name)),
            },
            Type::Matrix(base, rows, cols) => {
                let (r, c) = matrix_element(name, *rows, *cols, loc)?;
                let base = *base;
                Ok(Expr::new(ExprKind::MatElem(Box::new(b), r, c), Type::Scalar(base), loc))
            }
            Type::Scalar(_) | Type::Vector(..) => {
                let (ty, sw) = swizzle_type(&b.ty, name).map_err(|m| Diagnostic::error(Code::Swizzle, loc, m))?;
                // Collapse `(v.s1).s2` into one swizzle of `v`.
                if let ExprKind::Swizzle(inner, comps) = b.kind {
                    let composed = sw.components.iter().map(|&i| comps[i as usize]).collect();
                    return Ok(Expr::new(ExprKind::Swizzle(inner, composed), ty, loc));
                }
                Ok(Expr::new(ExprKind::Swizzle(Box::new(b), sw.components), ty, loc))
            }
            other => err(Code::Swizzle, loc, format!("cannot select `.{name}` from a value of type {other}")),
        }
    }

    fn unary(&mut self, op: ast::UnaryOp, inner: &ast::Expr, loc: Loc) -> CResult<Expr> {
        match op {
            ast::UnaryOp::BitNot => err(Code::Reserved, loc, "bitwise operator `~` is reserved"),
            ast::UnaryOp::Neg | ast::UnaryOp::Plus => {
                let e = self.expr(inner)?;
                if !e.ty.base().is_some_and(|b| b.is_numeric()) {
                    return err(Code::TypeMismatch, loc, format!("operator `{}` needs a numeric operand, found {}", op.symbol(), e.ty));
                }
                if op == ast::UnaryOp::Plus {
                    return Ok(e);
                }
                let ty = e.ty.clone();
                Ok(Expr::new(ExprKind::Unary(UnaryOp::Neg, Box::new(e)), ty, loc))
            }
            ast::UnaryOp::Not => {
                let e = self.expr(inner)?;
                if e.ty.base() != Some(Base::Bool) || matches!(e.ty, Type::Matrix(..)) {
                    return err(Code::TypeMismatch, loc, format!("operator `!` needs a bool operand, found {}", e.ty));
                }
                let ty = e.ty.clone();
                Ok(Expr::new(ExprKind::Unary(UnaryOp::Not, Box::new(e)), ty, loc))
            }
            ast::UnaryOp::PreInc | ast::UnaryOp::PreDec | ast::UnaryOp::PostInc | ast::UnaryOp::PostDec => {
                let target = self.lvalue(inner)?;
                if !target.ty.base().is_some_and(|b| b.is_numeric()) {
                    return err(Code::TypeMismatch, loc, format!("cannot increment a value of type {}", target.ty));
                }
                let ty = target.ty.clone();
                let increment = matches!(op, ast::UnaryOp::PreInc | ast::UnaryOp::PostInc);
                Ok(Expr::new(ExprKind::IncDec { target, increment, post: op.is_postfix() }, ty, loc))
            }
        }
    }

    fn binary(&mut self, op: ast::BinaryOp, lhs: &ast::Expr, rhs: &ast::Expr, loc: Loc) -> CResult<Expr> {
        use ast::BinaryOp as B;
        if op.is_bitwise() {
            return err(Code::Reserved, loc, format!("bitwise operator `{}` is reserved", op.symbol()));
        }
        let a = self.expr(lhs)?;
        let b = self.expr(rhs)?;
        if matches!(op, B::And | B::Or) {
            for x in [&a, &b] {
                if x.ty != Type::BOOL {
                    return err(Code::TypeMismatch, x.loc, format!("operator `{}` needs bool operands, found {}", op.symbol(), x.ty));
                }
            }
            let lop = if op == B::And { LogicalOp::And } else { LogicalOp::Or };
            return Ok(Expr::new(ExprKind::Logical(lop, Box::new(a), Box::new(b)), Type::BOOL, loc));
        }
        let (bop, cands) = match op {
            B::Add => (BinaryOp::Arith(ArithOp::Add), arithmetic_candidates("+")),
            B::Sub => (BinaryOp::Arith(ArithOp::Sub), arithmetic_candidates("-")),
            B::Mul => (BinaryOp::Arith(ArithOp::Mul), arithmetic_candidates("*")),
            B::Div => (BinaryOp::Arith(ArithOp::Div), arithmetic_candidates("/")),
            B::Mod => (BinaryOp::Arith(ArithOp::Mod), arithmetic_candidates("%")),
            B::Lt => (BinaryOp::Cmp(CmpOp::Lt), comparison_candidates("<", false)),
            B::Gt => (BinaryOp::Cmp(CmpOp::Gt), comparison_candidates(">", false)),
            B::Le => (BinaryOp::Cmp(CmpOp::Le), comparison_candidates("<=", false)),
            B::Ge => (BinaryOp::Cmp(CmpOp::Ge), comparison_candidates(">=", false)),
            B::Eq => (BinaryOp::Cmp(CmpOp::Eq), comparison_candidates("==", true)),
            B::Ne => (BinaryOp::Cmp(CmpOp::Ne), comparison_candidates("!=", true)),
            _ => unreachable!("handled above"),
        };
        let sig = resolve_overload(op.symbol(), &[a.ty.clone(), b.ty.clone()], &cands).map_err(|e| operator_error(e, loc))?;
        let ty = sig.ret.clone();
        let mut args = self.coerce_args(vec![a, b], sig).into_iter();
        let (a, b) = (args.next().unwrap(), args.next().unwrap());
        Ok(Expr::new(ExprKind::Binary(bop, Box::new(a), Box::new(b)), ty, loc))
    }

    fn assign(&mut self, op: Option<ast::BinaryOp>, lhs: &ast::Expr, rhs: &ast::Expr, loc: Loc) -> CResult<Expr> {
        let arith = match op {
            None => None,
            Some(o) if o.is_bitwise() => return err(Code::Reserved, loc, format!("bitwise operator `{}=` is reserved", o.symbol())),
            Some(ast::BinaryOp::Add) => Some(ArithOp::Add),
            Some(ast::BinaryOp::Sub) => Some(ArithOp::Sub),
            Some(ast::BinaryOp::Mul) => Some(ArithOp::Mul),
            Some(ast::BinaryOp::Div) => Some(ArithOp::Div),
            Some(ast::BinaryOp::Mod) => Some(ArithOp::Mod),
            Some(o) => return err(Code::Syntax, loc, format!("`{}=` is not an assignment operator", o.symbol())),
        };
        let target = self.lvalue(lhs)?;
        if arith.is_some() && !target.ty.base().is_some_and(|b| b.is_numeric()) {
            return err(Code::TypeMismatch, loc, format!("compound assignment on a value of type {}", target.ty));
        }
        let value = self.expr(rhs)?;
        let value = self.coerce(value, &target.ty, rhs.loc).map_err(|mut d| {
            if let Some(LAccess::Swizzle(c)) = target.path.last() {
                d.code = Code::WriteMask;
                d.message = format!("write mask selects {} components but the value is {}", c.len(), value_ty_name(&d.message));
            }
            d
        })?;
        let ty = target.ty.clone();
        Ok(Expr::new(ExprKind::Assign { target, op: arith, value: Box::new(value) }, ty, loc))
    }

    fn lvalue(&mut self, e: &ast::Expr) -> CResult<LValue> {
        let loc = e.loc;
        match &e.kind {
            ast::ExprKind::Ident(name) => {
                if let Some(v) = self.lookup_var(name) {
                    if self.ctx.param_quals.get(v) == Some(&Qualifier::Uniform) {
                        return err(Code::UniformWrite, loc, format!("cannot assign to uniform parameter `{name}`"));
                    }
                    let local = &self.ctx.locals[v];
                    if local.is_const {
                        return err(Code::NotAssignable, loc, format!("cannot assign to const `{name}`"));
                    }
                    if local.ty.contains_sampler() {
                        return err(Code::NotAssignable, loc, format!("cannot assign to sampler `{name}`"));
                    }
                    return Ok(LValue { var: v, path: Vec::new(), ty: local.ty.clone() });
                }
                if let Some(&g) = self.global_names.get(name) {
                    let code = if self.globals[g].is_uniform() { Code::UniformWrite } else { Code::NotAssignable };
                    return err(code, loc, format!("cannot assign to global `{name}`"));
                }
                err(Code::Undeclared, loc, format!("undeclared identifier `{name}`"))
            }
            ast::ExprKind::Member { base, name } => {
                let mut lv = self.lvalue(base)?;
                if matches!(lv.path.last(), Some(LAccess::Swizzle(_)) | Some(LAccess::MatElem(..))) {
                    let comps = match lv.path.last() {
                        Some(LAccess::Swizzle(c)) => c.clone(),
                        _ => return err(Code::NotAssignable, loc, "cannot select from a matrix element"),
                    };
                    let sw = Swizzle::parse(name).map_err(|m| Diagnostic::error(Code::WriteMask, loc, m))?;
                    validate_write_mask(&lv.ty, &sw).map_err(|m| Diagnostic::error(Code::WriteMask, loc, m))?;
                    let composed: Vec<u8> = sw.components.iter().map(|&i| comps[i as usize]).collect();
                    lv.ty = vec_type(lv.ty.base().unwrap(), composed.len());
                    *lv.path.last_mut().unwrap() = LAccess::Swizzle(composed);
                    return Ok(lv);
                }
                match lv.ty.clone() {
                    Type::Record(r) => {
                        let (i, f) = r.field(name).ok_or_else(|| {
                            Diagnostic::error(Code::Undeclared, loc, format!("`{}` has no field `{name}`", r.name))
                        })?;
                        lv.ty = f.ty.clone();
                        lv.path.push(LAccess::Field(i));
                    }
                    Type::Matrix(base, rows, cols) => {
                        let (r, c) = matrix_element(name, rows, cols, loc)?;
                        lv.ty = Type::Scalar(base);
                        lv.path.push(LAccess::MatElem(r, c));
                    }
                    t @ (Type::Scalar(_) | Type::Vector(..)) => {
                        let sw = Swizzle::parse(name).map_err(|m| Diagnostic::error(Code::WriteMask, loc, m))?;
                        let comps = validate_write_mask(&t, &sw).map_err(|m| Diagnostic::error(Code::WriteMask, loc, m))?;
                        lv.ty = vec_type(t.base().unwrap(), comps.len());
                        lv.path.push(LAccess::Swizzle(comps));
                    }
                    other => return err(Code::Swizzle, loc, format!("cannot select `.{name}` from a value of type {other}")),
                }
                Ok(lv)
            }
            ast::ExprKind::Index { base, index } => {
                let mut lv = self.lvalue(base)?;
                if matches!(lv.path.last(), Some(LAccess::Swizzle(_)) | Some(LAccess::MatElem(..))) {
                    return err(Code::NotAssignable, loc, "cannot index a write-masked value");
                }
                let i = self.expr(index)?;
                let probe = Expr::new(ExprKind::Const(Value::zero(&lv.ty)), lv.ty.clone(), loc);
                let typed = index_expr(probe, i, loc)?;
                let ExprKind::Index(_, i) = typed.kind else { unreachable!() };
                lv.ty = typed.ty;
                lv.path.push(LAccess::Index(i));
                Ok(lv)
            }
            _ => err(Code::NotAssignable, loc, "expression is not assignable"),
        }
    }

    fn call(&mut self, callee: &str, args: &[ast::Expr], loc: Loc) -> CResult<Expr> {
        if let Some(ty) = builtin_type(callee) {
            let checked = args.iter().map(|a| self.expr(a)).collect::<CResult<Vec<_>>>()?;
            return construct(ty, checked, loc);
        }
        if self.records.contains_key(callee) {
            return err(Code::Unsupported, loc, format!("record constructor `{callee}(...)` is not supported"));
        }
        let arg_exprs = args.iter().map(|a| self.expr(a)).collect::<CResult<Vec<_>>>()?;
        let arg_types: Vec<Type> = arg_exprs.iter().map(|a| a.ty.clone()).collect();
        if let Some(ids) = self.fn_names.get(callee).cloned() {
            if self.ctx.global_init {
                return err(Code::Unsupported, loc, "global initializers cannot call user functions");
            }
            let cands: Vec<FunctionSignature> = ids.iter().map(|&i| self.functions[i].sig.clone()).collect();
            let sig = resolve_overload(callee, &arg_types, &cands).map_err(|e| call_error(e, loc))?;
            let id = ids[cands.iter().position(|c| c == sig).unwrap()];
            let sig = sig.clone();
            let mut out = Vec::new();
            for ((e, ast_arg), p) in arg_exprs.into_iter().zip(args).zip(&sig.params) {
                out.push(match p.qualifier {
                    Qualifier::Out => CallArg::Out(self.lvalue(ast_arg)?),
                    Qualifier::InOut => CallArg::InOut(self.lvalue(ast_arg)?),
                    _ => CallArg::In(convert_to(e, &p.ty)),
                });
            }
            if !self.ctx.callees.contains(&id) {
                self.ctx.callees.push(id);
            }
            return Ok(Expr::new(ExprKind::Call { callee: Callee::User(id), args: out }, sig.ret.clone(), loc));
        }
        let Some(desc) = stdlib::lookup(callee) else {
            if crate::frontend::lexer::is_reserved(callee) {
                return err(Code::Reserved, loc, format!("`{callee}` is reserved"));
            }
            return err(Code::Undeclared, loc, format!("undeclared function `{callee}`"));
        };
        let cands: Vec<FunctionSignature> = desc.overloads.iter().map(|o| o.sig.clone()).collect();
        let sig = resolve_overload(callee, &arg_types, &cands).map_err(|e| call_error(e, loc))?.clone();
        let op = stdlib::op_of(&sig).expect("catalogue signature");
        let args = self.coerce_args(arg_exprs, &sig).into_iter().map(CallArg::In).collect();
        let ret = sig.ret.clone();
        Ok(Expr::new(ExprKind::Call { callee: Callee::Builtin { sig, op }, args }, ret, loc))
    }
}

fn value_ty_name(msg: &str) -> String {
    // "cannot convert X to Y" -> "X"
    msg.strip_prefix("cannot convert ").and_then(|r| r.split(" to ").next()).unwrap_or("incompatible").to_string()
}

fn vec_type(base: Base, n: usize) -> Type {
    if n == 1 {
        Type::Scalar(base)
    } else {
        Type::Vector(base, n as u8)
    }
}

fn operator_error(e: ResolveError, loc: Loc) -> Diagnostic {
    match e {
        ResolveError::NoViable { name, args } => {
            let list: Vec<String> = args.iter().map(|t| t.to_string()).collect();
            Diagnostic::error(Code::TypeMismatch, loc, format!("operator `{name}` cannot combine {}", list.join(" and ")))
        }
        amb @ ResolveError::Ambiguous { .. } => Diagnostic::error(Code::Ambiguous, loc, amb.to_string()),
    }
}

fn call_error(e: ResolveError, loc: Loc) -> Diagnostic {
    match e {
        ResolveError::NoViable { .. } => Diagnostic::error(Code::NoOverload, loc, e.to_string()),
        ResolveError::Ambiguous { .. } => Diagnostic::error(Code::Ambiguous, loc, e.to_string()),
    }
}

/// Wrap `e` in the Convert/Smear nodes taking it to `to`. The caller has
/// already established that the conversion is legal.
pub(super) fn convert_to(e: Expr, to: &Type) -> Expr {
    if &e.ty == to {
        return e;
    }
    let loc = e.loc;
    let (Some(tb), Some(_)) = (to.base(), e.ty.base()) else { return e };
    if e.ty.same_shape(to) {
        return Expr::new(ExprKind::Convert(Box::new(e)), to.clone(), loc);
    }
    // Scalar to vector/matrix: convert the base first, then smear.
    let scalar = Type::Scalar(tb);
    let e = if e.ty != scalar { Expr::new(ExprKind::Convert(Box::new(e)), scalar, loc) } else { e };
    Expr::new(ExprKind::Smear(Box::new(e)), to.clone(), loc)
}

/// Explicit base change keeping the shape (constructors and casts).
fn with_base(e: Expr, base: Base) -> Expr {
    if e.ty.base() == Some(base) {
        return e;
    }
    let ty = e.ty.with_base(base);
    let loc = e.loc;
    Expr::new(ExprKind::Convert(Box::new(e)), ty, loc)
}

fn construct(ty: Type, args: Vec<Expr>, loc: Loc) -> CResult<Expr> {
    let Some(base) = ty.base() else {
        return err(Code::Unsupported, loc, format!("no constructor for type {ty}"));
    };
    for a in &args {
        if a.ty.base().is_none() {
            return err(Code::TypeMismatch, a.loc, format!("constructor argument of type {} is not numeric", a.ty));
        }
    }
    let n = ty.component_count();
    if let [single] = args.as_slice() {
        if single.ty.is_scalar_like() && n > 1 {
            let s = with_base(args.into_iter().next().unwrap(), base);
            let s = if s.ty.is_scalar() { s } else { Expr::new(ExprKind::Convert(Box::new(s)), Type::Scalar(base), loc) };
            return Ok(Expr::new(ExprKind::Smear(Box::new(s)), ty, loc));
        }
    }
    let total: usize = args.iter().map(|a| a.ty.component_count()).sum();
    if total != n {
        return err(Code::TypeMismatch, loc, format!("constructor {ty} needs {n} components, got {total}"));
    }
    let args = args.into_iter().map(|a| with_base(a, base)).collect();
    Ok(Expr::new(ExprKind::Construct(args), ty, loc))
}

fn cast(e: Expr, to: &Type, loc: Loc) -> CResult<Expr> {
    if &e.ty == to {
        return Ok(e);
    }
    let (Some(tb), Some(_)) = (to.base(), e.ty.base()) else {
        return err(Code::TypeMismatch, loc, format!("cannot cast {} to {}", e.ty, to));
    };
    if e.ty.same_shape(to) {
        let c = with_base(e, tb);
        return Ok(if &c.ty == to { c } else { Expr::new(ExprKind::Convert(Box::new(c)), to.clone(), loc) });
    }
    if e.ty.is_scalar_like() {
        let s = with_base(e, tb);
        let s = if s.ty.is_scalar() { s } else { Expr::new(ExprKind::Convert(Box::new(s)), Type::Scalar(tb), loc) };
        return Ok(Expr::new(ExprKind::Smear(Box::new(s)), to.clone(), loc));
    }
    // Truncating vector casts: (float3) v4, (float) v4.
    if let (Some(from_n), Some(to_n)) = (e.ty.vector_len(), to.vector_len()) {
        if to_n < from_n {
            let sty = vec_type(e.ty.base().unwrap(), to_n as usize);
            let sw = Expr::new(ExprKind::Swizzle(Box::new(e), (0..to_n).collect()), sty, loc);
            let c = with_base(sw, tb);
            return Ok(if &c.ty == to { c } else { Expr::new(ExprKind::Convert(Box::new(c)), to.clone(), loc) });
        }
    }
    err(Code::TypeMismatch, loc, format!("cannot cast {} to {}", e.ty, to))
}

fn index_expr(b: Expr, i: Expr, loc: Loc) -> CResult<Expr> {
    let i = if i.ty == Type::INT || conversion_cost(&i.ty, &Type::INT) == Some(0) {
        convert_to(i, &Type::INT)
    } else {
        return err(Code::TypeMismatch, i.loc, format!("index must be int, found {}", i.ty));
    };
    let (elem, extent) = match &b.ty {
        Type::Array(e, n) => ((**e).clone(), *n as usize),
        Type::Vector(base, n) => (Type::Scalar(*base), *n as usize),
        Type::Matrix(base, r, c) => (vec_type(*base, *c as usize), *r as usize),
        other => return err(Code::TypeMismatch, loc, format!("cannot index a value of type {other}")),
    };
    if let ExprKind::Const(Value::Int(v)) = &i.kind {
        if v[0] < 0 || v[0] as usize >= extent {
            return err(Code::TypeMismatch, i.loc, format!("index {} out of range for {}", v[0], b.ty));
        }
    }
    Ok(Expr::new(ExprKind::Index(Box::new(b), Box::new(i)), elem, loc))
}

/// Parse `_mRC` (0-based) matrix element selectors.
fn matrix_element(name: &str, rows: u8, cols: u8, loc: Loc) -> CResult<(u8, u8)> {
    let b = name.as_bytes();
    if b.len() == 4 && b[0] == b'_' && b[1] == b'm' && b[2].is_ascii_digit() && b[3].is_ascii_digit() {
        let (r, c) = (b[2] - b'0', b[3] - b'0');
        if r < rows && c < cols {
            return Ok((r, c));
        }
        return err(Code::Swizzle, loc, format!("matrix element `.{name}` out of range for a {rows}x{cols} matrix"));
    }
    err(Code::Unsupported, loc, format!("matrix selector `.{name}` is not supported (only `._mRC`)"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::frontend::{parse_source, SourceUnit};
    use std::collections::BTreeMap;

    fn checked(src: &str, entry: &str) -> crate::diag::Result<TypedTree> {
        let tree = parse_source(&SourceUnit::new("t.cg", src), &BTreeMap::new(), &BTreeMap::new()).unwrap();
        check(&tree, entry)
    }

    fn codes(src: &str, entry: &str) -> Vec<Code> {
        checked(src, entry).unwrap_err().codes()
    }

    #[test]
    fn simple_transform_smears_brightness() {
        let t = checked(corpus::SIMPLE_TRANSFORM, "simpleTransform").unwrap();
        let f = t.entry_fn();
        assert_eq!(f.params.len(), 10);
        let mut found = false;
        for s in &f.body {
            s.for_each_expr(&mut |e| {
                e.walk(&mut |x| {
                    if let ExprKind::Binary(BinaryOp::Arith(ArithOp::Mul), a, _) = &x.kind {
                        if matches!(a.kind, ExprKind::Smear(_)) && a.ty == Type::float(4) {
                            found = true;
                        }
                    }
                })
            });
        }
        assert!(found, "expected an explicit smear of brightness");
    }

    #[test]
    fn bright_light_map_decal_checks() {
        let t = checked(corpus::BRIGHT_LIGHT_MAP_DECAL, "brightLightMapDecal").unwrap();
        assert_eq!(t.entry_fn().ret, Type::float(4));
        assert!(!t.uses_discard);
    }

    #[test]
    fn recursion_is_rejected() {
        let src = "float f(float x) { return g(x); }\nfloat g(float x) { return f(x); }\nfloat4 main() : COLOR { return f(1.0).xxxx; }";
        // g is used before its declaration; declare it first.
        let src2 = format!("float g(float x);\n{src}");
        assert!(codes(&src2, "main").contains(&Code::Recursion));
        let selfcall = "float f(float x) { return f(x); }\nfloat4 main() : COLOR { return float4(1,1,1,1); }";
        assert!(codes(selfcall, "main").contains(&Code::Recursion));
    }

    #[test]
    fn bitwise_is_reserved() {
        let src = "int f(int a, int b) { return a & b; }";
        assert_eq!(codes(src, "f"), vec![Code::Reserved]);
    }

    #[test]
    fn uniform_write_and_undeclared() {
        assert_eq!(codes("void f(uniform float u) { u = 1.0; }", "f"), vec![Code::UniformWrite]);
        assert_eq!(codes("float f() { return zz; }", "f"), vec![Code::Undeclared]);
        assert_eq!(codes("float f() { return 1.0; }", "g"), vec![Code::NoEntry]);
    }

    #[test]
    fn write_mask_rules() {
        let ok = "void f(out float4 o) { float4 v = float4(4.0, -2.0, 5.0, 3.0); float2 w = v.xy; o = v; o.xw = w; }";
        assert!(checked(ok, "f").is_ok());
        assert_eq!(codes("void f(out float4 o) { o = float4(0,0,0,0); o.xx = float2(1,2); }", "f"), vec![Code::WriteMask]);
        assert_eq!(codes("void f(out float4 o) { o = float4(0,0,0,0); o.xy = float3(1,2,3); }", "f"), vec![Code::WriteMask]);
    }

    #[test]
    fn out_params_need_assignment() {
        assert_eq!(codes("void f(out float4 o) { }", "f"), vec![Code::UnassignedOut]);
        assert_eq!(codes("void f(out float4 o) { o.xyz = float3(1,2,3); }", "f"), vec![Code::UnassignedOut]);
        assert_eq!(codes("void f(out float4 o) { float4 t = o; o = t; }", "f"), vec![Code::UnassignedOut]);
        let both = "void f(float c, out float x) { if (c > 0.0) x = 1.0; else x = 2.0; }";
        assert!(checked(both, "f").is_ok());
        let one = "void f(float c, out float x) { if (c > 0.0) x = 1.0; }";
        assert_eq!(codes(one, "f"), vec![Code::UnassignedOut]);
        let inout = "void f(inout float4 v) { v.x = 1.0; }";
        assert!(checked(inout, "f").is_ok());
    }

    #[test]
    fn swizzle_of_swizzle_composes() {
        let t = checked("float2 f(float4 v) { return v.wzyx.yx; }", "f").unwrap();
        let StmtKind::Return(Some(e)) = &t.entry_fn().body[0].kind else { panic!() };
        let ExprKind::Swizzle(inner, comps) = &e.kind else { panic!("{e:?}") };
        assert_eq!(inner.kind, ExprKind::Local(0));
        assert_eq!(comps, &vec![2, 3]);
    }

    #[test]
    fn type_errors() {
        assert_eq!(codes("float4 f(float3 a, float4 b) { return a + b; }", "f"), vec![Code::TypeMismatch]);
        assert_eq!(codes("bool f(bool a, bool b) { return a + b; }", "f"), vec![Code::TypeMismatch]);
        assert_eq!(codes("float f(float a) { if (a) return 1.0; return 0.0; }", "f"), vec![Code::TypeMismatch]);
        assert_eq!(codes("float f() { break; return 0.0; }", "f"), vec![Code::BadControl]);
        assert_eq!(codes("float f(float x) { if (x > 0.0) return 1.0; }", "f"), vec![Code::BadControl]);
        assert_eq!(codes("float f() { return dot(1.0); }", "f"), vec![Code::NoOverload]);
        assert_eq!(codes("float4x4 m; float f() { return m._11; }", "f"), vec![Code::Unsupported]);
    }

    #[test]
    fn implicit_conversions_are_explicit_nodes() {
        let t = checked("float4 f(int i) { return i; }", "f").unwrap();
        let StmtKind::Return(Some(e)) = &t.entry_fn().body[0].kind else { panic!() };
        let ExprKind::Smear(inner) = &e.kind else { panic!("{e:?}") };
        assert!(matches!(inner.kind, ExprKind::Convert(_)));
        assert_eq!(inner.ty, Type::FLOAT);
    }

    #[test]
    fn globals_are_uniform_or_constant() {
        let t = checked("uniform float4 k; float s = 2.0; float4 f() : COLOR { return s * k; }", "f").unwrap();
        assert!(t.globals[0].is_uniform());
        assert!(!t.globals[1].is_uniform());
        assert_eq!(codes("float s = 2.0; void f(out float o) { s = 1.0; o = s; }", "f"), vec![Code::NotAssignable]);
    }

    #[test]
    fn discard_flag() {
        let t = checked("float4 f(float4 c : COLOR) : COLOR { if (c.x < 0.5) discard; return c; }", "f").unwrap();
        assert!(t.uses_discard);
    }
}
