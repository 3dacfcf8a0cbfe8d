//! Profile-dependent checks on a typed program.

use super::taint::Taint;
use super::{is_texcoord, ProfileDescriptor, Stage};
use crate::diag::{Code, Diagnostic, Loc};
use crate::sema::{CallArg, Callee, Expr, ExprKind, FuncId, LAccess, LValue, Stmt, StmtKind, TypedTree};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub diagnostics: Vec<Diagnostic>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        !self.diagnostics.iter().any(Diagnostic::is_error)
    }
}

/// Check `tree` against the capabilities and limits of `profile`. Only
/// functions reachable from the entry are inspected.
pub fn validate(tree: &TypedTree, profile: &ProfileDescriptor) -> ValidationReport {
    let mut v = Validator { tree, profile, taint: Taint::analyze(tree), diags: Vec::new(), func: tree.entry };
    v.entry_interface();
    let reachable = tree.reachable();
    for (fid, f) in tree.functions.iter().enumerate() {
        if reachable[fid] {
            v.func = fid;
            v.stmts(&f.body);
        }
    }
    ValidationReport { diagnostics: v.diags }
}

struct Validator<'a> {
    tree: &'a TypedTree,
    profile: &'a ProfileDescriptor,
    taint: Taint<'a>,
    diags: Vec<Diagnostic>,
    func: FuncId,
}

pub(crate) fn is_discard_only(then: &[Stmt], otherwise: &[Stmt]) -> bool {
    otherwise.is_empty()
        && match then {
            [s] => match &s.kind {
                StmtKind::Discard => true,
                StmtKind::Block(b) => is_discard_only(b, &[]),
                _ => false,
            },
            _ => false,
        }
}

impl Validator<'_> {
    fn error(&mut self, code: Code, loc: Loc, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(code, loc, msg));
    }

    fn entry_interface(&mut self) {
        let f = self.tree.entry_fn();
        if self.profile.stage == Stage::Fragment {
            let mut outs: Vec<(&str, &Option<String>, Loc)> =
                f.params.iter().filter(|p| p.is_output()).map(|p| (p.name.as_str(), &p.semantic, p.loc)).collect();
            if f.ret != crate::types::Type::Void {
                outs.push(("return value", &f.return_semantic, f.loc));
            }
            for (name, sem, loc) in outs {
                if let Some(sem) = sem.as_deref().filter(|s| is_texcoord(s)) {
                    let msg = format!("fragment program cannot output `{name}` to {sem}; only COLOR is writable");
                    self.error(Code::FragTexcoordOut, loc, msg);
                }
            }
        }
        if self.profile.caps.allows_texture_fetch {
            let samplers = f.params.iter().filter(|p| p.ty.is_sampler()).count()
                + self.tree.globals.iter().filter(|g| g.is_uniform() && g.ty.is_sampler()).count();
            let units = self.profile.limits.texture_units as usize;
            if samplers > units {
                let msg = format!("{samplers} samplers exceed the {units} texture units of profile {}", self.profile.name);
                self.error(Code::TexUnits, f.loc, msg);
            }
        }
    }

    fn tainted(&mut self, e: &Expr) -> bool {
        self.taint.expr(self.func, e)
    }

    fn stmts(&mut self, list: &[Stmt]) {
        for s in list {
            self.stmt(s);
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        s.for_each_expr(&mut |e| self.expr(e));
        match &s.kind {
            StmtKind::Discard if self.profile.stage == Stage::Vertex => {
                self.error(Code::DiscardInVertex, s.loc, format!("`discard` is not available in vertex profile {}", self.profile.name));
            }
            StmtKind::If { cond, then, otherwise } => {
                let discard_ok = self.profile.stage == Stage::Fragment && is_discard_only(then, otherwise);
                if !discard_ok && self.tainted(cond) {
                    self.needs_branching(cond.loc, "an `if` condition");
                }
            }
            StmtKind::Loop { cond: Some(cond), .. }
                if self.tainted(cond) => {
                    self.needs_branching(cond.loc, "a loop condition");
                }
            _ => {}
        }
        for list in s.children() {
            self.stmts(list);
        }
    }

    fn needs_branching(&mut self, loc: Loc, what: &str) {
        let msg = format!("{what} depends on runtime data, which needs branching that profile {} lacks", self.profile.name);
        self.error(Code::NeedsBranching, loc, msg);
    }

    fn lvalue(&mut self, lv: &LValue, loc: Loc) {
        for a in &lv.path {
            if let LAccess::Index(i) = a {
                if self.tainted(i) {
                    self.variable_index(loc);
                }
            }
        }
    }

    fn variable_index(&mut self, loc: Loc) {
        let msg = format!("index depends on runtime data; profile {} needs a compile-time index", self.profile.name);
        self.error(Code::VariableIndex, loc, msg);
    }

    fn expr(&mut self, x: &Expr) {
        x.for_each_child(&mut |c| self.expr(c));
        match &x.kind {
            ExprKind::Call { callee: Callee::Builtin { op, sig }, .. } if op.is_texture_fetch() => {
                if !self.profile.caps.allows_texture_fetch {
                    let msg = format!("`{}` fetches a texture, which vertex profile {} cannot do", sig.name, self.profile.name);
                    self.error(Code::TexInVertex, x.loc, msg);
                }
            }
            ExprKind::Index(_, i) => {
                if self.tainted(i) {
                    self.variable_index(x.loc);
                }
            }
            ExprKind::Assign { target, .. } | ExprKind::IncDec { target, .. } => self.lvalue(target, x.loc),
            ExprKind::Call { args, .. } => {
                for a in args {
                    if let CallArg::Out(lv) | CallArg::InOut(lv) = a {
                        self.lvalue(lv, x.loc);
                    }
                }
            }
            ExprKind::Select(c, a, b) => {
                if !(a.is_pure() && b.is_pure()) && self.tainted(c) {
                    self.needs_branching(c.loc, "a `?:` condition guarding side effects");
                }
            }
            ExprKind::Logical(_, a, b)
                if !b.is_pure() && self.tainted(a) => {
                    self.needs_branching(a.loc, "a short-circuit operand guarding side effects");
                }
            _ => {}
        }
    }
}
