//! Control-flow facts about typed bodies: reachability of a function's end
//! and definite assignment of `out` parameters.
//!
//! Assignment is tracked per component: a `float4` out parameter is
//! assigned once all four lanes have been written, whether by one full
//! assignment or by several masked ones. Aggregates (arrays, records) and
//! dynamically indexed writes are tracked as a whole.

use super::*;
use crate::diag::{Code, Diagnostic};

/// True if control can run off the end of `stmts`.
pub(super) fn falls_through(stmts: &[Stmt]) -> bool {
    for s in stmts {
        match &s.kind {
            StmtKind::Return(_) | StmtKind::Discard | StmtKind::Break | StmtKind::Continue => return false,
            StmtKind::If { then, otherwise, .. } => {
                if !falls_through(then) && !falls_through(otherwise) {
                    return false;
                }
            }
            StmtKind::Block(b) => {
                if !falls_through(b) {
                    return false;
                }
            }
            StmtKind::Loop { cond: None, body, .. } if !contains_break(body) => return false,
            _ => {}
        }
    }
    true
}

/// A `break` that exits this loop (nested loops excluded).
fn contains_break(stmts: &[Stmt]) -> bool {
    stmts.iter().any(|s| match &s.kind {
        StmtKind::Break => true,
        StmtKind::If { then, otherwise, .. } => contains_break(then) || contains_break(otherwise),
        StmtKind::Block(b) => contains_break(b),
        _ => false,
    })
}

fn contains_jump(stmts: &[Stmt]) -> bool {
    stmts.iter().any(|s| match &s.kind {
        StmtKind::Break | StmtKind::Continue => true,
        StmtKind::If { then, otherwise, .. } => contains_jump(then) || contains_jump(otherwise),
        StmtKind::Block(b) => contains_jump(b),
        _ => false,
    })
}

fn lane_count(ty: &Type) -> u32 {
    match ty {
        Type::Scalar(_) | Type::Vector(..) | Type::Matrix(..) => ty.component_count() as u32,
        _ => 1,
    }
}

fn full_mask(ty: &Type) -> u16 {
    ((1u32 << lane_count(ty)) - 1) as u16
}

/// Lanes of `ty` touched by `path`, or the whole value when the path is
/// not statically resolvable to components.
fn path_lanes(ty: &Type, path: &[LAccess]) -> u16 {
    let const_index = |e: &Expr| match &e.kind {
        ExprKind::Const(Value::Int(v)) => Some(v[0] as u32),
        _ => None,
    };
    match (ty, path) {
        (_, []) => full_mask(ty),
        (Type::Scalar(_) | Type::Vector(..), [LAccess::Swizzle(c)]) => c.iter().fold(0, |m, &i| m | 1 << i),
        (Type::Vector(..), [LAccess::Index(i)]) => match const_index(i) {
            Some(i) => 1 << i,
            None => full_mask(ty),
        },
        (Type::Matrix(_, _, cols), [LAccess::MatElem(r, c)]) => 1 << (*r as u32 * *cols as u32 + *c as u32),
        (Type::Matrix(_, _, cols), [LAccess::Index(i), rest @ ..]) => match const_index(i) {
            Some(r) => {
                let row = (((1u32 << *cols) - 1) << (r * *cols as u32)) as u16;
                match rest {
                    [] => row,
                    [LAccess::Swizzle(c)] => c.iter().fold(0, |m, &k| m | 1 << (r * *cols as u32 + k as u32)),
                    [LAccess::Index(k)] => match const_index(k) {
                        Some(k) => 1 << (r * *cols as u32 + k),
                        None => row,
                    },
                    _ => row,
                }
            }
            None => full_mask(ty),
        },
        _ => full_mask(ty),
    }
}

type State = Option<Vec<u16>>;

struct Flow<'a> {
    f: &'a Function,
    /// Out parameters being tracked: (var, all-lanes mask).
    tracked: Vec<(VarId, u16)>,
    diags: Vec<Diagnostic>,
    reported: Vec<bool>,
}

/// Definite-assignment diagnostics for `f`'s `out` parameters.
pub(super) fn check_out_params(f: &Function) -> Vec<Diagnostic> {
    let tracked: Vec<(VarId, u16)> =
        f.params.iter().filter(|p| p.qualifier == Qualifier::Out).map(|p| (p.var, full_mask(&p.ty))).collect();
    if tracked.is_empty() {
        return Vec::new();
    }
    let n = tracked.len();
    let mut flow = Flow { f, tracked, diags: Vec::new(), reported: vec![false; n] };
    let end = flow.stmts(&f.body, Some(vec![0; n]));
    if let Some(st) = end {
        flow.require_all(&st, f.loc);
    }
    flow.diags
}

fn merge(a: State, b: State) -> State {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => Some(a.iter().zip(&b).map(|(x, y)| x & y).collect()),
    }
}

impl Flow<'_> {
    fn slot(&self, var: VarId) -> Option<usize> {
        self.tracked.iter().position(|(v, _)| *v == var)
    }

    fn name(&self, slot: usize) -> &str {
        &self.f.locals[self.tracked[slot].0].name
    }

    fn require_all(&mut self, st: &[u16], loc: crate::diag::Loc) {
        for i in 0..self.tracked.len() {
            if st[i] != self.tracked[i].1 && !self.reported[i] {
                self.reported[i] = true;
                let msg = format!("out parameter `{}` is not assigned on every path", self.name(i));
                self.diags.push(Diagnostic::error(Code::UnassignedOut, loc, msg));
            }
        }
    }

    fn read(&mut self, st: &[u16], var: VarId, lanes: u16, loc: crate::diag::Loc) {
        if let Some(i) = self.slot(var) {
            if st[i] & lanes != lanes && !self.reported[i] {
                self.reported[i] = true;
                let msg = format!("out parameter `{}` is read before it is assigned", self.name(i));
                self.diags.push(Diagnostic::error(Code::UnassignedOut, loc, msg));
            }
        }
    }

    fn write(&self, st: &mut [u16], lv: &LValue) {
        if let Some(i) = self.slot(lv.var) {
            st[i] |= path_lanes(&self.f.locals[lv.var].ty, &lv.path);
        }
    }

    fn stmts(&mut self, list: &[Stmt], mut st: State) -> State {
        for s in list {
            st = self.stmt(s, st);
        }
        st
    }

    fn stmt(&mut self, s: &Stmt, st: State) -> State {
        let mut st = st?;
        match &s.kind {
            StmtKind::Local { init, .. } => {
                if let Some(e) = init {
                    self.expr(e, &mut st);
                }
                Some(st)
            }
            StmtKind::Expr(e) => {
                self.expr(e, &mut st);
                Some(st)
            }
            StmtKind::If { cond, then, otherwise } => {
                self.expr(cond, &mut st);
                let a = self.stmts(then, Some(st.clone()));
                let b = self.stmts(otherwise, Some(st));
                merge(a, b)
            }
            StmtKind::Loop { init, cond, step, body, test_first } => {
                let Some(mut st) = self.stmts(init, Some(st)) else { return None };
                if *test_first {
                    if let Some(c) = cond {
                        self.expr(c, &mut st);
                    }
                }
                let after_body = self.stmts(body, Some(st.clone()));
                if let Some(mut b) = after_body.clone() {
                    if let Some(e) = step {
                        self.expr(e, &mut b);
                    }
                    if !*test_first {
                        if let Some(c) = cond {
                            self.expr(c, &mut b);
                        }
                    }
                }
                if !*test_first && !contains_jump(body) {
                    return after_body;
                }
                if cond.is_none() && !contains_break(body) {
                    return None;
                }
                Some(st)
            }
            StmtKind::Return(value) => {
                if let Some(e) = value {
                    self.expr(e, &mut st);
                }
                self.require_all(&st, s.loc);
                None
            }
            StmtKind::Break | StmtKind::Continue | StmtKind::Discard => None,
            StmtKind::Block(b) => self.stmts(b, Some(st)),
        }
    }

    fn lvalue_indices(&mut self, lv: &LValue, st: &mut Vec<u16>) {
        for a in &lv.path {
            if let LAccess::Index(i) = a {
                self.expr(i, st);
            }
        }
    }

    fn read_lvalue(&mut self, lv: &LValue, st: &[u16], loc: crate::diag::Loc) {
        let lanes = path_lanes(&self.f.locals[lv.var].ty, &lv.path);
        self.read(st, lv.var, lanes, loc);
    }

    fn expr(&mut self, e: &Expr, st: &mut Vec<u16>) {
        match &e.kind {
            ExprKind::Local(v) => {
                let lanes = full_mask(&self.f.locals[*v].ty);
                self.read(st, *v, lanes, e.loc);
            }
            ExprKind::Swizzle(inner, comps) if matches!(inner.kind, ExprKind::Local(_)) => {
                let ExprKind::Local(v) = inner.kind else { unreachable!() };
                let lanes = path_lanes(&inner.ty, &[LAccess::Swizzle(comps.clone())]);
                self.read(st, v, lanes, e.loc);
            }
            ExprKind::MatElem(inner, r, c) if matches!(inner.kind, ExprKind::Local(_)) => {
                let ExprKind::Local(v) = inner.kind else { unreachable!() };
                let lanes = path_lanes(&inner.ty, &[LAccess::MatElem(*r, *c)]);
                self.read(st, v, lanes, e.loc);
            }
            ExprKind::Index(inner, idx) if matches!(inner.kind, ExprKind::Local(_)) => {
                let ExprKind::Local(v) = inner.kind else { unreachable!() };
                self.expr(idx, st);
                let lanes = path_lanes(&inner.ty, &[LAccess::Index(idx.clone())]);
                self.read(st, v, lanes, e.loc);
            }
            ExprKind::Assign { target, op, value } => {
                self.expr(value, st);
                self.lvalue_indices(target, st);
                if op.is_some() {
                    self.read_lvalue(target, st, e.loc);
                }
                self.write(st, target);
            }
            ExprKind::IncDec { target, .. } => {
                self.lvalue_indices(target, st);
                self.read_lvalue(target, st, e.loc);
                self.write(st, target);
            }
            ExprKind::Call { args, .. } => {
                for a in args {
                    match a {
                        CallArg::In(x) => self.expr(x, st),
                        CallArg::Out(lv) => self.lvalue_indices(lv, st),
                        CallArg::InOut(lv) => {
                            self.lvalue_indices(lv, st);
                            self.read_lvalue(lv, st, e.loc);
                        }
                    }
                }
                for a in args {
                    if let CallArg::Out(lv) | CallArg::InOut(lv) = a {
                        self.write(st, lv);
                    }
                }
            }
            ExprKind::Logical(_, a, b) => {
                self.expr(a, st);
                let mut scratch = st.clone();
                self.expr(b, &mut scratch);
            }
            ExprKind::Select(c, a, b) => {
                self.expr(c, st);
                let mut sa = st.clone();
                self.expr(a, &mut sa);
                let mut sb = st.clone();
                self.expr(b, &mut sb);
                *st = sa.iter().zip(&sb).map(|(x, y)| x & y).collect();
            }
            _ => e.for_each_child(&mut |c| self.expr(c, st)),
        }
    }
}
