//! Semantic analysis: name and type resolution, overload selection,
//! swizzle/write-mask checks, recursion rejection and definite assignment.
//!
//! The output is a [`TypedTree`] in which every expression carries its type,
//! every call is bound to one signature, and every implicit conversion or
//! scalar smear is an explicit node.

mod check;
mod flow;
pub mod overload;
pub mod recursion;
pub mod swizzle;

use std::sync::Arc;

pub use check::check;
pub use overload::{resolve_overload, FunctionSignature, Origin, ParamSig, Qualifier, ResolveError};
pub use recursion::{detect_recursion, CallGraph};
pub use swizzle::{swizzle_type, validate_write_mask, LetterSet, Swizzle};

use crate::diag::Loc;
use crate::stdlib::BuiltinOp;
use crate::types::{RecordType, Type};
use crate::value::{ArithOp, CmpOp, Value};

pub type FuncId = usize;
pub type GlobalId = usize;
/// Index into the owning function's `locals`; parameters come first.
pub type VarId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct TypedTree {
    pub functions: Vec<Function>,
    pub globals: Vec<Global>,
    pub records: Vec<Arc<RecordType>>,
    pub entry: FuncId,
    /// The entry function can reach a `discard` statement.
    pub uses_discard: bool,
}

impl TypedTree {
    pub fn entry_fn(&self) -> &Function {
        &self.functions[self.entry]
    }

    /// Functions reachable from the entry through calls, entry included.
    pub fn reachable(&self) -> Vec<bool> {
        let mut graph = CallGraph::new(self.functions.iter().map(|f| f.name.clone()).collect());
        for (i, f) in self.functions.iter().enumerate() {
            for c in &f.callees {
                graph.add_call(i, *c);
            }
        }
        graph.reachable_from(self.entry)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Global {
    pub name: String,
    pub ty: Type,
    /// Globals with an initializer are read-only constants; the others are
    /// uniforms supplied by the application.
    pub init: Option<Expr>,
    pub semantic: Option<String>,
    pub loc: Loc,
}

impl Global {
    pub fn is_uniform(&self) -> bool {
        self.init.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub ty: Type,
    pub qualifier: Qualifier,
    pub semantic: Option<String>,
    pub var: VarId,
    pub loc: Loc,
}

impl Param {
    /// Uniform parameters and samplers are bound to constants/texture units.
    pub fn is_uniform(&self) -> bool {
        self.qualifier == Qualifier::Uniform || self.ty.contains_sampler()
    }

    pub fn is_output(&self) -> bool {
        self.qualifier.writes_back()
    }

    /// Varying input: plain or `inout`, not uniform.
    pub fn is_varying_input(&self) -> bool {
        !self.is_uniform() && self.qualifier != Qualifier::Out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalVar {
    pub name: String,
    pub ty: Type,
    pub is_const: bool,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Function {
    pub name: String,
    pub sig: FunctionSignature,
    pub params: Vec<Param>,
    pub ret: Type,
    pub return_semantic: Option<String>,
    pub locals: Vec<LocalVar>,
    pub body: Vec<Stmt>,
    /// User functions called directly from the body.
    pub callees: Vec<FuncId>,
    pub has_discard: bool,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    /// Declaration; without an initializer the variable starts at zero.
    Local { var: VarId, init: Option<Expr> },
    Expr(Expr),
    If { cond: Expr, then: Vec<Stmt>, otherwise: Vec<Stmt> },
    /// `for`, `while` (`test_first`) and `do ... while` (`!test_first`).
    Loop { init: Vec<Stmt>, cond: Option<Expr>, step: Option<Expr>, body: Vec<Stmt>, test_first: bool },
    Break,
    Continue,
    Return(Option<Expr>),
    Discard,
    Block(Vec<Stmt>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub ty: Type,
    pub loc: Loc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Arith(ArithOp),
    Cmp(CmpOp),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LogicalOp {
    And,
    Or,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Callee {
    User(FuncId),
    Builtin { sig: FunctionSignature, op: BuiltinOp },
}

#[derive(Debug, Clone, PartialEq)]
pub enum CallArg {
    In(Expr),
    Out(LValue),
    InOut(LValue),
}

#[derive(Debug, Clone, PartialEq)]
pub enum LAccess {
    Field(usize),
    Index(Box<Expr>),
    /// Write mask; always the last access.
    Swizzle(Vec<u8>),
    MatElem(u8, u8),
}

/// An assignable location rooted at a local variable or parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct LValue {
    pub var: VarId,
    pub path: Vec<LAccess>,
    pub ty: Type,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Const(Value),
    Local(VarId),
    Global(GlobalId),
    /// Change of base with the same shape (also `float` <-> `float1`).
    Convert(Box<Expr>),
    /// Replicate a scalar across every component of `ty`.
    Smear(Box<Expr>),
    /// Concatenate the components of the arguments (already of `ty`'s base).
    Construct(Vec<Expr>),
    Swizzle(Box<Expr>, Vec<u8>),
    Field(Box<Expr>, usize),
    /// Array element, vector component or matrix row.
    Index(Box<Expr>, Box<Expr>),
    MatElem(Box<Expr>, u8, u8),
    Unary(UnaryOp, Box<Expr>),
    /// Operands already converted to the resolved operator signature.
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    /// Short-circuit `&&` / `||` on bool scalars.
    Logical(LogicalOp, Box<Expr>, Box<Expr>),
    Select(Box<Expr>, Box<Expr>, Box<Expr>),
    /// `target = value` or `target op= value`; `value` has the target's type.
    Assign { target: LValue, op: Option<ArithOp>, value: Box<Expr> },
    /// `++`/`--`; `post` yields the old value.
    IncDec { target: LValue, increment: bool, post: bool },
    Call { callee: Callee, args: Vec<CallArg> },
    Comma(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind, ty: Type, loc: Loc) -> Self {
        Expr { kind, ty, loc }
    }

    /// Calls every direct child expression (including those inside lvalues).
    pub fn for_each_child(&self, f: &mut dyn FnMut(&Expr)) {
        fn lvalue_children(lv: &LValue, f: &mut dyn FnMut(&Expr)) {
            for a in &lv.path {
                if let LAccess::Index(i) = a {
                    f(i);
                }
            }
        }
        match &self.kind {
            ExprKind::Const(_) | ExprKind::Local(_) | ExprKind::Global(_) => {}
            ExprKind::Convert(e)
            | ExprKind::Smear(e)
            | ExprKind::Swizzle(e, _)
            | ExprKind::Field(e, _)
            | ExprKind::MatElem(e, _, _)
            | ExprKind::Unary(_, e) => f(e),
            ExprKind::Construct(args) => args.iter().for_each(f),
            ExprKind::Index(a, b) | ExprKind::Binary(_, a, b) | ExprKind::Logical(_, a, b) | ExprKind::Comma(a, b) => {
                f(a);
                f(b);
            }
            ExprKind::Select(c, a, b) => {
                f(c);
                f(a);
                f(b);
            }
            ExprKind::Assign { target, value, .. } => {
                lvalue_children(target, f);
                f(value);
            }
            ExprKind::IncDec { target, .. } => lvalue_children(target, f),
            ExprKind::Call { args, .. } => {
                for a in args {
                    match a {
                        CallArg::In(e) => f(e),
                        CallArg::Out(lv) | CallArg::InOut(lv) => lvalue_children(lv, f),
                    }
                }
            }
        }
    }

    /// Pre-order walk over this expression and all descendants.
    pub fn walk(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        self.for_each_child(&mut |c| c.walk(f));
    }

    /// Free of assignments, increments, calls to user functions (which may
    /// write out-parameters) and texture fetches.
    pub fn is_pure(&self) -> bool {
        let mut pure = true;
        self.walk(&mut |e| match &e.kind {
            ExprKind::Assign { .. } | ExprKind::IncDec { .. } => pure = false,
            ExprKind::Call { callee: Callee::User(_), .. } => pure = false,
            _ => {}
        });
        pure
    }
}

impl Stmt {
    /// Every expression directly owned by this statement (not nested ones).
    pub fn for_each_expr(&self, f: &mut dyn FnMut(&Expr)) {
        match &self.kind {
            StmtKind::Local { init: Some(e), .. } | StmtKind::Expr(e) | StmtKind::Return(Some(e)) => f(e),
            StmtKind::If { cond, .. } => f(cond),
            StmtKind::Loop { cond, step, .. } => {
                if let Some(c) = cond {
                    f(c);
                }
                if let Some(s) = step {
                    f(s);
                }
            }
            _ => {}
        }
    }

    /// Nested statement lists.
    pub fn children(&self) -> Vec<&[Stmt]> {
        match &self.kind {
            StmtKind::If { then, otherwise, .. } => vec![then, otherwise],
            StmtKind::Loop { init, body, .. } => vec![init, body],
            StmtKind::Block(b) => vec![b],
            _ => Vec::new(),
        }
    }

    /// Visit this statement and all nested statements, pre-order.
    pub fn walk(&self, f: &mut dyn FnMut(&Stmt)) {
        f(self);
        for list in self.children() {
            for s in list {
                s.walk(f);
            }
        }
    }
}
