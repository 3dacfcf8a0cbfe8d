//! Untyped syntax tree produced by the parser.

use crate::diag::Loc;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SyntaxTree {
    pub decls: Vec<Decl>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Decl {
    Function(FunctionDecl),
    Record(RecordDecl),
    Global(DeclStmt),
}

/// A type as written: a name plus optional array extents (`float4 a[2][3]`
/// puts the extents on the declarator, not here).
#[derive(Debug, Clone, PartialEq)]
pub struct TypeName {
    pub name: String,
    pub loc: Loc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamQualifier {
    /// Plain (or `in`) parameter: varying input on an entry function.
    None,
    In,
    Uniform,
    Out,
    InOut,
}

impl ParamQualifier {
    pub fn keyword(self) -> Option<&'static str> {
        match self {
            ParamQualifier::None => None,
            ParamQualifier::In => Some("in"),
            ParamQualifier::Uniform => Some("uniform"),
            ParamQualifier::Out => Some("out"),
            ParamQualifier::InOut => Some("inout"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub qualifier: ParamQualifier,
    pub ty: TypeName,
    pub name: String,
    pub dims: Vec<u32>,
    pub semantic: Option<String>,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDecl {
    pub return_ty: TypeName,
    pub name: String,
    pub params: Vec<Param>,
    pub return_semantic: Option<String>,
    /// `None` for a prototype.
    pub body: Option<Block>,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordField {
    pub ty: TypeName,
    pub name: String,
    pub dims: Vec<u32>,
    pub semantic: Option<String>,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordDecl {
    pub name: String,
    pub fields: Vec<RecordField>,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Declarator {
    pub name: String,
    pub dims: Vec<u32>,
    pub semantic: Option<String>,
    pub init: Option<Expr>,
    pub loc: Loc,
}

/// `[uniform] [const] T a, b[2] = ..., ...;`
#[derive(Debug, Clone, PartialEq)]
pub struct DeclStmt {
    pub uniform: bool,
    pub is_const: bool,
    pub ty: TypeName,
    pub vars: Vec<Declarator>,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Block {
    pub stmts: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Decl(DeclStmt),
    Expr(Expr),
    If { cond: Expr, then: Box<Stmt>, otherwise: Option<Box<Stmt>> },
    For { init: Option<Box<Stmt>>, cond: Option<Expr>, step: Option<Expr>, body: Box<Stmt> },
    While { cond: Expr, body: Box<Stmt> },
    DoWhile { body: Box<Stmt>, cond: Expr },
    Break,
    Continue,
    Return(Option<Expr>),
    Discard,
    Block(Block),
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
    And,
    Or,
    BitAnd,
    BitOr,
    BitXor,
    Shl,
    Shr,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        use BinaryOp::*;
        match self {
            Add => "+",
            Sub => "-",
            Mul => "*",
            Div => "/",
            Mod => "%",
            Lt => "<",
            Gt => ">",
            Le => "<=",
            Ge => ">=",
            Eq => "==",
            Ne => "!=",
            And => "&&",
            Or => "||",
            BitAnd => "&",
            BitOr => "|",
            BitXor => "^",
            Shl => "<<",
            Shr => ">>",
        }
    }

    /// C binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        use BinaryOp::*;
        match self {
            Or => 4,
            And => 5,
            BitOr => 6,
            BitXor => 7,
            BitAnd => 8,
            Eq | Ne => 9,
            Lt | Gt | Le | Ge => 10,
            Shl | Shr => 11,
            Add | Sub => 12,
            Mul | Div | Mod => 13,
        }
    }

    pub fn from_symbol(s: &str) -> Option<BinaryOp> {
        use BinaryOp::*;
        Some(match s {
            "+" => Add,
            "-" => Sub,
            "*" => Mul,
            "/" => Div,
            "%" => Mod,
            "<" => Lt,
            ">" => Gt,
            "<=" => Le,
            ">=" => Ge,
            "==" => Eq,
            "!=" => Ne,
            "&&" => And,
            "||" => Or,
            "&" => BitAnd,
            "|" => BitOr,
            "^" => BitXor,
            "<<" => Shl,
            ">>" => Shr,
            _ => return None,
        })
    }

    pub fn is_bitwise(self) -> bool {
        matches!(self, BinaryOp::BitAnd | BinaryOp::BitOr | BinaryOp::BitXor | BinaryOp::Shl | BinaryOp::Shr)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Plus,
    Not,
    BitNot,
    PreInc,
    PreDec,
    PostInc,
    PostDec,
}

impl UnaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Plus => "+",
            UnaryOp::Not => "!",
            UnaryOp::BitNot => "~",
            UnaryOp::PreInc | UnaryOp::PostInc => "++",
            UnaryOp::PreDec | UnaryOp::PostDec => "--",
        }
    }

    pub fn is_postfix(self) -> bool {
        matches!(self, UnaryOp::PostInc | UnaryOp::PostDec)
    }
}

/// Literal suffix selecting `float`, `half` or `fixed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FloatSuffix {
    None,
    F,
    H,
    X,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub loc: Loc,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    IntLit(i64),
    FloatLit(f64, FloatSuffix),
    BoolLit(bool),
    Ident(String),
    /// Function call or constructor (`float4(...)`); sema tells them apart.
    Call { callee: String, args: Vec<Expr> },
    Cast { ty: TypeName, expr: Box<Expr> },
    Unary { op: UnaryOp, expr: Box<Expr> },
    Binary { op: BinaryOp, lhs: Box<Expr>, rhs: Box<Expr> },
    /// `op` is `None` for plain `=`, otherwise the compound operator.
    Assign { op: Option<BinaryOp>, lhs: Box<Expr>, rhs: Box<Expr> },
    Cond { cond: Box<Expr>, then: Box<Expr>, otherwise: Box<Expr> },
    Comma { lhs: Box<Expr>, rhs: Box<Expr> },
    Member { base: Box<Expr>, name: String },
    Index { base: Box<Expr>, index: Box<Expr> },
}

impl Expr {
    pub fn new(kind: ExprKind, loc: Loc) -> Self {
        Expr { kind, loc }
    }
}

impl SyntaxTree {
    /// A copy with every location zeroed, for structural comparison.
    pub fn without_locations(&self) -> SyntaxTree {
        let mut t = self.clone();
        for d in &mut t.decls {
            match d {
                Decl::Function(f) => {
                    f.loc = Loc::default();
                    f.return_ty.loc = Loc::default();
                    for p in &mut f.params {
                        p.loc = Loc::default();
                        p.ty.loc = Loc::default();
                    }
                    if let Some(b) = &mut f.body {
                        b.stmts.iter_mut().for_each(strip_stmt);
                    }
                }
                Decl::Record(r) => {
                    r.loc = Loc::default();
                    for f in &mut r.fields {
                        f.loc = Loc::default();
                        f.ty.loc = Loc::default();
                    }
                }
                Decl::Global(g) => strip_decl(g),
            }
        }
        t
    }
}

fn strip_decl(d: &mut DeclStmt) {
    d.loc = Loc::default();
    d.ty.loc = Loc::default();
    for v in &mut d.vars {
        v.loc = Loc::default();
        if let Some(e) = &mut v.init {
            strip_expr(e);
        }
    }
}

fn strip_stmt(s: &mut Stmt) {
    s.loc = Loc::default();
    match &mut s.kind {
        StmtKind::Decl(d) => strip_decl(d),
        StmtKind::Expr(e) => strip_expr(e),
        StmtKind::If { cond, then, otherwise } => {
            strip_expr(cond);
            strip_stmt(then);
            if let Some(o) = otherwise {
                strip_stmt(o);
            }
        }
        StmtKind::For { init, cond, step, body } => {
            if let Some(i) = init {
                strip_stmt(i);
            }
            if let Some(c) = cond {
                strip_expr(c);
            }
            if let Some(s) = step {
                strip_expr(s);
            }
            strip_stmt(body);
        }
        StmtKind::While { cond, body } | StmtKind::DoWhile { body, cond } => {
            strip_expr(cond);
            strip_stmt(body);
        }
        StmtKind::Return(Some(e)) => strip_expr(e),
        StmtKind::Block(b) => b.stmts.iter_mut().for_each(strip_stmt),
        StmtKind::Return(None) | StmtKind::Break | StmtKind::Continue | StmtKind::Discard | StmtKind::Empty => {}
    }
}

fn strip_expr(e: &mut Expr) {
    e.loc = Loc::default();
    match &mut e.kind {
        ExprKind::IntLit(_) | ExprKind::FloatLit(..) | ExprKind::BoolLit(_) | ExprKind::Ident(_) => {}
        ExprKind::Call { args, .. } => args.iter_mut().for_each(strip_expr),
        ExprKind::Cast { ty, expr } => {
            ty.loc = Loc::default();
            strip_expr(expr);
        }
        ExprKind::Unary { expr, .. } => strip_expr(expr),
        ExprKind::Binary { lhs, rhs, .. } | ExprKind::Assign { lhs, rhs, .. } | ExprKind::Comma { lhs, rhs } => {
            strip_expr(lhs);
            strip_expr(rhs);
        }
        ExprKind::Cond { cond, then, otherwise } => {
            strip_expr(cond);
            strip_expr(then);
            strip_expr(otherwise);
        }
        ExprKind::Member { base, .. } => strip_expr(base),
        ExprKind::Index { base, index } => {
            strip_expr(base);
            strip_expr(index);
        }
    }
}
