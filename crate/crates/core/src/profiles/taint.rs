//! Which values depend on per-shader-invocation data.
//!
//! Entry parameters, uniform globals and texture fetches are runtime data.
//! Everything else is known when the program is compiled, so conditions
//! and indices built only from such values can be resolved by unrolling
//! instead of branching. The analysis is flow-insensitive: a variable is
//! tainted if any assignment anywhere stores tainted data into it. Helper
//! parameters are tainted when any call site passes tainted data, and the
//! fixpoint runs across the whole call graph.

use crate::sema::{CallArg, Callee, Expr, ExprKind, FuncId, Stmt, StmtKind, TypedTree};

pub(super) struct Taint<'a> {
    tree: &'a TypedTree,
    locals: Vec<Vec<bool>>,
    ret: Vec<bool>,
    changed: bool,
}

impl<'a> Taint<'a> {
    pub(super) fn analyze(tree: &'a TypedTree) -> Self {
        let locals = tree.functions.iter().map(|f| vec![false; f.locals.len()]).collect();
        let mut t = Taint { tree, locals, ret: vec![false; tree.functions.len()], changed: false };
        let entry = tree.entry_fn();
        for p in &entry.params {
            t.locals[tree.entry][p.var] = true;
        }
        let reachable = tree.reachable();
        loop {
            t.changed = false;
            for (fid, f) in tree.functions.iter().enumerate() {
                if reachable[fid] {
                    for s in &f.body {
                        s.walk(&mut |s| t.stmt(fid, s));
                    }
                }
            }
            if !t.changed {
                return t;
            }
        }
    }

    fn mark(&mut self, f: FuncId, var: usize) {
        if !self.locals[f][var] {
            self.locals[f][var] = true;
            self.changed = true;
        }
    }

    fn stmt(&mut self, f: FuncId, s: &Stmt) {
        match &s.kind {
            StmtKind::Local { var, init: Some(e) } => {
                if self.expr(f, e) {
                    self.mark(f, *var);
                }
            }
            StmtKind::Return(Some(e)) => {
                if self.expr(f, e) && !self.ret[f] {
                    self.ret[f] = true;
                    self.changed = true;
                }
            }
            _ => s.for_each_expr(&mut |e| {
                self.expr(f, e);
            }),
        }
    }

    /// Whether `e`, evaluated inside function `f`, depends on runtime data.
    /// Also propagates taint through any assignments and calls inside `e`.
    pub(super) fn expr(&mut self, f: FuncId, e: &Expr) -> bool {
        match &e.kind {
            ExprKind::Const(_) => false,
            ExprKind::Local(v) => self.locals[f][*v],
            ExprKind::Global(g) => {
                let g = &self.tree.globals[*g];
                match &g.init {
                    None => true,
                    Some(init) => self.expr(f, init),
                }
            }
            ExprKind::Assign { target, op, value } => {
                let mut t = self.expr(f, value);
                for a in &target.path {
                    if let crate::sema::LAccess::Index(i) = a {
                        t |= self.expr(f, i);
                    }
                }
                if op.is_some() {
                    t |= self.locals[f][target.var];
                }
                if t {
                    self.mark(f, target.var);
                }
                self.locals[f][target.var]
            }
            ExprKind::IncDec { target, .. } => {
                for a in &target.path {
                    if let crate::sema::LAccess::Index(i) = a {
                        if self.expr(f, i) {
                            self.mark(f, target.var);
                        }
                    }
                }
                self.locals[f][target.var]
            }
            ExprKind::Comma(a, b) => {
                self.expr(f, a);
                self.expr(f, b)
            }
            ExprKind::Call { callee: Callee::User(id), args } => {
                let callee = &self.tree.functions[*id];
                for (a, p) in args.iter().zip(&callee.params) {
                    let t = match a {
                        CallArg::In(x) => self.expr(f, x),
                        CallArg::InOut(lv) => self.locals[f][lv.var],
                        CallArg::Out(_) => false,
                    };
                    if t {
                        self.mark(*id, p.var);
                    }
                }
                for (a, p) in args.iter().zip(&callee.params) {
                    if let CallArg::Out(lv) | CallArg::InOut(lv) = a {
                        if self.locals[*id][p.var] {
                            self.mark(f, lv.var);
                        }
                    }
                }
                self.ret[*id]
            }
            ExprKind::Call { callee: Callee::Builtin { op, .. }, args } => {
                let mut t = op.is_texture_fetch();
                for a in args {
                    if let CallArg::In(x) = a {
                        t |= self.expr(f, x);
                    }
                }
                t
            }
            _ => {
                let mut t = false;
                e.for_each_child(&mut |c| t |= self.expr(f, c));
                t
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse_source, SourceUnit};
    use std::collections::BTreeMap;

    fn tree(src: &str) -> TypedTree {
        let t = parse_source(&SourceUnit::new("t.cg", src), &BTreeMap::new(), &BTreeMap::new()).unwrap();
        crate::sema::check(&t, "main").unwrap()
    }

    fn local(tree: &TypedTree, taint: &Taint, f: &str, name: &str) -> bool {
        let fid = tree.functions.iter().position(|x| x.name == f).unwrap();
        let v = tree.functions[fid].locals.iter().position(|l| l.name == name).unwrap();
        taint.locals[fid][v]
    }

    #[test]
    fn loop_counters_stay_clean() {
        let t = tree(
            "float4 main(float4 c : COLOR) : COLOR { float4 acc = c; int n = 3; \
             for (int i = 0; i < n; i++) acc = acc * 0.5; return acc; }",
        );
        let taint = Taint::analyze(&t);
        assert!(local(&t, &taint, "main", "acc"));
        assert!(!local(&t, &taint, "main", "i"));
        assert!(!local(&t, &taint, "main", "n"));
    }

    #[test]
    fn flows_through_helpers() {
        let t = tree(
            "float twice(float x) { return x * 2; } \
             void put(float x, out float y) { y = x; } \
             float4 main(float4 c : COLOR) : COLOR { \
               float k = twice(3); float d = twice(c.x); float o; put(c.y, o); float q; put(1, q); \
               return float4(k, d, o, q); }",
        );
        let taint = Taint::analyze(&t);
        // `twice` returns tainted data for some caller, so both results
        // are treated as runtime values.
        assert!(local(&t, &taint, "main", "k"));
        assert!(local(&t, &taint, "main", "d"));
        assert!(local(&t, &taint, "main", "o"));
        assert!(local(&t, &taint, "main", "q"));
    }

    #[test]
    fn constants_and_textures() {
        let t = tree(
            "const float k = 2; uniform float u; \
             float4 main(uniform sampler2D s) : COLOR { float a = k; float b = u; float4 c = tex2D(s, float2(0, 0)); \
               return float4(a, b, c.x, 1); }",
        );
        let taint = Taint::analyze(&t);
        assert!(!local(&t, &taint, "main", "a"));
        assert!(local(&t, &taint, "main", "b"));
        assert!(local(&t, &taint, "main", "c"));
    }
}
