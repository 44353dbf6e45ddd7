//! Evaluation-order traversal.
//!
//! Statements are reported before their children; expressions after their
//! children, so a call is reported only once its callee and arguments have
//! been. Within a node, children are visited in the order the interpreter
//! evaluates them (`x = f(g())` yields `g`, `f`, then the target `x`).

use crate::ast::*;

pub trait Visitor {
    fn visit_stmt(&mut self, _stmt: &Stmt) {}
    fn visit_expr(&mut self, _expr: &Expr) {}
}

pub fn walk_body<V: Visitor + ?Sized>(v: &mut V, body: &[Stmt]) {
    for s in body {
        walk_stmt(v, s);
    }
}

pub fn walk_stmt<V: Visitor + ?Sized>(v: &mut V, stmt: &Stmt) {
    v.visit_stmt(stmt);
    match &stmt.kind {
        StmtKind::FunctionDef {
            decorators,
            params,
            returns,
            body,
            ..
        } => {
            walk_exprs(v, decorators);
            walk_params(v, params, true);
            if let Some(r) = returns {
                walk_expr(v, r);
            }
            walk_body(v, body);
        }
        StmtKind::ClassDef {
            decorators,
            args,
            body,
            ..
        } => {
            walk_exprs(v, decorators);
            for a in args {
                walk_expr(v, a.value());
            }
            walk_body(v, body);
        }
        StmtKind::Return(value) => walk_opt(v, value.as_ref()),
        StmtKind::Delete(targets) => walk_exprs(v, targets),
        StmtKind::Assign { targets, value } => {
            walk_expr(v, value);
            walk_exprs(v, targets);
        }
        StmtKind::AugAssign { target, value, .. } => {
            walk_expr(v, target);
            walk_expr(v, value);
        }
        StmtKind::AnnAssign {
            target,
            annotation,
            value,
        } => {
            walk_opt(v, value.as_ref());
            walk_expr(v, annotation);
            walk_expr(v, target);
        }
        StmtKind::For {
            target,
            iter,
            body,
            orelse,
            ..
        } => {
            walk_expr(v, iter);
            walk_expr(v, target);
            walk_body(v, body);
            walk_body(v, orelse);
        }
        StmtKind::While { test, body, orelse } | StmtKind::If { test, body, orelse } => {
            walk_expr(v, test);
            walk_body(v, body);
            walk_body(v, orelse);
        }
        StmtKind::With { items, body, .. } => {
            for item in items {
                walk_expr(v, &item.context_expr);
                walk_opt(v, item.optional_vars.as_ref());
            }
            walk_body(v, body);
        }
        StmtKind::Match { subject, cases } => {
            walk_expr(v, subject);
            for case in cases {
                walk_pattern(v, &case.pattern);
                walk_opt(v, case.guard.as_ref());
                walk_body(v, &case.body);
            }
        }
        StmtKind::Raise { exc, cause } => {
            walk_opt(v, exc.as_ref());
            walk_opt(v, cause.as_ref());
        }
        StmtKind::Try {
            body,
            handlers,
            orelse,
            finalbody,
            ..
        } => {
            walk_body(v, body);
            for h in handlers {
                walk_opt(v, h.type_.as_ref());
                walk_body(v, &h.body);
            }
            walk_body(v, orelse);
            walk_body(v, finalbody);
        }
        StmtKind::Assert { test, msg } => {
            walk_expr(v, test);
            walk_opt(v, msg.as_ref());
        }
        StmtKind::Expr(e) => walk_expr(v, e),
        StmtKind::Import(_)
        | StmtKind::ImportFrom { .. }
        | StmtKind::Global(_)
        | StmtKind::Nonlocal(_)
        | StmtKind::Pass
        | StmtKind::Break
        | StmtKind::Continue => {}
    }
}

fn walk_exprs<V: Visitor + ?Sized>(v: &mut V, exprs: &[Expr]) {
    for e in exprs {
        walk_expr(v, e);
    }
}

fn walk_opt<V: Visitor + ?Sized>(v: &mut V, e: Option<&Expr>) {
    if let Some(e) = e {
        walk_expr(v, e);
    }
}

fn walk_params<V: Visitor + ?Sized>(v: &mut V, params: &Parameters, annotations: bool) {
    // Defaults are evaluated at definition time, before annotations.
    for p in params.iter() {
        walk_opt(v, p.default.as_ref());
    }
    if annotations {
        for p in params.iter() {
            walk_opt(v, p.annotation.as_ref());
        }
    }
}

fn walk_generators<V: Visitor + ?Sized>(v: &mut V, generators: &[Comprehension]) {
    for g in generators {
        walk_expr(v, &g.iter);
        walk_expr(v, &g.target);
        walk_exprs(v, &g.ifs);
    }
}

pub fn walk_expr<V: Visitor + ?Sized>(v: &mut V, expr: &Expr) {
    match &expr.kind {
        ExprKind::BoolOp { values, .. } => walk_exprs(v, values),
        ExprKind::NamedExpr { target, value } => {
            walk_expr(v, value);
            walk_expr(v, target);
        }
        ExprKind::BinOp { left, right, .. } => {
            walk_expr(v, left);
            walk_expr(v, right);
        }
        ExprKind::UnaryOp { operand, .. } => walk_expr(v, operand),
        ExprKind::Lambda { params, body } => {
            walk_params(v, params, false);
            walk_expr(v, body);
        }
        ExprKind::IfExp { test, body, orelse } => {
            walk_expr(v, test);
            walk_expr(v, body);
            walk_expr(v, orelse);
        }
        ExprKind::Dict(items) => {
            for item in items {
                match item {
                    DictItem::Pair(k, val) => {
                        walk_expr(v, k);
                        walk_expr(v, val);
                    }
                    DictItem::Unpack(e) => walk_expr(v, e),
                }
            }
        }
        ExprKind::Set(elts) | ExprKind::List(elts) | ExprKind::Tuple(elts) => walk_exprs(v, elts),
        ExprKind::ListComp { elt, generators }
        | ExprKind::SetComp { elt, generators }
        | ExprKind::GeneratorExp { elt, generators } => {
            walk_generators(v, generators);
            walk_expr(v, elt);
        }
        ExprKind::DictComp {
            key,
            value,
            generators,
        } => {
            walk_generators(v, generators);
            walk_expr(v, key);
            walk_expr(v, value);
        }
        ExprKind::Await(e) | ExprKind::YieldFrom(e) | ExprKind::Starred(e) => walk_expr(v, e),
        ExprKind::Yield(e) => {
            if let Some(e) = e {
                walk_expr(v, e);
            }
        }
        ExprKind::Compare {
            left, comparators, ..
        } => {
            walk_expr(v, left);
            walk_exprs(v, comparators);
        }
        ExprKind::Call { func, args } => {
            walk_expr(v, func);
            for a in args {
                walk_expr(v, a.value());
            }
        }
        ExprKind::FormattedValue {
            value, format_spec, ..
        } => {
            walk_expr(v, value);
            if let Some(spec) = format_spec {
                walk_expr(v, spec);
            }
        }
        ExprKind::JoinedStr(parts) => walk_exprs(v, parts),
        ExprKind::Attribute { value, .. } => walk_expr(v, value),
        ExprKind::Subscript { value, slice } => {
            walk_expr(v, value);
            walk_expr(v, slice);
        }
        ExprKind::Slice { lower, upper, step } => {
            for part in [lower, upper, step].into_iter().flatten() {
                walk_expr(v, part);
            }
        }
        ExprKind::Constant(_) | ExprKind::Name(_) => {}
    }
    v.visit_expr(expr);
}

/// Patterns are not expressions, but value patterns and class names are.
fn walk_pattern<V: Visitor + ?Sized>(v: &mut V, pat: &Pattern) {
    match pat {
        Pattern::Value(e) => walk_expr(v, e),
        Pattern::Singleton(_) | Pattern::Star(_) => {}
        Pattern::Sequence(ps) | Pattern::Or(ps) => {
            for p in ps {
                walk_pattern(v, p);
            }
        }
        Pattern::Mapping { keys, patterns, .. } => {
            walk_exprs(v, keys);
            for p in patterns {
                walk_pattern(v, p);
            }
        }
        Pattern::Class {
            cls,
            patterns,
            kwd_patterns,
            ..
        } => {
            walk_expr(v, cls);
            for p in patterns.iter().chain(kwd_patterns) {
                walk_pattern(v, p);
            }
        }
        Pattern::As { pattern, .. } => {
            if let Some(p) = pattern {
                walk_pattern(v, p);
            }
        }
    }
}

/// Counts of `ast.stmt` and `ast.expr` nodes.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct NodeCounts {
    pub stmts: usize,
    pub exprs: usize,
}

impl Visitor for NodeCounts {
    fn visit_stmt(&mut self, _: &Stmt) {
        self.stmts += 1;
    }
    fn visit_expr(&mut self, _: &Expr) {
        self.exprs += 1;
    }
}

pub fn count_nodes(body: &[Stmt]) -> NodeCounts {
    let mut c = NodeCounts::default();
    walk_body(&mut c, body);
    c
}
