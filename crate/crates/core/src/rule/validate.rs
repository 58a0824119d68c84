//! Checks that go beyond parsing: precondition shape, hole placement, and
//! rules that cannot change anything.

use super::{Code, Diagnostic, Rule, Section, VarKind};
use crate::syntax::{print_expr, Hole, Kind, Node, StmtList};

/// Diagnostics that make a rule unusable. Empty for a valid rule.
pub fn validate_rule(rule: &Rule) -> Vec<Diagnostic> {
    let mut diags = Vec::new();

    for (i, pre) in rule.preconditions.iter().enumerate() {
        if !matches!(pre.kind, Kind::Expr) {
            diags.push(Diagnostic::new(
                Code::PreconditionNotExpression,
                Section::Pre,
                format!("precondition {} is not an expression (found {})", i + 1, describe_stmt(pre)),
            ));
        }
    }

    let kind_of = |name: &str| rule.kind_of(name);
    for stmt in &rule.lhs.stmts {
        positions(stmt, Ctx::Load, &kind_of, Section::Lhs, &mut diags);
    }
    for stmt in &rule.rhs.stmts {
        positions(stmt, Ctx::Load, &kind_of, Section::Rhs, &mut diags);
    }
    for pre in &rule.preconditions {
        positions(pre, Ctx::Load, &kind_of, Section::Pre, &mut diags);
    }

    if strip_kinds_list(&rule.lhs) == rule.rhs {
        diags.push(Diagnostic::new(
            Code::LhsEqualsRhs,
            Section::Rhs,
            "the RHS is identical to the LHS, so the rule only adds guard overhead",
        ));
    }
    diags
}

fn describe_stmt(node: &Node) -> String {
    match node.kind {
        Kind::Seq => "several statements".into(),
        ref k => format!("a '{}' statement", k.tag()),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Load,
    Store,
    SubscriptSlice,
    WalrusTarget,
}

fn positions(node: &Node, ctx: Ctx, kind_of: &dyn Fn(&str) -> Option<VarKind>, section: Section, diags: &mut Vec<Diagnostic>) {
    if let Kind::Hole(Hole { name, kind }) = &node.kind {
        let Some(kind) = kind.or_else(|| kind_of(name)) else { return };
        if kind == VarKind::Slice && ctx != Ctx::SubscriptSlice {
            diags.push(Diagnostic::new(
                Code::HoleKindPosition,
                section,
                format!("Slice variable '{name}' appears outside a subscript"),
            ));
        } else if ctx == Ctx::Store && kind.is_const() {
            diags.push(Diagnostic::new(
                Code::HoleKindPosition,
                section,
                format!("{kind} variable '{name}' cannot be an assignment target"),
            ));
        } else if ctx == Ctx::WalrusTarget && kind != VarKind::Name {
            diags.push(Diagnostic::new(
                Code::HoleKindPosition,
                section,
                format!("{kind} variable '{name}' cannot be the target of ':='"),
            ));
        }
        return;
    }
    let c = &node.children;
    let mut go = |n: &Node, ctx: Ctx| positions(n, ctx, kind_of, section, diags);
    match &node.kind {
        Kind::Subscript => {
            go(&c[0], Ctx::Load);
            if matches!(c[1].kind, Kind::Tuple) {
                for e in &c[1].children {
                    go(e, Ctx::SubscriptSlice);
                }
            } else {
                go(&c[1], Ctx::SubscriptSlice);
            }
        }
        Kind::Assign => {
            for t in &c[..c.len() - 1] {
                go(t, Ctx::Store);
            }
            go(&c[c.len() - 1], Ctx::Load);
        }
        Kind::AugAssign(_) | Kind::AnnAssign { .. } | Kind::For | Kind::AsyncFor | Kind::Comprehension { .. } => {
            go(&c[0], Ctx::Store);
            for rest in &c[1..] {
                go(rest, Ctx::Load);
            }
        }
        Kind::WithItem => {
            go(&c[0], Ctx::Load);
            go(&c[1], Ctx::Store);
        }
        Kind::Delete => {
            for t in c {
                go(t, Ctx::Store);
            }
        }
        Kind::NamedExpr => {
            go(&c[0], Ctx::WalrusTarget);
            go(&c[1], Ctx::Load);
        }
        Kind::Tuple | Kind::List | Kind::Starred if ctx == Ctx::Store => {
            for e in c {
                go(e, Ctx::Store);
            }
        }
        _ => {
            for e in c {
                go(e, Ctx::Load);
            }
        }
    }
}

/// The tree with every hole turned into its use form.
pub(crate) fn strip_kinds(node: &Node) -> Node {
    let mut out = node.clone();
    strip_in_place(&mut out);
    out
}

fn strip_in_place(node: &mut Node) {
    if let Kind::Hole(h) = &mut node.kind {
        h.kind = None;
    }
    for c in &mut node.children {
        strip_in_place(c);
    }
}

fn strip_kinds_list(list: &StmtList) -> StmtList {
    StmtList::new(list.stmts.iter().map(strip_kinds).collect())
}

/// Non-fatal observations about a valid rule: preconditions that redo the
/// rule's own work, and attribute-existence checks standing in for type
/// checks.
pub fn advise_rule(rule: &Rule) -> Vec<Diagnostic> {
    let mut calls: Vec<Node> = Vec::new();
    for stmt in rule.lhs.stmts.iter().chain(&rule.rhs.stmts) {
        for n in stmt.walk() {
            if matches!(n.kind, Kind::Call) {
                calls.push(strip_kinds(n));
            }
        }
    }
    let mut out = Vec::new();
    for (i, pre) in rule.precondition_exprs().enumerate() {
        if let Some(shared) = pre.walk().find(|n| matches!(n.kind, Kind::Call) && calls.contains(n)) {
            out.push(Diagnostic::new(
                Code::ExpensivePrecondition,
                Section::Pre,
                format!("precondition {} evaluates '{}', which the rule itself computes", i + 1, print_expr(shared)),
            ));
        }
        let hasattr = pre.walk().any(|n| {
            matches!(n.kind, Kind::Call) && matches!(&n.children[0].kind, Kind::Name(f) if f == "hasattr")
        });
        if hasattr {
            out.push(Diagnostic::new(
                Code::AttributeCheckPrecondition,
                Section::Pre,
                format!("precondition {} checks attribute existence with hasattr instead of the object's type", i + 1),
            ));
        }
    }
    out
}
