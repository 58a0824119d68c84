//! Instantiating templates and splicing rewrites into a cell.

use std::ops::Range;

use thiserror::Error;

use crate::corpus::Corpus;
use crate::matcher::{context_children, find_matches, ContextPath, Match, Substitution};
use crate::rule::Rule;
use crate::scheduler::schedule;
use crate::syntax::{BoolOp, Hole, Kind, Node, StmtList};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("variable '{0}' has no binding")]
    UnboundVariable(String),
    #[error("match for rule '{rule_id}' no longer holds in this cell")]
    StaleMatch { rule_id: String },
}

/// Runtime check placed in front of a rewrite.
#[derive(Debug, Clone, PartialEq)]
pub enum Guard {
    /// The rule has no preconditions.
    AlwaysTrue,
    Expr(Node),
}

/// Replaces every hole in `template` with its binding.
pub fn instantiate(template: &StmtList, theta: &Substitution) -> Result<StmtList, RewriteError> {
    template.stmts.iter().map(|s| instantiate_node(s, theta)).collect::<Result<_, _>>().map(StmtList::new)
}

pub fn instantiate_node(node: &Node, theta: &Substitution) -> Result<Node, RewriteError> {
    if let Kind::Hole(Hole { name, .. }) = &node.kind {
        return theta.get(name).map(|b| b.to_node()).ok_or_else(|| RewriteError::UnboundVariable(name.clone()));
    }
    let children = node.children.iter().map(|c| instantiate_node(c, theta)).collect::<Result<_, _>>()?;
    Ok(Node::detached(node.kind.clone(), children))
}

/// Conjunction of the instantiated preconditions, in order.
pub fn build_guard(preconditions: &[Node], theta: &Substitution) -> Result<Guard, RewriteError> {
    let mut exprs = preconditions.iter().map(|p| instantiate_node(p, theta)).collect::<Result<Vec<_>, _>>()?;
    Ok(match exprs.len() {
        0 => Guard::AlwaysTrue,
        1 => Guard::Expr(exprs.pop().expect("one element")),
        _ => Guard::Expr(Node::detached(Kind::BoolOp(BoolOp::And), exprs)),
    })
}

/// One rewrite that was applied to a cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Application {
    pub rule_id: String,
    /// Where the window was in the input cell.
    pub context: ContextPath,
    pub stmt_range: Range<usize>,
    pub guarded: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RewrittenCell {
    pub cell: StmtList,
    pub applications: Vec<Application>,
}

/// Applies a single match. The window is re-matched first; if it no longer
/// yields the same bindings the match is stale.
pub fn apply_rule(cell: &StmtList, rule: &Rule, m: &Match) -> Result<RewrittenCell, RewriteError> {
    let mut stmts = cell.stmts.clone();
    let app = apply_in_place(&mut stmts, rule, m)?;
    Ok(RewrittenCell { cell: StmtList::new(stmts), applications: vec![app] })
}

fn apply_in_place(stmts: &mut Vec<Node>, rule: &Rule, m: &Match) -> Result<Application, RewriteError> {
    let stale = || RewriteError::StaleMatch { rule_id: m.rule_id.clone() };
    if m.rule_id != rule.meta.id {
        return Err(stale());
    }
    let body_slot = match m.context.split_last() {
        None => false,
        Some((&(s, c), parent)) => {
            let list = list_at(stmts, parent).ok_or_else(stale)?;
            let owner = list.get(s).ok_or_else(stale)?;
            context_children(owner).first() == Some(&c)
        }
    };
    let list = list_at_mut(stmts, &m.context).ok_or_else(stale)?;
    let window = list.get(m.stmt_range.clone()).ok_or_else(stale)?;
    let theta = crate::matcher::compile_pattern(&rule.lhs).match_window(window).ok_or_else(stale)?;
    if theta != m.theta {
        return Err(stale());
    }

    let rhs = instantiate(&rule.rhs, &theta)?;
    let exprs: Vec<Node> = rule.precondition_exprs().cloned().collect();
    let replacement = match build_guard(&exprs, &theta)? {
        Guard::AlwaysTrue => rhs.stmts,
        Guard::Expr(test) => {
            let original: Vec<Node> = window.to_vec();
            vec![Node::detached(
                Kind::If,
                vec![test, Node::detached(Kind::Seq, rhs.stmts), Node::detached(Kind::Seq, original)],
            )]
        }
    };
    list.splice(m.stmt_range.clone(), replacement);
    if list.is_empty() && body_slot {
        list.push(Node::detached(Kind::Pass, Vec::new()));
    }
    Ok(Application {
        rule_id: m.rule_id.clone(),
        context: m.context.clone(),
        stmt_range: m.stmt_range.clone(),
        guarded: !rule.is_unconditional(),
    })
}

fn list_at<'a>(mut stmts: &'a [Node], path: &[(usize, usize)]) -> Option<&'a [Node]> {
    for &(s, c) in path {
        let owner = stmts.get(s)?;
        if !context_children(owner).contains(&c) {
            return None;
        }
        stmts = &owner.children[c].children;
    }
    Some(stmts)
}

fn list_at_mut<'a>(mut stmts: &'a mut Vec<Node>, path: &[(usize, usize)]) -> Option<&'a mut Vec<Node>> {
    for &(s, c) in path {
        let owner = stmts.get_mut(s)?;
        if !context_children(owner).contains(&c) {
            return None;
        }
        stmts = &mut owner.children[c].children;
    }
    Some(stmts)
}

/// Finds, schedules and applies every rewrite for one cell in a single
/// pass. Rewritten code is not searched again.
pub fn rewrite_cell(cell: &StmtList, corpus: &Corpus) -> RewrittenCell {
    let matches = find_matches(cell, corpus.rules());
    let plan = schedule(&matches, corpus).expect("matches come from the corpus");

    let mut order: Vec<&Match> = plan.selected.iter().collect();
    order.sort_by_key(|m| std::cmp::Reverse(m.position_key()));

    let mut stmts = cell.stmts.clone();
    let mut applications = Vec::new();
    let mut needs_pandas = false;
    for m in order {
        let rule = corpus.get(&m.rule_id).expect("scheduled rule exists");
        // Selected matches are disjoint and applied back to front, so none
        // can go stale; skip defensively if one does.
        if let Ok(app) = apply_in_place(&mut stmts, rule, m) {
            needs_pandas |= rule.precondition_exprs().any(mentions_pandas);
            applications.push(app);
        }
    }
    applications.sort_by_key(|a| {
        let mut key: Vec<usize> = a.context.iter().flat_map(|&(s, c)| [s, c]).collect();
        key.push(a.stmt_range.start);
        key
    });

    if needs_pandas && !binds_pandas(&cell.stmts) {
        let at = preamble_len(&stmts);
        let import = Node::detached(
            Kind::Import,
            vec![Node::detached(Kind::Alias { name: "pandas".into(), asname: None }, Vec::new())],
        );
        stmts.insert(at, import);
    }
    RewrittenCell { cell: StmtList::new(stmts), applications }
}

fn mentions_pandas(expr: &Node) -> bool {
    expr.walk().any(|n| matches!(&n.kind, Kind::Name(id) if id == "pandas"))
}

/// Whether anything in the cell binds the name `pandas`.
fn binds_pandas(stmts: &[Node]) -> bool {
    stmts.iter().flat_map(Node::walk).any(|n| match &n.kind {
        Kind::Alias { name, asname } => {
            asname.as_deref().unwrap_or_else(|| name.split('.').next().unwrap_or(name)) == "pandas"
        }
        Kind::Assign => n.children[..n.children.len() - 1]
            .iter()
            .any(|t| matches!(&t.kind, Kind::Name(id) if id == "pandas")),
        _ => false,
    })
}

/// Leading docstring and `from __future__` imports, which must stay first.
fn preamble_len(stmts: &[Node]) -> usize {
    let mut i = 0;
    if let Some(first) = stmts.first() {
        if matches!(first.kind, Kind::Expr)
            && matches!(&first.children[0].kind, Kind::Constant(crate::syntax::Literal::Str(_)))
        {
            i = 1;
        }
    }
    while let Some(s) = stmts.get(i) {
        match &s.kind {
            Kind::ImportFrom { module: Some(m), level: 0 } if m == "__future__" => i += 1,
            _ => break,
        }
    }
    i
}
