//! Structural matching of rule patterns against statement windows.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use crate::rewriter::{build_guard, instantiate, Guard};
use crate::rule::{Rule, VarKind};
use crate::syntax::{Hole, Kind, Literal, Node, StmtList};

/// What an abstract variable was bound to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bound {
    /// From a `Name` hole.
    Identifier(String),
    /// From a `Const(..)` hole.
    Literal(Literal),
    /// From an `expr`, `List`, `Slice` or `Subscript` hole.
    Subtree(Node),
}

impl Bound {
    /// The bound value as an expression node.
    pub fn to_node(&self) -> Node {
        match self {
            Bound::Identifier(id) => Node::name(id.clone()),
            Bound::Literal(lit) => Node::constant(lit.clone()),
            Bound::Subtree(n) => {
                let mut n = n.clone();
                n.detach();
                n
            }
        }
    }

    /// Whether this value is one a hole of `kind` may bind.
    pub fn satisfies(&self, kind: VarKind) -> bool {
        match self {
            Bound::Identifier(_) => kind == VarKind::Name,
            Bound::Literal(lit) => kind.is_const() && literal_fits(kind, lit),
            Bound::Subtree(n) => !kind.is_const() && kind != VarKind::Name && subtree_fits(kind, n),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print_expr(&self.to_node()))
    }
}

fn literal_fits(kind: VarKind, lit: &Literal) -> bool {
    matches!(
        (kind, lit),
        (VarKind::ConstStr, Literal::Str(_) | Literal::OpaqueStr(_))
            | (VarKind::ConstInt, Literal::Int(_))
            | (VarKind::ConstFloat, Literal::Float(_))
    )
}

fn subtree_fits(kind: VarKind, node: &Node) -> bool {
    match kind {
        VarKind::Expr => node.kind.is_expr() && !matches!(node.kind, Kind::Starred | Kind::Slice | Kind::Hole(_)),
        VarKind::List => matches!(node.kind, Kind::List),
        VarKind::Slice => matches!(node.kind, Kind::Slice),
        VarKind::Subscript => matches!(node.kind, Kind::Subscript),
        _ => false,
    }
}

/// The binding θ from variable names to matched values.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: BTreeMap<String, Bound>,
}

impl Substitution {
    pub fn new() -> Self {
        Substitution::default()
    }

    pub fn get(&self, name: &str) -> Option<&Bound> {
        self.bindings.get(name)
    }

    pub fn insert(&mut self, name: impl Into<String>, value: Bound) -> Option<Bound> {
        self.bindings.insert(name.into(), value)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Bindings in name order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &Bound)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), v))
    }
}

impl FromIterator<(String, Bound)> for Substitution {
    fn from_iter<T: IntoIterator<Item = (String, Bound)>>(iter: T) -> Self {
        Substitution { bindings: iter.into_iter().collect() }
    }
}

/// A compiled LHS pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct Matcher {
    pattern: Vec<Node>,
}

pub fn compile_pattern(lhs: &StmtList) -> Matcher {
    Matcher { pattern: lhs.stmts.clone() }
}

impl Matcher {
    /// Number of statements a window must have.
    pub fn len(&self) -> usize {
        self.pattern.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pattern.is_empty()
    }

    /// Matches a whole window of exactly [`Matcher::len`] statements.
    pub fn match_window(&self, window: &[Node]) -> Option<Substitution> {
        if self.pattern.is_empty() || window.len() != self.pattern.len() {
            return None;
        }
        let mut theta = Substitution::new();
        self.pattern.iter().zip(window).all(|(p, s)| match_node(p, s, &mut theta)).then_some(theta)
    }
}

/// Matches the window of `cell`'s top-level statements starting at `index`.
pub fn match_at(cell: &StmtList, index: usize, m: &Matcher) -> Option<Substitution> {
    let window = cell.stmts.get(index..index.checked_add(m.len())?)?;
    m.match_window(window)
}

/// Matches one pattern node against one subject node, extending `theta`.
/// On failure `theta` may hold partial bindings.
pub fn match_node(pattern: &Node, subject: &Node, theta: &mut Substitution) -> bool {
    if let Kind::Hole(Hole { name, kind }) = &pattern.kind {
        let Some(kind) = kind else { return false };
        let Some(value) = capture(*kind, subject) else { return false };
        return match theta.get(name) {
            Some(prev) => *prev == value,
            None => {
                theta.insert(name.clone(), value);
                true
            }
        };
    }
    pattern.kind == subject.kind
        && pattern.children.len() == subject.children.len()
        && pattern.children.iter().zip(&subject.children).all(|(p, s)| match_node(p, s, theta))
}

fn capture(kind: VarKind, subject: &Node) -> Option<Bound> {
    match (&subject.kind, kind) {
        (Kind::Name(id), VarKind::Name) => Some(Bound::Identifier(id.clone())),
        (Kind::Constant(lit), k) if k.is_const() => literal_fits(k, lit).then(|| Bound::Literal(lit.clone())),
        (_, k) if subtree_fits(k, subject) => Some(Bound::Subtree(subject.clone())),
        _ => None,
    }
}

/// Location of a statement list inside a cell: each step is (index of a
/// compound statement, index of the body child within it).
pub type ContextPath = Vec<(usize, usize)>;

#[derive(Debug, Clone, PartialEq)]
pub struct Match {
    pub rule_id: String,
    pub context: ContextPath,
    pub stmt_range: Range<usize>,
    pub theta: Substitution,
}

impl Match {
    /// Sort key under which applying matches in descending order keeps the
    /// remaining ones valid.
    pub fn position_key(&self) -> Vec<usize> {
        let mut key: Vec<usize> = self.context.iter().flat_map(|&(s, c)| [s, c]).collect();
        key.push(self.stmt_range.start);
        key
    }

    /// Whether applying both would touch the same statements.
    pub fn overlaps(&self, other: &Match) -> bool {
        if self.context == other.context {
            return self.stmt_range.start < other.stmt_range.end && other.stmt_range.start < self.stmt_range.end;
        }
        encloses(self, other) || encloses(other, self)
    }
}

/// True when `outer`'s window contains the statement `inner` lives under.
fn encloses(outer: &Match, inner: &Match) -> bool {
    let depth = outer.context.len();
    inner.context.len() > depth
        && inner.context[..depth] == outer.context[..]
        && outer.stmt_range.contains(&inner.context[depth].0)
}

/// Child indices of `stmt` that are statement lists searched for matches:
/// the bodies and else-blocks of `if`, `for`, `while` and `with`.
pub fn context_children(stmt: &Node) -> &'static [usize] {
    match stmt.kind {
        Kind::If | Kind::While => &[1, 2],
        Kind::For | Kind::AsyncFor => &[2, 3],
        Kind::With | Kind::AsyncWith => match stmt.children.len() {
            2 => &[1],
            3 => &[2],
            4 => &[3],
            5 => &[4],
            6 => &[5],
            _ => &[],
        },
        _ => &[],
    }
}

/// Every match of every rule, in (context pre-order, window start, rule
/// order).
pub fn find_matches(cell: &StmtList, rules: &[Rule]) -> Vec<Match> {
    let compiled: Vec<Matcher> = rules.iter().map(|r| compile_pattern(&r.lhs)).collect();
    let mut out = Vec::new();
    let mut path = Vec::new();
    scan(&cell.stmts, rules, &compiled, &mut path, &mut out);
    out
}

fn scan(stmts: &[Node], rules: &[Rule], compiled: &[Matcher], path: &mut ContextPath, out: &mut Vec<Match>) {
    for start in 0..stmts.len() {
        for (rule, m) in rules.iter().zip(compiled) {
            if m.is_empty() || start + m.len() > stmts.len() {
                continue;
            }
            if let Some(theta) = m.match_window(&stmts[start..start + m.len()]) {
                out.push(Match {
                    rule_id: rule.meta.id.clone(),
                    context: path.clone(),
                    stmt_range: start..start + m.len(),
                    theta,
                });
            }
        }
    }
    for (i, stmt) in stmts.iter().enumerate() {
        for &child in context_children(stmt) {
            // The else-branch of a guard we produced is the original code,
            // already considered when the guard was placed.
            if child == 2
                && matches!(stmt.kind, Kind::If)
                && rules.iter().zip(compiled).any(|(r, m)| is_guard_form(stmt, r, m))
            {
                continue;
            }
            path.push((i, child));
            scan(&stmt.children[child].children, rules, compiled, path, out);
            path.pop();
        }
    }
}

/// Whether `stmt` is exactly what applying `rule` as a guarded rewrite
/// produces. Its else-branch then holds the original code, which must not
/// be rewritten a second time.
pub fn is_guard_form(stmt: &Node, rule: &Rule, m: &Matcher) -> bool {
    let [test, body, orelse] = &stmt.children[..] else { return false };
    let Some(theta) = m.match_window(&orelse.children) else { return false };
    let exprs: Vec<Node> = rule.precondition_exprs().cloned().collect();
    let Ok(Guard::Expr(guard)) = build_guard(&exprs, &theta) else { return false };
    if *test != guard {
        return false;
    }
    matches!(instantiate(&rule.rhs, &theta), Ok(rhs) if rhs.stmts == body.children)
}
