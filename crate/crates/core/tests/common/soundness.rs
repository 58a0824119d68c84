//! Pattern/subject pairs with a known substitution.
//!
//! A generated statement becomes the pattern by turning every `df` and `s`
//! into a binding hole; the subject plugs generated expressions into those
//! holes. Matching must then recover exactly those expressions.

use proptest::prelude::*;

use dfrewrite::syntax::{Hole, Kind};
use dfrewrite::{compile_pattern, instantiate, parse_expr, parse_source, Node, StmtList, VarKind};

use super::gen;

const VARS: [&str; 2] = ["df", "s"];

#[derive(Debug, Clone)]
pub struct Case {
    pub pattern: StmtList,
    pub subject: StmtList,
    /// Subject with one occurrence of a repeated variable changed, if any
    /// variable occurs twice.
    pub inconsistent: Option<StmtList>,
    /// Subject with a non-identifier where a `Name` hole sits, if any.
    pub wrong_kind: Option<StmtList>,
}

fn holes(node: &mut Node, kinds: &[VarKind; 2], counts: &mut [usize; 2]) {
    if let Kind::Name(n) = &node.kind {
        if let Some(i) = VARS.iter().position(|v| v == n) {
            counts[i] += 1;
            node.kind = Kind::Hole(Hole { name: format!("v_{n}"), kind: Some(kinds[i]) });
            return;
        }
    }
    for c in &mut node.children {
        holes(c, kinds, counts);
    }
}

/// Replaces holes by value; `change` swaps in `alt` at the given occurrence
/// of the given variable.
fn fill(node: &Node, values: &[Node; 2], change: Option<(usize, usize, &Node)>, seen: &mut [usize; 2]) -> Node {
    if let Kind::Hole(h) = &node.kind {
        let i = VARS.iter().position(|v| h.name == format!("v_{v}")).unwrap();
        seen[i] += 1;
        if let Some((var, occ, alt)) = change {
            if var == i && seen[i] == occ {
                return alt.clone();
            }
        }
        return values[i].clone();
    }
    let children = node.children.iter().map(|c| fill(c, values, change, seen)).collect();
    Node::detached(node.kind.clone(), children)
}

fn fill_all(pattern: &StmtList, values: &[Node; 2], change: Option<(usize, usize, &Node)>) -> StmtList {
    let mut seen = [0; 2];
    StmtList::new(pattern.stmts.iter().map(|s| fill(s, values, change, &mut seen)).collect())
}

fn value(kind: VarKind) -> BoxedStrategy<String> {
    match kind {
        VarKind::Name => gen::name().boxed(),
        _ => gen::expr().boxed(),
    }
}

pub fn case() -> impl Strategy<Value = Case> {
    let kinds = prop::array::uniform2(prop_oneof![Just(VarKind::Name), Just(VarKind::Expr)]);
    (gen::stmt(), kinds)
        .prop_flat_map(|(src, kinds)| (Just(src), Just(kinds), value(kinds[0]), value(kinds[1]), gen::expr()))
        .prop_map(|(src, kinds, a, b, other)| {
            let mut pattern = parse_source(&src).unwrap();
            let mut counts = [0; 2];
            for s in &mut pattern.stmts {
                holes(s, &kinds, &mut counts);
            }
            let values = [parse_expr(&a).unwrap(), parse_expr(&b).unwrap()];
            let subject = fill_all(&pattern, &values, None);

            let inconsistent = (0..2).find(|&i| counts[i] >= 2).map(|i| {
                let mut alt = parse_expr(&other).unwrap();
                if alt == values[i] {
                    alt = Node::detached(Kind::Attribute("pop".into()), vec![alt]);
                }
                fill_all(&pattern, &values, Some((i, counts[i], &alt)))
            });
            let wrong_kind = (0..2).find(|&i| counts[i] >= 1 && kinds[i] == VarKind::Name).map(|i| {
                let alt = parse_expr("a.b").unwrap();
                let mut swapped = values.clone();
                swapped[i] = alt;
                fill_all(&pattern, &swapped, None)
            });
            Case { pattern, subject, inconsistent, wrong_kind }
        })
}

pub enum Outcome {
    Pass,
    Fail(String),
}

/// Checks one case; `Fail` carries a description of the violation.
pub fn check(c: &Case) -> Outcome {
    let m = compile_pattern(&c.pattern);
    let Some(theta) = m.match_window(&c.subject.stmts) else {
        return Outcome::Fail(format!("no match\npattern: {:?}\nsubject: {:?}", c.pattern, c.subject));
    };
    match instantiate(&c.pattern, &theta) {
        Ok(back) if back == c.subject => {}
        Ok(back) => return Outcome::Fail(format!("re-instantiation differs: {back:?} vs {:?}", c.subject)),
        Err(e) => return Outcome::Fail(e.to_string()),
    }
    if let Some(bad) = &c.inconsistent {
        if m.match_window(&bad.stmts).is_some() {
            return Outcome::Fail(format!("inconsistent bindings matched: {bad:?}"));
        }
    }
    if let Some(bad) = &c.wrong_kind {
        if m.match_window(&bad.stmts).is_some() {
            return Outcome::Fail(format!("non-identifier bound to a Name hole: {bad:?}"));
        }
    }
    Outcome::Pass
}
