use std::ops::Range;

use super::*;
use crate::matcher::{ContextPath, Substitution};
use crate::rule::{parse_rule_file, Rule};

fn rule(id: &str, avg: Option<f64>, enabled: bool) -> Rule {
    let mut meta = format!("id = {id}\nenabled = {enabled}\n");
    if let Some(a) = avg {
        meta.push_str(&format!("avg_speedup = {a}\n"));
    }
    parse_rule_file(&format!("== LHS ==\n@{{Name: a}} = 1\n== RHS ==\n@{{a}} = 2\n== PRE ==\n== META ==\n{meta}"))
        .unwrap()
}

fn m(id: &str, ctx: ContextPath, r: Range<usize>) -> Match {
    Match { rule_id: id.into(), context: ctx, stmt_range: r, theta: Substitution::new() }
}

fn measured_corpus() -> Corpus {
    Corpus::new(vec![rule("R1", Some(22.57), true), rule("R2", Some(1.32), true), rule("R3", Some(0.60), true)])
        .unwrap()
}

fn ids(ms: &[Match]) -> Vec<&str> {
    ms.iter().map(|m| m.rule_id.as_str()).collect()
}

#[test]
fn higher_average_speedup_wins() {
    let plan = schedule(&[m("R2", vec![], 0..1), m("R1", vec![], 0..1)], &measured_corpus()).unwrap();
    assert_eq!(ids(&plan.selected), ["R1"]);
    assert_eq!(plan.rejected.len(), 1);
    assert_eq!(plan.rejected[0].0.rule_id, "R2");
    assert_eq!(plan.rejected[0].1, RejectReason::Overlap { with: "R1".into() });
}

#[test]
fn disjoint_matches_of_one_rule_are_kept() {
    let plan = schedule(&[m("R2", vec![], 0..1), m("R2", vec![], 1..2)], &measured_corpus()).unwrap();
    assert_eq!(plan.selected.len(), 2);
    assert!(plan.rejected.is_empty());
}

#[test]
fn ties_go_to_the_smaller_id_in_every_input_order() {
    let corpus = Corpus::new(vec![rule("b", Some(2.0), true), rule("a", Some(2.0), true), rule("c", Some(2.0), true)])
        .unwrap();
    let ms = [m("b", vec![], 0..2), m("a", vec![], 1..3), m("c", vec![], 2..4)];
    let mut seen = Vec::new();
    for perm in permutations(&[0, 1, 2]) {
        let input: Vec<Match> = perm.iter().map(|&i| ms[i].clone()).collect();
        let plan = schedule(&input, &corpus).unwrap();
        seen.push(ids(&plan.selected).iter().map(|s| s.to_string()).collect::<Vec<_>>());
    }
    assert_eq!(seen.len(), 6);
    assert!(seen.iter().all(|s| s == &["a"]), "{seen:?}");
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let first = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, first);
            out.push(p);
        }
    }
    out
}

#[test]
fn unmeasured_rules_rank_as_one() {
    let corpus = Corpus::new(vec![rule("x", None, true), rule("y", Some(0.9), true), rule("z", Some(1.1), true)])
        .unwrap();
    let all = [m("y", vec![], 0..1), m("x", vec![], 0..1), m("z", vec![], 0..1)];
    assert_eq!(ids(&schedule(&all, &corpus).unwrap().selected), ["z"]);
    assert_eq!(ids(&schedule(&all[..2], &corpus).unwrap().selected), ["x"]);
}

#[test]
fn earlier_window_wins_within_a_rule() {
    let plan = schedule(&[m("R1", vec![], 1..3), m("R1", vec![], 0..2)], &measured_corpus()).unwrap();
    assert_eq!(plan.selected[0].stmt_range, 0..2);
}

#[test]
fn disabled_rules_are_rejected_and_block_nothing() {
    let corpus = Corpus::new(vec![rule("hi", Some(9.0), false), rule("lo", Some(1.0), true)]).unwrap();
    let plan = schedule(&[m("hi", vec![], 0..1), m("lo", vec![], 0..1)], &corpus).unwrap();
    assert_eq!(ids(&plan.selected), ["lo"]);
    assert_eq!(plan.rejected[0].1, RejectReason::Disabled);
}

#[test]
fn nested_windows_conflict_with_enclosing_ones() {
    let plan = schedule(&[m("R2", vec![(0, 1)], 0..1), m("R1", vec![], 0..1)], &measured_corpus()).unwrap();
    assert_eq!(ids(&plan.selected), ["R1"]);
    let plan = schedule(&[m("R2", vec![(1, 1)], 0..1), m("R1", vec![], 0..1)], &measured_corpus()).unwrap();
    assert_eq!(plan.selected.len(), 2);
}

#[test]
fn unknown_rule() {
    let err = schedule(&[m("nope", vec![], 0..1)], &measured_corpus()).unwrap_err();
    assert_eq!(err, ScheduleError::UnknownRule("nope".into()));
}

#[test]
fn empty_input() {
    assert_eq!(schedule(&[], &measured_corpus()).unwrap(), ApplicationPlan::default());
}

#[test]
fn same_start_different_length_is_ordered() {
    let a = m("R1", vec![], 0..2);
    let b = m("R1", vec![], 0..3);
    let one = schedule(&[a.clone(), b.clone()], &measured_corpus()).unwrap();
    let two = schedule(&[b, a], &measured_corpus()).unwrap();
    assert_eq!(one, two);
    assert_eq!(one.selected[0].stmt_range, 0..2);
}
