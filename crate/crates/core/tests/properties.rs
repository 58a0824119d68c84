mod common;

use proptest::prelude::*;

use common::soundness::{self, Outcome};
use common::*;
use dfrewrite::{
    compile_pattern, find_matches, instantiate, parse_source, print_source, rewrite_cell, Corpus, Match, Node, Rule,
    StmtList,
};

/// One concrete instance per fixture rule, keyed by rule id.
const INSTANCES: &[(&str, &str)] = &[
    ("chained-slice-iloc", "a = b[['x', 'y']][0:5]"),
    ("drop-to-pop", "df = df.drop(['Date'], axis=1)"),
    ("groupby-agg-hardcoded", "g = df.groupby('k').agg({'v': 'sum'}).reset_index()"),
    ("groupby-plot-bar", "ax = df.groupby('k')['v'].sum().plot(kind='bar')"),
    ("isnull-any-any", "has_na = df.isnull().values.any()"),
    ("list-select-loc", "sub = df[['a', 'b']]"),
    ("missing-count-head", "mc = df.isnull().sum()\ntop = mc[0:10]"),
    ("rename-columns-listcomp", "df = df.rename(columns={'a': 'b'})"),
    ("rename-inplace", "df = df.rename(columns=mapping)"),
    ("shape-to-len", "n = df.shape[0]"),
    ("slice-iloc-columns", "head = df[cols][0:10]"),
];

fn instance(id: &str) -> &'static str {
    INSTANCES.iter().find(|(i, _)| *i == id).map(|(_, s)| *s).unwrap()
}

/// The statement list a match's context path leads to.
fn block<'a>(cell: &'a StmtList, m: &Match) -> &'a [Node] {
    let mut list: &[Node] = &cell.stmts;
    for &(stmt, child) in &m.context {
        list = &list[stmt].children[child].children;
    }
    list
}

fn sound(cell: &StmtList, rules: &[Rule]) -> Result<(), String> {
    for m in find_matches(cell, rules) {
        let rule = rules.iter().find(|r| r.id() == m.rule_id).unwrap();
        let window = &block(cell, &m)[m.stmt_range.clone()];
        let back = instantiate(&rule.lhs, &m.theta).map_err(|e| e.to_string())?;
        if back.stmts != window {
            return Err(format!("{} at {:?}: {:?} vs {:?}", m.rule_id, m.stmt_range, back, window));
        }
    }
    Ok(())
}

/// Places an instance at a top-level index, or inside a new `if` body.
fn plant(cell: &str, snippet: &str, at: usize, nested: bool) -> String {
    let mut stmts: Vec<String> = parse_source(cell).unwrap().stmts.iter().map(|s| print_source(&StmtList::new(vec![s.clone()]))).collect();
    let text = if nested {
        let body: String = snippet.lines().map(|l| format!("    {l}\n")).collect();
        format!("if flag:\n{body}")
    } else {
        format!("{snippet}\n")
    };
    let at = at.min(stmts.len());
    stmts.insert(at, text);
    stmts.concat()
}

fn planted() -> impl Strategy<Value = (String, &'static str)> {
    (gen::cell(), prop::sample::select(INSTANCES.to_vec()), any::<prop::sample::Index>(), any::<bool>())
        .prop_map(|(cell, (id, snippet), at, nested)| {
            let n = parse_source(&cell).unwrap().len();
            (plant(&cell, snippet, at.index(n + 1), nested), id)
        })
}

/// Whether `rule`'s LHS matches its own output on the fixture instance.
fn self_matching(rule: &Rule) -> bool {
    let src = parse_source(instance(rule.id())).unwrap();
    let pattern = compile_pattern(&rule.lhs);
    let theta = pattern.match_window(&src.stmts).unwrap();
    let rhs = instantiate(&rule.rhs, &theta).unwrap();
    (0..rhs.len()).any(|i| pattern.match_window(&rhs.stmts[i..]).is_some())
}

#[test]
fn every_instance_matches_its_rule() {
    let rules = all_fixture_rules();
    assert_eq!(rules.len(), INSTANCES.len());
    for rule in &rules {
        let cell = parse_source(instance(rule.id())).unwrap();
        let found = find_matches(&cell, std::slice::from_ref(rule));
        assert_eq!(found.len(), 1, "{}", rule.id());
        assert_eq!(found[0].stmt_range, 0..cell.len());
        sound(&cell, std::slice::from_ref(rule)).unwrap();
    }
}

#[test]
fn only_the_hardcoded_groupby_rule_matches_its_own_output() {
    let ids: Vec<String> = all_fixture_rules().iter().filter(|r| self_matching(r)).map(|r| r.id().to_string()).collect();
    assert_eq!(ids, ["groupby-agg-hardcoded"]);
}

#[test]
fn rewriting_each_instance_twice_adds_nothing() {
    for rule in all_fixture_rules().into_iter().filter(|r| !self_matching(r)) {
        let corpus = Corpus::new(vec![rule.clone()]).unwrap();
        let cell = parse_source(instance(rule.id())).unwrap();
        let once = rewrite_cell(&cell, &corpus);
        assert_eq!(once.applications.len(), 1, "{}", rule.id());
        let twice = rewrite_cell(&once.cell, &corpus);
        assert!(twice.applications.is_empty(), "{}", rule.id());
        assert_eq!(twice.cell, once.cell);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn matching_recovers_the_substitution(c in soundness::case()) {
        if let Outcome::Fail(msg) = soundness::check(&c) {
            return Err(TestCaseError::fail(msg));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matches_reinstantiate_to_their_windows((src, id) in planted()) {
        let rules = all_fixture_rules();
        let cell = parse_source(&src).unwrap();
        sound(&cell, &rules).map_err(TestCaseError::fail)?;
        prop_assert!(find_matches(&cell, &rules).iter().any(|m| m.rule_id == id), "{} not found in\n{}", id, src);
    }

    #[test]
    fn output_parses_back_and_second_pass_is_quiet((src, id) in planted()) {
        let rules: Vec<Rule> = all_fixture_rules().into_iter().filter(|r| !self_matching(r)).collect();
        let planted_rule_present = rules.iter().any(|r| r.id() == id);
        let corpus = Corpus::new(rules).unwrap();
        let cell = parse_source(&src).unwrap();
        let once = rewrite_cell(&cell, &corpus);
        prop_assert!(once.applications.len() >= usize::from(planted_rule_present));
        let printed = print_source(&once.cell);
        prop_assert_eq!(&parse_source(&printed).unwrap(), &once.cell, "{}", printed);
        let twice = rewrite_cell(&once.cell, &corpus);
        prop_assert!(twice.applications.is_empty(), "{:?}\n{}", twice.applications, printed);
    }

    #[test]
    fn empty_corpus_is_identity(src in gen::cell()) {
        let cell = parse_source(&src).unwrap();
        let out = rewrite_cell(&cell, &Corpus::new(Vec::new()).unwrap());
        prop_assert!(out.applications.is_empty());
        prop_assert_eq!(out.cell, cell);
    }
}
