use std::path::PathBuf;

use chrono::TimeZone;

use super::*;
use crate::rule::Code;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn copy(dir: &Path, names: &[(&str, &str)]) {
    for (src, dst) in names {
        fs::copy(fixtures().join(src), dir.join(dst)).unwrap();
    }
}

const FOUR: [(&str, &str); 4] = [
    ("rules/drop_to_pop.rule", "drop_to_pop.rule"),
    ("rules/rename_inplace.rule", "r1.rule"),
    ("rules/list_select_loc.rule", "r2.rule"),
    ("rules/chained_slice_iloc.rule", "r3.rule"),
];

#[test]
fn loads_in_file_name_order() {
    let dir = tempfile::tempdir().unwrap();
    copy(dir.path(), &FOUR);
    fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
    let corpus = load_corpus(dir.path()).unwrap();
    let ids: Vec<&str> = corpus.rules().iter().map(|r| r.id()).collect();
    assert_eq!(ids, ["drop-to-pop", "rename-inplace", "list-select-loc", "chained-slice-iloc"]);
    assert!(corpus.warnings().is_empty());
    assert_eq!(corpus.source_dir(), Some(dir.path()));
    assert_eq!(corpus.get("list-select-loc").unwrap().meta.avg_speedup, Some(1.32));
}

#[test]
fn empty_directory() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = load_corpus(dir.path()).unwrap();
    assert!(corpus.is_empty());
}

#[test]
fn missing_directory_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(load_corpus(&dir.path().join("nope")), Err(CorpusError::Io { .. })));
}

#[test]
fn duplicate_ids() {
    let dir = tempfile::tempdir().unwrap();
    copy(dir.path(), &[("rules/drop_to_pop.rule", "a.rule"), ("rules/drop_to_pop.rule", "b.rule")]);
    match load_corpus(dir.path()) {
        Err(CorpusError::DuplicateRuleId { id, first, second }) => {
            assert_eq!(id, "drop-to-pop");
            assert!(first.ends_with("a.rule") && second.ends_with("b.rule"));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn invalid_files_are_skipped_with_warnings() {
    let dir = tempfile::tempdir().unwrap();
    copy(dir.path(), &[("rules/drop_to_pop.rule", "a.rule"), ("invalid/hallucinated_kinds.rule", "b.rule")]);
    let corpus = load_corpus(dir.path()).unwrap();
    assert_eq!(corpus.len(), 1);
    assert_eq!(corpus.warnings().len(), 1);
    assert!(corpus.warnings()[0].path.ends_with("b.rule"));
    assert!(corpus.warnings()[0].diagnostics.iter().any(|d| d.code == Code::UnknownKind));
}

fn ts(secs: i64) -> DateTime<FixedOffset> {
    Utc.timestamp_opt(1_700_000_000 + secs, 0).unwrap().fixed_offset()
}

fn two_rules() -> Corpus {
    let dir = tempfile::tempdir().unwrap();
    copy(dir.path(), &FOUR[..2]);
    load_corpus(dir.path()).unwrap()
}

#[test]
fn record_and_round_trip() {
    let corpus = two_rules();
    let mut log = HitLog::new();
    for i in 0..3 {
        record_hit_at(&mut log, &corpus, "drop-to-pop", "nb1", 4, ts(i)).unwrap();
    }
    record_hit(&mut log, &corpus, "rename-inplace", "nb2", 0).unwrap();
    assert_eq!(log.len(), 4);
    assert!(matches!(
        record_hit(&mut log, &corpus, "nope", "nb", 0),
        Err(CorpusError::UnknownRule(id)) if id == "nope"
    ));
    assert_eq!(log.len(), 4);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hits.tsv");
    HitLog::append_to(&path, &log.events()[..1]).unwrap();
    HitLog::append_to(&path, &log.events()[1..]).unwrap();
    let back = HitLog::read(&path).unwrap();
    let strip = |l: &HitLog| l.events().iter().map(HitEvent::to_line).collect::<Vec<_>>();
    assert_eq!(strip(&back), strip(&log));
    assert_eq!(
        fs::read_to_string(&path).unwrap().lines().next().unwrap(),
        "drop-to-pop\tnb1\t4\t2023-11-14T22:13:20.000Z"
    );
}

#[test]
fn malformed_lines_are_located() {
    let good = "r\tnb\t0\t2024-01-01T00:00:00Z";
    for (bad, needle) in [
        ("r\tnb\t0", "4 tab-separated"),
        ("r\tnb\tx\t2024-01-01T00:00:00Z", "cell index"),
        ("r\tnb\t-1\t2024-01-01T00:00:00Z", "cell index"),
        ("r\tnb\t0\tyesterday", "ISO-8601"),
        ("\tnb\t0\t2024-01-01T00:00:00Z", "rule id"),
        ("r\tnb\t0\t2024-01-01T00:00:00Z\textra", "4 tab-separated"),
    ] {
        let text = format!("{good}\n{good}\n{bad}\n");
        match HitLog::parse(&text) {
            Err(HitLogError::Malformed { line, message }) => {
                assert_eq!(line, 3, "{bad}");
                assert!(message.contains(needle), "{message}");
            }
            other => panic!("{bad}: {other:?}"),
        }
    }
    assert_eq!(HitLog::parse(&format!("{good}\n\n{good}\n")).unwrap().len(), 2);
    assert!(HitLog::parse("").unwrap().is_empty());
}

fn event(rule: &str, nb: &str) -> HitEvent {
    HitEvent { rule_id: rule.into(), notebook_id: nb.into(), cell_index: 0, timestamp: ts(0) }
}

#[test]
fn report_counts() {
    let log = HitLog {
        events: vec![event("a", "n1"), event("a", "n1"), event("a", "n2"), event("b", "n2"), event("c", "n3")],
    };
    let r = report(&log);
    assert_eq!(r.total, 5);
    assert_eq!(r.rules[0], RuleHits { rule_id: "a".into(), applications: 3, notebooks: 2 });
    assert_eq!(r.rules[1], RuleHits { rule_id: "b".into(), applications: 1, notebooks: 1 });
    assert_eq!(r.notebooks[0], NotebookHits { notebook_id: "n1".into(), applications: 2, rules: 1 });
    assert_eq!(r.notebooks[1], NotebookHits { notebook_id: "n2".into(), applications: 2, rules: 2 });
}

#[test]
fn one_rule_across_many_notebooks() {
    let log = HitLog { events: (0..72).map(|i| event("popular", &format!("nb{i:03}"))).collect() };
    let r = report(&log);
    assert_eq!(r.rules[0].notebooks, 72);
    assert_eq!(r.notebooks.len(), 72);
}

#[test]
fn empty_report() {
    let r = report(&HitLog::new());
    assert_eq!(r, HitReport::default());
    assert_eq!(r.to_tsv(), "rule_id\tapplications\tnotebooks\n\nnotebook_id\tapplications\trules\n");
}

#[test]
fn tsv_and_pretty() {
    let log = HitLog { events: vec![event("drop-to-pop", "n1"), event("drop-to-pop", "n2")] };
    let r = report(&log);
    assert_eq!(
        r.to_tsv(),
        "rule_id\tapplications\tnotebooks\ndrop-to-pop\t2\t2\n\nnotebook_id\tapplications\trules\nn1\t1\t1\nn2\t1\t1\n"
    );
    let pretty = r.to_pretty();
    assert!(pretty.starts_with("Rule-wise hits\nrule_id      applications  notebooks\ndrop-to-pop             2          2\n"));
    assert!(pretty.ends_with("total applications: 2\n"));
}
