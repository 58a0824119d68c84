mod common;

use std::fs;

use common::*;
use dfrewrite::{parse_source, HitLog};

const GOLDEN_OUT: &str = "import pandas\nif isinstance(df, pandas.DataFrame) and 'Date' in df.columns:\n    df.pop('Date')\nelse:\n    df = df.drop(['Date'], axis=1)\n";

#[test]
fn rewrite_script_golden() {
    let rules = rules_dir(&["drop_to_pop"]);
    let work = tempfile::tempdir().unwrap();
    let input = work.path().join("nb.py");
    let output = work.path().join("out.py");
    fs::write(&input, "df = df.drop(['Date'], axis=1)\n").unwrap();
    let r = rewrite(rules.path(), &input, &output, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(fs::read_to_string(&output).unwrap(), GOLDEN_OUT);
    assert_eq!(r.stdout, "cell 0: 1 application (drop-to-pop)\ntotal: 1 application\n");
    assert_eq!(r.stderr, "");
}

#[test]
fn no_matches_reports_zero() {
    let rules = rules_dir(&["drop_to_pop", "rename_inplace"]);
    let work = tempfile::tempdir().unwrap();
    let input = work.path().join("a.py");
    let output = work.path().join("b.py");
    fs::write(&input, "x = 1\nprint(x)\n").unwrap();
    let r = rewrite(rules.path(), &input, &output, &[]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout, "cell 0: 0 applications\ntotal: 0 applications\n");
    assert_eq!(fs::read_to_string(&output).unwrap(), "x = 1\nprint(x)\n");
}

#[test]
fn notebook_cells_are_rewritten_independently() {
    let rules = rules_dir(&["drop_to_pop"]);
    let work = tempfile::tempdir().unwrap();
    let input = work.path().join("three.ipynb");
    let output = work.path().join("three.out.ipynb");
    let log = work.path().join("hits.tsv");
    let cells = [
        "df = df.drop(['a'], axis=1)\n",
        "import pandas as pd\nx = 1\n",
        "df = df.drop(['b'], axis=1)\ndf = df.drop(['c'], axis=1)\n",
    ];
    fs::write(&input, notebook(&cells, true)).unwrap();
    let r = rewrite(rules.path(), &input, &output, &["--hit-log", log.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(
        r.stdout,
        "cell 1: 1 application (drop-to-pop)\ncell 3: 0 applications\ncell 5: 2 applications (drop-to-pop, drop-to-pop)\ntotal: 3 applications\n"
    );
    let text = fs::read_to_string(&output).unwrap();
    let out = code_cells(&text);
    assert_eq!(out.len(), 3);
    // Each rewritten cell gets its own import; the untouched one is unchanged.
    assert!(out[0].starts_with("import pandas\nif "));
    assert_eq!(parse_source(&out[1]).unwrap(), parse_source(cells[1]).unwrap());
    assert!(out[2].starts_with("import pandas\nif "));
    assert!(!out[2].ends_with('\n'));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["cells"][0]["cell_type"], "markdown");
    assert_eq!(v["nbformat"], 4);

    let hits = HitLog::read(&log).unwrap();
    let cells_hit: Vec<(String, usize)> = hits.events().iter().map(|e| (e.notebook_id.clone(), e.cell_index)).collect();
    assert_eq!(cells_hit, [("three".into(), 1), ("three".into(), 5), ("three".into(), 5)]);
}

#[test]
fn hit_log_appends_across_runs() {
    let rules = rules_dir(&["drop_to_pop"]);
    let work = tempfile::tempdir().unwrap();
    let input = work.path().join("s.py");
    let output = work.path().join("o.py");
    let log = work.path().join("hits.tsv");
    fs::write(&input, "df = df.drop(['a'], axis=1)\n").unwrap();
    for id in ["first", "second"] {
        let r = rewrite(rules.path(), &input, &output, &["--hit-log", log.to_str().unwrap(), "--notebook-id", id]);
        assert_eq!(r.code, 0);
    }
    let lines: Vec<String> = fs::read_to_string(&log).unwrap().lines().map(String::from).collect();
    assert_eq!(lines.len(), 2);
    for (line, id) in lines.iter().zip(["first", "second"]) {
        let parts: Vec<&str> = line.split('\t').collect();
        assert_eq!(&parts[..3], ["drop-to-pop", id, "0"]);
        assert!(parts[3].ends_with('Z') && parts[3].len() == 24, "{}", parts[3]);
    }

    let tsv = run(&[&"report", &"--format", &"tsv", &log]);
    assert_eq!(tsv.code, 0);
    assert_eq!(
        tsv.stdout,
        "rule_id\tapplications\tnotebooks\ndrop-to-pop\t2\t2\n\nnotebook_id\tapplications\trules\nfirst\t1\t1\nsecond\t1\t1\n"
    );
    let pretty = run(&[&"report", &log]);
    assert_eq!(pretty.code, 0);
    assert!(pretty.stdout.contains("total applications: 2"));
}

#[test]
fn report_on_empty_log_prints_headers() {
    let work = tempfile::tempdir().unwrap();
    let log = work.path().join("empty.tsv");
    fs::write(&log, "").unwrap();
    let r = run(&[&"report", &"--format", &"tsv", &log]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout, "rule_id\tapplications\tnotebooks\n\nnotebook_id\tapplications\trules\n");
}

#[test]
fn report_on_malformed_log_names_the_line() {
    let work = tempfile::tempdir().unwrap();
    let log = work.path().join("bad.tsv");
    fs::write(&log, "r\tnb\t0\t2024-01-01T00:00:00.000Z\nr\tnb\tzero\t2024-01-01T00:00:00.000Z\n").unwrap();
    let r = run(&[&"report", &log]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("line 2"), "{}", r.stderr);
    assert_eq!(r.stdout, "");
    assert_eq!(run(&[&"report", &work.path().join("missing.tsv")]).code, 1);
}

#[test]
fn check_rule_exit_codes() {
    for path in rule_files("rules") {
        let r = run(&[&"check-rule", &path]);
        assert_eq!(r.code, 0, "{}: {}", path.display(), r.stdout);
        assert!(r.stdout.starts_with("OK "));
    }
    for path in rule_files("invalid") {
        let r = run(&[&"check-rule", &path]);
        assert_eq!(r.code, 2, "{}", path.display());
        for line in r.stdout.lines() {
            assert_eq!(line.split('\t').count(), 3, "{line}");
        }
    }
    let r = run(&[&"check-rule", &fixtures().join("invalid/hallucinated_kinds.rule")]);
    assert!(r.stdout.lines().any(|l| l.starts_with("UNKNOWN_KIND\tLHS\t")));
    assert_eq!(run(&[&"check-rule", &"/no/such/file.rule"]).code, 1);
}

#[test]
fn advisories_go_to_stderr() {
    let r = run(&[&"check-rule", &fixtures().join("rules/shape_to_len.rule")]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout, "OK shape-to-len\n");
    assert!(r.stderr.lines().all(|l| l.starts_with("advice: ")));
    assert!(r.stderr.contains("ATTRIBUTE_CHECK_PRECONDITION"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&[]).code, 1);
    assert_eq!(run(&[&"frobnicate"]).code, 1);
    assert_eq!(run(&[&"report", &"--format", &"xml", &"x"]).code, 1);
    let help = run(&[&"--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("check-rule"));
}

#[test]
fn rules_directory_from_environment() {
    let rules = rules_dir(&["drop_to_pop"]);
    let work = tempfile::tempdir().unwrap();
    let input = work.path().join("s.py");
    let output = work.path().join("o.py");
    fs::write(&input, "df = df.drop(['Date'], axis=1)\n").unwrap();
    let r: Run = bin()
        .env(dfrewrite::cli::RULES_ENV, rules.path())
        .args(["rewrite".as_ref(), input.as_os_str(), "-o".as_ref(), output.as_os_str()])
        .output()
        .unwrap()
        .into();
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(fs::read_to_string(&output).unwrap(), GOLDEN_OUT);
    let missing = run(&[&"rewrite", &input, &"-o", &output]);
    assert_eq!(missing.code, 1);
}

#[test]
fn invalid_rules_are_skipped_with_a_warning() {
    let rules = rules_dir(&["drop_to_pop"]);
    fs::copy(fixtures().join("invalid/unbound_variable.rule"), rules.path().join("zz.rule")).unwrap();
    let work = tempfile::tempdir().unwrap();
    let input = work.path().join("s.py");
    let output = work.path().join("o.py");
    fs::write(&input, "df = df.drop(['Date'], axis=1)\n").unwrap();
    let r = rewrite(rules.path(), &input, &output, &[]);
    assert_eq!(r.code, 0);
    assert!(r.stderr.starts_with("warning: skipping "), "{}", r.stderr);
    assert!(r.stderr.contains("UNBOUND_VARIABLE"));
    assert_eq!(fs::read_to_string(&output).unwrap(), GOLDEN_OUT);
}

#[test]
fn input_failures_exit_one_and_write_nothing() {
    let rules = rules_dir(&["drop_to_pop"]);
    let work = tempfile::tempdir().unwrap();
    let output = work.path().join("o.ipynb");
    let cases = [
        ("syntax.py", "df = = 1\n".to_string()),
        ("magic.ipynb", notebook(&["df = df.drop(['a'], axis=1)\n", "%matplotlib inline\n"], false)),
        ("broken.ipynb", "{\"cells\": [".to_string()),
    ];
    for (name, text) in cases {
        let input = work.path().join(name);
        fs::write(&input, text).unwrap();
        let r = rewrite(rules.path(), &input, &output, &[]);
        assert_eq!(r.code, 1, "{name}");
        assert!(r.stderr.starts_with("error: "), "{name}: {}", r.stderr);
        assert!(!output.exists(), "{name}");
    }
    let r = rewrite(rules.path(), &work.path().join("absent.py"), &output, &[]);
    assert_eq!(r.code, 1);
    let r = rewrite(&work.path().join("no-rules"), &work.path().join("syntax.py"), &output, &[]);
    assert_eq!(r.code, 1);
}

#[test]
fn output_is_deterministic() {
    let rules = rules_dir(&["drop_to_pop", "rename_inplace", "list_select_loc", "missing_count_head"]);
    let work = tempfile::tempdir().unwrap();
    let input = work.path().join("nb.ipynb");
    let cells = [
        "df = df.drop(['a'], axis=1)\ndf = df.rename(columns=m)\n",
        "m = df.isnull().sum()\nout = m[0:10]\n",
        "for c in cols:\n    df = df.drop([c], axis=1)\n",
    ];
    fs::write(&input, notebook(&cells, false)).unwrap();
    let mut outputs = Vec::new();
    for i in 0..3 {
        let output = work.path().join(format!("o{i}.ipynb"));
        let r = rewrite(rules.path(), &input, &output, &[]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        outputs.push((fs::read(&output).unwrap(), r.stdout));
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}
