//! Python bindings for the rule engine.
//!
//! The module exposes rule checking, in-memory rewriting against a loaded
//! corpus, hit-log reports, and the command line itself (with its exit
//! codes), which is what the Python-side tooling drives.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use dfrewrite::rule::advise_rule;
use dfrewrite::{cli, load_corpus, parse_source, print_source, report, rewrite_cell, Diagnostic, HitLog};

/// `(code, section, message)`.
type Diag = (String, String, String);

type CheckResult = (Option<String>, Vec<Diag>, Vec<Diag>);

fn triple(d: &Diagnostic) -> Diag {
    (d.code.to_string(), d.section.to_string(), d.message.clone())
}

/// Outcome of checking one rule file's text.
pub struct Checked {
    pub rule_id: Option<String>,
    pub errors: Vec<Diag>,
    pub advice: Vec<Diag>,
}

pub fn check_text(text: &str) -> Checked {
    match dfrewrite::check_rule(text) {
        Ok(rule) => Checked {
            rule_id: Some(rule.id().to_string()),
            errors: Vec::new(),
            advice: advise_rule(&rule).iter().map(triple).collect(),
        },
        Err(diags) => Checked { rule_id: None, errors: diags.iter().map(triple).collect(), advice: Vec::new() },
    }
}

/// Rewrites one cell of source text; returns the new text and the ids of
/// the rules applied, in window order.
pub fn rewrite_text(corpus: &dfrewrite::Corpus, source: &str) -> Result<(String, Vec<String>), String> {
    let cell = parse_source(source).map_err(|e| e.to_string())?;
    let out = rewrite_cell(&cell, corpus);
    Ok((print_source(&out.cell), out.applications.into_iter().map(|a| a.rule_id).collect()))
}

/// Runs the command line in-process; returns (exit code, stdout, stderr).
pub fn run_args(args: &[String]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("dfrewrite".to_string()).chain(args.iter().cloned());
    let code = cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&err).into_owned())
}

/// `check_rule(text) -> (rule_id | None, errors, advice)`; each diagnostic is
/// a `(code, section, message)` tuple.
#[pyfunction]
fn check_rule(text: &str) -> CheckResult {
    let c = check_text(text);
    (c.rule_id, c.errors, c.advice)
}

/// The rules of one directory, loaded once.
#[pyclass(name = "Corpus", frozen)]
struct PyCorpus {
    inner: dfrewrite::Corpus,
}

#[pymethods]
impl PyCorpus {
    #[new]
    fn new(rules_dir: PathBuf) -> PyResult<Self> {
        let inner = load_corpus(&rules_dir).map_err(|e| PyOSError::new_err(e.to_string()))?;
        Ok(PyCorpus { inner })
    }

    fn rule_ids(&self) -> Vec<String> {
        self.inner.rules().iter().map(|r| r.id().to_string()).collect()
    }

    /// Files skipped while loading, with their diagnostics.
    fn warnings(&self) -> Vec<(String, Vec<Diag>)> {
        self.inner
            .warnings()
            .iter()
            .map(|w| (w.path.display().to_string(), w.diagnostics.iter().map(triple).collect()))
            .collect()
    }

    /// Rewrites one cell; raises `ValueError` if it does not parse.
    fn rewrite(&self, source: &str) -> PyResult<(String, Vec<String>)> {
        rewrite_text(&self.inner, source).map_err(PyValueError::new_err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Hit-log summary as the TSV the `report` command prints.
#[pyfunction]
fn report_tsv(log_path: PathBuf) -> PyResult<String> {
    let log = HitLog::read(&log_path).map_err(|e| PyOSError::new_err(e.to_string()))?;
    Ok(report(&log).to_tsv())
}

/// Runs `dfrewrite <args>` in-process and returns `(code, stdout, stderr)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String, String) {
    run_args(&args)
}

#[pymodule]
fn dfrewrite_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(check_rule, m)?)?;
    m.add_function(wrap_pyfunction!(report_tsv, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    m.add_class::<PyCorpus>()?;
    m.add("EXIT_OK", cli::EXIT_OK)?;
    m.add("EXIT_FAILURE", cli::EXIT_FAILURE)?;
    m.add("EXIT_INVALID", cli::EXIT_INVALID)?;
    Ok(())
}
