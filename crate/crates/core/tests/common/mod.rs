#![allow(dead_code)]

pub mod gen;
pub mod soundness;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dfrewrite::{parse_rule_file, Rule};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn rule_files(sub: &str) -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(fixtures().join(sub))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "rule"))
        .collect();
    out.sort();
    out
}

pub fn fixture_rule(name: &str) -> Rule {
    let path = fixtures().join("rules").join(format!("{name}.rule"));
    parse_rule_file(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn all_fixture_rules() -> Vec<Rule> {
    rule_files("rules").iter().map(|p| parse_rule_file(&std::fs::read_to_string(p).unwrap()).unwrap()).collect()
}

/// A fresh rules directory holding copies of the named fixtures.
pub fn rules_dir(names: &[&str]) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for n in names {
        let file = format!("{n}.rule");
        std::fs::copy(fixtures().join("rules").join(&file), dir.path().join(&file)).unwrap();
    }
    dir
}

pub fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dfrewrite"));
    cmd.env_remove(dfrewrite::cli::RULES_ENV);
    cmd
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl From<Output> for Run {
    fn from(o: Output) -> Self {
        Run {
            code: o.status.code().expect("terminated by signal"),
            stdout: String::from_utf8(o.stdout).unwrap(),
            stderr: String::from_utf8(o.stderr).unwrap(),
        }
    }
}

pub fn run(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Run {
    bin().args(args.iter().map(|a| a.as_ref())).output().unwrap().into()
}

pub fn rewrite(rules: &Path, input: &Path, output: &Path, extra: &[&str]) -> Run {
    bin()
        .arg("rewrite")
        .arg("--rules")
        .arg(rules)
        .args(extra)
        .arg(input)
        .arg("-o")
        .arg(output)
        .output()
        .unwrap()
        .into()
}

/// A notebook document with the given code cells, each preceded by a
/// markdown cell when `with_markdown` is set.
pub fn notebook(cells: &[&str], with_markdown: bool) -> String {
    let mut list = Vec::new();
    for (i, src) in cells.iter().enumerate() {
        if with_markdown {
            list.push(serde_json::json!({"cell_type": "markdown", "metadata": {}, "source": [format!("## step {i}")]}));
        }
        let lines: Vec<String> = src.split_inclusive('\n').map(String::from).collect();
        list.push(serde_json::json!({
            "cell_type": "code",
            "execution_count": null,
            "metadata": {},
            "outputs": [],
            "source": lines,
        }));
    }
    let doc = serde_json::json!({
        "cells": list,
        "metadata": {"kernelspec": {"name": "python3"}},
        "nbformat": 4,
        "nbformat_minor": 5,
    });
    serde_json::to_string_pretty(&doc).unwrap()
}

/// Code cell sources of a notebook, in order.
pub fn code_cells(text: &str) -> Vec<String> {
    let v: serde_json::Value = serde_json::from_str(text).unwrap();
    v["cells"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["cell_type"] == "code")
        .map(|c| match &c["source"] {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Array(a) => a.iter().map(|l| l.as_str().unwrap()).collect(),
            other => panic!("{other}"),
        })
        .collect()
}
