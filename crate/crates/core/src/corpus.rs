//! Rule directories, the hit log, and hit statistics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use chrono::{DateTime, FixedOffset, SecondsFormat, Utc};
use thiserror::Error;

use crate::rule::{check_rule, Diagnostic, Rule};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("rule id '{id}' is defined by both {} and {}", first.display(), second.display())]
    DuplicateRuleId { id: String, first: PathBuf, second: PathBuf },
    #[error("rule '{0}' is not in the corpus")]
    UnknownRule(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// A rule file that was skipped because it has diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadWarning {
    pub path: PathBuf,
    pub diagnostics: Vec<Diagnostic>,
}

/// An ordered set of rules with unique ids.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    rules: Vec<Rule>,
    files: Vec<PathBuf>,
    source_dir: Option<PathBuf>,
    warnings: Vec<LoadWarning>,
}

impl Corpus {
    /// Builds a corpus from rules already in memory.
    pub fn new(rules: Vec<Rule>) -> Result<Self, CorpusError> {
        let files = rules.iter().map(|r| PathBuf::from(format!("<{}>", r.meta.id))).collect();
        let corpus = Corpus { rules, files, source_dir: None, warnings: Vec::new() };
        corpus.check_unique()?;
        Ok(corpus)
    }

    fn check_unique(&self) -> Result<(), CorpusError> {
        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, r) in self.rules.iter().enumerate() {
            if let Some(&j) = seen.get(r.meta.id.as_str()) {
                return Err(CorpusError::DuplicateRuleId {
                    id: r.meta.id.clone(),
                    first: self.files[j].clone(),
                    second: self.files[i].clone(),
                });
            }
            seen.insert(&r.meta.id, i);
        }
        Ok(())
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn get(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.meta.id == id)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn source_dir(&self) -> Option<&Path> {
        self.source_dir.as_deref()
    }

    /// Files skipped during [`load_corpus`].
    pub fn warnings(&self) -> &[LoadWarning] {
        &self.warnings
    }
}

/// Loads every `*.rule` file in `dir`, in file name order. Files that fail
/// to parse or validate are skipped and reported through
/// [`Corpus::warnings`].
pub fn load_corpus(dir: &Path) -> Result<Corpus, CorpusError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CorpusError::Io { path, source }
    };
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if path.extension().is_some_and(|e| e == "rule") && path.is_file() {
            paths.push(path);
        }
    }
    paths.sort_by(|a, b| a.file_name().cmp(&b.file_name()));

    let mut corpus = Corpus { source_dir: Some(dir.to_path_buf()), ..Corpus::default() };
    for path in paths {
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        match check_rule(&text) {
            Ok(rule) => {
                corpus.rules.push(rule);
                corpus.files.push(path);
            }
            Err(diagnostics) => corpus.warnings.push(LoadWarning { path, diagnostics }),
        }
    }
    corpus.check_unique()?;
    Ok(corpus)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HitEvent {
    pub rule_id: String,
    pub notebook_id: String,
    pub cell_index: usize,
    pub timestamp: DateTime<FixedOffset>,
}

impl HitEvent {
    /// The log line for this event, without the newline.
    pub fn to_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}",
            self.rule_id,
            self.notebook_id,
            self.cell_index,
            self.timestamp.to_rfc3339_opts(SecondsFormat::Millis, true)
        )
    }

    pub fn parse_line(line: &str) -> Result<HitEvent, String> {
        let fields: Vec<&str> = line.split('\t').collect();
        let [rule_id, notebook_id, cell_index, timestamp] = fields[..] else {
            return Err(format!("expected 4 tab-separated fields, found {}", fields.len()));
        };
        if rule_id.is_empty() {
            return Err("empty rule id".into());
        }
        if notebook_id.is_empty() {
            return Err("empty notebook id".into());
        }
        let cell_index = cell_index.parse().map_err(|_| format!("cell index '{cell_index}' is not a number"))?;
        let timestamp = DateTime::parse_from_rfc3339(timestamp)
            .map_err(|e| format!("timestamp '{timestamp}' is not ISO-8601: {e}"))?;
        Ok(HitEvent { rule_id: rule_id.into(), notebook_id: notebook_id.into(), cell_index, timestamp })
    }
}

#[derive(Debug, Error)]
pub enum HitLogError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// Append-only list of rule applications.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HitLog {
    events: Vec<HitEvent>,
}

impl HitLog {
    pub fn new() -> Self {
        HitLog::default()
    }

    pub fn events(&self) -> &[HitEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn parse(text: &str) -> Result<HitLog, HitLogError> {
        let mut events = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let event = HitEvent::parse_line(line).map_err(|message| HitLogError::Malformed { line: i + 1, message })?;
            events.push(event);
        }
        Ok(HitLog { events })
    }

    pub fn read(path: &Path) -> Result<HitLog, HitLogError> {
        let text = fs::read_to_string(path).map_err(|source| HitLogError::Io { path: path.to_path_buf(), source })?;
        HitLog::parse(&text)
    }

    /// Appends `events` to the file at `path`, one line each.
    pub fn append_to(path: &Path, events: &[HitEvent]) -> io::Result<()> {
        let mut text = String::new();
        for e in events {
            text.push_str(&e.to_line());
            text.push('\n');
        }
        let mut file = fs::OpenOptions::new().create(true).append(true).open(path)?;
        file.write_all(text.as_bytes())?;
        file.flush()
    }
}

/// Appends one event stamped with the current time.
pub fn record_hit(
    log: &mut HitLog,
    corpus: &Corpus,
    rule_id: &str,
    notebook_id: &str,
    cell_index: usize,
) -> Result<(), CorpusError> {
    record_hit_at(log, corpus, rule_id, notebook_id, cell_index, Utc::now().fixed_offset())
}

pub fn record_hit_at(
    log: &mut HitLog,
    corpus: &Corpus,
    rule_id: &str,
    notebook_id: &str,
    cell_index: usize,
    timestamp: DateTime<FixedOffset>,
) -> Result<(), CorpusError> {
    if corpus.get(rule_id).is_none() {
        return Err(CorpusError::UnknownRule(rule_id.into()));
    }
    log.events.push(HitEvent { rule_id: rule_id.into(), notebook_id: notebook_id.into(), cell_index, timestamp });
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleHits {
    pub rule_id: String,
    pub applications: usize,
    pub notebooks: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotebookHits {
    pub notebook_id: String,
    pub applications: usize,
    pub rules: usize,
}

/// Rule-wise and notebook-wise counts, each sorted by applications
/// (descending) then id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HitReport {
    pub rules: Vec<RuleHits>,
    pub notebooks: Vec<NotebookHits>,
    pub total: usize,
}

pub fn report(log: &HitLog) -> HitReport {
    let mut by_rule: BTreeMap<&str, (usize, BTreeSet<&str>)> = BTreeMap::new();
    let mut by_notebook: BTreeMap<&str, (usize, BTreeSet<&str>)> = BTreeMap::new();
    for e in &log.events {
        let r = by_rule.entry(&e.rule_id).or_default();
        r.0 += 1;
        r.1.insert(&e.notebook_id);
        let n = by_notebook.entry(&e.notebook_id).or_default();
        n.0 += 1;
        n.1.insert(&e.rule_id);
    }
    let mut rules: Vec<RuleHits> = by_rule
        .into_iter()
        .map(|(id, (applications, nbs))| RuleHits { rule_id: id.into(), applications, notebooks: nbs.len() })
        .collect();
    rules.sort_by(|a, b| b.applications.cmp(&a.applications).then_with(|| a.rule_id.cmp(&b.rule_id)));
    let mut notebooks: Vec<NotebookHits> = by_notebook
        .into_iter()
        .map(|(id, (applications, rs))| NotebookHits { notebook_id: id.into(), applications, rules: rs.len() })
        .collect();
    notebooks.sort_by(|a, b| b.applications.cmp(&a.applications).then_with(|| a.notebook_id.cmp(&b.notebook_id)));
    HitReport { rules, notebooks, total: log.events.len() }
}

const RULE_HEADER: [&str; 3] = ["rule_id", "applications", "notebooks"];
const NOTEBOOK_HEADER: [&str; 3] = ["notebook_id", "applications", "rules"];

/// Title, header and rows of one report section.
type Section = (&'static str, [&'static str; 3], Vec<[String; 3]>);

impl HitReport {
    fn tables(&self) -> [Section; 2] {
        let rules = self.rules.iter().map(|r| [r.rule_id.clone(), r.applications.to_string(), r.notebooks.to_string()]);
        let nbs =
            self.notebooks.iter().map(|n| [n.notebook_id.clone(), n.applications.to_string(), n.rules.to_string()]);
        [("Rule-wise hits", RULE_HEADER, rules.collect()), ("Notebook-wise hits", NOTEBOOK_HEADER, nbs.collect())]
    }

    /// Two tab-separated tables separated by a blank line.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (i, (_, header, rows)) in self.tables().into_iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&header.join("\t"));
            out.push('\n');
            for row in rows {
                out.push_str(&row.join("\t"));
                out.push('\n');
            }
        }
        out
    }

    /// Titled, column-aligned tables.
    pub fn to_pretty(&self) -> String {
        let mut out = String::new();
        for (i, (title, header, rows)) in self.tables().into_iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let mut widths = header.map(str::len);
            for row in &rows {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.chars().count());
                }
            }
            let _ = writeln!(out, "{title}");
            let _ = writeln!(out, "{:<w0$}  {:>w1$}  {:>w2$}", header[0], header[1], header[2], w0 = widths[0], w1 = widths[1], w2 = widths[2]);
            for row in rows {
                let _ = writeln!(out, "{:<w0$}  {:>w1$}  {:>w2$}", row[0], row[1], row[2], w0 = widths[0], w1 = widths[1], w2 = widths[2]);
            }
        }
        let _ = writeln!(out, "\ntotal applications: {}", self.total);
        out
    }
}

#[cfg(test)]
mod tests;
