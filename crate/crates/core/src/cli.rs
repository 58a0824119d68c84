//! The `dfrewrite` command line.
//!
//! Exit codes: 0 success, 1 I/O or parse failure, 2 rule validation failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::Utc;
use clap::{Parser, Subcommand, ValueEnum};

use crate::corpus::{load_corpus, report, HitEvent, HitLog, HitLogError};
use crate::notebook::{CellDocument, Format};
use crate::rewriter::{rewrite_cell, Application};
use crate::rule::{advise_rule, check_rule};
use crate::syntax::{parse_source, print_source};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

/// Environment variable naming the default rules directory.
pub const RULES_ENV: &str = "RULEFLOW_RULES";

#[derive(Debug, Parser)]
#[command(name = "dfrewrite", version, about = "Apply pandas rewrite rules to scripts and notebooks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rewrite a `.py` script or `.ipynb` notebook.
    Rewrite {
        /// Directory of `*.rule` files.
        #[arg(long, env = RULES_ENV)]
        rules: PathBuf,
        /// Append one line per application to this file.
        #[arg(long)]
        hit_log: Option<PathBuf>,
        /// Notebook id recorded in the hit log. Defaults to the input's file stem.
        #[arg(long)]
        notebook_id: Option<String>,
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Parse and validate one rule file.
    CheckRule { file: PathBuf },
    /// Summarize a hit log.
    Report {
        #[arg(long, value_enum, default_value_t = ReportFormat::Pretty)]
        format: ReportFormat,
        log: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Tsv,
    Pretty,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_FAILURE;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    let result = match cli.command {
        Command::Rewrite { rules, hit_log, notebook_id, input, output } => {
            cmd_rewrite(&input, &rules, &output, hit_log.as_deref(), notebook_id.as_deref(), out, err)
        }
        Command::CheckRule { file } => cmd_check_rule(&file, out, err),
        Command::Report { format, log } => cmd_report(&log, format, out),
    };
    match result {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_FAILURE
        }
    }
}

type CmdResult = Result<i32, String>;

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn cmd_rewrite(
    input: &Path,
    rules_dir: &Path,
    output: &Path,
    hit_log: Option<&Path>,
    notebook_id: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let corpus = load_corpus(rules_dir).map_err(|e| e.to_string())?;
    for w in corpus.warnings() {
        for d in &w.diagnostics {
            let _ = writeln!(err, "warning: skipping {}: {d}", w.path.display());
        }
    }

    let text = read(input)?;
    let notebook_id = match notebook_id {
        Some(id) => id.to_string(),
        None => input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "-".into()),
    };
    let doc = CellDocument::parse(Format::of(input), notebook_id, &text)
        .map_err(|e| format!("{}: {e}", input.display()))?;

    let mut parsed = Vec::with_capacity(doc.cells.len());
    for cell in &doc.cells {
        let stmts = parse_source(&cell.source)
            .map_err(|e| format!("{}: cell {}: {e}", input.display(), cell.index))?;
        parsed.push(stmts);
    }

    let mut sources = Vec::with_capacity(parsed.len());
    let mut per_cell: Vec<(usize, Vec<Application>)> = Vec::new();
    for (cell, stmts) in doc.cells.iter().zip(&parsed) {
        let rewritten = rewrite_cell(stmts, &corpus);
        sources.push(print_source(&rewritten.cell));
        per_cell.push((cell.index, rewritten.applications));
    }

    fs::write(output, doc.render(&sources)).map_err(|e| format!("{}: {e}", output.display()))?;

    if let Some(log) = hit_log {
        let now = Utc::now().fixed_offset();
        let events: Vec<HitEvent> = per_cell
            .iter()
            .flat_map(|(index, apps)| {
                apps.iter().map(|a| HitEvent {
                    rule_id: a.rule_id.clone(),
                    notebook_id: doc.notebook_id.clone(),
                    cell_index: *index,
                    timestamp: now,
                })
            })
            .collect();
        HitLog::append_to(log, &events).map_err(|e| format!("{}: {e}", log.display()))?;
    }

    let mut total = 0;
    for (index, apps) in &per_cell {
        total += apps.len();
        let ids: Vec<&str> = apps.iter().map(|a| a.rule_id.as_str()).collect();
        if ids.is_empty() {
            let _ = writeln!(out, "cell {index}: 0 applications");
        } else {
            let _ = writeln!(out, "cell {index}: {} ({})", plural(apps.len()), ids.join(", "));
        }
    }
    let _ = writeln!(out, "total: {}", plural(total));
    Ok(EXIT_OK)
}

fn plural(n: usize) -> String {
    if n == 1 {
        "1 application".into()
    } else {
        format!("{n} applications")
    }
}

pub fn cmd_check_rule(file: &Path, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let text = read(file)?;
    match check_rule(&text) {
        Ok(rule) => {
            for d in advise_rule(&rule) {
                let _ = writeln!(err, "advice: {d}");
            }
            let _ = writeln!(out, "OK {}", rule.meta.id);
            Ok(EXIT_OK)
        }
        Err(diags) => {
            for d in diags {
                let _ = writeln!(out, "{d}");
            }
            Ok(EXIT_INVALID)
        }
    }
}

pub fn cmd_report(log: &Path, format: ReportFormat, out: &mut dyn Write) -> CmdResult {
    let log = HitLog::read(log).map_err(|e| match e {
        HitLogError::Malformed { .. } => format!("{}: {e}", log.display()),
        HitLogError::Io { .. } => e.to_string(),
    })?;
    let r = report(&log);
    let text = match format {
        ReportFormat::Tsv => r.to_tsv(),
        ReportFormat::Pretty => r.to_pretty(),
    };
    let _ = out.write_all(text.as_bytes());
    Ok(EXIT_OK)
}
