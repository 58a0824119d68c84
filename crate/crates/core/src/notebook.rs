//! Input documents: a `.py` script (one cell) or a notebook JSON file.

use std::path::Path;

use serde_json::{Map, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("notebook is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("notebook has no 'cells' list")]
    NoCells,
    #[error("cell {0} has a malformed 'source'")]
    BadSource(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Script,
    Notebook,
}

impl Format {
    /// `.ipynb` is a notebook; anything else is a script.
    pub fn of(path: &Path) -> Format {
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("ipynb")) {
            Format::Notebook
        } else {
            Format::Script
        }
    }
}

/// A code cell: its index among all cells and its source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeCell {
    pub index: usize,
    pub source: String,
}

/// The code cells of a document, plus whatever is needed to write it back.
#[derive(Debug, Clone)]
pub struct CellDocument {
    pub notebook_id: String,
    pub format: Format,
    pub cells: Vec<CodeCell>,
    json: Option<Value>,
}

impl CellDocument {
    pub fn from_script(notebook_id: impl Into<String>, source: impl Into<String>) -> Self {
        CellDocument {
            notebook_id: notebook_id.into(),
            format: Format::Script,
            cells: vec![CodeCell { index: 0, source: source.into() }],
            json: None,
        }
    }

    pub fn from_notebook(notebook_id: impl Into<String>, text: &str) -> Result<Self, DocumentError> {
        let json: Value = serde_json::from_str(text)?;
        let cells = json.get("cells").and_then(Value::as_array).ok_or(DocumentError::NoCells)?;
        let mut code = Vec::new();
        for (index, cell) in cells.iter().enumerate() {
            if cell.get("cell_type").and_then(Value::as_str) != Some("code") {
                continue;
            }
            let source = read_source(cell.get("source")).ok_or(DocumentError::BadSource(index))?;
            code.push(CodeCell { index, source });
        }
        Ok(CellDocument { notebook_id: notebook_id.into(), format: Format::Notebook, cells: code, json: Some(json) })
    }

    pub fn parse(format: Format, notebook_id: impl Into<String>, text: &str) -> Result<Self, DocumentError> {
        match format {
            Format::Script => Ok(CellDocument::from_script(notebook_id, text)),
            Format::Notebook => CellDocument::from_notebook(notebook_id, text),
        }
    }

    /// Serializes the document with each code cell's source replaced by the
    /// matching entry of `sources`. Everything else is kept as read.
    pub fn render(&self, sources: &[String]) -> String {
        assert_eq!(sources.len(), self.cells.len(), "one source per code cell");
        let Some(json) = &self.json else {
            return sources.first().cloned().unwrap_or_default();
        };
        let mut json = json.clone();
        let cells = json.get_mut("cells").and_then(Value::as_array_mut).expect("checked on parse");
        for (cell, source) in self.cells.iter().zip(sources) {
            if let Some(obj) = cells[cell.index].as_object_mut() {
                write_source(obj, source);
            }
        }
        let mut out = Vec::new();
        let fmt = serde_json::ser::PrettyFormatter::with_indent(b" ");
        let mut ser = serde_json::Serializer::with_formatter(&mut out, fmt);
        serde::Serialize::serialize(&json, &mut ser).expect("serializing a JSON value cannot fail");
        let mut text = String::from_utf8(out).expect("serde_json writes UTF-8");
        text.push('\n');
        text
    }
}

fn read_source(v: Option<&Value>) -> Option<String> {
    match v? {
        Value::String(s) => Some(s.clone()),
        Value::Array(parts) => parts.iter().map(|p| p.as_str()).collect::<Option<Vec<_>>>().map(|p| p.concat()),
        _ => None,
    }
}

/// Notebook sources conventionally omit the final newline and are stored as
/// a list of lines; a string-valued source stays a string.
fn write_source(cell: &mut Map<String, Value>, source: &str) {
    let text = source.strip_suffix('\n').unwrap_or(source);
    let value = match cell.get("source") {
        Some(Value::String(_)) => Value::String(text.to_string()),
        _ => Value::Array(text.split_inclusive('\n').map(|l| Value::String(l.to_string())).collect()),
    };
    cell.insert("source".into(), value);
}
