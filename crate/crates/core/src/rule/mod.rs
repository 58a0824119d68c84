//! Rewrite rules: the on-disk sectioned format, hole extraction, parsing
//! and validation.
//!
//! ```text
//! == LHS ==
//! @{Name: v1} = @{Name: v1}.drop([@{Const(str): c1}], axis=1)
//! == RHS ==
//! @{v1}.pop(@{c1})
//! == PRE ==
//! isinstance(@{v1}, pandas.DataFrame)
//! @{c1} in @{v1}.columns
//! == META ==
//! id = drop-to-pop
//! avg_speedup = 18.31
//! ```

mod holes;
mod kind;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

pub use holes::{extract_holes, placeholder, placeholder_index, Extracted, HoleDescriptor, HoleError, HoleErrorKind, RESERVED_PREFIX};
pub use kind::{UnknownKind, VarKind};
pub use validate::{advise_rule, validate_rule};

use crate::syntax::{self, print_expr, print_source, Hole, Kind, Node, StmtList};

pub const SECTIONS: [&str; 4] = ["== LHS ==", "== RHS ==", "== PRE ==", "== META =="];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Section {
    File,
    Lhs,
    Rhs,
    Pre,
    Meta,
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Section::File => "FILE",
            Section::Lhs => "LHS",
            Section::Rhs => "RHS",
            Section::Pre => "PRE",
            Section::Meta => "META",
        })
    }
}

/// Machine-readable diagnostic codes, printed by `check-rule`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Code {
    MalformedFile,
    MalformedHole,
    UnknownKind,
    ReservedIdentifier,
    SyntaxError,
    HoleUseInLhs,
    KindInTemplate,
    KindMismatch,
    UnboundVariable,
    InvalidHolePosition,
    EmptyLhs,
    DegenerateRule,
    InvalidMeta,
    PreconditionNotExpression,
    HoleKindPosition,
    LhsEqualsRhs,
    // advisories
    ExpensivePrecondition,
    AttributeCheckPrecondition,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::MalformedFile => "MALFORMED_FILE",
            Code::MalformedHole => "MALFORMED_HOLE",
            Code::UnknownKind => "UNKNOWN_KIND",
            Code::ReservedIdentifier => "RESERVED_IDENTIFIER",
            Code::SyntaxError => "SYNTAX_ERROR",
            Code::HoleUseInLhs => "HOLE_USE_IN_LHS",
            Code::KindInTemplate => "KIND_IN_TEMPLATE",
            Code::KindMismatch => "KIND_MISMATCH",
            Code::UnboundVariable => "UNBOUND_VARIABLE",
            Code::InvalidHolePosition => "INVALID_HOLE_POSITION",
            Code::EmptyLhs => "EMPTY_LHS",
            Code::DegenerateRule => "DEGENERATE_RULE",
            Code::InvalidMeta => "INVALID_META",
            Code::PreconditionNotExpression => "PRECONDITION_NOT_EXPRESSION",
            Code::HoleKindPosition => "HOLE_KIND_POSITION",
            Code::LhsEqualsRhs => "LHS_EQUALS_RHS",
            Code::ExpensivePrecondition => "EXPENSIVE_PRECONDITION",
            Code::AttributeCheckPrecondition => "ATTRIBUTE_CHECK_PRECONDITION",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: Code,
    pub section: Section,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: Code, section: Section, message: impl Into<String>) -> Self {
        Diagnostic { code, section, message: message.into() }
    }
}

/// `CODE<TAB>section<TAB>message`.
impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let message = self.message.replace(['\t', '\n'], " ");
        write!(f, "{}\t{}\t{}", self.code, self.section, message)
    }
}

/// A rule file that could not be parsed; carries every diagnostic found.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{}", .diagnostics.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))]
pub struct RuleError {
    pub diagnostics: Vec<Diagnostic>,
}

impl RuleError {
    fn one(code: Code, section: Section, message: impl Into<String>) -> Self {
        RuleError { diagnostics: vec![Diagnostic::new(code, section, message)] }
    }

    pub fn has(&self, code: Code) -> bool {
        self.diagnostics.iter().any(|d| d.code == code)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleMeta {
    pub id: String,
    /// Absent means "unmeasured"; see [`RuleMeta::priority`].
    pub avg_speedup: Option<f64>,
    pub max_speedup: Option<f64>,
    pub provenance: Option<String>,
    pub enabled: bool,
    /// Unrecognised keys, in file order, values verbatim.
    pub extra: Vec<(String, String)>,
}

impl RuleMeta {
    pub fn new(id: impl Into<String>) -> Self {
        RuleMeta { id: id.into(), avg_speedup: None, max_speedup: None, provenance: None, enabled: true, extra: Vec::new() }
    }

    /// Scheduling priority: the average speedup, 1.0 when unmeasured.
    pub fn priority(&self) -> f64 {
        self.avg_speedup.unwrap_or(1.0)
    }
}

/// A parsed rewrite rule. LHS holes carry their kind; RHS and precondition
/// holes are use occurrences.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub lhs: StmtList,
    pub rhs: StmtList,
    /// One parsed line each. Normally an expression statement; anything
    /// else is reported by [`validate_rule`].
    pub preconditions: Vec<Node>,
    pub meta: RuleMeta,
}

impl Rule {
    pub fn id(&self) -> &str {
        &self.meta.id
    }

    /// Variables bound by the LHS, in order of first occurrence.
    pub fn variables(&self) -> Vec<(String, VarKind)> {
        let mut out: Vec<(String, VarKind)> = Vec::new();
        for node in self.lhs.walk() {
            if let Kind::Hole(Hole { name, kind: Some(kind) }) = &node.kind {
                if !out.iter().any(|(n, _)| n == name) {
                    out.push((name.clone(), *kind));
                }
            }
        }
        out
    }

    pub fn kind_of(&self, name: &str) -> Option<VarKind> {
        self.lhs.walk().find_map(|n| match &n.kind {
            Kind::Hole(Hole { name: hn, kind: Some(k) }) if hn == name => Some(*k),
            _ => None,
        })
    }

    /// The precondition expressions (the values of expression statements).
    pub fn precondition_exprs(&self) -> impl Iterator<Item = &Node> {
        self.preconditions.iter().filter(|p| matches!(p.kind, Kind::Expr)).map(|p| &p.children[0])
    }

    pub fn is_unconditional(&self) -> bool {
        self.preconditions.is_empty()
    }
}

struct SectionText {
    text: String,
    /// 1-based file line of the section's first line.
    first_line: usize,
}

fn split_sections(text: &str) -> Result<Vec<SectionText>, RuleError> {
    let mut sections: Vec<SectionText> = Vec::new();
    let mut current: Option<Vec<&str>> = None;
    let mut first_line = 0;
    for (i, raw_line) in text.split('\n').enumerate() {
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        if line.starts_with("== ") && line.trim_end().ends_with(" ==") {
            let header = line.trim_end();
            let expected = SECTIONS.get(sections.len() + usize::from(current.is_some()));
            if expected != Some(&header) {
                let want = expected.map_or("end of file".to_string(), |h| format!("'{h}'"));
                return Err(RuleError::one(
                    Code::MalformedFile,
                    Section::File,
                    format!("line {}: found '{header}', expected {want}", i + 1),
                ));
            }
            if let Some(lines) = current.take() {
                sections.push(SectionText { text: lines.join("\n"), first_line });
            }
            current = Some(Vec::new());
            first_line = i + 2;
            continue;
        }
        match current.as_mut() {
            Some(lines) => lines.push(line),
            None if line.trim().is_empty() => {}
            None => {
                return Err(RuleError::one(
                    Code::MalformedFile,
                    Section::File,
                    format!("line {}: text before '{}'", i + 1, SECTIONS[0]),
                ))
            }
        }
    }
    if let Some(lines) = current.take() {
        sections.push(SectionText { text: lines.join("\n"), first_line });
    }
    if sections.len() != SECTIONS.len() {
        return Err(RuleError::one(
            Code::MalformedFile,
            Section::File,
            format!("missing section '{}'", SECTIONS[sections.len()]),
        ));
    }
    Ok(sections)
}

/// 1-based (line, column) of a byte offset within a section, in file terms.
fn position(text: &str, offset: usize, first_line: usize) -> (usize, usize) {
    let e = syntax::SyntaxError::at(text, offset, "");
    (e.line + first_line - 1, e.column)
}

struct Parsed {
    stmts: Vec<Node>,
    holes: Vec<HoleDescriptor>,
}

/// Extract holes, parse, and turn placeholders back into hole nodes.
fn parse_section(text: &str, first_line: usize, section: Section, diags: &mut Vec<Diagnostic>) -> Option<Parsed> {
    let extracted = match extract_holes(text) {
        Ok(x) => x,
        Err(errors) => {
            for e in errors {
                let (line, col) = position(text, e.offset, first_line);
                let code = match e.kind {
                    HoleErrorKind::Malformed => Code::MalformedHole,
                    HoleErrorKind::UnknownKind => Code::UnknownKind,
                    HoleErrorKind::Reserved => Code::ReservedIdentifier,
                };
                diags.push(Diagnostic::new(code, section, format!("{} (line {line}, column {col})", e.message)));
            }
            return None;
        }
    };
    let mut stmts = match syntax::parse_source(&extracted.sanitized) {
        Ok(list) => list.stmts,
        Err(e) => {
            let (line, col) = position(text, extracted.original_offset(e.offset), first_line);
            diags.push(Diagnostic::new(Code::SyntaxError, section, format!("{} (line {line}, column {col})", e.message)));
            return None;
        }
    };
    let mut seen = vec![false; extracted.holes.len()];
    for stmt in &mut stmts {
        remark(stmt, &extracted.holes, &mut seen);
    }
    let mut ok = true;
    for (i, h) in extracted.holes.iter().enumerate() {
        if !seen[i] {
            ok = false;
            let (line, col) = position(text, h.start, first_line);
            diags.push(Diagnostic::new(
                Code::InvalidHolePosition,
                section,
                format!(
                    "'{}' is not in an expression position; holes cannot stand for attribute, keyword, parameter or other identifier names, or appear inside literals (line {line}, column {col})",
                    &text[h.start..h.end]
                ),
            ));
        }
    }
    ok.then_some(Parsed { stmts, holes: extracted.holes })
}

fn remark(node: &mut Node, holes: &[HoleDescriptor], seen: &mut [bool]) {
    if let Kind::Name(id) = &node.kind {
        if let Some(i) = placeholder_index(id).filter(|&i| i < holes.len()) {
            seen[i] = true;
            node.kind = Kind::Hole(Hole { name: holes[i].name.clone(), kind: holes[i].kind });
            return;
        }
    }
    for child in &mut node.children {
        remark(child, holes, seen);
    }
}

/// Parses a rule file. Every problem found is reported; the rule is only
/// returned when there are none.
pub fn parse_rule_file(text: &str) -> Result<Rule, RuleError> {
    let sections = split_sections(text)?;
    let mut diags = Vec::new();

    let lhs = parse_section(&sections[0].text, sections[0].first_line, Section::Lhs, &mut diags);
    let mut bound: BTreeMap<String, VarKind> = BTreeMap::new();
    let mut lhs_uses: Vec<String> = Vec::new();
    if let Some(lhs) = &lhs {
        if lhs.stmts.is_empty() {
            diags.push(Diagnostic::new(Code::EmptyLhs, Section::Lhs, "the pattern has no statements"));
        }
        for h in &lhs.holes {
            match h.kind {
                None => {
                    lhs_uses.push(h.name.clone());
                    diags.push(Diagnostic::new(
                        Code::HoleUseInLhs,
                        Section::Lhs,
                        format!("'@{{{}}}' must be written in binding form '@{{Kind: {}}}' in the LHS", h.name, h.name),
                    ))
                }
                Some(kind) => match bound.get(&h.name) {
                    Some(&prev) if prev != kind => diags.push(Diagnostic::new(
                        Code::KindMismatch,
                        Section::Lhs,
                        format!("variable '{}' declared as both {prev} and {kind}", h.name),
                    )),
                    Some(_) => {}
                    None => {
                        bound.insert(h.name.clone(), kind);
                    }
                },
            }
        }
    }

    let check_template = |holes: &[HoleDescriptor], section: Section, diags: &mut Vec<Diagnostic>| {
        for h in holes {
            if let Some(kind) = h.kind {
                diags.push(Diagnostic::new(
                    Code::KindInTemplate,
                    section,
                    format!("'@{{{kind}: {}}}' must be written as '@{{{}}}' outside the LHS", h.name, h.name),
                ));
            }
            if lhs.is_some() && !bound.contains_key(&h.name) && !lhs_uses.contains(&h.name) {
                diags.push(Diagnostic::new(
                    Code::UnboundVariable,
                    section,
                    format!("variable '{}' is not bound in the LHS", h.name),
                ));
            }
        }
    };

    let rhs = parse_section(&sections[1].text, sections[1].first_line, Section::Rhs, &mut diags);
    if let Some(rhs) = &rhs {
        check_template(&rhs.holes, Section::Rhs, &mut diags);
    }

    let mut preconditions = Vec::new();
    let mut pre_ok = true;
    for (i, line) in sections[2].text.split('\n').enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match parse_section(line.trim_start(), sections[2].first_line + i, Section::Pre, &mut diags) {
            Some(parsed) => {
                check_template(&parsed.holes, Section::Pre, &mut diags);
                let mut stmts = parsed.stmts;
                preconditions.push(if stmts.len() == 1 { stmts.pop().unwrap() } else { Node::detached(Kind::Seq, stmts) });
            }
            None => pre_ok = false,
        }
    }

    let meta = parse_meta(&sections[3].text, sections[3].first_line, &mut diags);

    if let Some(rhs) = &rhs {
        if rhs.stmts.is_empty() && !preconditions.is_empty() {
            diags.push(Diagnostic::new(
                Code::DegenerateRule,
                Section::Rhs,
                "a guarded rule needs a non-empty RHS",
            ));
        }
    }

    match (lhs, rhs, meta) {
        (Some(lhs), Some(rhs), Some(meta)) if diags.is_empty() && pre_ok => Ok(Rule {
            lhs: StmtList::new(lhs.stmts),
            rhs: StmtList::new(rhs.stmts),
            preconditions,
            meta,
        }),
        _ => Err(RuleError { diagnostics: diags }),
    }
}

fn strip_comment(value: &str) -> &str {
    let bytes = value.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'#' && (i == 0 || bytes[i - 1].is_ascii_whitespace()) {
            return value[..i].trim_end();
        }
    }
    value
}

fn parse_meta(text: &str, first_line: usize, diags: &mut Vec<Diagnostic>) -> Option<RuleMeta> {
    let before = diags.len();
    let mut meta = RuleMeta::new("");
    let mut seen: Vec<String> = Vec::new();
    let err = |diags: &mut Vec<Diagnostic>, line: usize, msg: String| {
        diags.push(Diagnostic::new(Code::InvalidMeta, Section::Meta, format!("line {line}: {msg}")));
    };
    for (i, raw) in text.split('\n').enumerate() {
        let line_no = first_line + i;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            err(diags, line_no, format!("expected 'key = value', found '{line}'"));
            continue;
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            err(diags, line_no, "empty key".into());
            continue;
        }
        if seen.iter().any(|k| k == key) {
            err(diags, line_no, format!("duplicate key '{key}'"));
            continue;
        }
        seen.push(key.to_string());
        let number = |v: &str| -> Result<f64, String> {
            let v = strip_comment(v);
            match v.parse::<f64>() {
                Ok(x) if x.is_finite() && x >= 0.0 => Ok(x),
                _ => Err(format!("'{key}' must be a non-negative decimal, found '{v}'")),
            }
        };
        match key {
            "id" => {
                let id = strip_comment(value);
                if id.is_empty() || id.contains(char::is_whitespace) {
                    err(diags, line_no, format!("invalid rule id '{id}'"));
                } else {
                    meta.id = id.to_string();
                }
            }
            "avg_speedup" => match number(value) {
                Ok(x) => meta.avg_speedup = Some(x),
                Err(m) => err(diags, line_no, m),
            },
            "max_speedup" => match number(value) {
                Ok(x) => meta.max_speedup = Some(x),
                Err(m) => err(diags, line_no, m),
            },
            "enabled" => match strip_comment(value) {
                "true" => meta.enabled = true,
                "false" => meta.enabled = false,
                v => err(diags, line_no, format!("'enabled' must be true or false, found '{v}'")),
            },
            "provenance" => meta.provenance = Some(value.to_string()),
            _ => meta.extra.push((key.to_string(), value.to_string())),
        }
    }
    if meta.id.is_empty() && !seen.iter().any(|k| k == "id") {
        diags.push(Diagnostic::new(Code::InvalidMeta, Section::Meta, "missing required key 'id'"));
    }
    if let (Some(avg), Some(max)) = (meta.avg_speedup, meta.max_speedup) {
        if max < avg {
            diags.push(Diagnostic::new(
                Code::InvalidMeta,
                Section::Meta,
                format!("max_speedup {max} is below avg_speedup {avg}"),
            ));
        }
    }
    (diags.len() == before).then_some(meta)
}

/// Renders a rule in the file format; [`parse_rule_file`] reads it back to
/// an equal rule.
pub fn serialize_rule(rule: &Rule) -> String {
    let mut out = String::new();
    out.push_str(SECTIONS[0]);
    out.push('\n');
    out.push_str(&print_source(&rule.lhs));
    out.push_str(SECTIONS[1]);
    out.push('\n');
    out.push_str(&print_source(&rule.rhs));
    out.push_str(SECTIONS[2]);
    out.push('\n');
    for pre in &rule.preconditions {
        match pre.kind {
            Kind::Expr => out.push_str(&print_expr(&pre.children[0])),
            Kind::Seq => out.push_str(
                &pre.children.iter().map(syntax::print_node).collect::<Vec<_>>().join("; "),
            ),
            _ => out.push_str(&syntax::print_node(pre)),
        }
        out.push('\n');
    }
    out.push_str(SECTIONS[3]);
    out.push('\n');
    let m = &rule.meta;
    out.push_str(&format!("id = {}\n", m.id));
    if let Some(avg) = m.avg_speedup {
        out.push_str(&format!("avg_speedup = {avg}\n"));
    }
    if let Some(max) = m.max_speedup {
        out.push_str(&format!("max_speedup = {max}\n"));
    }
    if let Some(p) = &m.provenance {
        out.push_str(&format!("provenance = {p}\n"));
    }
    out.push_str(&format!("enabled = {}\n", m.enabled));
    for (k, v) in &m.extra {
        out.push_str(&format!("{k} = {v}\n"));
    }
    out
}

/// Parses, then validates; all diagnostics from both stages.
pub fn check_rule(text: &str) -> Result<Rule, Vec<Diagnostic>> {
    let rule = parse_rule_file(text).map_err(|e| e.diagnostics)?;
    let diags = validate_rule(&rule);
    if diags.is_empty() {
        Ok(rule)
    } else {
        Err(diags)
    }
}
