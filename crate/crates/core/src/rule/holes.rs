//! Replacing `@{...}` holes with parseable placeholder identifiers.

use super::kind::VarKind;
use crate::syntax::is_identifier;

/// Every placeholder starts with this; user code may not.
pub const RESERVED_PREFIX: &str = "__rf_hole_";

pub fn placeholder(index: usize) -> String {
    format!("{RESERVED_PREFIX}{index}__")
}

/// Index of a placeholder identifier, if `ident` is one.
pub fn placeholder_index(ident: &str) -> Option<usize> {
    ident.strip_prefix(RESERVED_PREFIX)?.strip_suffix("__")?.parse().ok()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HoleDescriptor {
    pub name: String,
    /// Present on binding occurrences.
    pub kind: Option<VarKind>,
    /// Byte range of the `@{...}` text in the section.
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Extracted {
    pub sanitized: String,
    /// Holes in source order; the placeholder for entry `i` is
    /// [`placeholder`]`(i)`.
    pub holes: Vec<HoleDescriptor>,
    // (sanitized_start, sanitized_end, original_start, original_end)
    replacements: Vec<(usize, usize, usize, usize)>,
}

impl Extracted {
    /// Maps a byte offset in the sanitized text back to the section text.
    pub fn original_offset(&self, offset: usize) -> usize {
        let mut mapped = offset;
        for &(s_start, s_end, o_start, o_end) in &self.replacements {
            if offset < s_start {
                break;
            }
            mapped = if offset < s_end { o_start } else { offset - s_end + o_end };
        }
        mapped
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HoleErrorKind {
    Malformed,
    UnknownKind,
    Reserved,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HoleError {
    pub kind: HoleErrorKind,
    pub message: String,
    pub offset: usize,
}

/// Replaces each hole with a fresh placeholder. All problems in the text are
/// reported, not just the first.
pub fn extract_holes(text: &str) -> Result<Extracted, Vec<HoleError>> {
    let mut errors = Vec::new();
    if let Some(at) = text.find(RESERVED_PREFIX) {
        errors.push(HoleError {
            kind: HoleErrorKind::Reserved,
            message: format!("identifiers starting with '{RESERVED_PREFIX}' are reserved"),
            offset: at,
        });
    }
    let mut out = Extracted::default();
    let mut rest = 0;
    while let Some(found) = text[rest..].find("@{") {
        let start = rest + found;
        out.sanitized.push_str(&text[rest..start]);
        let body_start = start + 2;
        let Some(close) = text[body_start..].find('}') else {
            errors.push(HoleError {
                kind: HoleErrorKind::Malformed,
                message: "unterminated '@{'".into(),
                offset: start,
            });
            rest = text.len();
            break;
        };
        let end = body_start + close + 1;
        let body = &text[body_start..end - 1];
        match parse_body(body) {
            Ok((kind, name)) => {
                let ph = placeholder(out.holes.len());
                let s_start = out.sanitized.len();
                out.sanitized.push_str(&ph);
                out.replacements.push((s_start, out.sanitized.len(), start, end));
                out.holes.push(HoleDescriptor { name, kind, start, end });
            }
            Err((kind, message)) => {
                errors.push(HoleError { kind, message, offset: start });
                out.sanitized.push_str(&placeholder(usize::MAX));
            }
        }
        rest = end;
    }
    out.sanitized.push_str(&text[rest..]);
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(errors)
    }
}

fn parse_body(body: &str) -> Result<(Option<VarKind>, String), (HoleErrorKind, String)> {
    let (kind_text, name) = match body.split_once(':') {
        Some((k, n)) => (Some(k.trim()), n.trim()),
        None => (None, body.trim()),
    };
    if name.is_empty() {
        return Err((HoleErrorKind::Malformed, format!("hole '@{{{body}}}' has an empty name")));
    }
    if !is_identifier(name) {
        return Err((HoleErrorKind::Malformed, format!("hole name '{name}' is not an identifier")));
    }
    let kind = match kind_text {
        None => None,
        Some("") => return Err((HoleErrorKind::Malformed, format!("hole '@{{{body}}}' has an empty kind"))),
        Some(k) => Some(k.parse::<VarKind>().map_err(|e| (HoleErrorKind::UnknownKind, e.to_string()))?),
    };
    Ok((kind, name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drop_pattern_has_three_holes_two_names() {
        let x = extract_holes("@{Name: v1} = @{Name: v1}.drop([@{Const(str): c1}], axis=1)").unwrap();
        assert_eq!(x.sanitized, "__rf_hole_0__ = __rf_hole_1__.drop([__rf_hole_2__], axis=1)");
        let names: Vec<_> = x.holes.iter().map(|h| (h.name.as_str(), h.kind)).collect();
        assert_eq!(
            names,
            [("v1", Some(VarKind::Name)), ("v1", Some(VarKind::Name)), ("c1", Some(VarKind::ConstStr))]
        );
        assert!(!x.sanitized.contains("@{"));
    }

    #[test]
    fn text_without_holes_is_untouched() {
        let x = extract_holes("x = 1").unwrap();
        assert_eq!(x.sanitized, "x = 1");
        assert!(x.holes.is_empty());
    }

    #[test]
    fn malformed_holes() {
        for (text, kind) in [
            ("@{Name v1}", HoleErrorKind::Malformed),
            ("@{Name: v1", HoleErrorKind::Malformed),
            ("@{}", HoleErrorKind::Malformed),
            ("@{   }", HoleErrorKind::Malformed),
            ("@{Name: }", HoleErrorKind::Malformed),
            ("@{: v}", HoleErrorKind::Malformed),
            ("@{attr: v}", HoleErrorKind::UnknownKind),
            ("__rf_hole_3__ = 1", HoleErrorKind::Reserved),
        ] {
            let errs = extract_holes(text).unwrap_err();
            assert_eq!(errs[0].kind, kind, "{text}");
        }
    }

    #[test]
    fn every_error_is_reported() {
        let errs = extract_holes("@{attr: a} + @{str: b} + @{Name c}").unwrap_err();
        assert_eq!(errs.len(), 3);
        assert_eq!(errs.iter().map(|e| e.offset).collect::<Vec<_>>(), [0, 13, 25]);
    }

    #[test]
    fn holes_may_span_lines() {
        let x = extract_holes("@{Const(int):\n  k}").unwrap();
        assert_eq!(x.holes[0].name, "k");
    }

    #[test]
    fn offsets_map_back() {
        let text = "@{Name: v} = f(@{x}) +";
        let x = extract_holes(text).unwrap();
        let plus = x.sanitized.rfind('+').unwrap();
        assert_eq!(x.original_offset(plus), text.rfind('+').unwrap());
        assert_eq!(x.original_offset(2), 0);
        assert_eq!(placeholder_index(&placeholder(7)), Some(7));
        assert_eq!(placeholder_index("__rf_hole_x__"), None);
    }
}
