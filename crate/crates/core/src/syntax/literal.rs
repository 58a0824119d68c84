//! Decoding of numeric and string literal tokens into [`Literal`] values.

use std::borrow::Cow;

use num_bigint::BigUint;

use super::node::{Kind, Literal};

pub fn decode_number(raw: &str) -> Result<Literal, String> {
    let text: String = raw.chars().filter(|&c| c != '_').collect();
    let lower = text.to_ascii_lowercase();
    if let Some(imag) = lower.strip_suffix('j') {
        return parse_float(imag).map(Literal::Complex);
    }
    for (prefix, radix) in [("0x", 16), ("0o", 8), ("0b", 2)] {
        if let Some(digits) = lower.strip_prefix(prefix) {
            return BigUint::parse_bytes(digits.as_bytes(), radix)
                .map(Literal::Int)
                .ok_or_else(|| format!("invalid number literal '{raw}'"));
        }
    }
    if lower.contains(['.', 'e']) {
        return parse_float(&lower).map(Literal::Float);
    }
    BigUint::parse_bytes(lower.as_bytes(), 10)
        .map(Literal::Int)
        .ok_or_else(|| format!("invalid number literal '{raw}'"))
}

fn parse_float(text: &str) -> Result<f64, String> {
    text.parse::<f64>().map_err(|_| format!("invalid float literal '{text}'"))
}

struct Piece<'a> {
    raw: bool,
    bytes: bool,
    formatted: bool,
    body: Cow<'a, str>,
}

fn split(token: &str) -> Piece<'_> {
    let quote_at = token.find(['\'', '"']).expect("string token has a quote");
    let prefix = token[..quote_at].to_ascii_lowercase();
    let rest = &token[quote_at..];
    let q = rest.as_bytes()[0];
    let triple = rest.len() >= 6 && rest.as_bytes()[1] == q && rest.as_bytes()[2] == q;
    let n = if triple { 3 } else { 1 };
    Piece {
        raw: prefix.contains('r'),
        bytes: prefix.contains('b'),
        formatted: prefix.contains('f'),
        body: normalize_newlines(&rest[n..rest.len() - n]),
    }
}

/// Line breaks inside a literal read as `\n` whatever the file uses.
fn normalize_newlines(body: &str) -> Cow<'_, str> {
    if body.contains('\r') {
        Cow::Owned(body.replace("\r\n", "\n").replace('\r', "\n"))
    } else {
        Cow::Borrowed(body)
    }
}

enum Decoded {
    Text(String),
    /// Valid source that cannot be decoded to a Rust string.
    Opaque,
}

/// Decodes one or more implicitly concatenated string tokens.
pub fn decode_strings(tokens: &[String]) -> Result<Kind, String> {
    let pieces: Vec<Piece<'_>> = tokens.iter().map(|t| split(t)).collect();
    let any_bytes = pieces.iter().any(|p| p.bytes);
    if any_bytes && !pieces.iter().all(|p| p.bytes) {
        return Err("cannot mix bytes and nonbytes literals".into());
    }
    if any_bytes {
        let mut out = Vec::new();
        for piece in &pieces {
            out.extend(decode_bytes_body(&piece.body, piece.raw)?);
        }
        return Ok(Kind::Constant(Literal::Bytes(out)));
    }
    if pieces.iter().any(|p| p.formatted) {
        return Ok(Kind::FormattedString(tokens.to_vec()));
    }
    let mut value = String::new();
    let mut opaque = false;
    for piece in &pieces {
        if piece.raw {
            value.push_str(&piece.body);
            continue;
        }
        match decode_str_body(&piece.body)? {
            Decoded::Text(t) => value.push_str(&t),
            Decoded::Opaque => opaque = true,
        }
    }
    Ok(Kind::Constant(if opaque { Literal::OpaqueStr(tokens.to_vec()) } else { Literal::Str(value) }))
}

fn hex_value(digits: &str, width: usize, what: &str) -> Result<u32, String> {
    if digits.len() < width || !digits[..width].bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(format!("truncated {what} escape"));
    }
    Ok(u32::from_str_radix(&digits[..width], 16).unwrap())
}

fn decode_str_body(body: &str) -> Result<Decoded, String> {
    let mut out = String::with_capacity(body.len());
    let mut opaque = false;
    let mut chars = body.char_indices().peekable();
    while let Some((_, c)) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        let Some((i, e)) = chars.next() else {
            out.push('\\');
            break;
        };
        match e {
            '\n' => {}
            '\r' => {
                if matches!(chars.peek(), Some((_, '\n'))) {
                    chars.next();
                }
            }
            '\\' => out.push('\\'),
            '\'' => out.push('\''),
            '"' => out.push('"'),
            'a' => out.push('\x07'),
            'b' => out.push('\x08'),
            'f' => out.push('\x0c'),
            'n' => out.push('\n'),
            'r' => out.push('\r'),
            't' => out.push('\t'),
            'v' => out.push('\x0b'),
            '0'..='7' => {
                let mut value = e.to_digit(8).unwrap();
                for _ in 0..2 {
                    match chars.peek() {
                        Some(&(_, d @ '0'..='7')) => {
                            value = value * 8 + d.to_digit(8).unwrap();
                            chars.next();
                        }
                        _ => break,
                    }
                }
                out.push(char::from_u32(value).unwrap());
            }
            'x' | 'u' | 'U' => {
                let width = match e {
                    'x' => 2,
                    'u' => 4,
                    _ => 8,
                };
                let what = match e {
                    'x' => "\\xXX",
                    'u' => "\\uXXXX",
                    _ => "\\UXXXXXXXX",
                };
                let value = hex_value(&body[i + 1..], width, what)?;
                for _ in 0..width {
                    chars.next();
                }
                match char::from_u32(value) {
                    Some(ch) => out.push(ch),
                    None if (0xD800..0xE000).contains(&value) => opaque = true,
                    None => return Err("illegal Unicode character".into()),
                }
            }
            'N' => {
                if !matches!(chars.peek(), Some((_, '{'))) {
                    return Err("malformed \\N character escape".into());
                }
                let close = body[i..].find('}').ok_or("malformed \\N character escape")?;
                for (j, _) in chars.by_ref() {
                    if j == i + close {
                        break;
                    }
                }
                opaque = true;
            }
            other => {
                out.push('\\');
                out.push(other);
            }
        }
    }
    Ok(if opaque { Decoded::Opaque } else { Decoded::Text(out) })
}

fn decode_bytes_body(body: &str, raw: bool) -> Result<Vec<u8>, String> {
    if !body.is_ascii() {
        return Err("bytes can only contain ASCII literal characters".into());
    }
    let bytes = body.as_bytes();
    if raw {
        return Ok(bytes.to_vec());
    }
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        i += 1;
        if c != b'\\' {
            out.push(c);
            continue;
        }
        let Some(&e) = bytes.get(i) else {
            out.push(b'\\');
            break;
        };
        i += 1;
        match e {
            b'\n' => {}
            b'\r' => {
                if bytes.get(i) == Some(&b'\n') {
                    i += 1;
                }
            }
            b'\\' | b'\'' | b'"' => out.push(e),
            b'a' => out.push(0x07),
            b'b' => out.push(0x08),
            b'f' => out.push(0x0c),
            b'n' => out.push(b'\n'),
            b'r' => out.push(b'\r'),
            b't' => out.push(b'\t'),
            b'v' => out.push(0x0b),
            b'0'..=b'7' => {
                let mut value = u32::from(e - b'0');
                for _ in 0..2 {
                    match bytes.get(i) {
                        Some(&d @ b'0'..=b'7') => {
                            value = value * 8 + u32::from(d - b'0');
                            i += 1;
                        }
                        _ => break,
                    }
                }
                out.push((value & 0xff) as u8);
            }
            b'x' => {
                let value = hex_value(&body[i..], 2, "\\xXX")?;
                i += 2;
                out.push(value as u8);
            }
            other => {
                out.push(b'\\');
                out.push(other);
            }
        }
    }
    Ok(out)
}
