//! Tokenizer for the subject grammar: produces logical-line tokens with
//! INDENT/DEDENT bookkeeping, bracket-implied line joining and backslash
//! continuations. Comments are dropped here.

use super::SyntaxError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Name(String),
    /// Raw numeric literal text.
    Number(String),
    /// Raw string literal text, prefix and quotes included.
    Str(String),
    Op(&'static str),
    Newline,
    Indent,
    Dedent,
    EndMarker,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub start: usize,
    pub end: usize,
}

// Longest first.
const OPERATORS: &[&str] = &[
    "**=", "//=", ">>=", "<<=", "...", "->", ":=", "**", "//", "<<", ">>", "<=", ">=", "==", "!=",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@=", "+", "-", "*", "/", "%", "@", "&", "|",
    "^", "~", "<", ">", "(", ")", "[", "]", "{", "}", ",", ":", ".", ";", "=",
];

const STRING_PREFIXES: &[&str] = &["r", "u", "b", "f", "br", "rb", "fr", "rf"];

pub fn tokenize(src: &str) -> Result<Vec<Token>, SyntaxError> {
    Lexer::new(src).run()
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    indents: Vec<usize>,
    brackets: Vec<(u8, usize)>,
    tokens: Vec<Token>,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            indents: vec![0],
            brackets: Vec::new(),
            tokens: Vec::new(),
        }
    }

    fn err<T>(&self, at: usize, msg: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError::at(self.src, at, msg))
    }

    fn push(&mut self, tok: Tok, start: usize, end: usize) {
        self.tokens.push(Token { tok, start, end });
    }

    fn peek(&self, offset: usize) -> Option<u8> {
        self.bytes.get(self.pos + offset).copied()
    }

    fn run(mut self) -> Result<Vec<Token>, SyntaxError> {
        let mut at_line_start = true;
        loop {
            if at_line_start && self.brackets.is_empty() {
                if !self.line_start()? {
                    break;
                }
                at_line_start = false;
                continue;
            }
            let Some(c) = self.peek(0) else {
                break;
            };
            match c {
                b' ' | b'\t' | b'\x0c' => self.pos += 1,
                b'#' => self.skip_comment(),
                b'\\' => {
                    let after = self.pos + 1;
                    match self.bytes.get(after) {
                        Some(b'\n') => self.pos = after + 1,
                        Some(b'\r') => {
                            self.pos = after + 1;
                            if self.peek(0) == Some(b'\n') {
                                self.pos += 1;
                            }
                        }
                        None => return self.err(self.pos, "unexpected EOF after line continuation"),
                        _ => {
                            return self.err(self.pos, "unexpected character after line continuation character")
                        }
                    }
                    if self.pos >= self.bytes.len() {
                        return self.err(self.pos, "unexpected EOF after line continuation");
                    }
                }
                b'\n' | b'\r' => {
                    let start = self.pos;
                    self.pos += 1;
                    if c == b'\r' && self.peek(0) == Some(b'\n') {
                        self.pos += 1;
                    }
                    if self.brackets.is_empty() {
                        self.push(Tok::Newline, start, start);
                        at_line_start = true;
                    }
                }
                b'0'..=b'9' => self.number()?,
                b'.' if matches!(self.peek(1), Some(b'0'..=b'9')) => self.number()?,
                b'\'' | b'"' => self.string(self.pos)?,
                _ if is_ident_start(self.char_at(self.pos)) => self.name_or_prefixed_string()?,
                _ => self.operator()?,
            }
        }
        if let Some(&(_, open)) = self.brackets.last() {
            return self.err(open, "unclosed bracket");
        }
        let end = self.bytes.len();
        if !matches!(
            self.tokens.last().map(|t| &t.tok),
            None | Some(Tok::Newline) | Some(Tok::Dedent) | Some(Tok::Indent)
        ) {
            self.push(Tok::Newline, end, end);
        }
        while self.indents.len() > 1 {
            self.indents.pop();
            self.push(Tok::Dedent, end, end);
        }
        self.push(Tok::EndMarker, end, end);
        Ok(self.tokens)
    }

    /// Handles indentation at the start of a physical line. Returns false at
    /// end of input.
    fn line_start(&mut self) -> Result<bool, SyntaxError> {
        loop {
            let line_begin = self.pos;
            let mut col = 0usize;
            while let Some(c) = self.peek(0) {
                match c {
                    b' ' => col += 1,
                    b'\t' => col = (col / 8 + 1) * 8,
                    b'\x0c' => col = 0,
                    _ => break,
                }
                self.pos += 1;
            }
            match self.peek(0) {
                None => return Ok(false),
                Some(b'#') => {
                    self.skip_comment();
                    if !self.skip_newline() {
                        return Ok(false);
                    }
                    continue;
                }
                Some(b'\n') | Some(b'\r') => {
                    self.skip_newline();
                    continue;
                }
                Some(b'\\') if matches!(self.peek(1), Some(b'\n') | Some(b'\r')) => {
                    // A continuation at the start of a line joins the next line,
                    // whose indentation is ignored.
                    if col != *self.indents.last().unwrap() {
                        return self.err(line_begin, "unexpected indent");
                    }
                    return Ok(true);
                }
                Some(_) => {}
            }
            let current = *self.indents.last().unwrap();
            if col > current {
                self.indents.push(col);
                self.push(Tok::Indent, self.pos, self.pos);
            } else if col < current {
                while col < *self.indents.last().unwrap() {
                    self.indents.pop();
                    self.push(Tok::Dedent, self.pos, self.pos);
                }
                if col != *self.indents.last().unwrap() {
                    return self.err(self.pos, "unindent does not match any outer indentation level");
                }
            }
            return Ok(true);
        }
    }

    fn skip_comment(&mut self) {
        while let Some(c) = self.peek(0) {
            if c == b'\n' || c == b'\r' {
                break;
            }
            self.pos += 1;
        }
    }

    fn skip_newline(&mut self) -> bool {
        match self.peek(0) {
            Some(b'\n') => {
                self.pos += 1;
                true
            }
            Some(b'\r') => {
                self.pos += 1;
                if self.peek(0) == Some(b'\n') {
                    self.pos += 1;
                }
                true
            }
            _ => false,
        }
    }

    fn char_at(&self, at: usize) -> char {
        self.src[at..].chars().next().unwrap_or('\0')
    }

    fn name_or_prefixed_string(&mut self) -> Result<(), SyntaxError> {
        let start = self.pos;
        let mut end = start;
        for (i, ch) in self.src[start..].char_indices() {
            if (i == 0 && is_ident_start(ch)) || (i > 0 && is_ident_continue(ch)) {
                end = start + i + ch.len_utf8();
            } else {
                break;
            }
        }
        let word = &self.src[start..end];
        if matches!(self.bytes.get(end), Some(b'\'') | Some(b'"'))
            && STRING_PREFIXES.contains(&word.to_ascii_lowercase().as_str())
        {
            self.pos = end;
            return self.string(start);
        }
        self.pos = end;
        self.push(Tok::Name(word.to_string()), start, end);
        Ok(())
    }

    /// Scans a string literal whose quote starts at `self.pos`; `start` is
    /// the beginning of its prefix.
    fn string(&mut self, start: usize) -> Result<(), SyntaxError> {
        let quote = self.bytes[self.pos];
        let triple = self.peek(1) == Some(quote) && self.peek(2) == Some(quote);
        self.pos += if triple { 3 } else { 1 };
        loop {
            let Some(c) = self.peek(0) else {
                let what = if triple { "unterminated triple-quoted string literal" } else { "unterminated string literal" };
                return self.err(start, what);
            };
            match c {
                b'\\' => {
                    self.pos += 1;
                    if self.peek(0).is_none() {
                        continue;
                    }
                    if self.peek(0) == Some(b'\r') && self.peek(1) == Some(b'\n') {
                        self.pos += 2;
                    } else {
                        self.pos += self.char_at(self.pos).len_utf8();
                    }
                }
                b'\n' | b'\r' if !triple => return self.err(start, "unterminated string literal"),
                _ if c == quote => {
                    if !triple {
                        self.pos += 1;
                        break;
                    }
                    if self.peek(1) == Some(quote) && self.peek(2) == Some(quote) {
                        self.pos += 3;
                        break;
                    }
                    self.pos += 1;
                }
                _ => self.pos += self.char_at(self.pos).len_utf8(),
            }
        }
        self.push(Tok::Str(self.src[start..self.pos].to_string()), start, self.pos);
        Ok(())
    }

    fn digits(&mut self, valid: fn(u8) -> bool) -> Result<usize, SyntaxError> {
        let mut count = 0;
        loop {
            match self.peek(0) {
                Some(c) if valid(c) => {
                    self.pos += 1;
                    count += 1;
                }
                Some(b'_') if count > 0 && self.peek(1).is_some_and(valid) => self.pos += 1,
                Some(b'_') if count > 0 => return self.err(self.pos, "invalid decimal literal"),
                _ => return Ok(count),
            }
        }
    }

    fn number(&mut self) -> Result<(), SyntaxError> {
        let start = self.pos;
        if self.peek(0) == Some(b'0') && matches!(self.peek(1), Some(b'x' | b'X' | b'o' | b'O' | b'b' | b'B')) {
            let radix = self.peek(1).unwrap().to_ascii_lowercase();
            self.pos += 2;
            if self.peek(0) == Some(b'_') {
                self.pos += 1;
            }
            let valid: fn(u8) -> bool = match radix {
                b'x' => |c: u8| c.is_ascii_hexdigit(),
                b'o' => |c: u8| (b'0'..=b'7').contains(&c),
                _ => |c: u8| c == b'0' || c == b'1',
            };
            if self.digits(valid)? == 0 {
                return self.err(start, "invalid number literal");
            }
            if self.peek(0).is_some_and(|c| c.is_ascii_digit()) {
                return self.err(self.pos, "invalid digit in number literal");
            }
        } else {
            let int_digits = self.digits(|c| c.is_ascii_digit())?;
            let mut is_float = false;
            if self.peek(0) == Some(b'.') {
                self.pos += 1;
                is_float = true;
                self.digits(|c| c.is_ascii_digit())?;
            }
            if matches!(self.peek(0), Some(b'e' | b'E')) {
                let save = self.pos;
                self.pos += 1;
                if matches!(self.peek(0), Some(b'+' | b'-')) {
                    self.pos += 1;
                }
                if self.digits(|c| c.is_ascii_digit())? == 0 {
                    self.pos = save;
                    return self.err(save, "invalid decimal literal");
                }
                is_float = true;
            }
            let imaginary = matches!(self.peek(0), Some(b'j' | b'J'));
            if imaginary {
                self.pos += 1;
            }
            let text = &self.src[start..self.pos];
            if int_digits > 1 && !is_float && !imaginary {
                let digits = text.replace('_', "");
                if digits.starts_with('0') && digits.bytes().any(|c| c != b'0') {
                    return self.err(
                        start,
                        "leading zeros in decimal integer literals are not permitted; use an 0o prefix for octal integers",
                    );
                }
            }
        }
        if is_ident_continue(self.char_at(self.pos)) && self.pos < self.bytes.len() {
            // `1if x else y` is accepted by CPython with a warning; anything
            // else glued to a number is not.
            let rest = &self.src[self.pos..];
            let keyword_follows = ["if", "else", "and", "or", "in", "is", "not", "for"]
                .iter()
                .any(|kw| rest.starts_with(kw));
            if !keyword_follows {
                return self.err(start, "invalid decimal literal");
            }
        }
        self.push(Tok::Number(self.src[start..self.pos].to_string()), start, self.pos);
        Ok(())
    }

    fn operator(&mut self) -> Result<(), SyntaxError> {
        let start = self.pos;
        let rest = &self.src[start..];
        let Some(op) = OPERATORS.iter().copied().find(|op| rest.starts_with(op)) else {
            let ch = self.char_at(start);
            return self.err(start, format!("invalid character '{ch}' (U+{:04X})", ch as u32));
        };
        match op {
            "(" | "[" | "{" => self.brackets.push((op.as_bytes()[0], start)),
            ")" | "]" | "}" => {
                let expected = match op {
                    ")" => b'(',
                    "]" => b'[',
                    _ => b'{',
                };
                match self.brackets.pop() {
                    Some((open, _)) if open == expected => {}
                    Some((open, _)) => {
                        return self.err(
                            start,
                            format!("closing parenthesis '{op}' does not match opening parenthesis '{}'", open as char),
                        )
                    }
                    None => return self.err(start, format!("unmatched '{op}'")),
                }
            }
            _ => {}
        }
        self.pos += op.len();
        self.push(Tok::Op(op), start, self.pos);
        Ok(())
    }
}

pub fn is_ident_start(c: char) -> bool {
    c == '_' || unicode_ident::is_xid_start(c)
}

pub fn is_ident_continue(c: char) -> bool {
    unicode_ident::is_xid_continue(c)
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(is_ident_start) && chars.all(is_ident_continue)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn indentation_produces_indent_and_dedent() {
        let toks = kinds("if x:\n    y\nz\n");
        assert_eq!(
            toks,
            vec![
                Tok::Name("if".into()),
                Tok::Name("x".into()),
                Tok::Op(":"),
                Tok::Newline,
                Tok::Indent,
                Tok::Name("y".into()),
                Tok::Newline,
                Tok::Dedent,
                Tok::Name("z".into()),
                Tok::Newline,
                Tok::EndMarker,
            ]
        );
    }

    #[test]
    fn brackets_join_lines_and_comments_vanish() {
        let toks = kinds("f(a,  # note\n  b)\n");
        assert_eq!(toks.iter().filter(|t| **t == Tok::Newline).count(), 1);
    }

    #[test]
    fn prefixed_strings_and_numbers() {
        let toks = kinds("rb'x' 0x_1F 1_000.5e-3j .5");
        assert_eq!(toks[0], Tok::Str("rb'x'".into()));
        assert_eq!(toks[1], Tok::Number("0x_1F".into()));
        assert_eq!(toks[2], Tok::Number("1_000.5e-3j".into()));
        assert_eq!(toks[3], Tok::Number(".5".into()));
    }

    #[test]
    fn errors_carry_positions() {
        let err = tokenize("x = 'abc\n").unwrap_err();
        assert_eq!((err.line, err.column), (1, 5));
        assert!(tokenize("x = 012").is_err());
        assert!(tokenize("f(]").is_err());
        assert!(tokenize("if x:\n    a\n  b\n").is_err());
        assert!(tokenize("x = $").is_err());
    }

    #[test]
    fn identifiers() {
        assert!(is_identifier("df_1"));
        assert!(is_identifier("données"));
        assert!(!is_identifier("1df"));
        assert!(!is_identifier("a b"));
        assert!(!is_identifier(""));
    }
}
