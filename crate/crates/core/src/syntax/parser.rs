//! Recursive-descent parser for the Python 3.10 grammar.
//!
//! Produces the uniform tree described in [`super::node`]. Parentheses are
//! not represented; the printer re-derives them from precedence.

use super::lexer::{tokenize, Tok, Token};
use super::literal::{decode_number, decode_strings};
use super::node::*;
use super::SyntaxError;

const KEYWORDS: &[&str] = &[
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class", "continue", "def", "del",
    "elif", "else", "except", "finally", "for", "from", "global", "if", "import", "in", "is", "lambda", "nonlocal",
    "not", "or", "pass", "raise", "return", "try", "while", "with", "yield",
];

const AUGMENTED: &[&str] = &["+=", "-=", "*=", "/=", "//=", "%=", "@=", "&=", "|=", "^=", ">>=", "<<=", "**="];

type PResult<T> = Result<T, SyntaxError>;

pub fn parse_module(src: &str) -> PResult<StmtList> {
    let mut p = Parser::new(src, tokenize(src)?);
    let mut stmts = Vec::new();
    while !matches!(p.tok(), Tok::EndMarker) {
        p.statement(&mut stmts)?;
    }
    Ok(StmtList::new(stmts))
}

pub fn parse_expression(src: &str) -> PResult<Node> {
    let mut p = Parser::new(src, tokenize(src)?);
    while matches!(p.tok(), Tok::Indent | Tok::Newline) {
        p.bump();
    }
    let expr = p.star_expressions()?;
    while matches!(p.tok(), Tok::Newline | Tok::Dedent) {
        p.bump();
    }
    if !matches!(p.tok(), Tok::EndMarker) {
        return Err(p.unexpected());
    }
    Ok(expr)
}

fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    pos: usize,
    prev_end: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, toks: Vec<Token>) -> Self {
        Parser { src, toks, pos: 0, prev_end: 0 }
    }

    // ---- token plumbing ------------------------------------------------

    fn tok(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn start(&self) -> usize {
        self.toks[self.pos].start
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if !matches!(t.tok, Tok::EndMarker) {
            self.pos += 1;
        }
        self.prev_end = t.end;
        t
    }

    fn span_from(&self, start: usize) -> Span {
        Span::new(start, self.prev_end.max(start))
    }

    fn at_op(&self, op: &str) -> bool {
        matches!(self.tok(), Tok::Op(o) if *o == op)
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.tok(), Tok::Name(n) if n == kw)
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if self.at_op(op) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error(&self, at: usize, msg: impl Into<String>) -> SyntaxError {
        SyntaxError::at(self.src, at, msg)
    }

    fn unexpected(&self) -> SyntaxError {
        let msg = match self.tok() {
            Tok::Indent => "unexpected indent",
            Tok::Dedent => "unindent does not match any outer indentation level",
            Tok::EndMarker => "unexpected EOF while parsing",
            _ => "invalid syntax",
        };
        self.error(self.start(), msg)
    }

    fn expect_op(&mut self, op: &str) -> PResult<Token> {
        if self.at_op(op) {
            Ok(self.bump())
        } else {
            Err(self.error(self.start(), format!("invalid syntax: expected '{op}'")))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<Token> {
        if self.at_kw(kw) {
            Ok(self.bump())
        } else {
            Err(self.error(self.start(), format!("invalid syntax: expected '{kw}'")))
        }
    }

    fn expect_newline(&mut self) -> PResult<()> {
        match self.tok() {
            Tok::Newline => {
                self.bump();
                Ok(())
            }
            Tok::EndMarker => Ok(()),
            _ => Err(self.unexpected()),
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.tok().clone() {
            Tok::Name(n) if !is_keyword(&n) => {
                let t = self.bump();
                Ok((n, Span::new(t.start, t.end)))
            }
            _ => Err(self.error(self.start(), "invalid syntax: expected a name")),
        }
    }

    fn at_expr_start(&self) -> bool {
        match self.tok() {
            Tok::Name(n) => !is_keyword(n) || matches!(n.as_str(), "not" | "lambda" | "await" | "None" | "True" | "False"),
            Tok::Number(_) | Tok::Str(_) => true,
            Tok::Op(o) => matches!(*o, "(" | "[" | "{" | "-" | "+" | "~" | "*" | "..."),
            _ => false,
        }
    }

    fn empty_seq(&self) -> Node {
        let at = self.prev_end;
        Node::seq(Span::new(at, at), Vec::new())
    }

    fn missing_here(&self) -> Node {
        Node::missing(self.prev_end)
    }

    // ---- statements ----------------------------------------------------

    fn statement(&mut self, out: &mut Vec<Node>) -> PResult<()> {
        match self.tok().clone() {
            Tok::Name(n) => match n.as_str() {
                "def" | "class" | "if" | "while" | "for" | "try" | "with" => out.push(self.compound(Vec::new(), None)?),
                "async" => out.push(self.compound(Vec::new(), None)?),
                "match" => match self.try_match_stmt()? {
                    Some(stmt) => out.push(stmt),
                    None => self.simple_stmts(out)?,
                },
                _ => self.simple_stmts(out)?,
            },
            Tok::Op("@") => out.push(self.decorated()?),
            Tok::Indent | Tok::Dedent | Tok::Newline => return Err(self.unexpected()),
            _ => self.simple_stmts(out)?,
        }
        Ok(())
    }

    fn simple_stmts(&mut self, out: &mut Vec<Node>) -> PResult<()> {
        loop {
            out.push(self.small_stmt()?);
            if self.eat_op(";") {
                if matches!(self.tok(), Tok::Newline | Tok::EndMarker) {
                    break;
                }
                continue;
            }
            break;
        }
        self.expect_newline()
    }

    fn block(&mut self) -> PResult<Node> {
        let mut stmts = Vec::new();
        if matches!(self.tok(), Tok::Newline) {
            self.bump();
            if !matches!(self.tok(), Tok::Indent) {
                return Err(self.error(self.start(), "expected an indented block"));
            }
            self.bump();
            while !matches!(self.tok(), Tok::Dedent | Tok::EndMarker) {
                self.statement(&mut stmts)?;
            }
            if matches!(self.tok(), Tok::Dedent) {
                self.bump();
            }
        } else {
            self.simple_stmts(&mut stmts)?;
        }
        let span = match (stmts.first(), stmts.last()) {
            (Some(a), Some(b)) => Span::new(a.span.start, b.span.end),
            _ => Span::new(self.prev_end, self.prev_end),
        };
        // Dedent tokens sit at the next line; do not let them widen the parent.
        self.prev_end = span.end;
        Ok(Node::seq(span, stmts))
    }

    fn small_stmt(&mut self) -> PResult<Node> {
        let start = self.start();
        let word = match self.tok() {
            Tok::Name(n) => n.clone(),
            _ => String::new(),
        };
        match word.as_str() {
            "pass" | "break" | "continue" => {
                self.bump();
                let kind = match word.as_str() {
                    "pass" => Kind::Pass,
                    "break" => Kind::Break,
                    _ => Kind::Continue,
                };
                Ok(Node::leaf(kind, self.span_from(start)))
            }
            "return" => {
                self.bump();
                let value = if self.at_expr_start() { self.star_expressions()? } else { self.missing_here() };
                Ok(Node::new(Kind::Return, self.span_from(start), vec![value]))
            }
            "raise" => {
                self.bump();
                let (exc, cause) = if self.at_expr_start() {
                    let exc = self.expression()?;
                    let cause = if self.eat_kw("from") { self.expression()? } else { self.missing_here() };
                    (exc, cause)
                } else {
                    (self.missing_here(), self.missing_here())
                };
                Ok(Node::new(Kind::Raise, self.span_from(start), vec![exc, cause]))
            }
            "global" | "nonlocal" => {
                self.bump();
                let mut names = vec![self.ident()?.0];
                while self.eat_op(",") {
                    names.push(self.ident()?.0);
                }
                let kind = if word == "global" { Kind::Global(names) } else { Kind::Nonlocal(names) };
                Ok(Node::leaf(kind, self.span_from(start)))
            }
            "del" => {
                self.bump();
                let mut targets = Vec::new();
                loop {
                    let t = self.bitwise_or()?;
                    self.check_del_target(&t)?;
                    targets.push(t);
                    if !self.eat_op(",") || !self.at_expr_start() {
                        break;
                    }
                }
                Ok(Node::new(Kind::Delete, self.span_from(start), targets))
            }
            "assert" => {
                self.bump();
                let test = self.expression()?;
                let msg = if self.eat_op(",") { self.expression()? } else { self.missing_here() };
                Ok(Node::new(Kind::Assert, self.span_from(start), vec![test, msg]))
            }
            "import" => self.import_stmt(),
            "from" => self.import_from(),
            _ => self.expr_or_assign(),
        }
    }

    fn expr_or_assign(&mut self) -> PResult<Node> {
        let start = self.start();
        let parenthesized = self.at_op("(");
        let first = if self.at_kw("yield") { self.yield_expr()? } else { self.star_expressions()? };

        if self.at_op(":") {
            match first.kind {
                Kind::Name(_) | Kind::Attribute(_) | Kind::Subscript => {}
                Kind::Tuple => return Err(self.error(first.span.start, "only single target (not tuple) can be annotated")),
                Kind::List => return Err(self.error(first.span.start, "only single target (not list) can be annotated")),
                _ => return Err(self.error(first.span.start, "illegal target for annotation")),
            }
            self.bump();
            let simple = matches!(first.kind, Kind::Name(_)) && !parenthesized;
            let annotation = self.expression()?;
            let value = if self.eat_op("=") { self.assignment_rhs()? } else { self.missing_here() };
            return Ok(Node::new(Kind::AnnAssign { simple }, self.span_from(start), vec![first, annotation, value]));
        }

        if let Tok::Op(op) = self.tok() {
            if AUGMENTED.contains(op) {
                let op = BinOp::from_symbol(&op[..op.len() - 1]).expect("augmented operator");
                if !matches!(first.kind, Kind::Name(_) | Kind::Attribute(_) | Kind::Subscript) {
                    return Err(self.error(
                        first.span.start,
                        format!("'{}' is an illegal expression for augmented assignment", describe(&first)),
                    ));
                }
                self.bump();
                let value = self.assignment_rhs()?;
                return Ok(Node::new(Kind::AugAssign(op), self.span_from(start), vec![first, value]));
            }
        }

        if self.at_op("=") {
            let mut parts = vec![first];
            while self.eat_op("=") {
                parts.push(self.assignment_rhs()?);
            }
            for target in &parts[..parts.len() - 1] {
                self.check_assign_target(target, true)?;
            }
            return Ok(Node::new(Kind::Assign, self.span_from(start), parts));
        }

        Ok(Node::new(Kind::Expr, self.span_from(start), vec![first]))
    }

    fn assignment_rhs(&mut self) -> PResult<Node> {
        if self.at_kw("yield") {
            self.yield_expr()
        } else {
            self.star_expressions()
        }
    }

    fn check_assign_target(&self, node: &Node, top: bool) -> PResult<()> {
        match &node.kind {
            Kind::Name(_) | Kind::Attribute(_) | Kind::Subscript => Ok(()),
            Kind::Tuple | Kind::List => {
                let starred = node.children.iter().filter(|c| matches!(c.kind, Kind::Starred)).count();
                if starred > 1 {
                    return Err(self.error(node.span.start, "multiple starred expressions in assignment"));
                }
                node.children.iter().try_for_each(|c| self.check_assign_target(c, false))
            }
            Kind::Starred if !top => self.check_assign_target(&node.children[0], false),
            Kind::Starred => Err(self.error(node.span.start, "starred assignment target must be in a list or tuple")),
            _ => Err(self.error(node.span.start, format!("cannot assign to {}", describe(node)))),
        }
    }

    fn check_del_target(&self, node: &Node) -> PResult<()> {
        match &node.kind {
            Kind::Name(_) | Kind::Attribute(_) | Kind::Subscript => Ok(()),
            Kind::Tuple | Kind::List => node.children.iter().try_for_each(|c| self.check_del_target(c)),
            _ => Err(self.error(node.span.start, format!("cannot delete {}", describe(node)))),
        }
    }

    fn dotted_name(&mut self) -> PResult<String> {
        let mut name = self.ident()?.0;
        while self.at_op(".") {
            self.bump();
            name.push('.');
            name.push_str(&self.ident()?.0);
        }
        Ok(name)
    }

    fn import_stmt(&mut self) -> PResult<Node> {
        let start = self.bump().start;
        let mut aliases = Vec::new();
        loop {
            let a_start = self.start();
            let name = self.dotted_name()?;
            let asname = if self.eat_kw("as") { Some(self.ident()?.0) } else { None };
            aliases.push(Node::leaf(Kind::Alias { name, asname }, self.span_from(a_start)));
            if !self.eat_op(",") {
                break;
            }
        }
        Ok(Node::new(Kind::Import, self.span_from(start), aliases))
    }

    fn import_from(&mut self) -> PResult<Node> {
        let start = self.bump().start;
        let mut level = 0u32;
        loop {
            if self.eat_op(".") {
                level += 1;
            } else if self.eat_op("...") {
                level += 3;
            } else {
                break;
            }
        }
        let module = if self.at_kw("import") { None } else { Some(self.dotted_name()?) };
        if module.is_none() && level == 0 {
            return Err(self.unexpected());
        }
        self.expect_kw("import")?;
        let mut aliases = Vec::new();
        if self.at_op("*") {
            let t = self.bump();
            aliases.push(Node::leaf(Kind::Alias { name: "*".into(), asname: None }, Span::new(t.start, t.end)));
        } else {
            let parens = self.eat_op("(");
            loop {
                let a_start = self.start();
                let name = self.ident()?.0;
                let asname = if self.eat_kw("as") { Some(self.ident()?.0) } else { None };
                aliases.push(Node::leaf(Kind::Alias { name, asname }, self.span_from(a_start)));
                if !self.eat_op(",") {
                    break;
                }
                if parens && self.at_op(")") {
                    break;
                }
                if !parens && !matches!(self.tok(), Tok::Name(_)) {
                    return Err(self.error(self.start(), "trailing comma not allowed without surrounding parentheses"));
                }
            }
            if parens {
                self.expect_op(")")?;
            }
        }
        Ok(Node::new(Kind::ImportFrom { module, level }, self.span_from(start), aliases))
    }

    fn decorated(&mut self) -> PResult<Node> {
        let start = self.start();
        let mut decorators = Vec::new();
        while self.eat_op("@") {
            decorators.push(self.named_expression()?);
            if !matches!(self.tok(), Tok::Newline) {
                return Err(self.unexpected());
            }
            self.bump();
        }
        if !(self.at_kw("def") || self.at_kw("class") || (self.at_kw("async") && matches!(self.peek(1), Tok::Name(n) if n == "def")))
        {
            return Err(self.unexpected());
        }
        let span = Span::new(decorators[0].span.start, decorators.last().unwrap().span.end);
        self.compound(decorators, Some((start, span)))
    }

    fn compound(&mut self, decorators: Vec<Node>, deco: Option<(usize, Span)>) -> PResult<Node> {
        let start = deco.map_or(self.start(), |(s, _)| s);
        let deco_seq = match deco {
            Some((_, span)) => Node::seq(span, decorators),
            None => Node::seq(Span::new(start, start), Vec::new()),
        };
        let word = match self.tok() {
            Tok::Name(n) => n.clone(),
            _ => return Err(self.unexpected()),
        };
        match word.as_str() {
            "def" => self.funcdef(start, deco_seq, false),
            "class" => self.classdef(start, deco_seq),
            "if" => self.if_stmt(),
            "while" => self.while_stmt(),
            "for" => self.for_stmt(start, false),
            "with" => self.with_stmt(start, false),
            "try" => self.try_stmt(),
            "async" => {
                self.bump();
                match self.tok() {
                    Tok::Name(n) if n == "def" => self.funcdef(start, deco_seq, true),
                    Tok::Name(n) if n == "for" => self.for_stmt(start, true),
                    Tok::Name(n) if n == "with" => self.with_stmt(start, true),
                    _ => Err(self.unexpected()),
                }
            }
            _ => Err(self.unexpected()),
        }
    }

    fn funcdef(&mut self, start: usize, decorators: Node, is_async: bool) -> PResult<Node> {
        self.expect_kw("def")?;
        let (name, _) = self.ident()?;
        self.expect_op("(")?;
        let args = self.parameters(false, ")")?;
        self.expect_op(")")?;
        let returns = if self.eat_op("->") { self.expression()? } else { self.missing_here() };
        self.expect_op(":")?;
        let body = self.block()?;
        let kind = if is_async { Kind::AsyncFunctionDef(name) } else { Kind::FunctionDef(name) };
        Ok(Node::new(kind, self.span_from(start), vec![decorators, args, returns, body]))
    }

    fn classdef(&mut self, start: usize, decorators: Node) -> PResult<Node> {
        self.expect_kw("class")?;
        let (name, _) = self.ident()?;
        let mut bases = Vec::new();
        let mut keywords = Vec::new();
        let list_start = self.prev_end;
        if self.eat_op("(") {
            for arg in self.call_arguments()? {
                if matches!(arg.kind, Kind::Keyword(_)) {
                    keywords.push(arg);
                } else {
                    bases.push(arg);
                }
            }
        }
        let seq = |items: Vec<Node>| {
            let span = match (items.first(), items.last()) {
                (Some(a), Some(b)) => Span::new(a.span.start, b.span.end),
                _ => Span::new(list_start, list_start),
            };
            Node::seq(span, items)
        };
        let bases = seq(bases);
        let keywords = seq(keywords);
        self.expect_op(":")?;
        let body = self.block()?;
        Ok(Node::new(Kind::ClassDef(name), self.span_from(start), vec![decorators, bases, keywords, body]))
    }

    fn parameters(&mut self, lambda: bool, closing: &str) -> PResult<Node> {
        let start = self.start();
        let mut posonly: Vec<Node> = Vec::new();
        let mut args: Vec<Node> = Vec::new();
        let mut vararg: Option<Node> = None;
        let mut kwonly: Vec<Node> = Vec::new();
        let mut kwarg: Option<Node> = None;
        let mut seen_default = false;
        let mut star_seen = false;
        let mut bare_star_at: Option<usize> = None;
        let mut slash_seen = false;

        while !self.at_op(closing) {
            if kwarg.is_some() {
                return Err(self.error(self.start(), "arguments cannot follow var-keyword argument"));
            }
            let here = self.start();
            if self.eat_op("/") {
                if slash_seen || star_seen || args.is_empty() {
                    return Err(self.error(here, "invalid syntax: misplaced '/'"));
                }
                slash_seen = true;
                posonly.append(&mut args);
            } else if self.eat_op("*") {
                if star_seen {
                    return Err(self.error(here, "* argument may appear only once"));
                }
                star_seen = true;
                if matches!(self.tok(), Tok::Name(_)) {
                    vararg = Some(self.param(lambda, false)?);
                } else {
                    bare_star_at = Some(here);
                }
            } else if self.eat_op("**") {
                kwarg = Some(self.param(lambda, false)?);
            } else {
                let p = self.param(lambda, true)?;
                let has_default = !p.children[1].is_missing();
                if star_seen {
                    kwonly.push(p);
                } else {
                    if has_default {
                        seen_default = true;
                    } else if seen_default {
                        return Err(self.error(p.span.start, "non-default argument follows default argument"));
                    }
                    args.push(p);
                }
            }
            if !self.eat_op(",") {
                break;
            }
        }
        if let Some(at) = bare_star_at {
            if kwonly.is_empty() {
                return Err(self.error(at, "named arguments must follow bare *"));
            }
        }
        let end = self.prev_end.max(start);
        let seq = |items: Vec<Node>| {
            let span = match (items.first(), items.last()) {
                (Some(a), Some(b)) => Span::new(a.span.start, b.span.end),
                _ => Span::new(start, start),
            };
            Node::seq(span, items)
        };
        let children = vec![
            seq(posonly),
            seq(args),
            vararg.unwrap_or_else(|| Node::missing(start)),
            seq(kwonly),
            kwarg.unwrap_or_else(|| Node::missing(start)),
        ];
        Ok(Node::new(Kind::Arguments, Span::new(start, end), children))
    }

    fn param(&mut self, lambda: bool, allow_default: bool) -> PResult<Node> {
        let (name, span) = self.ident()?;
        let annotation = if !lambda && self.eat_op(":") { self.expression()? } else { self.missing_here() };
        let default = if allow_default && self.eat_op("=") { self.expression()? } else { self.missing_here() };
        Ok(Node::new(Kind::Arg(name), self.span_from(span.start), vec![annotation, default]))
    }

    fn if_stmt(&mut self) -> PResult<Node> {
        let start = self.bump().start; // `if` or `elif`
        let test = self.named_expression()?;
        self.expect_op(":")?;
        let body = self.block()?;
        let orelse = if self.at_kw("elif") {
            let nested = self.if_stmt()?;
            Node::seq(nested.span, vec![nested])
        } else if self.eat_kw("else") {
            self.expect_op(":")?;
            self.block()?
        } else {
            self.empty_seq()
        };
        Ok(Node::new(Kind::If, self.span_from(start), vec![test, body, orelse]))
    }

    fn else_block(&mut self) -> PResult<Node> {
        if self.eat_kw("else") {
            self.expect_op(":")?;
            self.block()
        } else {
            Ok(self.empty_seq())
        }
    }

    fn while_stmt(&mut self) -> PResult<Node> {
        let start = self.bump().start;
        let test = self.named_expression()?;
        self.expect_op(":")?;
        let body = self.block()?;
        let orelse = self.else_block()?;
        Ok(Node::new(Kind::While, self.span_from(start), vec![test, body, orelse]))
    }

    fn for_stmt(&mut self, start: usize, is_async: bool) -> PResult<Node> {
        self.expect_kw("for")?;
        let target = self.target_list()?;
        self.expect_kw("in")?;
        let iter = self.star_expressions()?;
        self.expect_op(":")?;
        let body = self.block()?;
        let orelse = self.else_block()?;
        let kind = if is_async { Kind::AsyncFor } else { Kind::For };
        Ok(Node::new(kind, self.span_from(start), vec![target, iter, body, orelse]))
    }

    fn with_stmt(&mut self, start: usize, is_async: bool) -> PResult<Node> {
        self.expect_kw("with")?;
        let mut items = None;
        if self.at_op("(") {
            let save = (self.pos, self.prev_end);
            if let Ok(parsed) = self.parenthesized_with_items() {
                if self.at_op(":") {
                    items = Some(parsed);
                }
            }
            if items.is_none() {
                (self.pos, self.prev_end) = save;
            }
        }
        let mut items = match items {
            Some(items) => items,
            None => {
                let mut items = vec![self.with_item()?];
                while self.eat_op(",") {
                    items.push(self.with_item()?);
                }
                items
            }
        };
        self.expect_op(":")?;
        items.push(self.block()?);
        let kind = if is_async { Kind::AsyncWith } else { Kind::With };
        Ok(Node::new(kind, self.span_from(start), items))
    }

    fn parenthesized_with_items(&mut self) -> PResult<Vec<Node>> {
        self.expect_op("(")?;
        let mut items = vec![self.with_item()?];
        while self.eat_op(",") {
            if self.at_op(")") {
                break;
            }
            items.push(self.with_item()?);
        }
        self.expect_op(")")?;
        Ok(items)
    }

    fn with_item(&mut self) -> PResult<Node> {
        let start = self.start();
        let context = self.expression()?;
        let target = if self.eat_kw("as") {
            let t = self.star_target()?;
            self.check_assign_target(&t, true)?;
            t
        } else {
            self.missing_here()
        };
        Ok(Node::new(Kind::WithItem, self.span_from(start), vec![context, target]))
    }

    fn try_stmt(&mut self) -> PResult<Node> {
        let start = self.bump().start;
        self.expect_op(":")?;
        let body = self.block()?;
        let mut handlers = Vec::new();
        while self.at_kw("except") {
            let h_start = self.bump().start;
            if self.at_op("*") {
                return Err(self.error(self.start(), "invalid syntax: 'except*' requires Python 3.11"));
            }
            let (ty, name) = if self.at_op(":") {
                (self.missing_here(), None)
            } else {
                let ty = self.expression()?;
                if self.at_op(",") {
                    return Err(self.error(ty.span.start, "multiple exception types must be parenthesized"));
                }
                let name = if self.eat_kw("as") { Some(self.ident()?.0) } else { None };
                (ty, name)
            };
            self.expect_op(":")?;
            let h_body = self.block()?;
            handlers.push(Node::new(Kind::ExceptHandler(name), self.span_from(h_start), vec![ty, h_body]));
        }
        let handlers_span = match (handlers.first(), handlers.last()) {
            (Some(a), Some(b)) => Span::new(a.span.start, b.span.end),
            _ => Span::new(self.prev_end, self.prev_end),
        };
        let handlers_seq = Node::seq(handlers_span, handlers);
        let orelse = if !handlers_seq.children.is_empty() { self.else_block()? } else { self.empty_seq() };
        let finalbody = if self.eat_kw("finally") {
            self.expect_op(":")?;
            self.block()?
        } else {
            self.empty_seq()
        };
        if handlers_seq.children.is_empty() && finalbody.children.is_empty() {
            return Err(self.error(self.start(), "expected 'except' or 'finally' block"));
        }
        Ok(Node::new(Kind::Try, self.span_from(start), vec![body, handlers_seq, orelse, finalbody]))
    }

    // ---- match statement -----------------------------------------------

    fn try_match_stmt(&mut self) -> PResult<Option<Node>> {
        let save = (self.pos, self.prev_end);
        let start = self.bump().start;
        let subject = match self.match_subject() {
            Ok(s) if self.at_op(":") && matches!(self.peek(1), Tok::Newline) => s,
            _ => {
                (self.pos, self.prev_end) = save;
                return Ok(None);
            }
        };
        self.bump();
        self.bump();
        if !matches!(self.tok(), Tok::Indent) {
            return Err(self.error(self.start(), "expected an indented block"));
        }
        self.bump();
        let mut children = vec![subject];
        while self.at_kw("case") {
            children.push(self.case_block()?);
        }
        if children.len() == 1 {
            return Err(self.error(self.start(), "invalid syntax: expected 'case'"));
        }
        let end = children.last().unwrap().span.end;
        if matches!(self.tok(), Tok::Dedent) {
            self.bump();
        } else if !matches!(self.tok(), Tok::EndMarker) {
            return Err(self.unexpected());
        }
        self.prev_end = end;
        Ok(Some(Node::new(Kind::Match, Span::new(start, end), children)))
    }

    fn match_subject(&mut self) -> PResult<Node> {
        let start = self.start();
        let first = self.star_named_expression()?;
        if !self.at_op(",") {
            if matches!(first.kind, Kind::Starred) {
                return Err(self.unexpected());
            }
            return Ok(first);
        }
        let mut elts = vec![first];
        while self.eat_op(",") {
            if self.at_op(":") {
                break;
            }
            elts.push(self.star_named_expression()?);
        }
        Ok(Node::new(Kind::Tuple, self.span_from(start), elts))
    }

    fn case_block(&mut self) -> PResult<Node> {
        let start = self.bump().start;
        let pattern = self.patterns()?;
        let guard = if self.eat_kw("if") { self.named_expression()? } else { self.missing_here() };
        self.expect_op(":")?;
        let body = self.block()?;
        Ok(Node::new(Kind::MatchCase, self.span_from(start), vec![pattern, guard, body]))
    }

    fn patterns(&mut self) -> PResult<Node> {
        let start = self.start();
        let first = self.maybe_star_pattern()?;
        if !self.at_op(",") {
            if matches!(first.kind, Kind::MatchStar(_)) {
                return Err(self.error(start, "invalid syntax: starred pattern outside a sequence"));
            }
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat_op(",") {
            if self.at_op(":") || self.at_kw("if") {
                break;
            }
            items.push(self.maybe_star_pattern()?);
        }
        Ok(Node::new(Kind::MatchSequence, self.span_from(start), items))
    }

    fn maybe_star_pattern(&mut self) -> PResult<Node> {
        let start = self.start();
        if self.eat_op("*") {
            let (name, _) = self.ident()?;
            let name = if name == "_" { None } else { Some(name) };
            return Ok(Node::leaf(Kind::MatchStar(name), self.span_from(start)));
        }
        self.pattern()
    }

    fn pattern(&mut self) -> PResult<Node> {
        let start = self.start();
        let or = self.or_pattern()?;
        if self.eat_kw("as") {
            let (name, span) = self.ident()?;
            if name == "_" {
                return Err(self.error(span.start, "cannot use '_' as a target"));
            }
            return Ok(Node::new(Kind::MatchAs(Some(name)), self.span_from(start), vec![or]));
        }
        Ok(or)
    }

    fn or_pattern(&mut self) -> PResult<Node> {
        let start = self.start();
        let first = self.closed_pattern()?;
        if !self.at_op("|") {
            return Ok(first);
        }
        let mut alts = vec![first];
        while self.eat_op("|") {
            alts.push(self.closed_pattern()?);
        }
        Ok(Node::new(Kind::MatchOr, self.span_from(start), alts))
    }

    fn signed_number(&mut self) -> PResult<Node> {
        let start = self.start();
        let negative = self.eat_op("-");
        let raw = match self.tok().clone() {
            Tok::Number(raw) => raw,
            _ => return Err(self.unexpected()),
        };
        let t = self.bump();
        let lit = decode_number(&raw).map_err(|m| self.error(t.start, m))?;
        let mut node = Node::leaf(Kind::Constant(lit), Span::new(t.start, t.end));
        if negative {
            node = Node::new(Kind::UnaryOp(UnaryOp::USub), self.span_from(start), vec![node]);
        }
        Ok(node)
    }

    fn literal_expr(&mut self) -> PResult<Node> {
        let start = self.start();
        match self.tok().clone() {
            Tok::Str(_) => {
                let node = self.strings()?;
                if matches!(node.kind, Kind::FormattedString(_)) {
                    return Err(self.error(start, "patterns may only match literals and attribute lookups"));
                }
                Ok(node)
            }
            Tok::Number(_) | Tok::Op("-") => {
                let real = self.signed_number()?;
                if self.at_op("+") || self.at_op("-") {
                    let op = if self.bump().tok == Tok::Op("+") { BinOp::Add } else { BinOp::Sub };
                    let t_start = self.start();
                    let imag = match self.tok().clone() {
                        Tok::Number(raw) => {
                            let t = self.bump();
                            let lit = decode_number(&raw).map_err(|m| self.error(t.start, m))?;
                            if !matches!(lit, Literal::Complex(_)) {
                                return Err(self.error(t_start, "imaginary number required in complex literal"));
                            }
                            Node::leaf(Kind::Constant(lit), Span::new(t.start, t.end))
                        }
                        _ => return Err(self.unexpected()),
                    };
                    return Ok(Node::new(Kind::BinOp(op), self.span_from(start), vec![real, imag]));
                }
                Ok(real)
            }
            _ => Err(self.unexpected()),
        }
    }

    fn name_or_attr(&mut self) -> PResult<Node> {
        let start = self.start();
        let (name, span) = self.ident()?;
        let mut node = Node::leaf(Kind::Name(name), span);
        while self.eat_op(".") {
            let (attr, _) = self.ident()?;
            node = Node::new(Kind::Attribute(attr), self.span_from(start), vec![node]);
        }
        Ok(node)
    }

    fn closed_pattern(&mut self) -> PResult<Node> {
        let start = self.start();
        match self.tok().clone() {
            Tok::Number(_) | Tok::Str(_) | Tok::Op("-") => {
                let value = self.literal_expr()?;
                Ok(Node::new(Kind::MatchValue, self.span_from(start), vec![value]))
            }
            Tok::Name(n) if n == "None" || n == "True" || n == "False" => {
                self.bump();
                let lit = match n.as_str() {
                    "None" => Literal::None,
                    "True" => Literal::Bool(true),
                    _ => Literal::Bool(false),
                };
                Ok(Node::leaf(Kind::MatchSingleton(lit), self.span_from(start)))
            }
            Tok::Name(n) if !is_keyword(&n) => {
                let target = self.name_or_attr()?;
                if self.at_op("(") {
                    return self.class_pattern(start, target);
                }
                match target.kind {
                    Kind::Name(name) if name == "_" => Ok(Node::new(Kind::MatchAs(None), target.span, vec![Node::missing(target.span.end)])),
                    Kind::Name(name) => Ok(Node::new(Kind::MatchAs(Some(name)), target.span, vec![Node::missing(target.span.end)])),
                    _ => Ok(Node::new(Kind::MatchValue, self.span_from(start), vec![target])),
                }
            }
            Tok::Op("(") => {
                self.bump();
                if self.eat_op(")") {
                    return Ok(Node::leaf(Kind::MatchSequence, self.span_from(start)));
                }
                let first = self.maybe_star_pattern()?;
                if self.at_op(",") {
                    let mut items = vec![first];
                    while self.eat_op(",") {
                        if self.at_op(")") {
                            break;
                        }
                        items.push(self.maybe_star_pattern()?);
                    }
                    self.expect_op(")")?;
                    return Ok(Node::new(Kind::MatchSequence, self.span_from(start), items));
                }
                self.expect_op(")")?;
                if matches!(first.kind, Kind::MatchStar(_)) {
                    return Ok(Node::new(Kind::MatchSequence, self.span_from(start), vec![first]));
                }
                Ok(first)
            }
            Tok::Op("[") => {
                self.bump();
                let mut items = Vec::new();
                while !self.at_op("]") {
                    items.push(self.maybe_star_pattern()?);
                    if !self.eat_op(",") {
                        break;
                    }
                }
                self.expect_op("]")?;
                Ok(Node::new(Kind::MatchSequence, self.span_from(start), items))
            }
            Tok::Op("{") => self.mapping_pattern(),
            _ => Err(self.unexpected()),
        }
    }

    fn mapping_pattern(&mut self) -> PResult<Node> {
        let start = self.bump().start;
        let mut keys = Vec::new();
        let mut values = Vec::new();
        let mut rest = None;
        while !self.at_op("}") {
            if rest.is_some() {
                return Err(self.error(self.start(), "invalid syntax: '**' pattern must come last"));
            }
            if self.eat_op("**") {
                rest = Some(self.ident()?.0);
            } else {
                let key = match self.tok().clone() {
                    Tok::Name(n) if n == "None" || n == "True" || n == "False" => self.atom()?,
                    Tok::Name(_) => {
                        let key = self.name_or_attr()?;
                        if !matches!(key.kind, Kind::Attribute(_)) {
                            return Err(self.error(key.span.start, "mapping pattern keys may only match literals and attribute lookups"));
                        }
                        key
                    }
                    _ => self.literal_expr()?,
                };
                self.expect_op(":")?;
                keys.push(key);
                values.push(self.pattern()?);
            }
            if !self.eat_op(",") {
                break;
            }
        }
        self.expect_op("}")?;
        let span = self.span_from(start);
        let seq = |items: Vec<Node>| {
            let s = match (items.first(), items.last()) {
                (Some(a), Some(b)) => Span::new(a.span.start, b.span.end),
                _ => Span::new(start, start),
            };
            Node::seq(s, items)
        };
        Ok(Node::new(Kind::MatchMapping(rest), span, vec![seq(keys), seq(values)]))
    }

    fn class_pattern(&mut self, start: usize, cls: Node) -> PResult<Node> {
        self.expect_op("(")?;
        let mut positional = Vec::new();
        let mut kw_names = Vec::new();
        let mut kw_patterns = Vec::new();
        while !self.at_op(")") {
            let is_kw = matches!(self.tok(), Tok::Name(n) if !is_keyword(n)) && matches!(self.peek(1), Tok::Op("="));
            if is_kw {
                let (name, _) = self.ident()?;
                self.bump();
                kw_names.push(name);
                kw_patterns.push(self.pattern()?);
            } else {
                if !kw_names.is_empty() {
                    return Err(self.error(self.start(), "positional patterns follow keyword patterns"));
                }
                positional.push(self.pattern()?);
            }
            if !self.eat_op(",") {
                break;
            }
        }
        self.expect_op(")")?;
        let seq = |items: Vec<Node>, at: usize| {
            let s = match (items.first(), items.last()) {
                (Some(a), Some(b)) => Span::new(a.span.start, b.span.end),
                _ => Span::new(at, at),
            };
            Node::seq(s, items)
        };
        let cls_end = cls.span.end;
        Ok(Node::new(
            Kind::MatchClass(kw_names),
            self.span_from(start),
            vec![cls, seq(positional, cls_end), seq(kw_patterns, cls_end)],
        ))
    }

    // ---- expressions ---------------------------------------------------

    fn star_expressions(&mut self) -> PResult<Node> {
        let start = self.start();
        let first = self.star_expression()?;
        if !self.at_op(",") {
            return Ok(first);
        }
        let mut elts = vec![first];
        while self.eat_op(",") {
            if !self.at_expr_start() {
                break;
            }
            elts.push(self.star_expression()?);
        }
        Ok(Node::new(Kind::Tuple, self.span_from(start), elts))
    }

    fn star_expression(&mut self) -> PResult<Node> {
        let start = self.start();
        if self.eat_op("*") {
            let value = self.bitwise_or()?;
            return Ok(Node::new(Kind::Starred, self.span_from(start), vec![value]));
        }
        self.expression()
    }

    fn star_named_expression(&mut self) -> PResult<Node> {
        let start = self.start();
        if self.eat_op("*") {
            let value = self.bitwise_or()?;
            return Ok(Node::new(Kind::Starred, self.span_from(start), vec![value]));
        }
        self.named_expression()
    }

    /// Targets of `for` loops and comprehensions.
    fn target_list(&mut self) -> PResult<Node> {
        let start = self.start();
        let first = self.star_target()?;
        let node = if self.at_op(",") {
            let mut elts = vec![first];
            while self.eat_op(",") {
                if !self.at_expr_start() {
                    break;
                }
                elts.push(self.star_target()?);
            }
            Node::new(Kind::Tuple, self.span_from(start), elts)
        } else {
            first
        };
        self.check_assign_target(&node, true)?;
        Ok(node)
    }

    fn star_target(&mut self) -> PResult<Node> {
        let start = self.start();
        if self.eat_op("*") {
            let value = self.bitwise_or()?;
            return Ok(Node::new(Kind::Starred, self.span_from(start), vec![value]));
        }
        self.bitwise_or()
    }

    fn named_expression(&mut self) -> PResult<Node> {
        if let Tok::Name(n) = self.tok() {
            if !is_keyword(n) && matches!(self.peek(1), Tok::Op(":=")) {
                let (name, span) = self.ident()?;
                self.bump();
                let value = self.expression()?;
                let target = Node::leaf(Kind::Name(name), span);
                return Ok(Node::new(Kind::NamedExpr, self.span_from(span.start), vec![target, value]));
            }
        }
        self.expression()
    }

    fn expression(&mut self) -> PResult<Node> {
        if self.at_kw("lambda") {
            return self.lambdef();
        }
        let start = self.start();
        let body = self.disjunction()?;
        if self.at_kw("if") {
            self.bump();
            let test = self.disjunction()?;
            self.expect_kw("else")?;
            let orelse = self.expression()?;
            return Ok(Node::new(Kind::IfExp, self.span_from(start), vec![test, body, orelse]));
        }
        Ok(body)
    }

    fn lambdef(&mut self) -> PResult<Node> {
        let start = self.bump().start;
        let args = self.parameters(true, ":")?;
        self.expect_op(":")?;
        let body = self.expression()?;
        Ok(Node::new(Kind::Lambda, self.span_from(start), vec![args, body]))
    }

    fn bool_chain(&mut self, kw: &str, op: BoolOp, next: fn(&mut Self) -> PResult<Node>) -> PResult<Node> {
        let start = self.start();
        let first = next(self)?;
        if !self.at_kw(kw) {
            return Ok(first);
        }
        let mut values = vec![first];
        while self.eat_kw(kw) {
            values.push(next(self)?);
        }
        Ok(Node::new(Kind::BoolOp(op), self.span_from(start), values))
    }

    fn disjunction(&mut self) -> PResult<Node> {
        self.bool_chain("or", BoolOp::Or, Self::conjunction)
    }

    fn conjunction(&mut self) -> PResult<Node> {
        self.bool_chain("and", BoolOp::And, Self::inversion)
    }

    fn inversion(&mut self) -> PResult<Node> {
        let start = self.start();
        if self.eat_kw("not") {
            let operand = self.inversion()?;
            return Ok(Node::new(Kind::UnaryOp(UnaryOp::Not), self.span_from(start), vec![operand]));
        }
        self.comparison()
    }

    fn comparison_op(&mut self) -> Option<CmpOp> {
        let op = match self.tok() {
            Tok::Op("==") => CmpOp::Eq,
            Tok::Op("!=") => CmpOp::NotEq,
            Tok::Op("<") => CmpOp::Lt,
            Tok::Op("<=") => CmpOp::LtE,
            Tok::Op(">") => CmpOp::Gt,
            Tok::Op(">=") => CmpOp::GtE,
            Tok::Name(n) if n == "in" => CmpOp::In,
            Tok::Name(n) if n == "not" && matches!(self.peek(1), Tok::Name(m) if m == "in") => {
                self.bump();
                CmpOp::NotIn
            }
            Tok::Name(n) if n == "is" => {
                if matches!(self.peek(1), Tok::Name(m) if m == "not") {
                    self.bump();
                    CmpOp::IsNot
                } else {
                    CmpOp::Is
                }
            }
            _ => return None,
        };
        self.bump();
        Some(op)
    }

    fn comparison(&mut self) -> PResult<Node> {
        let start = self.start();
        let left = self.bitwise_or()?;
        let mut ops = Vec::new();
        let mut children = vec![left];
        while let Some(op) = self.comparison_op() {
            ops.push(op);
            children.push(self.bitwise_or()?);
        }
        if ops.is_empty() {
            return Ok(children.pop().unwrap());
        }
        Ok(Node::new(Kind::Compare(ops), self.span_from(start), children))
    }

    fn binary_chain(&mut self, ops: &[&str], next: fn(&mut Self) -> PResult<Node>) -> PResult<Node> {
        let start = self.start();
        let mut left = next(self)?;
        loop {
            let op = match self.tok() {
                Tok::Op(o) if ops.contains(o) => BinOp::from_symbol(o).unwrap(),
                _ => return Ok(left),
            };
            self.bump();
            let right = next(self)?;
            left = Node::new(Kind::BinOp(op), self.span_from(start), vec![left, right]);
        }
    }

    fn bitwise_or(&mut self) -> PResult<Node> {
        self.binary_chain(&["|"], Self::bitwise_xor)
    }

    fn bitwise_xor(&mut self) -> PResult<Node> {
        self.binary_chain(&["^"], Self::bitwise_and)
    }

    fn bitwise_and(&mut self) -> PResult<Node> {
        self.binary_chain(&["&"], Self::shift_expr)
    }

    fn shift_expr(&mut self) -> PResult<Node> {
        self.binary_chain(&["<<", ">>"], Self::sum)
    }

    fn sum(&mut self) -> PResult<Node> {
        self.binary_chain(&["+", "-"], Self::term)
    }

    fn term(&mut self) -> PResult<Node> {
        self.binary_chain(&["*", "/", "//", "%", "@"], Self::factor)
    }

    fn factor(&mut self) -> PResult<Node> {
        let start = self.start();
        let op = match self.tok() {
            Tok::Op("+") => UnaryOp::UAdd,
            Tok::Op("-") => UnaryOp::USub,
            Tok::Op("~") => UnaryOp::Invert,
            _ => return self.power(),
        };
        self.bump();
        let operand = self.factor()?;
        Ok(Node::new(Kind::UnaryOp(op), self.span_from(start), vec![operand]))
    }

    fn power(&mut self) -> PResult<Node> {
        let start = self.start();
        let base = self.await_primary()?;
        if self.eat_op("**") {
            let exponent = self.factor()?;
            return Ok(Node::new(Kind::BinOp(BinOp::Pow), self.span_from(start), vec![base, exponent]));
        }
        Ok(base)
    }

    fn await_primary(&mut self) -> PResult<Node> {
        let start = self.start();
        if self.eat_kw("await") {
            let value = self.primary()?;
            return Ok(Node::new(Kind::Await, self.span_from(start), vec![value]));
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Node> {
        let start = self.start();
        let mut node = self.atom()?;
        loop {
            if self.eat_op(".") {
                let (attr, _) = self.ident()?;
                node = Node::new(Kind::Attribute(attr), self.span_from(start), vec![node]);
            } else if self.eat_op("(") {
                let mut children = vec![node];
                children.extend(self.call_arguments()?);
                node = Node::new(Kind::Call, self.span_from(start), children);
            } else if self.eat_op("[") {
                let slice = self.slices()?;
                self.expect_op("]")?;
                node = Node::new(Kind::Subscript, self.span_from(start), vec![node, slice]);
            } else {
                return Ok(node);
            }
        }
    }

    /// Parses call arguments after the opening parenthesis, consuming the
    /// closing one.
    fn call_arguments(&mut self) -> PResult<Vec<Node>> {
        let mut args: Vec<Node> = Vec::new();
        let mut seen_keyword = false;
        let mut seen_double_star = false;
        while !self.at_op(")") {
            let start = self.start();
            if self.eat_op("*") {
                if seen_double_star {
                    return Err(self.error(start, "iterable argument unpacking follows keyword argument unpacking"));
                }
                let value = self.expression()?;
                args.push(Node::new(Kind::Starred, self.span_from(start), vec![value]));
            } else if self.eat_op("**") {
                let value = self.expression()?;
                args.push(Node::new(Kind::Keyword(None), self.span_from(start), vec![value]));
                seen_double_star = true;
            } else if matches!(self.tok(), Tok::Name(n) if !is_keyword(n)) && matches!(self.peek(1), Tok::Op("=")) {
                let (name, _) = self.ident()?;
                self.bump();
                let value = self.expression()?;
                args.push(Node::new(Kind::Keyword(Some(name)), self.span_from(start), vec![value]));
                seen_keyword = true;
            } else {
                let value = self.named_expression()?;
                if self.at_kw("for") || (self.at_kw("async") && matches!(self.peek(1), Tok::Name(n) if n == "for")) {
                    let mut children = vec![value];
                    children.extend(self.comprehension_clauses()?);
                    let genexp = Node::new(Kind::GeneratorExp, self.span_from(start), children);
                    if !args.is_empty() || !self.at_op(")") {
                        return Err(self.error(start, "Generator expression must be parenthesized"));
                    }
                    args.push(genexp);
                    continue;
                }
                if seen_double_star {
                    return Err(self.error(start, "positional argument follows keyword argument unpacking"));
                }
                if seen_keyword {
                    return Err(self.error(start, "positional argument follows keyword argument"));
                }
                args.push(value);
            }
            if !self.eat_op(",") {
                break;
            }
        }
        self.expect_op(")")?;
        Ok(args)
    }

    fn slices(&mut self) -> PResult<Node> {
        let start = self.start();
        let first = self.slice()?;
        if !self.at_op(",") {
            return Ok(first);
        }
        let mut elts = vec![first];
        while self.eat_op(",") {
            if self.at_op("]") {
                break;
            }
            elts.push(self.slice()?);
        }
        Ok(Node::new(Kind::Tuple, self.span_from(start), elts))
    }

    fn slice(&mut self) -> PResult<Node> {
        let start = self.start();
        if self.at_op("*") {
            return Err(self.error(start, "invalid syntax: starred subscript requires Python 3.11"));
        }
        let lower = if self.at_op(":") { Node::missing(start) } else { self.named_expression()? };
        if !self.eat_op(":") {
            return Ok(lower);
        }
        let bound_end = |p: &Self| p.at_op(":") || p.at_op(",") || p.at_op("]");
        let upper = if bound_end(self) { self.missing_here() } else { self.expression()? };
        let step = if self.eat_op(":") {
            if self.at_op(",") || self.at_op("]") {
                self.missing_here()
            } else {
                self.expression()?
            }
        } else {
            self.missing_here()
        };
        Ok(Node::new(Kind::Slice, self.span_from(start), vec![lower, upper, step]))
    }

    fn comprehension_clauses(&mut self) -> PResult<Vec<Node>> {
        let mut clauses = Vec::new();
        while self.at_kw("for") || (self.at_kw("async") && matches!(self.peek(1), Tok::Name(n) if n == "for")) {
            let start = self.start();
            let is_async = self.eat_kw("async");
            self.expect_kw("for")?;
            let target = self.target_list()?;
            self.expect_kw("in")?;
            let mut children = vec![target, self.disjunction()?];
            while self.eat_kw("if") {
                children.push(self.disjunction()?);
            }
            clauses.push(Node::new(Kind::Comprehension { is_async }, self.span_from(start), children));
        }
        Ok(clauses)
    }

    fn at_comprehension(&self) -> bool {
        self.at_kw("for") || (self.at_kw("async") && matches!(self.peek(1), Tok::Name(n) if n == "for"))
    }

    fn yield_expr(&mut self) -> PResult<Node> {
        let start = self.bump().start;
        if self.eat_kw("from") {
            let value = self.expression()?;
            return Ok(Node::new(Kind::YieldFrom, self.span_from(start), vec![value]));
        }
        let value = if self.at_expr_start() { self.star_expressions()? } else { self.missing_here() };
        Ok(Node::new(Kind::Yield, self.span_from(start), vec![value]))
    }

    fn strings(&mut self) -> PResult<Node> {
        let start = self.start();
        let mut raws = Vec::new();
        while let Tok::Str(raw) = self.tok() {
            raws.push(raw.clone());
            self.bump();
        }
        let kind = decode_strings(&raws).map_err(|m| self.error(start, m))?;
        Ok(Node::leaf(kind, self.span_from(start)))
    }

    fn atom(&mut self) -> PResult<Node> {
        let start = self.start();
        match self.tok().clone() {
            Tok::Name(n) => {
                let lit = match n.as_str() {
                    "None" => Some(Literal::None),
                    "True" => Some(Literal::Bool(true)),
                    "False" => Some(Literal::Bool(false)),
                    _ => None,
                };
                if let Some(lit) = lit {
                    self.bump();
                    return Ok(Node::leaf(Kind::Constant(lit), self.span_from(start)));
                }
                if is_keyword(&n) {
                    return Err(self.unexpected());
                }
                self.bump();
                Ok(Node::leaf(Kind::Name(n), self.span_from(start)))
            }
            Tok::Number(raw) => {
                self.bump();
                let lit = decode_number(&raw).map_err(|m| self.error(start, m))?;
                Ok(Node::leaf(Kind::Constant(lit), self.span_from(start)))
            }
            Tok::Str(_) => self.strings(),
            Tok::Op("...") => {
                self.bump();
                Ok(Node::leaf(Kind::Constant(Literal::Ellipsis), self.span_from(start)))
            }
            Tok::Op("(") => self.paren_atom(),
            Tok::Op("[") => self.list_atom(),
            Tok::Op("{") => self.brace_atom(),
            _ => Err(self.unexpected()),
        }
    }

    fn paren_atom(&mut self) -> PResult<Node> {
        let start = self.bump().start;
        if self.eat_op(")") {
            return Ok(Node::leaf(Kind::Tuple, self.span_from(start)));
        }
        if self.at_kw("yield") {
            let y = self.yield_expr()?;
            self.expect_op(")")?;
            return Ok(y);
        }
        let first = self.star_named_expression()?;
        if self.at_comprehension() {
            if matches!(first.kind, Kind::Starred) {
                return Err(self.error(first.span.start, "iterable unpacking cannot be used in comprehension"));
            }
            let mut children = vec![first];
            children.extend(self.comprehension_clauses()?);
            self.expect_op(")")?;
            return Ok(Node::new(Kind::GeneratorExp, self.span_from(start), children));
        }
        if self.at_op(",") {
            let mut elts = vec![first];
            while self.eat_op(",") {
                if self.at_op(")") {
                    break;
                }
                elts.push(self.star_named_expression()?);
            }
            self.expect_op(")")?;
            return Ok(Node::new(Kind::Tuple, self.span_from(start), elts));
        }
        self.expect_op(")")?;
        if matches!(first.kind, Kind::Starred) {
            return Err(self.error(first.span.start, "cannot use starred expression here"));
        }
        Ok(first)
    }

    fn list_atom(&mut self) -> PResult<Node> {
        let start = self.bump().start;
        if self.eat_op("]") {
            return Ok(Node::leaf(Kind::List, self.span_from(start)));
        }
        let first = self.star_named_expression()?;
        if self.at_comprehension() {
            if matches!(first.kind, Kind::Starred) {
                return Err(self.error(first.span.start, "iterable unpacking cannot be used in comprehension"));
            }
            let mut children = vec![first];
            children.extend(self.comprehension_clauses()?);
            self.expect_op("]")?;
            return Ok(Node::new(Kind::ListComp, self.span_from(start), children));
        }
        let mut elts = vec![first];
        while self.eat_op(",") {
            if self.at_op("]") {
                break;
            }
            elts.push(self.star_named_expression()?);
        }
        self.expect_op("]")?;
        Ok(Node::new(Kind::List, self.span_from(start), elts))
    }

    fn brace_atom(&mut self) -> PResult<Node> {
        let start = self.bump().start;
        if self.eat_op("}") {
            return Ok(Node::leaf(Kind::Dict, self.span_from(start)));
        }
        let mut items = Vec::new();
        if self.at_op("**") {
            let at = self.bump().start;
            items.push(Node::missing(at));
            items.push(self.bitwise_or()?);
            return self.dict_rest(start, items);
        }
        let first = self.star_named_expression()?;
        if self.eat_op(":") {
            let value = self.expression()?;
            if self.at_comprehension() {
                let mut children = vec![first, value];
                children.extend(self.comprehension_clauses()?);
                self.expect_op("}")?;
                return Ok(Node::new(Kind::DictComp, self.span_from(start), children));
            }
            items.push(first);
            items.push(value);
            return self.dict_rest(start, items);
        }
        if self.at_comprehension() {
            if matches!(first.kind, Kind::Starred) {
                return Err(self.error(first.span.start, "iterable unpacking cannot be used in comprehension"));
            }
            let mut children = vec![first];
            children.extend(self.comprehension_clauses()?);
            self.expect_op("}")?;
            return Ok(Node::new(Kind::SetComp, self.span_from(start), children));
        }
        let mut elts = vec![first];
        while self.eat_op(",") {
            if self.at_op("}") {
                break;
            }
            elts.push(self.star_named_expression()?);
        }
        self.expect_op("}")?;
        Ok(Node::new(Kind::Set, self.span_from(start), elts))
    }

    fn dict_rest(&mut self, start: usize, mut items: Vec<Node>) -> PResult<Node> {
        while self.eat_op(",") {
            if self.at_op("}") {
                break;
            }
            if self.at_op("**") {
                let at = self.bump().start;
                items.push(Node::missing(at));
                items.push(self.bitwise_or()?);
            } else {
                items.push(self.expression()?);
                self.expect_op(":")?;
                items.push(self.expression()?);
            }
        }
        self.expect_op("}")?;
        Ok(Node::new(Kind::Dict, self.span_from(start), items))
    }
}

fn describe(node: &Node) -> &'static str {
    match &node.kind {
        Kind::Call => "function call",
        Kind::Constant(Literal::None) => "None",
        Kind::Constant(Literal::Bool(true)) => "True",
        Kind::Constant(Literal::Bool(false)) => "False",
        Kind::Constant(Literal::Ellipsis) => "ellipsis",
        Kind::Constant(_) | Kind::FormattedString(_) => "literal",
        Kind::BinOp(_) | Kind::UnaryOp(_) => "expression",
        Kind::BoolOp(_) => "expression",
        Kind::Compare(_) => "comparison",
        Kind::Lambda => "lambda",
        Kind::IfExp => "conditional expression",
        Kind::NamedExpr => "named expression",
        Kind::Dict => "dict literal",
        Kind::Set => "set display",
        Kind::ListComp => "list comprehension",
        Kind::SetComp => "set comprehension",
        Kind::DictComp => "dict comprehension",
        Kind::GeneratorExp => "generator expression",
        Kind::Await => "await expression",
        Kind::Yield | Kind::YieldFrom => "yield expression",
        Kind::Tuple => "tuple",
        Kind::List => "list",
        Kind::Starred => "starred",
        _ => "expression",
    }
}
