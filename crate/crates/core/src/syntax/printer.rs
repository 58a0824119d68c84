//! Canonical source rendering.
//!
//! Output is PEP 8-ish, four-space indented, and inserts only the
//! parentheses that operator precedence requires. Abstract variables print
//! in rule notation (`@{Kind: name}` / `@{name}`).

use super::node::*;

// Precedence levels, loosest first.
const YIELD: u8 = 0;
const TUPLE: u8 = 1;
const TEST: u8 = 3; // lambda
const IFEXP: u8 = 4;
const OR: u8 = 5;
const AND: u8 = 6;
const NOT: u8 = 7;
const CMP: u8 = 8;
const BOR: u8 = 9;
const BXOR: u8 = 10;
const BAND: u8 = 11;
const SHIFT: u8 = 12;
const ARITH: u8 = 13;
const TERM: u8 = 14;
const FACTOR: u8 = 15;
const POWER: u8 = 16;
const AWAIT: u8 = 17;
const ATOM: u8 = 18;

/// Renders a statement list; every statement line ends with `\n`.
pub fn print_source(stmts: &StmtList) -> String {
    let mut p = Printer::default();
    for s in &stmts.stmts {
        p.stmt(s, 0);
    }
    p.out
}

/// Renders any node: statements as (possibly multi-line) text without a
/// trailing newline, expressions and patterns inline.
pub fn print_node(node: &Node) -> String {
    if node.kind.is_stmt() {
        let mut p = Printer::default();
        p.stmt(node, 0);
        p.out.pop();
        p.out
    } else if is_pattern(&node.kind) {
        pattern(node)
    } else {
        expr(node, YIELD)
    }
}

/// Renders an expression at statement level (bare tuples allowed).
pub fn print_expr(node: &Node) -> String {
    expr(node, YIELD)
}

fn is_pattern(kind: &Kind) -> bool {
    matches!(
        kind,
        Kind::MatchValue
            | Kind::MatchSingleton(_)
            | Kind::MatchSequence
            | Kind::MatchMapping(_)
            | Kind::MatchClass(_)
            | Kind::MatchStar(_)
            | Kind::MatchAs(_)
            | Kind::MatchOr
    )
}

fn precedence(node: &Node) -> u8 {
    match &node.kind {
        Kind::Yield | Kind::YieldFrom => YIELD,
        Kind::Tuple if !node.children.is_empty() => TUPLE,
        Kind::Lambda => TEST,
        Kind::IfExp => IFEXP,
        Kind::BoolOp(BoolOp::Or) => OR,
        Kind::BoolOp(BoolOp::And) => AND,
        Kind::UnaryOp(UnaryOp::Not) => NOT,
        Kind::Compare(_) => CMP,
        Kind::BinOp(op) => binop_prec(*op),
        Kind::UnaryOp(_) => FACTOR,
        Kind::Await => AWAIT,
        _ => ATOM,
    }
}

fn binop_prec(op: BinOp) -> u8 {
    match op {
        BinOp::BitOr => BOR,
        BinOp::BitXor => BXOR,
        BinOp::BitAnd => BAND,
        BinOp::LShift | BinOp::RShift => SHIFT,
        BinOp::Add | BinOp::Sub => ARITH,
        BinOp::Mult | BinOp::MatMult | BinOp::Div | BinOp::Mod | BinOp::FloorDiv => TERM,
        BinOp::Pow => POWER,
    }
}

fn expr(node: &Node, min: u8) -> String {
    let text = expr_text(node);
    if precedence(node) < min {
        format!("({text})")
    } else {
        text
    }
}

fn join(nodes: &[Node], min: u8) -> String {
    nodes.iter().map(|n| expr(n, min)).collect::<Vec<_>>().join(", ")
}

fn expr_text(node: &Node) -> String {
    let c = &node.children;
    match &node.kind {
        Kind::BoolOp(op) => {
            let (word, min) = match op {
                BoolOp::And => (" and ", NOT),
                BoolOp::Or => (" or ", AND),
            };
            c.iter().map(|v| expr(v, min)).collect::<Vec<_>>().join(word)
        }
        Kind::NamedExpr => format!("({} := {})", expr(&c[0], ATOM), expr(&c[1], TEST)),
        Kind::BinOp(BinOp::Pow) => format!("{} ** {}", expr(&c[0], AWAIT), expr(&c[1], FACTOR)),
        Kind::BinOp(op) => {
            let p = binop_prec(*op);
            format!("{} {} {}", expr(&c[0], p), op.symbol(), expr(&c[1], p + 1))
        }
        Kind::UnaryOp(UnaryOp::Not) => format!("not {}", expr(&c[0], NOT)),
        Kind::UnaryOp(op) => {
            let sym = match op {
                UnaryOp::Invert => "~",
                UnaryOp::UAdd => "+",
                _ => "-",
            };
            format!("{sym}{}", expr(&c[0], FACTOR))
        }
        Kind::Lambda => {
            let args = arguments(&c[0], true);
            if args.is_empty() {
                format!("lambda: {}", expr(&c[1], TEST))
            } else {
                format!("lambda {args}: {}", expr(&c[1], TEST))
            }
        }
        Kind::IfExp => format!("{} if {} else {}", expr(&c[1], OR), expr(&c[0], OR), expr(&c[2], TEST)),
        Kind::Dict => {
            let items: Vec<String> = c
                .chunks(2)
                .map(|kv| {
                    if kv[0].is_missing() {
                        format!("**{}", expr(&kv[1], BOR))
                    } else {
                        format!("{}: {}", expr(&kv[0], IFEXP), expr(&kv[1], TEST))
                    }
                })
                .collect();
            format!("{{{}}}", items.join(", "))
        }
        Kind::Set => format!("{{{}}}", join(c, TEST)),
        Kind::List => format!("[{}]", join(c, TEST)),
        Kind::Tuple => match c.len() {
            0 => "()".into(),
            1 => format!("{},", expr(&c[0], TEST)),
            _ => join(c, TEST),
        },
        Kind::ListComp => format!("[{}{}]", expr(&c[0], TEST), comprehensions(&c[1..])),
        Kind::SetComp => format!("{{{}{}}}", expr(&c[0], TEST), comprehensions(&c[1..])),
        Kind::GeneratorExp => format!("({}{})", expr(&c[0], TEST), comprehensions(&c[1..])),
        Kind::DictComp => {
            format!("{{{}: {}{}}}", expr(&c[0], IFEXP), expr(&c[1], TEST), comprehensions(&c[2..]))
        }
        Kind::Await => format!("await {}", expr(&c[0], ATOM)),
        Kind::Yield => {
            if c[0].is_missing() {
                "yield".into()
            } else {
                format!("yield {}", expr(&c[0], TUPLE))
            }
        }
        Kind::YieldFrom => format!("yield from {}", expr(&c[0], TEST)),
        Kind::Compare(ops) => {
            let mut s = expr(&c[0], BOR);
            for (op, right) in ops.iter().zip(&c[1..]) {
                s.push(' ');
                s.push_str(op.symbol());
                s.push(' ');
                s.push_str(&expr(right, BOR));
            }
            s
        }
        Kind::Call => format!("{}({})", primary(&c[0]), call_args(&c[1..])),
        Kind::FormattedString(tokens) => tokens.join(" "),
        Kind::Constant(lit) => literal(lit),
        Kind::Attribute(attr) => format!("{}.{attr}", primary(&c[0])),
        Kind::Subscript => format!("{}[{}]", primary(&c[0]), subscript(&c[1])),
        Kind::Starred => format!("*{}", expr(&c[0], BOR)),
        Kind::Name(id) => id.clone(),
        Kind::Slice => {
            let part = |n: &Node| if n.is_missing() { String::new() } else { expr(n, IFEXP) };
            let mut s = format!("{}:{}", part(&c[0]), part(&c[1]));
            if !c[2].is_missing() {
                s.push(':');
                s.push_str(&part(&c[2]));
            }
            s
        }
        Kind::Keyword(Some(name)) => format!("{name}={}", expr(&c[0], TEST)),
        Kind::Keyword(None) => format!("**{}", expr(&c[0], TEST)),
        Kind::Hole(h) => hole(h),
        Kind::Missing => String::new(),
        other => format!("<{}>", other.tag()),
    }
}

pub(crate) fn hole(h: &Hole) -> String {
    match &h.kind {
        Some(kind) => format!("@{{{kind}: {}}}", h.name),
        None => format!("@{{{}}}", h.name),
    }
}

/// The value of an attribute, call or subscript.
fn primary(node: &Node) -> String {
    if matches!(node.kind, Kind::Constant(Literal::Int(_))) {
        return format!("({})", expr_text(node));
    }
    expr(node, ATOM)
}

fn subscript(slice: &Node) -> String {
    match slice.kind {
        Kind::Tuple if !slice.children.is_empty() && !slice.children.iter().any(|e| matches!(e.kind, Kind::Starred)) => {
            let parts: Vec<String> = slice.children.iter().map(|e| expr(e, TEST)).collect();
            if parts.len() == 1 {
                format!("{},", parts[0])
            } else {
                parts.join(", ")
            }
        }
        _ => expr(slice, TEST),
    }
}

fn call_args(args: &[Node]) -> String {
    args.iter()
        .map(|a| match a.kind {
            Kind::Starred => format!("*{}", expr(&a.children[0], TEST)),
            _ => expr(a, TEST),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn comprehensions(clauses: &[Node]) -> String {
    let mut s = String::new();
    for clause in clauses {
        let is_async = matches!(clause.kind, Kind::Comprehension { is_async: true });
        s.push_str(if is_async { " async for " } else { " for " });
        s.push_str(&expr(&clause.children[0], TUPLE));
        s.push_str(" in ");
        s.push_str(&expr(&clause.children[1], OR));
        for cond in &clause.children[2..] {
            s.push_str(" if ");
            s.push_str(&expr(cond, OR));
        }
    }
    s
}

fn arguments(args: &Node, lambda: bool) -> String {
    let c = &args.children;
    let param = |p: &Node, prefix: &str| {
        let Kind::Arg(name) = &p.kind else { return String::new() };
        let mut s = format!("{prefix}{name}");
        let annotated = !lambda && !p.children[0].is_missing();
        if annotated {
            s.push_str(": ");
            s.push_str(&expr(&p.children[0], TEST));
        }
        if !p.children[1].is_missing() {
            s.push_str(if annotated { " = " } else { "=" });
            s.push_str(&expr(&p.children[1], TEST));
        }
        s
    };
    let mut parts: Vec<String> = Vec::new();
    parts.extend(c[0].children.iter().map(|p| param(p, "")));
    if !c[0].children.is_empty() {
        parts.push("/".into());
    }
    parts.extend(c[1].children.iter().map(|p| param(p, "")));
    if !c[2].is_missing() {
        parts.push(param(&c[2], "*"));
    } else if !c[3].children.is_empty() {
        parts.push("*".into());
    }
    parts.extend(c[3].children.iter().map(|p| param(p, "")));
    if !c[4].is_missing() {
        parts.push(param(&c[4], "**"));
    }
    parts.join(", ")
}

fn literal(lit: &Literal) -> String {
    match lit {
        Literal::Str(s) => str_repr(s),
        Literal::OpaqueStr(tokens) => tokens.join(" "),
        Literal::Bytes(b) => bytes_repr(b),
        Literal::Int(i) => i.to_string(),
        Literal::Float(f) => float_repr(*f),
        Literal::Complex(f) => format!("{}j", float_repr(*f)),
        Literal::Bool(true) => "True".into(),
        Literal::Bool(false) => "False".into(),
        Literal::None => "None".into(),
        Literal::Ellipsis => "...".into(),
    }
}

fn float_repr(f: f64) -> String {
    if f.is_infinite() {
        "1e309".into()
    } else {
        format!("{f:?}")
    }
}

fn str_repr(s: &str) -> String {
    let quote = if s.contains('\'') && !s.contains('"') { '"' } else { '\'' };
    let mut out = String::with_capacity(s.len() + 2);
    out.push(quote);
    for ch in s.chars() {
        match ch {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c == quote => {
                out.push('\\');
                out.push(c);
            }
            c if (c as u32) < 0x20 || c as u32 == 0x7f || matches!(c, '\u{85}' | '\u{2028}' | '\u{2029}' | '\u{feff}') => {
                let v = c as u32;
                if v < 0x100 {
                    out.push_str(&format!("\\x{v:02x}"));
                } else {
                    out.push_str(&format!("\\u{v:04x}"));
                }
            }
            c => out.push(c),
        }
    }
    out.push(quote);
    out
}

fn bytes_repr(b: &[u8]) -> String {
    let quote = if b.contains(&b'\'') && !b.contains(&b'"') { b'"' } else { b'\'' };
    let mut out = String::from("b");
    out.push(quote as char);
    for &byte in b {
        match byte {
            b'\\' => out.push_str("\\\\"),
            b'\n' => out.push_str("\\n"),
            b'\r' => out.push_str("\\r"),
            b'\t' => out.push_str("\\t"),
            q if q == quote => {
                out.push('\\');
                out.push(q as char);
            }
            0x20..=0x7e => out.push(byte as char),
            _ => out.push_str(&format!("\\x{byte:02x}")),
        }
    }
    out.push(quote as char);
    out
}

fn pattern(node: &Node) -> String {
    let c = &node.children;
    match &node.kind {
        Kind::MatchValue => expr(&c[0], TEST),
        Kind::MatchSingleton(lit) => literal(lit),
        Kind::MatchSequence => format!("[{}]", c.iter().map(pattern).collect::<Vec<_>>().join(", ")),
        Kind::MatchMapping(rest) => {
            let mut items: Vec<String> = c[0]
                .children
                .iter()
                .zip(&c[1].children)
                .map(|(k, p)| format!("{}: {}", expr(k, TEST), pattern(p)))
                .collect();
            if let Some(rest) = rest {
                items.push(format!("**{rest}"));
            }
            format!("{{{}}}", items.join(", "))
        }
        Kind::MatchClass(names) => {
            let mut items: Vec<String> = c[1].children.iter().map(pattern).collect();
            items.extend(names.iter().zip(&c[2].children).map(|(n, p)| format!("{n}={}", pattern(p))));
            format!("{}({})", expr(&c[0], ATOM), items.join(", "))
        }
        Kind::MatchStar(name) => format!("*{}", name.as_deref().unwrap_or("_")),
        Kind::MatchAs(name) => {
            let name = name.as_deref().unwrap_or("_");
            if c.is_empty() || c[0].is_missing() {
                name.to_string()
            } else {
                let inner = pattern(&c[0]);
                if matches!(c[0].kind, Kind::MatchAs(_)) {
                    format!("({inner}) as {name}")
                } else {
                    format!("{inner} as {name}")
                }
            }
        }
        Kind::MatchOr => c
            .iter()
            .map(|alt| {
                let nested = matches!(alt.kind, Kind::MatchOr)
                    || (matches!(alt.kind, Kind::MatchAs(_)) && !alt.children.is_empty() && !alt.children[0].is_missing());
                if nested {
                    format!("({})", pattern(alt))
                } else {
                    pattern(alt)
                }
            })
            .collect::<Vec<_>>()
            .join(" | "),
        Kind::Hole(h) => hole(h),
        _ => expr(node, TEST),
    }
}

#[derive(Default)]
struct Printer {
    out: String,
}

impl Printer {
    fn line(&mut self, indent: usize, text: &str) {
        for _ in 0..indent {
            self.out.push_str("    ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn block(&mut self, body: &Node, indent: usize) {
        if body.children.is_empty() {
            self.line(indent, "pass");
        }
        for s in &body.children {
            self.stmt(s, indent);
        }
    }

    fn else_block(&mut self, orelse: &Node, indent: usize) {
        if !orelse.children.is_empty() {
            self.line(indent, "else:");
            self.block(orelse, indent + 1);
        }
    }

    fn stmt(&mut self, node: &Node, indent: usize) {
        let c = &node.children;
        match &node.kind {
            Kind::Expr => self.line(indent, &expr(&c[0], YIELD)),
            Kind::Assign => {
                let mut parts: Vec<String> = c[..c.len() - 1].iter().map(|t| expr(t, TUPLE)).collect();
                parts.push(expr(&c[c.len() - 1], YIELD));
                self.line(indent, &parts.join(" = "));
            }
            Kind::AugAssign(op) => {
                self.line(indent, &format!("{} {}= {}", expr(&c[0], ATOM), op.symbol(), expr(&c[1], YIELD)));
            }
            Kind::AnnAssign { simple } => {
                let target = if !simple && matches!(c[0].kind, Kind::Name(_)) {
                    format!("({})", expr_text(&c[0]))
                } else {
                    expr(&c[0], ATOM)
                };
                let mut s = format!("{target}: {}", expr(&c[1], TEST));
                if !c[2].is_missing() {
                    s.push_str(" = ");
                    s.push_str(&expr(&c[2], YIELD));
                }
                self.line(indent, &s);
            }
            Kind::For | Kind::AsyncFor => {
                let kw = if matches!(node.kind, Kind::AsyncFor) { "async for" } else { "for" };
                self.line(indent, &format!("{kw} {} in {}:", expr(&c[0], TUPLE), expr(&c[1], TUPLE)));
                self.block(&c[2], indent + 1);
                self.else_block(&c[3], indent);
            }
            Kind::While => {
                self.line(indent, &format!("while {}:", expr(&c[0], TEST)));
                self.block(&c[1], indent + 1);
                self.else_block(&c[2], indent);
            }
            Kind::If => self.if_chain(node, indent, "if"),
            Kind::With | Kind::AsyncWith => {
                let kw = if matches!(node.kind, Kind::AsyncWith) { "async with" } else { "with" };
                let items: Vec<String> = c[..c.len() - 1]
                    .iter()
                    .map(|item| {
                        let ctx = expr(&item.children[0], TEST);
                        if item.children[1].is_missing() {
                            ctx
                        } else {
                            format!("{ctx} as {}", expr(&item.children[1], TEST))
                        }
                    })
                    .collect();
                self.line(indent, &format!("{kw} {}:", items.join(", ")));
                self.block(&c[c.len() - 1], indent + 1);
            }
            Kind::FunctionDef(name) | Kind::AsyncFunctionDef(name) => {
                self.decorators(&c[0], indent);
                let kw = if matches!(node.kind, Kind::AsyncFunctionDef(_)) { "async def" } else { "def" };
                let mut head = format!("{kw} {name}({})", arguments(&c[1], false));
                if !c[2].is_missing() {
                    head.push_str(" -> ");
                    head.push_str(&expr(&c[2], TEST));
                }
                head.push(':');
                self.line(indent, &head);
                self.block(&c[3], indent + 1);
            }
            Kind::ClassDef(name) => {
                self.decorators(&c[0], indent);
                let mut args: Vec<Node> = c[1].children.clone();
                args.extend(c[2].children.iter().cloned());
                if args.is_empty() {
                    self.line(indent, &format!("class {name}:"));
                } else {
                    self.line(indent, &format!("class {name}({}):", call_args(&args)));
                }
                self.block(&c[3], indent + 1);
            }
            Kind::Return => {
                if c[0].is_missing() {
                    self.line(indent, "return");
                } else {
                    self.line(indent, &format!("return {}", expr(&c[0], TUPLE)));
                }
            }
            Kind::Delete => self.line(indent, &format!("del {}", join(c, TEST))),
            Kind::Pass => self.line(indent, "pass"),
            Kind::Break => self.line(indent, "break"),
            Kind::Continue => self.line(indent, "continue"),
            Kind::Raise => {
                let mut s = String::from("raise");
                if !c[0].is_missing() {
                    s.push(' ');
                    s.push_str(&expr(&c[0], TEST));
                }
                if !c[1].is_missing() {
                    s.push_str(" from ");
                    s.push_str(&expr(&c[1], TEST));
                }
                self.line(indent, &s);
            }
            Kind::Try => {
                self.line(indent, "try:");
                self.block(&c[0], indent + 1);
                for handler in &c[1].children {
                    let Kind::ExceptHandler(name) = &handler.kind else { continue };
                    let mut head = String::from("except");
                    if !handler.children[0].is_missing() {
                        head.push(' ');
                        head.push_str(&expr(&handler.children[0], TEST));
                        if let Some(name) = name {
                            head.push_str(" as ");
                            head.push_str(name);
                        }
                    }
                    head.push(':');
                    self.line(indent, &head);
                    self.block(&handler.children[1], indent + 1);
                }
                self.else_block(&c[2], indent);
                if !c[3].children.is_empty() {
                    self.line(indent, "finally:");
                    self.block(&c[3], indent + 1);
                }
            }
            Kind::Assert => {
                let mut s = format!("assert {}", expr(&c[0], TEST));
                if !c[1].is_missing() {
                    s.push_str(", ");
                    s.push_str(&expr(&c[1], TEST));
                }
                self.line(indent, &s);
            }
            Kind::Import => self.line(indent, &format!("import {}", aliases(c))),
            Kind::ImportFrom { module, level } => {
                let dots = ".".repeat(*level as usize);
                let module = module.as_deref().unwrap_or("");
                self.line(indent, &format!("from {dots}{module} import {}", aliases(c)));
            }
            Kind::Global(names) => self.line(indent, &format!("global {}", names.join(", "))),
            Kind::Nonlocal(names) => self.line(indent, &format!("nonlocal {}", names.join(", "))),
            Kind::Match => {
                self.line(indent, &format!("match {}:", expr(&c[0], TUPLE)));
                for case in &c[1..] {
                    let cc = &case.children;
                    let mut head = format!("case {}", pattern(&cc[0]));
                    if !cc[1].is_missing() {
                        head.push_str(" if ");
                        head.push_str(&expr(&cc[1], TEST));
                    }
                    head.push(':');
                    self.line(indent + 1, &head);
                    self.block(&cc[2], indent + 2);
                }
            }
            _ => self.line(indent, &expr(node, YIELD)),
        }
    }

    fn if_chain(&mut self, node: &Node, indent: usize, kw: &str) {
        let c = &node.children;
        self.line(indent, &format!("{kw} {}:", expr(&c[0], TEST)));
        self.block(&c[1], indent + 1);
        let orelse = &c[2];
        if orelse.children.len() == 1 && matches!(orelse.children[0].kind, Kind::If) {
            self.if_chain(&orelse.children[0], indent, "elif");
        } else {
            self.else_block(orelse, indent);
        }
    }

    fn decorators(&mut self, seq: &Node, indent: usize) {
        for d in &seq.children {
            self.line(indent, &format!("@{}", expr(d, TEST)));
        }
    }
}

fn aliases(items: &[Node]) -> String {
    items
        .iter()
        .filter_map(|a| match &a.kind {
            Kind::Alias { name, asname: Some(asname) } => Some(format!("{name} as {asname}")),
            Kind::Alias { name, asname: None } => Some(name.clone()),
            _ => None,
        })
        .collect::<Vec<_>>()
        .join(", ")
}
