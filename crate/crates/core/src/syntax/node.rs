//! Uniform kind-tagged syntax tree.
//!
//! Every construct of the subject grammar is a [`Node`]: a [`Kind`] (which
//! carries any identifier, operator or literal payload), a source [`Span`],
//! and an ordered list of children. Optional children are always present as
//! [`Kind::Missing`] placeholders and every variable-length list that sits
//! next to other children is wrapped in a [`Kind::Seq`] node, so each kind
//! has a fixed child layout:
//!
//! | kind | children |
//! |------|----------|
//! | `Expr` | value |
//! | `Assign` | target.., value |
//! | `AugAssign` | target, value |
//! | `AnnAssign` | target, annotation, value? |
//! | `For`, `AsyncFor` | target, iter, Seq body, Seq orelse |
//! | `While`, `If` | test, Seq body, Seq orelse |
//! | `With`, `AsyncWith` | WithItem.., Seq body |
//! | `FunctionDef`, `AsyncFunctionDef` | Seq decorators, Arguments, returns?, Seq body |
//! | `ClassDef` | Seq decorators, Seq bases, Seq keywords, Seq body |
//! | `Return` | value? |
//! | `Delete` | target.. |
//! | `Raise` | exc?, cause? |
//! | `Try` | Seq body, Seq handlers, Seq orelse, Seq finalbody |
//! | `Assert` | test, msg? |
//! | `Import`, `ImportFrom` | Alias.. |
//! | `Match` | subject, MatchCase.. |
//! | `BoolOp` | value.. (at least two) |
//! | `NamedExpr` | target, value |
//! | `BinOp` | left, right |
//! | `UnaryOp`, `Await`, `YieldFrom`, `Starred` | operand |
//! | `Yield` | value? |
//! | `Lambda` | Arguments, body |
//! | `IfExp` | test, body, orelse |
//! | `Dict` | key?, value, key?, value, .. (missing key = `**value`) |
//! | `Set`, `List`, `Tuple` | element.. |
//! | `ListComp`, `SetComp`, `GeneratorExp` | element, Comprehension.. |
//! | `DictComp` | key, value, Comprehension.. |
//! | `Compare` | left, comparator.. |
//! | `Call` | func, argument.. (positional, `Starred` and `Keyword` in source order) |
//! | `Attribute` | value |
//! | `Subscript` | value, slice |
//! | `Slice` | lower?, upper?, step? |
//! | `Keyword` | value |
//! | `Comprehension` | target, iter, condition.. |
//! | `Arguments` | Seq posonly, Seq args, vararg?, Seq kwonly, kwarg? |
//! | `Arg` | annotation?, default? |
//! | `ExceptHandler` | type?, Seq body |
//! | `WithItem` | context, target? |
//! | `MatchCase` | pattern, guard?, Seq body |
//! | `MatchValue` | value |
//! | `MatchSequence`, `MatchOr` | pattern.. |
//! | `MatchMapping` | Seq keys, Seq patterns |
//! | `MatchClass` | cls, Seq patterns, Seq keyword patterns |
//! | `MatchAs` | pattern? |
//!
//! (`?` marks a slot that may hold `Missing`, `..` a run of children.)

use std::fmt;

use num_bigint::BigUint;

use crate::rule::VarKind;

/// Half-open byte range into the text a node was parsed from.
///
/// Nodes synthesized by the rewriter carry [`Span::DETACHED`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub const DETACHED: Span = Span { start: 0, end: 0 };

    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoolOp {
    And,
    Or,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mult,
    MatMult,
    Div,
    Mod,
    Pow,
    LShift,
    RShift,
    BitOr,
    BitXor,
    BitAnd,
    FloorDiv,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mult => "*",
            BinOp::MatMult => "@",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Pow => "**",
            BinOp::LShift => "<<",
            BinOp::RShift => ">>",
            BinOp::BitOr => "|",
            BinOp::BitXor => "^",
            BinOp::BitAnd => "&",
            BinOp::FloorDiv => "//",
        }
    }

    pub fn from_symbol(sym: &str) -> Option<BinOp> {
        Some(match sym {
            "+" => BinOp::Add,
            "-" => BinOp::Sub,
            "*" => BinOp::Mult,
            "@" => BinOp::MatMult,
            "/" => BinOp::Div,
            "%" => BinOp::Mod,
            "**" => BinOp::Pow,
            "<<" => BinOp::LShift,
            ">>" => BinOp::RShift,
            "|" => BinOp::BitOr,
            "^" => BinOp::BitXor,
            "&" => BinOp::BitAnd,
            "//" => BinOp::FloorDiv,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Invert,
    Not,
    UAdd,
    USub,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    NotEq,
    Lt,
    LtE,
    Gt,
    GtE,
    Is,
    IsNot,
    In,
    NotIn,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::NotEq => "!=",
            CmpOp::Lt => "<",
            CmpOp::LtE => "<=",
            CmpOp::Gt => ">",
            CmpOp::GtE => ">=",
            CmpOp::Is => "is",
            CmpOp::IsNot => "is not",
            CmpOp::In => "in",
            CmpOp::NotIn => "not in",
        }
    }
}

/// Value-type tag of a literal, as exposed to rule kinds and bindings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValueType {
    Str,
    Bytes,
    Int,
    Float,
    Complex,
    Bool,
    None,
    Ellipsis,
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValueType::Str => "str",
            ValueType::Bytes => "bytes",
            ValueType::Int => "int",
            ValueType::Float => "float",
            ValueType::Complex => "complex",
            ValueType::Bool => "bool",
            ValueType::None => "none",
            ValueType::Ellipsis => "ellipsis",
        })
    }
}

/// A constant's value. Source spelling is not kept: `'a'` and `"a"` are the
/// same literal, as are `0x10` and `16`.
#[derive(Debug, Clone)]
pub enum Literal {
    Str(String),
    /// A string whose value cannot be held in a Rust `String` (lone
    /// surrogate escapes) or needs the Unicode name table (`\N{...}`).
    /// Kept as the raw source tokens and compared by spelling.
    OpaqueStr(Vec<String>),
    Bytes(Vec<u8>),
    Int(BigUint),
    Float(f64),
    /// Imaginary literal; the value is the imaginary part.
    Complex(f64),
    Bool(bool),
    None,
    Ellipsis,
}

impl Literal {
    pub fn value_type(&self) -> ValueType {
        match self {
            Literal::Str(_) | Literal::OpaqueStr(_) => ValueType::Str,
            Literal::Bytes(_) => ValueType::Bytes,
            Literal::Int(_) => ValueType::Int,
            Literal::Float(_) => ValueType::Float,
            Literal::Complex(_) => ValueType::Complex,
            Literal::Bool(_) => ValueType::Bool,
            Literal::None => ValueType::None,
            Literal::Ellipsis => ValueType::Ellipsis,
        }
    }
}

impl PartialEq for Literal {
    fn eq(&self, other: &Self) -> bool {
        use Literal::*;
        match (self, other) {
            (Str(a), Str(b)) => a == b,
            (OpaqueStr(a), OpaqueStr(b)) => a == b,
            (Bytes(a), Bytes(b)) => a == b,
            (Int(a), Int(b)) => a == b,
            (Float(a), Float(b)) | (Complex(a), Complex(b)) => a.to_bits() == b.to_bits(),
            (Bool(a), Bool(b)) => a == b,
            (None, None) | (Ellipsis, Ellipsis) => true,
            _ => false,
        }
    }
}

impl Eq for Literal {}

/// An abstract variable occurring in a rule pattern or template.
///
/// `kind` is present on binding occurrences (`@{Kind: name}`) and absent on
/// use occurrences (`@{name}`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Hole {
    pub name: String,
    pub kind: Option<VarKind>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Kind {
    // statements
    Expr,
    Assign,
    AugAssign(BinOp),
    /// `simple` is false when the target is a parenthesized name.
    AnnAssign { simple: bool },
    For,
    AsyncFor,
    While,
    If,
    With,
    AsyncWith,
    FunctionDef(String),
    AsyncFunctionDef(String),
    ClassDef(String),
    Return,
    Delete,
    Pass,
    Break,
    Continue,
    Raise,
    Try,
    Assert,
    Import,
    ImportFrom { module: Option<String>, level: u32 },
    Global(Vec<String>),
    Nonlocal(Vec<String>),
    Match,

    // expressions
    BoolOp(BoolOp),
    NamedExpr,
    BinOp(BinOp),
    UnaryOp(UnaryOp),
    Lambda,
    IfExp,
    Dict,
    Set,
    ListComp,
    SetComp,
    DictComp,
    GeneratorExp,
    Await,
    Yield,
    YieldFrom,
    Compare(Vec<CmpOp>),
    Call,
    /// f-string (possibly implicitly concatenated with plain strings), kept
    /// as its raw source tokens.
    FormattedString(Vec<String>),
    Constant(Literal),
    Attribute(String),
    Subscript,
    Starred,
    Name(String),
    List,
    Tuple,
    Slice,

    // auxiliary
    Seq,
    Missing,
    /// `None` for `**value`.
    Keyword(Option<String>),
    Comprehension { is_async: bool },
    Arguments,
    Arg(String),
    ExceptHandler(Option<String>),
    Alias { name: String, asname: Option<String> },
    WithItem,
    MatchCase,
    MatchValue,
    MatchSingleton(Literal),
    MatchSequence,
    /// Name bound by `**rest`.
    MatchMapping(Option<String>),
    /// Keyword attribute names, parallel to the keyword-pattern children.
    MatchClass(Vec<String>),
    MatchStar(Option<String>),
    MatchAs(Option<String>),
    MatchOr,

    Hole(Hole),
}

impl Kind {
    pub fn is_stmt(&self) -> bool {
        use Kind::*;
        matches!(
            self,
            Expr | Assign
                | AugAssign(_)
                | AnnAssign { .. }
                | For
                | AsyncFor
                | While
                | If
                | With
                | AsyncWith
                | FunctionDef(_)
                | AsyncFunctionDef(_)
                | ClassDef(_)
                | Return
                | Delete
                | Pass
                | Break
                | Continue
                | Raise
                | Try
                | Assert
                | Import
                | ImportFrom { .. }
                | Global(_)
                | Nonlocal(_)
                | Match
        )
    }

    /// True for every expression kind of the subject grammar (including
    /// `Starred` and `Slice`, which are only legal in restricted positions).
    pub fn is_expr(&self) -> bool {
        use Kind::*;
        matches!(
            self,
            BoolOp(_)
                | NamedExpr
                | BinOp(_)
                | UnaryOp(_)
                | Lambda
                | IfExp
                | Dict
                | Set
                | ListComp
                | SetComp
                | DictComp
                | GeneratorExp
                | Await
                | Yield
                | YieldFrom
                | Compare(_)
                | Call
                | FormattedString(_)
                | Constant(_)
                | Attribute(_)
                | Subscript
                | Starred
                | Name(_)
                | List
                | Tuple
                | Slice
                | Hole(_)
        )
    }

    /// Short tag used in diagnostics.
    pub fn tag(&self) -> &'static str {
        use Kind::*;
        match self {
            Expr => "Expr",
            Assign => "Assign",
            AugAssign(_) => "AugAssign",
            AnnAssign { .. } => "AnnAssign",
            For => "For",
            AsyncFor => "AsyncFor",
            While => "While",
            If => "If",
            With => "With",
            AsyncWith => "AsyncWith",
            FunctionDef(_) => "FunctionDef",
            AsyncFunctionDef(_) => "AsyncFunctionDef",
            ClassDef(_) => "ClassDef",
            Return => "Return",
            Delete => "Delete",
            Pass => "Pass",
            Break => "Break",
            Continue => "Continue",
            Raise => "Raise",
            Try => "Try",
            Assert => "Assert",
            Import => "Import",
            ImportFrom { .. } => "ImportFrom",
            Global(_) => "Global",
            Nonlocal(_) => "Nonlocal",
            Match => "Match",
            BoolOp(_) => "BoolOp",
            NamedExpr => "NamedExpr",
            BinOp(_) => "BinOp",
            UnaryOp(_) => "UnaryOp",
            Lambda => "Lambda",
            IfExp => "IfExp",
            Dict => "Dict",
            Set => "Set",
            ListComp => "ListComp",
            SetComp => "SetComp",
            DictComp => "DictComp",
            GeneratorExp => "GeneratorExp",
            Await => "Await",
            Yield => "Yield",
            YieldFrom => "YieldFrom",
            Compare(_) => "Compare",
            Call => "Call",
            FormattedString(_) => "JoinedStr",
            Constant(_) => "Constant",
            Attribute(_) => "Attribute",
            Subscript => "Subscript",
            Starred => "Starred",
            Name(_) => "Name",
            List => "List",
            Tuple => "Tuple",
            Slice => "Slice",
            Seq => "Seq",
            Missing => "Missing",
            Keyword(_) => "keyword",
            Comprehension { .. } => "comprehension",
            Arguments => "arguments",
            Arg(_) => "arg",
            ExceptHandler(_) => "ExceptHandler",
            Alias { .. } => "alias",
            WithItem => "withitem",
            MatchCase => "match_case",
            MatchValue => "MatchValue",
            MatchSingleton(_) => "MatchSingleton",
            MatchSequence => "MatchSequence",
            MatchMapping(_) => "MatchMapping",
            MatchClass(_) => "MatchClass",
            MatchStar(_) => "MatchStar",
            MatchAs(_) => "MatchAs",
            MatchOr => "MatchOr",
            Hole(_) => "Hole",
        }
    }
}

/// One syntax tree node. Equality is structural: spans are ignored.
#[derive(Debug, Clone)]
pub struct Node {
    pub kind: Kind,
    pub span: Span,
    pub children: Vec<Node>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.children == other.children
    }
}

impl Eq for Node {}

impl Node {
    pub fn new(kind: Kind, span: Span, children: Vec<Node>) -> Self {
        Node { kind, span, children }
    }

    /// A node with no source position.
    pub fn detached(kind: Kind, children: Vec<Node>) -> Self {
        Node::new(kind, Span::DETACHED, children)
    }

    pub fn leaf(kind: Kind, span: Span) -> Self {
        Node::new(kind, span, Vec::new())
    }

    pub fn missing(at: usize) -> Self {
        Node::leaf(Kind::Missing, Span::new(at, at))
    }

    pub fn seq(span: Span, items: Vec<Node>) -> Self {
        Node::new(Kind::Seq, span, items)
    }

    pub fn name(id: impl Into<String>) -> Self {
        Node::detached(Kind::Name(id.into()), Vec::new())
    }

    pub fn constant(lit: Literal) -> Self {
        Node::detached(Kind::Constant(lit), Vec::new())
    }

    pub fn is_missing(&self) -> bool {
        matches!(self.kind, Kind::Missing)
    }

    /// Pre-order iterator over this node and all descendants.
    pub fn walk(&self) -> Walk<'_> {
        Walk { stack: vec![self] }
    }

    /// Clears every span in the subtree.
    pub fn detach(&mut self) {
        self.span = Span::DETACHED;
        for child in &mut self.children {
            child.detach();
        }
    }
}

pub struct Walk<'a> {
    stack: Vec<&'a Node>,
}

impl<'a> Iterator for Walk<'a> {
    type Item = &'a Node;

    fn next(&mut self) -> Option<&'a Node> {
        let node = self.stack.pop()?;
        self.stack.extend(node.children.iter().rev());
        Some(node)
    }
}

/// An ordered sequence of statements: a cell body, a rule section, or the
/// body of a compound statement.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StmtList {
    pub stmts: Vec<Node>,
}

impl StmtList {
    pub fn new(stmts: Vec<Node>) -> Self {
        StmtList { stmts }
    }

    pub fn len(&self) -> usize {
        self.stmts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stmts.is_empty()
    }

    pub fn walk(&self) -> impl Iterator<Item = &Node> {
        self.stmts.iter().flat_map(Node::walk)
    }
}

/// Structural equality of two trees: kinds, literal values, identifiers and
/// child structure must agree; spans and source formatting are ignored.
pub fn structurally_equal(a: &Node, b: &Node) -> bool {
    a == b
}

/// [`structurally_equal`] lifted to statement lists.
pub fn stmts_structurally_equal(a: &StmtList, b: &StmtList) -> bool {
    a == b
}
