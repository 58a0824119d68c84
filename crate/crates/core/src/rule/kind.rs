use std::fmt;
use std::str::FromStr;

/// The closed set of abstract-variable kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    /// An identifier in load or store position.
    Name,
    /// Any expression subtree.
    Expr,
    ConstStr,
    ConstInt,
    ConstFloat,
    /// A list display.
    List,
    /// A slice (`a:b:c`) inside a subscript.
    Slice,
    /// A subscript expression.
    Subscript,
}

impl VarKind {
    pub const ALL: [VarKind; 8] = [
        VarKind::Name,
        VarKind::Expr,
        VarKind::ConstStr,
        VarKind::ConstInt,
        VarKind::ConstFloat,
        VarKind::List,
        VarKind::Slice,
        VarKind::Subscript,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            VarKind::Name => "Name",
            VarKind::Expr => "expr",
            VarKind::ConstStr => "Const(str)",
            VarKind::ConstInt => "Const(int)",
            VarKind::ConstFloat => "Const(float)",
            VarKind::List => "List",
            VarKind::Slice => "Slice",
            VarKind::Subscript => "Subscript",
        }
    }

    pub fn is_const(self) -> bool {
        matches!(self, VarKind::ConstStr | VarKind::ConstInt | VarKind::ConstFloat)
    }
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The rejected spelling.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown variable kind '{0}'")]
pub struct UnknownKind(pub String);

impl FromStr for VarKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        VarKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| UnknownKind(s.to_string()))
    }
}
