use super::error::Position;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Eq => "=",
            BinaryOp::Ne => "<>",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::And => "AND",
            BinaryOp::Or => "OR",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Function {
    Head,
    Range,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Position,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Int(i64),
    Str(String),
    Bool(bool),
    Null,
    Variable(String),
    Parameter(String),
    Map(Vec<(String, Expr)>),
    List(Vec<Expr>),
    Property(Box<Expr>, String),
    Index(Box<Expr>, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Neg(Box<Expr>),
    SimpleCase { subject: Box<Expr>, arms: Vec<(Expr, Expr)>, default: Option<Box<Expr>> },
    SearchedCase { arms: Vec<(Expr, Expr)>, default: Option<Box<Expr>> },
    Reduce { accumulator: String, init: Box<Expr>, variable: String, list: Box<Expr>, body: Box<Expr> },
    Comprehension { variable: String, list: Box<Expr>, filter: Option<Box<Expr>>, map: Option<Box<Expr>> },
    Call(Function, Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Binding {
    pub name: String,
    pub expr: Expr,
    pub pos: Position,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnItem {
    pub expr: Expr,
    /// Explicit alias, or the item's source text when none was given.
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryAst {
    /// Version following a `CYPHER` header, e.g. `25`.
    pub dialect: Option<i64>,
    pub bindings: Vec<Binding>,
    pub returns: Vec<ReturnItem>,
}
