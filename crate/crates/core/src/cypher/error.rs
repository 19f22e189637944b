use std::fmt;

/// Source location, 1-based line and column plus byte offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Position {
    pub line: usize,
    pub column: usize,
    pub offset: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    /// Malformed input text, lexical or grammatical.
    Syntax,
    /// Valid Cypher outside the supported subset.
    UnsupportedFeature,
    DivisionByZero,
    TypeMismatch,
    UnknownVariable,
    UnknownParameter,
    Overflow,
    InvalidArgument,
}

impl ErrorKind {
    pub fn name(self) -> &'static str {
        match self {
            ErrorKind::Syntax => "SyntaxError",
            ErrorKind::UnsupportedFeature => "UnsupportedFeature",
            ErrorKind::DivisionByZero => "DivisionByZero",
            ErrorKind::TypeMismatch => "TypeMismatch",
            ErrorKind::UnknownVariable => "UnknownVariable",
            ErrorKind::UnknownParameter => "UnknownParameter",
            ErrorKind::Overflow => "Overflow",
            ErrorKind::InvalidArgument => "InvalidArgument",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CypherError {
    pub kind: ErrorKind,
    pub message: String,
    pub position: Option<Position>,
}

impl CypherError {
    pub fn new(kind: ErrorKind, message: impl Into<String>, position: Position) -> Self {
        CypherError { kind, message: message.into(), position: Some(position) }
    }

    pub fn unpositioned(kind: ErrorKind, message: impl Into<String>) -> Self {
        CypherError { kind, message: message.into(), position: None }
    }

    pub fn syntax(message: impl Into<String>, position: Position) -> Self {
        CypherError::new(ErrorKind::Syntax, message, position)
    }

    pub fn unsupported(construct: impl Into<String>, position: Position) -> Self {
        CypherError::new(ErrorKind::UnsupportedFeature, construct, position)
    }
}

impl fmt::Display for CypherError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(pos) = self.position {
            write!(f, "{pos}: ")?;
        }
        write!(f, "{}: {}", self.kind.name(), self.message)
    }
}

impl std::error::Error for CypherError {}
