//! Tokenizer for Cypher query text.
//!
//! The lexer accepts the full lexical surface of the generated queries,
//! including graph patterns, so it doubles as the normalizer used when
//! comparing query texts token by token. Grammar restrictions live in the
//! parser.

use super::error::{CypherError, Position};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Identifier,
    Keyword,
    Integer,
    String,
    Parameter,
    Punctuation,
    Operator,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Source text of the token, quotes included for strings.
    pub lexeme: String,
    pub pos: Position,
}

impl Token {
    pub fn is_keyword(&self, kw: &str) -> bool {
        self.kind == TokenKind::Keyword && self.lexeme.eq_ignore_ascii_case(kw)
    }

    pub fn is_punct(&self, p: &str) -> bool {
        matches!(self.kind, TokenKind::Punctuation | TokenKind::Operator) && self.lexeme == p
    }

    /// Decoded value of a string literal.
    pub fn string_value(&self) -> Option<String> {
        (self.kind == TokenKind::String).then(|| unescape(&self.lexeme[1..self.lexeme.len() - 1]))
    }

    pub fn int_value(&self) -> Option<i64> {
        (self.kind == TokenKind::Integer).then(|| self.lexeme.parse().ok()).flatten()
    }
}

/// Reserved words. Matching is case-insensitive.
pub const KEYWORDS: &[&str] = &[
    "AND", "AS", "BY", "CALL", "CASE", "CREATE", "CYPHER", "DELETE", "DETACH", "DISTINCT", "ELSE", "END", "FALSE",
    "FINISH", "FOREACH", "IN", "IS", "LET", "LIMIT", "LOAD", "MATCH", "MERGE", "NEXT", "NOT", "NULL", "ON", "OPTIONAL",
    "OR", "ORDER", "REMOVE", "RETURN", "SET", "SKIP", "THEN", "TRUE", "UNION", "UNWIND", "USE", "WHEN", "WHERE",
    "WITH", "XOR", "YIELD",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.iter().any(|k| k.eq_ignore_ascii_case(word))
}

fn unescape(body: &str) -> String {
    let mut out = String::with_capacity(body.len());
    let mut chars = body.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('n') => out.push('\n'),
            Some('t') => out.push('\t'),
            Some('r') => out.push('\r'),
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}

const MULTI_CHAR_OPS: &[&str] = &["<>", "<=", ">=", "->", "=~", ".."];

struct Cursor<'a> {
    text: &'a str,
    offset: usize,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    fn pos(&self) -> Position {
        Position { line: self.line, column: self.column, offset: self.offset }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.offset..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn bump_while(&mut self, pred: impl Fn(char) -> bool) {
        while self.peek().is_some_and(&pred) {
            self.bump();
        }
    }
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, CypherError> {
    let mut cur = Cursor { text, offset: 0, line: 1, column: 1 };
    let mut tokens = Vec::new();

    while let Some(c) = cur.peek() {
        let start = cur.pos();
        let rest = cur.rest();

        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if rest.starts_with("//") {
            cur.bump_while(|c| c != '\n');
            continue;
        }
        if let Some(body) = rest.strip_prefix("/*") {
            match body.find("*/") {
                Some(end) => {
                    for _ in rest[..end + 4].chars() {
                        cur.bump();
                    }
                    continue;
                }
                None => return Err(CypherError::syntax("unterminated comment", start)),
            }
        }

        let kind = if c.is_ascii_digit() {
            cur.bump_while(|c| c.is_ascii_digit());
            let mut after = cur.rest().chars();
            if after.next() == Some('.') && after.next().is_some_and(|c| c.is_ascii_digit()) {
                return Err(CypherError::unsupported("floating-point literal", start));
            }
            if cur.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                return Err(CypherError::syntax("malformed number", start));
            }
            let digits = &text[start.offset..cur.offset];
            if digits.parse::<i64>().is_err() {
                return Err(CypherError::new(
                    super::ErrorKind::Overflow,
                    format!("integer literal {digits} exceeds the 64-bit range"),
                    start,
                ));
            }
            TokenKind::Integer
        } else if c.is_alphabetic() || c == '_' {
            cur.bump_while(|c| c.is_alphanumeric() || c == '_');
            if is_keyword(&text[start.offset..cur.offset]) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            }
        } else if c == '\'' || c == '"' {
            cur.bump();
            loop {
                match cur.bump() {
                    None => return Err(CypherError::syntax("unterminated string literal", start)),
                    Some('\\') => {
                        cur.bump();
                    }
                    Some(q) if q == c => break,
                    Some(_) => {}
                }
            }
            TokenKind::String
        } else if c == '$' {
            cur.bump();
            if !cur.peek().is_some_and(|c| c.is_alphabetic() || c == '_') {
                return Err(CypherError::syntax("expected a parameter name after `$`", start));
            }
            cur.bump_while(|c| c.is_alphanumeric() || c == '_');
            TokenKind::Parameter
        } else if let Some(op) = MULTI_CHAR_OPS.iter().find(|op| rest.starts_with(**op)) {
            for _ in 0..op.len() {
                cur.bump();
            }
            TokenKind::Operator
        } else if "+-*/%^=<>".contains(c) {
            cur.bump();
            TokenKind::Operator
        } else if "()[]{},:;.|".contains(c) {
            cur.bump();
            TokenKind::Punctuation
        } else {
            return Err(CypherError::syntax(format!("illegal character `{c}`"), start));
        };

        tokens.push(Token { kind, lexeme: text[start.offset..cur.offset].to_string(), pos: start });
    }
    Ok(tokens)
}

/// Token stream rendered as lexemes separated by single spaces. Comments and
/// layout are dropped; string literal contents are untouched.
pub fn normalize(text: &str) -> Result<String, CypherError> {
    let tokens = tokenize(text)?;
    Ok(tokens.iter().map(|t| t.lexeme.as_str()).collect::<Vec<_>>().join(" "))
}
