use std::fmt;

use super::CypherQuery;
use crate::cypher::{tokenize, Position, Token, TokenKind};

/// Keywords a pure-expression query may use.
const ALLOWED_KEYWORDS: &[&str] = &[
    "CYPHER", "LET", "RETURN", "AS", "CASE", "WHEN", "THEN", "ELSE", "END", "IN", "AND", "OR", "NOT", "TRUE", "FALSE",
    "NULL",
];

const ALLOWED_FUNCTIONS: &[&str] = &["reduce", "head", "range"];

/// Procedure namespaces that are never allowed, called or not.
const FORBIDDEN_NAMESPACES: &[&str] = &["apoc", "gds", "db", "dbms"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub token: String,
    pub position: Position,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: `{}` {}", self.position, self.token, self.reason)
    }
}

/// Tokens outside the fold-only primitive set: clause keywords, graph
/// patterns' verbs, procedure namespaces, functions other than
/// `reduce`/`head`/`range`, and query parameters.
///
/// Text that does not tokenize yields a single violation at the failure.
pub fn lint_primitives(query: &CypherQuery) -> Vec<Violation> {
    let tokens = match tokenize(&query.text) {
        Ok(tokens) => tokens,
        Err(e) => {
            return vec![Violation {
                token: String::new(),
                position: e.position.unwrap_or_default(),
                reason: format!("does not tokenize: {}", e.message),
            }]
        }
    };

    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let tok = &tokens[i];
        match tok.kind {
            TokenKind::Keyword if is_name_position(&tokens, i) => {}
            TokenKind::Keyword => {
                if !ALLOWED_KEYWORDS.iter().any(|k| tok.lexeme.eq_ignore_ascii_case(k)) {
                    out.push(violation(tok, tok.lexeme.to_uppercase(), "is not a pure-expression keyword"));
                }
            }
            TokenKind::Parameter => out.push(violation(tok, tok.lexeme.clone(), "is a query parameter")),
            TokenKind::Identifier => {
                let end = dotted_end(&tokens, i);
                let name: String = tokens[i..end].iter().map(|t| t.lexeme.as_str()).collect();
                let is_call = tokens.get(end).is_some_and(|t| t.is_punct("("));
                let dotted = end > i + 1;
                if is_call && !(ALLOWED_FUNCTIONS.iter().any(|f| name.eq_ignore_ascii_case(f))) {
                    out.push(violation(tok, name, "is not an allowed function"));
                } else if dotted && FORBIDDEN_NAMESPACES.iter().any(|ns| tok.lexeme.eq_ignore_ascii_case(ns)) {
                    out.push(violation(tok, name, "is a procedure namespace"));
                }
                i = end;
                continue;
            }
            _ => {}
        }
        i += 1;
    }
    out
}

fn violation(tok: &Token, token: String, reason: &str) -> Violation {
    Violation { token, position: tok.pos, reason: reason.into() }
}

/// Keywords double as map keys (`next: 1`) and property names
/// (`instr.next`).
fn is_name_position(tokens: &[Token], i: usize) -> bool {
    (i > 0 && tokens[i - 1].is_punct(".")) || tokens.get(i + 1).is_some_and(|t| t.is_punct(":"))
}

/// One past the last token of `ident(.ident)*` starting at `start`.
fn dotted_end(tokens: &[Token], start: usize) -> usize {
    let mut end = start + 1;
    while end + 1 < tokens.len()
        && tokens[end].is_punct(".")
        && matches!(tokens[end + 1].kind, TokenKind::Identifier | TokenKind::Keyword)
    {
        end += 2;
    }
    end
}
