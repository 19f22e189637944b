//! In-process evaluator for the pure-expression Cypher subset used by the
//! fold-based queries: `LET` bindings, a single `RETURN`, literals, maps,
//! lists, indexing, arithmetic, comparisons, `CASE`, `reduce()`, list
//! comprehensions, `head()` and `range()`.

mod ast;
mod error;
mod eval;
mod lexer;
mod parser;
mod value;

pub use ast::{BinaryOp, Binding, Expr, ExprKind, Function, QueryAst, ReturnItem};
pub use error::{CypherError, ErrorKind, Position};
pub use eval::{apply_binary, evaluate, evaluate_query, Bindings, Evaluator, MAX_MATERIALIZED_RANGE};
pub use lexer::{is_keyword, normalize, tokenize, Token, TokenKind, KEYWORDS};
pub use parser::{parse_expression, parse_query};
pub use value::{cypher_compare, cypher_equals, Value};

/// Parses and evaluates a query. Returns one entry per `RETURN` column, in
/// column order.
pub fn run_query_text(text: &str, params: &Bindings) -> Result<Bindings, CypherError> {
    let query = parse_query(text)?;
    evaluate_query(&query, params)
}

/// Reads a JSON object of query parameters.
pub fn params_from_json(json: &str) -> Result<Bindings, String> {
    let doc: serde_json::Value = serde_json::from_str(json).map_err(|e| e.to_string())?;
    let serde_json::Value::Object(entries) = doc else {
        return Err("parameters must be a JSON object".into());
    };
    entries.iter().map(|(k, v)| Ok((k.clone(), Value::from_json(v)?))).collect()
}
