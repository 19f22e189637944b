//! Recursive-descent parser for the supported query shape:
//!
//! ```text
//! [CYPHER <version>]
//! (LET name = expr [, name = expr]*)*
//! RETURN expr [AS alias] [, expr [AS alias]]* [;]
//! ```
//!
//! Clauses and operators that exist in Cypher but not in the subset are
//! rejected with [`ErrorKind::UnsupportedFeature`](super::ErrorKind) naming
//! the construct, never silently skipped.

use std::collections::HashSet;

use super::ast::{BinaryOp, Binding, Expr, ExprKind, Function, QueryAst, ReturnItem};
use super::error::{CypherError, Position};
use super::lexer::{tokenize, Token, TokenKind};

/// Clause keywords that begin constructs outside the subset.
const CLAUSES: &[&str] = &[
    "MATCH", "OPTIONAL", "CREATE", "MERGE", "SET", "DELETE", "DETACH", "REMOVE", "CALL", "UNWIND", "WITH", "YIELD",
    "FOREACH", "LOAD", "USE", "UNION", "NEXT", "FINISH", "ORDER", "SKIP", "LIMIT", "WHERE", "DISTINCT",
];

struct Parser<'t> {
    src: &'t str,
    tokens: Vec<Token>,
    pos: usize,
}

pub fn parse_query(text: &str) -> Result<QueryAst, CypherError> {
    let tokens = tokenize(text)?;
    Parser { src: text, tokens, pos: 0 }.query()
}

/// Parses a standalone expression.
pub fn parse_expression(text: &str) -> Result<Expr, CypherError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { src: text, tokens, pos: 0 };
    let expr = p.expr()?;
    if let Some(tok) = p.peek() {
        return Err(p.unexpected(tok));
    }
    Ok(expr)
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, ahead: usize) -> Option<&Token> {
        self.tokens.get(self.pos + ahead)
    }

    fn here(&self) -> Position {
        match self.peek() {
            Some(t) => t.pos,
            None => self.end_position(),
        }
    }

    fn end_position(&self) -> Position {
        let mut pos = Position { line: 1, column: 1, offset: self.src.len() };
        for c in self.src.chars() {
            if c == '\n' {
                pos.line += 1;
                pos.column = 1;
            } else {
                pos.column += 1;
            }
        }
        pos
    }

    fn advance(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.pos).cloned();
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn at_keyword(&self, kw: &str) -> bool {
        self.peek().is_some_and(|t| t.is_keyword(kw))
    }

    fn at_punct(&self, p: &str) -> bool {
        self.peek().is_some_and(|t| t.is_punct(p))
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        let hit = self.at_keyword(kw);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        let hit = self.at_punct(p);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn unexpected(&self, tok: &Token) -> CypherError {
        if tok.kind == TokenKind::Keyword {
            let upper = tok.lexeme.to_ascii_uppercase();
            if CLAUSES.contains(&upper.as_str()) {
                return CypherError::unsupported(upper, tok.pos);
            }
        }
        CypherError::syntax(format!("unexpected `{}`", tok.lexeme), tok.pos)
    }

    fn expected(&self, what: &str) -> CypherError {
        match self.peek() {
            Some(tok) => {
                let err = self.unexpected(tok);
                if err.kind == super::ErrorKind::UnsupportedFeature {
                    err
                } else {
                    CypherError::syntax(format!("expected {what}, found `{}`", tok.lexeme), tok.pos)
                }
            }
            None => CypherError::syntax(format!("expected {what}, found end of input"), self.here()),
        }
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), CypherError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.expected(&format!("`{p}`")))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), CypherError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.expected(kw))
        }
    }

    fn identifier(&mut self) -> Result<(String, Position), CypherError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => {
                let t = self.advance().expect("peeked");
                Ok((t.lexeme, t.pos))
            }
            _ => Err(self.expected("a variable name")),
        }
    }

    /// Map keys and property names may be reserved words.
    fn symbolic_name(&mut self) -> Result<String, CypherError> {
        match self.peek() {
            Some(t) if matches!(t.kind, TokenKind::Identifier | TokenKind::Keyword) => {
                Ok(self.advance().expect("peeked").lexeme)
            }
            _ => Err(self.expected("a name")),
        }
    }

    fn query(mut self) -> Result<QueryAst, CypherError> {
        let mut dialect = None;
        if self.eat_keyword("CYPHER") {
            match self.peek() {
                Some(t) if t.kind == TokenKind::Integer => {
                    dialect = t.int_value();
                    self.pos += 1;
                }
                _ => return Err(self.expected("a Cypher version")),
            }
        }

        let mut bindings: Vec<Binding> = Vec::new();
        let mut names = HashSet::new();
        while self.eat_keyword("LET") {
            loop {
                let (name, pos) = self.identifier()?;
                if !names.insert(name.clone()) {
                    return Err(CypherError::syntax(format!("variable `{name}` is already defined"), pos));
                }
                self.expect_punct("=")?;
                let expr = self.expr()?;
                bindings.push(Binding { name, expr, pos });
                if !self.eat_punct(",") {
                    break;
                }
            }
        }

        if !self.eat_keyword("RETURN") {
            return Err(self.expected("LET or RETURN"));
        }
        if self.at_keyword("DISTINCT") {
            return Err(CypherError::unsupported("RETURN DISTINCT", self.here()));
        }
        if self.at_punct("*") {
            return Err(CypherError::unsupported("RETURN *", self.here()));
        }
        let mut returns = Vec::new();
        let mut aliases = HashSet::new();
        loop {
            let start = self.here();
            let expr = self.expr()?;
            let end = self.tokens.get(self.pos - 1).map_or(start.offset, |t| t.pos.offset + t.lexeme.len());
            let name =
                if self.eat_keyword("AS") { self.identifier()?.0 } else { self.src[start.offset..end].to_string() };
            if !aliases.insert(name.clone()) {
                return Err(CypherError::syntax(format!("duplicate column name `{name}`"), start));
            }
            returns.push(ReturnItem { expr, name });
            if !self.eat_punct(",") {
                break;
            }
        }
        self.eat_punct(";");
        if let Some(tok) = self.peek() {
            return Err(self.unexpected(tok));
        }
        Ok(QueryAst { dialect, bindings, returns })
    }

    pub fn expr(&mut self) -> Result<Expr, CypherError> {
        self.or()
    }

    fn binary(op: BinaryOp, lhs: Expr, rhs: Expr, pos: Position) -> Expr {
        Expr { kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), pos }
    }

    fn or(&mut self) -> Result<Expr, CypherError> {
        let mut lhs = self.and()?;
        loop {
            let pos = self.here();
            if self.eat_keyword("OR") {
                let rhs = self.and()?;
                lhs = Self::binary(BinaryOp::Or, lhs, rhs, pos);
            } else if self.at_keyword("XOR") {
                return Err(CypherError::unsupported("XOR", pos));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn and(&mut self) -> Result<Expr, CypherError> {
        let mut lhs = self.not()?;
        loop {
            let pos = self.here();
            if !self.eat_keyword("AND") {
                return Ok(lhs);
            }
            let rhs = self.not()?;
            lhs = Self::binary(BinaryOp::And, lhs, rhs, pos);
        }
    }

    fn not(&mut self) -> Result<Expr, CypherError> {
        let pos = self.here();
        if self.eat_keyword("NOT") {
            let inner = self.not()?;
            return Ok(Expr { kind: ExprKind::Not(Box::new(inner)), pos });
        }
        self.comparison()
    }

    fn comparison_op(&self) -> Option<BinaryOp> {
        let tok = self.peek()?;
        if tok.kind != TokenKind::Operator {
            return None;
        }
        Some(match tok.lexeme.as_str() {
            "=" => BinaryOp::Eq,
            "<>" => BinaryOp::Ne,
            "<" => BinaryOp::Lt,
            "<=" => BinaryOp::Le,
            ">" => BinaryOp::Gt,
            ">=" => BinaryOp::Ge,
            _ => return None,
        })
    }

    fn reject_predicate_operators(&self) -> Result<(), CypherError> {
        let pos = self.here();
        if self.at_keyword("IS") {
            return Err(CypherError::unsupported("IS NULL / IS NOT NULL", pos));
        }
        if self.at_keyword("IN") {
            return Err(CypherError::unsupported("IN list membership", pos));
        }
        if self.at_punct("=~") {
            return Err(CypherError::unsupported("=~ regular expression match", pos));
        }
        if let Some(t) = self.peek() {
            let upper = t.lexeme.to_ascii_uppercase();
            if t.kind == TokenKind::Identifier && matches!(upper.as_str(), "STARTS" | "ENDS" | "CONTAINS") {
                return Err(CypherError::unsupported(format!("{upper} string predicate"), pos));
            }
        }
        Ok(())
    }

    fn comparison(&mut self) -> Result<Expr, CypherError> {
        let lhs = self.additive()?;
        self.reject_predicate_operators()?;
        let Some(op) = self.comparison_op() else {
            return Ok(lhs);
        };
        let pos = self.here();
        self.pos += 1;
        let rhs = self.additive()?;
        self.reject_predicate_operators()?;
        if self.comparison_op().is_some() {
            return Err(CypherError::unsupported("chained comparison", self.here()));
        }
        Ok(Self::binary(op, lhs, rhs, pos))
    }

    fn additive(&mut self) -> Result<Expr, CypherError> {
        let mut lhs = self.multiplicative()?;
        loop {
            let pos = self.here();
            let op = if self.eat_punct("+") {
                BinaryOp::Add
            } else if self.eat_punct("-") {
                BinaryOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.multiplicative()?;
            lhs = Self::binary(op, lhs, rhs, pos);
        }
    }

    fn multiplicative(&mut self) -> Result<Expr, CypherError> {
        let mut lhs = self.unary()?;
        loop {
            let pos = self.here();
            let op = if self.eat_punct("*") {
                BinaryOp::Mul
            } else if self.eat_punct("/") {
                BinaryOp::Div
            } else if self.at_punct("%") {
                return Err(CypherError::unsupported("% modulo", pos));
            } else if self.at_punct("^") {
                return Err(CypherError::unsupported("^ exponentiation", pos));
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Self::binary(op, lhs, rhs, pos);
        }
    }

    fn unary(&mut self) -> Result<Expr, CypherError> {
        let pos = self.here();
        if self.eat_punct("-") {
            // Negated literals fold to constants.
            if let Some(t) = self.peek() {
                if t.kind == TokenKind::Integer && !self.next_is_postfix(1) {
                    let digits = t.lexeme.clone();
                    self.pos += 1;
                    let value = format!("-{digits}").parse().map_err(|_| {
                        CypherError::new(super::ErrorKind::Overflow, format!("-{digits} is out of range"), pos)
                    })?;
                    return Ok(Expr { kind: ExprKind::Int(value), pos });
                }
            }
            let inner = self.unary()?;
            return Ok(Expr { kind: ExprKind::Neg(Box::new(inner)), pos });
        }
        if self.eat_punct("+") {
            return self.unary();
        }
        self.postfix()
    }

    fn next_is_postfix(&self, ahead: usize) -> bool {
        self.peek_at(ahead).is_some_and(|t| t.is_punct(".") || t.is_punct("["))
    }

    fn postfix(&mut self) -> Result<Expr, CypherError> {
        let mut expr = self.atom()?;
        loop {
            let pos = self.here();
            if self.eat_punct(".") {
                let key = self.symbolic_name()?;
                expr = Expr { kind: ExprKind::Property(Box::new(expr), key), pos };
            } else if self.eat_punct("[") {
                if self.at_punct("..") {
                    return Err(CypherError::unsupported("list slice", self.here()));
                }
                let index = self.expr()?;
                if self.at_punct("..") {
                    return Err(CypherError::unsupported("list slice", self.here()));
                }
                self.expect_punct("]")?;
                expr = Expr { kind: ExprKind::Index(Box::new(expr), Box::new(index)), pos };
            } else if self.at_punct(":") {
                return Err(CypherError::unsupported("label expression", pos));
            } else {
                return Ok(expr);
            }
        }
    }

    fn atom(&mut self) -> Result<Expr, CypherError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.expected("an expression"));
        };
        let pos = tok.pos;
        let kind = match tok.kind {
            TokenKind::Integer => {
                self.pos += 1;
                ExprKind::Int(tok.int_value().expect("lexer validated the literal"))
            }
            TokenKind::String => {
                self.pos += 1;
                ExprKind::Str(tok.string_value().expect("string token"))
            }
            TokenKind::Parameter => {
                self.pos += 1;
                ExprKind::Parameter(tok.lexeme[1..].to_string())
            }
            TokenKind::Keyword => {
                let upper = tok.lexeme.to_ascii_uppercase();
                match upper.as_str() {
                    "TRUE" => {
                        self.pos += 1;
                        ExprKind::Bool(true)
                    }
                    "FALSE" => {
                        self.pos += 1;
                        ExprKind::Bool(false)
                    }
                    "NULL" => {
                        self.pos += 1;
                        ExprKind::Null
                    }
                    "CASE" => return self.case(),
                    _ => return Err(self.unexpected(&tok)),
                }
            }
            TokenKind::Identifier => return self.identifier_expr(),
            TokenKind::Punctuation | TokenKind::Operator => match tok.lexeme.as_str() {
                "(" => {
                    self.pos += 1;
                    let inner = self.expr()?;
                    self.expect_punct(")")?;
                    return Ok(inner);
                }
                "[" => return self.list(),
                "{" => return self.map(),
                _ => return Err(self.unexpected(&tok)),
            },
        };
        Ok(Expr { kind, pos })
    }

    fn identifier_expr(&mut self) -> Result<Expr, CypherError> {
        let (name, pos) = self.identifier()?;
        if self.at_punct("(") {
            return self.call(name, pos);
        }
        // A dotted name followed by `(` is a namespaced procedure or function.
        let mut ahead = 0;
        let mut dotted = name.clone();
        while self.peek_at(ahead).is_some_and(|t| t.is_punct("."))
            && self.peek_at(ahead + 1).is_some_and(|t| matches!(t.kind, TokenKind::Identifier | TokenKind::Keyword))
        {
            dotted.push('.');
            dotted.push_str(&self.peek_at(ahead + 1).expect("checked").lexeme);
            ahead += 2;
        }
        if ahead > 0 && self.peek_at(ahead).is_some_and(|t| t.is_punct("(")) {
            return Err(CypherError::unsupported(format!("function {dotted}()"), pos));
        }
        Ok(Expr { kind: ExprKind::Variable(name), pos })
    }

    fn call(&mut self, name: String, pos: Position) -> Result<Expr, CypherError> {
        let lower = name.to_ascii_lowercase();
        if lower == "reduce" {
            return self.reduce(pos);
        }
        let function = match lower.as_str() {
            "head" => Function::Head,
            "range" => Function::Range,
            _ => return Err(CypherError::unsupported(format!("function {name}()"), pos)),
        };
        self.expect_punct("(")?;
        let mut args = Vec::new();
        if !self.at_punct(")") {
            loop {
                args.push(self.expr()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(")")?;
        let arity_ok = match function {
            Function::Head => args.len() == 1,
            Function::Range => matches!(args.len(), 2 | 3),
        };
        if !arity_ok {
            return Err(CypherError::syntax(format!("wrong number of arguments to {name}(): {}", args.len()), pos));
        }
        Ok(Expr { kind: ExprKind::Call(function, args), pos })
    }

    fn reduce(&mut self, pos: Position) -> Result<Expr, CypherError> {
        self.expect_punct("(")?;
        let (accumulator, _) = self.identifier()?;
        self.expect_punct("=")?;
        let init = self.expr()?;
        self.expect_punct(",")?;
        let (variable, _) = self.identifier()?;
        self.expect_keyword("IN")?;
        let list = self.expr()?;
        self.expect_punct("|")?;
        let body = self.expr()?;
        self.expect_punct(")")?;
        Ok(Expr {
            kind: ExprKind::Reduce {
                accumulator,
                init: Box::new(init),
                variable,
                list: Box::new(list),
                body: Box::new(body),
            },
            pos,
        })
    }

    fn case(&mut self) -> Result<Expr, CypherError> {
        let pos = self.here();
        self.expect_keyword("CASE")?;
        let subject = if self.at_keyword("WHEN") { None } else { Some(Box::new(self.expr()?)) };
        let mut arms = Vec::new();
        while self.eat_keyword("WHEN") {
            let test = self.expr()?;
            if subject.is_some() && self.at_punct(",") {
                return Err(CypherError::unsupported("multiple values in one WHEN", self.here()));
            }
            self.expect_keyword("THEN")?;
            let result = self.expr()?;
            arms.push((test, result));
        }
        if arms.is_empty() {
            return Err(self.expected("WHEN"));
        }
        let default = if self.eat_keyword("ELSE") { Some(Box::new(self.expr()?)) } else { None };
        self.expect_keyword("END")?;
        let kind = match subject {
            Some(subject) => ExprKind::SimpleCase { subject, arms, default },
            None => ExprKind::SearchedCase { arms, default },
        };
        Ok(Expr { kind, pos })
    }

    fn list(&mut self) -> Result<Expr, CypherError> {
        let pos = self.here();
        self.expect_punct("[")?;
        let is_comprehension = self.peek().is_some_and(|t| t.kind == TokenKind::Identifier)
            && self.peek_at(1).is_some_and(|t| t.is_keyword("IN"));
        if is_comprehension {
            let (variable, _) = self.identifier()?;
            self.expect_keyword("IN")?;
            let list = self.expr()?;
            let filter = if self.eat_keyword("WHERE") { Some(Box::new(self.expr()?)) } else { None };
            let map = if self.eat_punct("|") { Some(Box::new(self.expr()?)) } else { None };
            self.expect_punct("]")?;
            return Ok(Expr { kind: ExprKind::Comprehension { variable, list: Box::new(list), filter, map }, pos });
        }
        let mut items = Vec::new();
        if !self.at_punct("]") {
            loop {
                items.push(self.expr()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct("]")?;
        Ok(Expr { kind: ExprKind::List(items), pos })
    }

    fn map(&mut self) -> Result<Expr, CypherError> {
        let pos = self.here();
        self.expect_punct("{")?;
        let mut entries = Vec::new();
        if !self.at_punct("}") {
            loop {
                let key = match self.peek() {
                    Some(t) if t.kind == TokenKind::String => {
                        let v = t.string_value().expect("string token");
                        self.pos += 1;
                        v
                    }
                    _ => self.symbolic_name()?,
                };
                self.expect_punct(":")?;
                entries.push((key, self.expr()?));
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct("}")?;
        Ok(Expr { kind: ExprKind::Map(entries), pos })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cypher::ErrorKind;

    #[test]
    fn return_only() {
        let q = parse_query("RETURN 1").unwrap();
        assert!(q.bindings.is_empty());
        assert_eq!(q.returns[0].name, "1");
        assert_eq!(q.dialect, None);
    }

    #[test]
    fn header_bindings_and_alias() {
        let q = parse_query("CYPHER 25\nLET x = 2 LET y = x + 3 RETURN y AS z;").unwrap();
        assert_eq!(q.dialect, Some(25));
        let names: Vec<_> = q.bindings.iter().map(|b| b.name.as_str()).collect();
        assert_eq!(names, ["x", "y"]);
        assert_eq!(q.returns[0].name, "z");
    }

    #[test]
    fn unaliased_items_use_source_text() {
        let q = parse_query("RETURN 1 + 1, [1,2][0]").unwrap();
        assert_eq!(q.returns[0].name, "1 + 1");
        assert_eq!(q.returns[1].name, "[1,2][0]");
    }

    #[test]
    fn clauses_outside_the_subset() {
        for (text, construct) in [
            ("MATCH (n) RETURN n", "MATCH"),
            ("CALL db.labels()", "CALL"),
            ("LET x = 1 WITH x RETURN x", "WITH"),
            ("UNWIND [1] AS x RETURN x", "UNWIND"),
            ("RETURN 1 NEXT RETURN 2", "NEXT"),
        ] {
            let err = parse_query(text).unwrap_err();
            assert_eq!(err.kind, ErrorKind::UnsupportedFeature, "{text}");
            assert_eq!(err.message, construct);
        }
    }

    #[test]
    fn operators_outside_the_subset() {
        for text in [
            "RETURN 5 % 2",
            "RETURN 2 ^ 3",
            "RETURN x IS NULL",
            "RETURN 1 IN [1]",
            "RETURN size([1])",
            "RETURN apoc.coll.sum([1])",
            "RETURN [1,2][0..1]",
            "RETURN 1.5",
            "RETURN 1 < 2 < 3",
            "RETURN true XOR false",
        ] {
            let err = parse_query(text).unwrap_err();
            assert_eq!(err.kind, ErrorKind::UnsupportedFeature, "{text}: {err}");
        }
    }

    #[test]
    fn syntax_errors_are_positioned() {
        let err = parse_query("RETURN (1 + ").unwrap_err();
        assert_eq!(err.kind, ErrorKind::Syntax);
        assert_eq!(err.position.unwrap().column, 13);
        let err = parse_query("LET x = 1 LET x = 2 RETURN x").unwrap_err();
        assert_eq!(err.position.unwrap().column, 15);
        assert!(parse_query("LET x = 1").is_err());
    }

    #[test]
    fn keywords_as_keys_and_properties() {
        let e = parse_expression("{next: 1, end: 2}.next").unwrap();
        assert!(matches!(e.kind, ExprKind::Property(_, ref k) if k == "next"));
    }

    #[test]
    fn negative_literals_fold() {
        assert_eq!(parse_expression("-1").unwrap().kind, ExprKind::Int(-1));
        assert_eq!(parse_expression("-9223372036854775807").unwrap().kind, ExprKind::Int(-i64::MAX));
        assert_eq!(parse_expression("-9223372036854775808").unwrap_err().kind, ErrorKind::Overflow);
        assert!(matches!(parse_expression("-x").unwrap().kind, ExprKind::Neg(_)));
    }

    #[test]
    fn reduce_and_comprehension_shapes() {
        let e = parse_expression("reduce(s = 0, x IN range(1, 3) | s + x)").unwrap();
        assert!(matches!(e.kind, ExprKind::Reduce { ref accumulator, .. } if accumulator == "s"));
        let e = parse_expression("[x IN [1,2] WHERE x > 1 | x * 2]").unwrap();
        assert!(matches!(e.kind, ExprKind::Comprehension { filter: Some(_), map: Some(_), .. }));
    }
}
