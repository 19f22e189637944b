//! Expression evaluation.
//!
//! Semantics follow Cypher for the supported subset: `null` propagates
//! through arithmetic, property access, indexing and comparisons; `AND`/`OR`
//! are three-valued; a simple `CASE` never matches a `null` subject; a `CASE`
//! without a matching arm or `ELSE` yields `null`. Integer arithmetic is
//! checked and `/` truncates toward zero. Negative list indices count from
//! the end and out-of-range indices yield `null`.

use std::cmp::Ordering;
use std::sync::Arc;

use indexmap::IndexMap;

use super::ast::{BinaryOp, Expr, ExprKind, Function, QueryAst};
use super::error::{CypherError, ErrorKind, Position};
use super::value::{cypher_compare, cypher_equals, Value};

pub type Bindings = IndexMap<String, Value>;

/// Largest `range()` that is materialized as a list. Ranges consumed
/// directly by `reduce()` are iterated lazily and are not limited.
pub const MAX_MATERIALIZED_RANGE: u64 = 10_000_000;

pub struct Evaluator<'a> {
    globals: &'a Bindings,
    params: &'a Bindings,
    locals: Vec<(&'a str, Value)>,
}

/// Evaluates `expr` with `env` as the variables in scope.
pub fn evaluate(expr: &Expr, env: &Bindings, params: &Bindings) -> Result<Value, CypherError> {
    Evaluator::new(env, params).eval(expr)
}

/// Evaluates the bindings of a parsed query in order, then its `RETURN`
/// items. Returns one entry per column.
pub fn evaluate_query(query: &QueryAst, params: &Bindings) -> Result<Bindings, CypherError> {
    let mut env = Bindings::new();
    for binding in &query.bindings {
        let value = evaluate(&binding.expr, &env, params)?;
        env.insert(binding.name.clone(), value);
    }
    query.returns.iter().map(|item| Ok((item.name.clone(), evaluate(&item.expr, &env, params)?))).collect()
}

fn err(kind: ErrorKind, message: impl Into<String>, pos: Position) -> CypherError {
    CypherError::new(kind, message, pos)
}

fn mismatch(message: impl Into<String>, pos: Position) -> CypherError {
    err(ErrorKind::TypeMismatch, message, pos)
}

fn overflow(pos: Position) -> CypherError {
    err(ErrorKind::Overflow, "integer overflow", pos)
}

/// Three-valued truth of a value used as a predicate.
fn truth(value: &Value, pos: Position) -> Result<Option<bool>, CypherError> {
    match value {
        Value::Bool(b) => Ok(Some(*b)),
        Value::Null => Ok(None),
        other => Err(mismatch(format!("expected BOOLEAN, found {}", other.type_name()), pos)),
    }
}

fn tri(value: Option<bool>) -> Value {
    value.map_or(Value::Null, Value::Bool)
}

fn range_bounds(args: &[Value], pos: Position) -> Result<Option<(i64, i64, i64)>, CypherError> {
    let mut ints = [0i64, 0, 1];
    for (slot, arg) in ints.iter_mut().zip(args) {
        match arg {
            Value::Int(i) => *slot = *i,
            Value::Null => return Ok(None),
            other => {
                return Err(mismatch(format!("range() expects INTEGER arguments, found {}", other.type_name()), pos))
            }
        }
    }
    if ints[2] == 0 {
        return Err(err(ErrorKind::InvalidArgument, "range() step must not be zero", pos));
    }
    Ok(Some((ints[0], ints[1], ints[2])))
}

/// Lazily yields the elements of `range(start, end, step)`, both ends inclusive.
fn range_iter(start: i64, end: i64, step: i64) -> impl Iterator<Item = i64> {
    let mut next = Some(start);
    std::iter::from_fn(move || {
        let current = next?;
        let in_range = if step > 0 { current <= end } else { current >= end };
        if !in_range {
            next = None;
            return None;
        }
        next = current.checked_add(step);
        Some(current)
    })
}

fn range_len(start: i64, end: i64, step: i64) -> u64 {
    let (span, stride) = if step > 0 {
        (end as i128 - start as i128, step as i128)
    } else {
        (start as i128 - end as i128, -(step as i128))
    };
    if span < 0 {
        0
    } else {
        (span / stride + 1).min(u64::MAX as i128) as u64
    }
}

impl<'a> Evaluator<'a> {
    pub fn new(globals: &'a Bindings, params: &'a Bindings) -> Self {
        Evaluator { globals, params, locals: Vec::new() }
    }

    fn lookup(&self, name: &str, pos: Position) -> Result<Value, CypherError> {
        if let Some((_, v)) = self.locals.iter().rev().find(|(n, _)| *n == name) {
            return Ok(v.clone());
        }
        self.globals
            .get(name)
            .cloned()
            .ok_or_else(|| err(ErrorKind::UnknownVariable, format!("variable `{name}` is not defined"), pos))
    }

    pub fn eval(&mut self, expr: &'a Expr) -> Result<Value, CypherError> {
        let pos = expr.pos;
        match &expr.kind {
            ExprKind::Int(i) => Ok(Value::Int(*i)),
            ExprKind::Str(s) => Ok(Value::text(s)),
            ExprKind::Bool(b) => Ok(Value::Bool(*b)),
            ExprKind::Null => Ok(Value::Null),
            ExprKind::Variable(name) => self.lookup(name, pos),
            ExprKind::Parameter(name) => {
                self.params.get(name).cloned().ok_or_else(|| {
                    err(ErrorKind::UnknownParameter, format!("parameter `${name}` was not supplied"), pos)
                })
            }
            ExprKind::Map(entries) => {
                let mut map = IndexMap::with_capacity(entries.len());
                for (key, value) in entries {
                    map.insert(key.clone(), self.eval(value)?);
                }
                Ok(Value::Map(Arc::new(map)))
            }
            ExprKind::List(items) => Ok(Value::list(items.iter().map(|e| self.eval(e)).collect::<Result<_, _>>()?)),
            ExprKind::Property(base, key) => match self.eval(base)? {
                Value::Map(m) => Ok(m.get(key).cloned().unwrap_or_default()),
                Value::Null => Ok(Value::Null),
                other => Err(mismatch(format!("cannot read property `{key}` of {}", other.type_name()), pos)),
            },
            ExprKind::Index(base, index) => {
                let base = self.eval(base)?;
                let index = self.eval(index)?;
                self.index(base, index, pos)
            }
            ExprKind::Binary(op, lhs, rhs) => self.binary(*op, lhs, rhs, pos),
            ExprKind::Not(inner) => {
                let v = self.eval(inner)?;
                Ok(tri(truth(&v, inner.pos)?.map(|b| !b)))
            }
            ExprKind::Neg(inner) => match self.eval(inner)? {
                Value::Int(i) => i.checked_neg().map(Value::Int).ok_or_else(|| overflow(pos)),
                Value::Null => Ok(Value::Null),
                other => Err(mismatch(format!("cannot negate {}", other.type_name()), pos)),
            },
            ExprKind::SimpleCase { subject, arms, default } => {
                let subject = self.eval(subject)?;
                for (candidate, result) in arms {
                    let candidate = self.eval(candidate)?;
                    if cypher_equals(&subject, &candidate) == Some(true) {
                        return self.eval(result);
                    }
                }
                self.eval_default(default.as_deref())
            }
            ExprKind::SearchedCase { arms, default } => {
                for (condition, result) in arms {
                    let test = self.eval(condition)?;
                    if truth(&test, condition.pos)? == Some(true) {
                        return self.eval(result);
                    }
                }
                self.eval_default(default.as_deref())
            }
            ExprKind::Reduce { accumulator, init, variable, list, body } => {
                self.reduce(accumulator, init, variable, list, body)
            }
            ExprKind::Comprehension { variable, list, filter, map } => {
                let items = match self.eval(list)? {
                    Value::List(items) => items,
                    Value::Null => return Ok(Value::Null),
                    other => return Err(mismatch(format!("list comprehension over {}", other.type_name()), list.pos)),
                };
                let mut out = Vec::with_capacity(items.len());
                for item in items.iter() {
                    self.locals.push((variable, item.clone()));
                    let kept = match filter {
                        Some(f) => {
                            let test = self.eval(f);
                            test.and_then(|v| truth(&v, f.pos)).map(|t| t == Some(true))
                        }
                        None => Ok(true),
                    };
                    let produced = match kept {
                        Ok(true) => match map {
                            Some(m) => self.eval(m).map(Some),
                            None => Ok(Some(item.clone())),
                        },
                        Ok(false) => Ok(None),
                        Err(e) => Err(e),
                    };
                    self.locals.pop();
                    if let Some(v) = produced? {
                        out.push(v);
                    }
                }
                Ok(Value::list(out))
            }
            ExprKind::Call(function, args) => self.call(*function, args, pos),
        }
    }

    fn eval_default(&mut self, default: Option<&'a Expr>) -> Result<Value, CypherError> {
        match default {
            Some(e) => self.eval(e),
            None => Ok(Value::Null),
        }
    }

    fn index(&self, base: Value, index: Value, pos: Position) -> Result<Value, CypherError> {
        match (base, index) {
            (Value::Null, _) | (_, Value::Null) => Ok(Value::Null),
            (Value::List(items), Value::Int(i)) => {
                let len = items.len() as i64;
                let at = if i < 0 { len + i } else { i };
                Ok(if (0..len).contains(&at) { items[at as usize].clone() } else { Value::Null })
            }
            (Value::Map(m), Value::Text(key)) => Ok(m.get(key.as_ref()).cloned().unwrap_or_default()),
            (base, index) => {
                Err(mismatch(format!("cannot index {} with {}", base.type_name(), index.type_name()), pos))
            }
        }
    }

    fn binary(&mut self, op: BinaryOp, lhs: &'a Expr, rhs: &'a Expr, pos: Position) -> Result<Value, CypherError> {
        match op {
            BinaryOp::And | BinaryOp::Or => {
                let left = truth(&self.eval(lhs)?, lhs.pos)?;
                let decisive = op == BinaryOp::Or;
                if left == Some(decisive) {
                    return Ok(Value::Bool(decisive));
                }
                let right = truth(&self.eval(rhs)?, rhs.pos)?;
                Ok(match (left, right) {
                    (_, Some(r)) if r == decisive => Value::Bool(decisive),
                    (Some(_), Some(r)) => Value::Bool(r),
                    _ => Value::Null,
                })
            }
            _ => {
                let a = self.eval(lhs)?;
                let b = self.eval(rhs)?;
                apply_binary(op, &a, &b, pos)
            }
        }
    }

    fn reduce(
        &mut self,
        accumulator: &'a str,
        init: &'a Expr,
        variable: &'a str,
        list: &'a Expr,
        body: &'a Expr,
    ) -> Result<Value, CypherError> {
        let acc = self.eval(init)?;

        if let ExprKind::Call(Function::Range, args) = &list.kind {
            let args = args.iter().map(|a| self.eval(a)).collect::<Result<Vec<_>, _>>()?;
            let Some((start, end, step)) = range_bounds(&args, list.pos)? else {
                return Err(mismatch("reduce() over NULL", list.pos));
            };
            return self.fold(accumulator, acc, variable, range_iter(start, end, step).map(Value::Int), body);
        }

        match self.eval(list)? {
            Value::List(items) => self.fold(accumulator, acc, variable, items.iter().cloned(), body),
            other => Err(mismatch(format!("reduce() over {}", other.type_name()), list.pos)),
        }
    }

    fn fold(
        &mut self,
        accumulator: &'a str,
        mut acc: Value,
        variable: &'a str,
        items: impl Iterator<Item = Value>,
        body: &'a Expr,
    ) -> Result<Value, CypherError> {
        let base = self.locals.len();
        for item in items {
            self.locals.push((accumulator, acc));
            self.locals.push((variable, item));
            let next = self.eval(body);
            self.locals.truncate(base);
            acc = next?;
        }
        Ok(acc)
    }

    fn call(&mut self, function: Function, args: &'a [Expr], pos: Position) -> Result<Value, CypherError> {
        let values = args.iter().map(|a| self.eval(a)).collect::<Result<Vec<_>, _>>()?;
        match function {
            Function::Head => match &values[0] {
                Value::List(items) => Ok(items.first().cloned().unwrap_or_default()),
                Value::Null => Ok(Value::Null),
                other => Err(mismatch(format!("head() of {}", other.type_name()), pos)),
            },
            Function::Range => {
                let Some((start, end, step)) = range_bounds(&values, pos)? else {
                    return Ok(Value::Null);
                };
                if range_len(start, end, step) > MAX_MATERIALIZED_RANGE {
                    return Err(err(
                        ErrorKind::InvalidArgument,
                        format!("range() of more than {MAX_MATERIALIZED_RANGE} elements outside reduce()"),
                        pos,
                    ));
                }
                Ok(Value::list(range_iter(start, end, step).map(Value::Int).collect()))
            }
        }
    }
}

pub fn apply_binary(op: BinaryOp, a: &Value, b: &Value, pos: Position) -> Result<Value, CypherError> {
    use BinaryOp::*;
    match op {
        Eq => return Ok(tri(cypher_equals(a, b))),
        Ne => return Ok(tri(cypher_equals(a, b).map(|e| !e))),
        Lt | Le | Gt | Ge => {
            if a.is_null() || b.is_null() {
                return Ok(Value::Null);
            }
            return Ok(match cypher_compare(a, b) {
                None => Value::Null,
                Some(ord) => Value::Bool(match op {
                    Lt => ord == Ordering::Less,
                    Le => ord != Ordering::Greater,
                    Gt => ord == Ordering::Greater,
                    _ => ord != Ordering::Less,
                }),
            });
        }
        And | Or => unreachable!("logical operators are evaluated lazily"),
        Add | Sub | Mul | Div => {}
    }
    if a.is_null() || b.is_null() {
        return Ok(Value::Null);
    }
    match (op, a, b) {
        (Add, Value::Text(x), Value::Text(y)) => Ok(Value::text(&format!("{x}{y}"))),
        (_, Value::Int(x), Value::Int(y)) => {
            let (x, y) = (*x, *y);
            let result = match op {
                Add => x.checked_add(y),
                Sub => x.checked_sub(y),
                Mul => x.checked_mul(y),
                _ => {
                    if y == 0 {
                        return Err(err(ErrorKind::DivisionByZero, "/ by zero", pos));
                    }
                    x.checked_div(y)
                }
            };
            result.map(Value::Int).ok_or_else(|| overflow(pos))
        }
        _ => Err(mismatch(format!("cannot apply {} to {} and {}", op.symbol(), a.type_name(), b.type_name()), pos)),
    }
}
