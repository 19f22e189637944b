use proptest::prelude::*;

use cm2cypher::codegen::gen_reduce_query;
use cm2cypher::cypher::{run_query_text, Bindings, ErrorKind, Value};
use cm2cypher::examples::fig1;
use cm2cypher::frontend::random_program;
use cm2cypher::machine::{run, RunOptions};

fn eval(expr: &str) -> Result<Value, ErrorKind> {
    run_query_text(&format!("RETURN {expr} AS v"), &Bindings::new())
        .map(|mut row| row.shift_remove("v").unwrap())
        .map_err(|e| e.kind)
}

fn int(i: i64) -> Result<Value, ErrorKind> {
    Ok(Value::Int(i))
}

#[test]
fn pinned_semantics() {
    assert_eq!(eval("reduce(s = 0, x IN range(1,3) | s + x)"), int(6));
    assert_eq!(eval("head([v IN [5] | v + 1])"), int(6));
    assert_eq!(eval("[10,20,30][-1]"), int(30));
    assert_eq!(eval("[10,20,30][3]"), Ok(Value::Null));
    assert_eq!(eval("[10,20,30][-4]"), Ok(Value::Null));
    assert_eq!(eval("1/0"), Err(ErrorKind::DivisionByZero));
    assert_eq!(eval("-7 / 2"), int(-3));
    assert_eq!(eval("{a: 1}.b"), Ok(Value::Null));
    assert_eq!(eval("null + 1"), Ok(Value::Null));
    assert_eq!(eval("null = null"), Ok(Value::Null));
    assert_eq!(eval("null < 1"), Ok(Value::Null));
    assert_eq!(eval("9223372036854775807 + 1"), Err(ErrorKind::Overflow));
    assert_eq!(eval("5[0]"), Err(ErrorKind::TypeMismatch));
    assert_eq!(eval("reduce(s = 0, x IN 5 | s)"), Err(ErrorKind::TypeMismatch));
    assert_eq!(eval("y"), Err(ErrorKind::UnknownVariable));
    assert_eq!(eval("$p"), Err(ErrorKind::UnknownParameter));
    assert_eq!(eval("range(3, 1)"), Ok(Value::list(vec![])));
}

#[test]
fn case_semantics() {
    assert_eq!(eval("CASE null WHEN null THEN 1 ELSE 2 END"), int(2));
    assert_eq!(eval("CASE 2 WHEN 1 THEN 'a' WHEN 2 THEN 'b' END"), Ok(Value::text("b")));
    assert_eq!(eval("CASE 3 WHEN 1 THEN 'a' END"), Ok(Value::Null));
    assert_eq!(eval("CASE WHEN 1 > 2 THEN 1 WHEN true THEN 2 END"), int(2));
}

#[test]
fn three_valued_logic() {
    assert_eq!(eval("null AND false"), Ok(Value::Bool(false)));
    assert_eq!(eval("null AND true"), Ok(Value::Null));
    assert_eq!(eval("null OR true"), Ok(Value::Bool(true)));
    assert_eq!(eval("null OR false"), Ok(Value::Null));
    assert_eq!(eval("NOT null"), Ok(Value::Null));
}

/// With a negative index meaning "from the end", `program[-1]` is a real
/// instruction; the halt guard's `1/0` must therefore fire before any
/// lookup with state -1 happens.
#[test]
fn halt_guard_fires_before_negative_lookup() {
    let guarded = "CASE WHEN -1 = -1 THEN 1/0 ELSE [10, 20][-1] END";
    assert_eq!(eval(guarded), Err(ErrorKind::DivisionByZero));
    assert_eq!(eval("[10, 20][-1]"), int(20));
}

#[test]
fn let_bindings_chain() {
    let row = run_query_text("LET x = 2 LET y = x + 3 RETURN y AS z", &Bindings::new()).unwrap();
    assert_eq!(row.get("z"), Some(&Value::Int(5)));
}

#[test]
fn unsupported_constructs_are_rejected_at_parse_time() {
    for text in [
        "MATCH (n) RETURN n",
        "CREATE (n:Machine) RETURN 1 AS x",
        "RETURN apoc.coll.sum([1]) AS x",
        "RETURN 1.5 AS x",
        "UNWIND [1] AS x RETURN x",
        "RETURN 7 % 2 AS x",
    ] {
        let err = run_query_text(text, &Bindings::new()).unwrap_err();
        assert!(matches!(err.kind, ErrorKind::UnsupportedFeature | ErrorKind::Syntax), "{text}: {err}");
    }
    let err = run_query_text("MATCH (n) RETURN n", &Bindings::new()).unwrap_err();
    assert_eq!(err.kind, ErrorKind::UnsupportedFeature);
}

#[test]
fn binders_do_not_leak() {
    assert_eq!(eval("reduce(s = 0, x IN [1] | s) + x"), Err(ErrorKind::UnknownVariable));
    assert_eq!(eval("head([v IN [1] | v]) + v"), Err(ErrorKind::UnknownVariable));
    let text = "LET x = 7 RETURN reduce(s = 0, x IN [1, 2] | s + x) + x AS v";
    let row = run_query_text(text, &Bindings::new()).unwrap();
    assert_eq!(row.get("v"), Some(&Value::Int(10)));
}

#[test]
fn fig1_result_box() {
    let row = run_query_text(&gen_reduce_query(&fig1(), 1_000).text, &Bindings::new()).unwrap();
    let result = row.get("result").unwrap();
    assert_eq!(result.to_string(), "{A:2, B:0, state:-1}");
    let expected = Value::map([("B", Value::Int(0)), ("state", Value::Int(-1)), ("A", Value::Int(2))]);
    assert_eq!(result, &expected);
}

fn scalar() -> impl Strategy<Value = Value> {
    prop_oneof![
        any::<i64>().prop_map(Value::Int),
        any::<bool>().prop_map(Value::Bool),
        "[a-z]{0,4}".prop_map(|s| Value::text(&s)),
        Just(Value::Null),
    ]
}

fn literal(v: &Value) -> String {
    match v {
        Value::Text(s) => format!("'{s}'"),
        Value::Int(i) if *i < 0 => format!("({i})"),
        other => other.to_string(),
    }
}

proptest! {
    #[test]
    fn null_propagates_through_arithmetic(v in scalar(), op in prop::sample::select(vec!["+", "-", "*", "/"])) {
        let lit = literal(&v);
        prop_assert_eq!(eval(&format!("null {op} {lit}")), Ok(Value::Null));
        prop_assert_eq!(eval(&format!("{lit} {op} null")), Ok(Value::Null));
    }

    #[test]
    fn comparisons_with_null_are_null(v in scalar(), op in prop::sample::select(vec!["=", "<>", "<", "<=", ">", ">="])) {
        prop_assert_eq!(eval(&format!("null {op} {}", literal(&v))), Ok(Value::Null));
    }

    #[test]
    fn evaluation_is_repeatable(seed in any::<u64>(), fuel in 1u64..200) {
        let text = gen_reduce_query(&random_program(seed, 6), fuel).text;
        let first = run_query_text(&text, &Bindings::new()).unwrap();
        prop_assert_eq!(run_query_text(&text, &Bindings::new()).unwrap(), first);
    }

    #[test]
    fn generated_query_equals_interpreter(seed in any::<u64>(), fuel in 1u64..500) {
        let p = random_program(seed, 8);
        let expected = run(&p, fuel, RunOptions::default()).unwrap().final_config;
        let row = run_query_text(&gen_reduce_query(&p, fuel).text, &Bindings::new()).unwrap();
        let result = row.get("result").unwrap();
        prop_assert_eq!(result.get("state"), Some(&Value::Int(expected.state)));
        prop_assert_eq!(result.get("A"), Some(&Value::Int(expected.a)));
        prop_assert_eq!(result.get("B"), Some(&Value::Int(expected.b)));
    }
}
