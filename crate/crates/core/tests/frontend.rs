use std::path::{Path, PathBuf};

use proptest::prelude::*;

use cm2cypher::examples::{fig1, FIG1_DSL};
use cm2cypher::frontend::{
    format_trace, from_instruction_maps, load_program, parse_document, parse_dsl, random_program, render_document,
    render_dsl, table_cells, to_instruction_maps, DocumentError, DslError, TraceStyle,
};
use cm2cypher::machine::{run, Instruction, Program, RunOptions};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn schema() -> jsonschema::JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/program-document.schema.json");
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::JSONSchema::compile(&doc).expect("schema compiles")
}

#[test]
fn bundled_fixtures_are_the_example() {
    assert_eq!(load_program(&fixture("fig1.2cm")).unwrap(), fig1());
    assert_eq!(load_program(&fixture("fig1.json")).unwrap(), fig1());
    assert_eq!(parse_dsl(FIG1_DSL).unwrap(), fig1());
}

#[test]
fn spec_dsl_text_parses() {
    let text = "state 0: INC A -> 1\nstate 1: JZDEC B ? 2 : 3\nstate 2: INC B -> 0\nstate 3: HALT";
    assert_eq!(parse_dsl(text).unwrap(), fig1());
    assert_eq!(parse_dsl("state 0: HALT").unwrap().instructions(), &[Instruction::Halt]);
    assert!(matches!(parse_dsl("state 0: INC C -> 0"), Err(DslError::UnknownCounter { .. })));
}

#[test]
fn states_may_appear_in_any_order() {
    let text = "state 1: HALT\nstate 0: INC A -> 1\n";
    assert_eq!(parse_dsl(text).unwrap().len(), 2);
    assert!(matches!(parse_dsl("state 0: HALT\nstate 2: HALT"), Err(DslError::MissingState { .. })));
}

#[test]
fn document_errors() {
    assert!(matches!(from_instruction_maps(&[]), Err(DocumentError::Empty)));
    assert!(parse_document(r#"[{"state":1,"op":"HALT","counter":"","next":1}]"#).is_err());
    assert!(parse_document(r#"[{"state":0,"op":"JZDEC","counter":"A","next":0}]"#).is_err());
}

#[test]
fn halt_only_document() {
    let p = Program::new(vec![Instruction::Halt]).unwrap();
    assert_eq!(render_document(&p), "[\n  {\"state\":0,\"op\":\"HALT\",\"counter\":\"\",\"next\":0}\n]\n");
}

#[test]
fn example_trace_matches_the_table() {
    let r = run(&fig1(), 1_000_000, RunOptions::traced()).unwrap();
    let table = format_trace(&r, TraceStyle::default());
    let rows: Vec<Vec<&str>> = table.lines().skip(2).map(table_cells).collect();
    let expected = [
        ["0", "INC(A)", "q0", "0→1", "0"],
        ["1", "JZDEC(B), B=0", "q1", "1", "0"],
        ["2", "INC(B)", "q2", "1", "0→1"],
        ["3", "INC(A)", "q0", "1→2", "1"],
        ["4", "JZDEC(B), B>0", "q1", "2", "1→0"],
        ["5", "HALT", "q3", "2", "0"],
    ];
    assert_eq!(rows, expected.map(|r| r.to_vec()).to_vec());
}

#[test]
fn halt_only_trace_and_ascii_arrows() {
    let p = Program::new(vec![Instruction::Halt]).unwrap();
    let r = run(&p, 10, RunOptions::traced()).unwrap();
    let table = format_trace(&r, TraceStyle::default());
    assert_eq!(table_cells(table.lines().nth(2).unwrap()), ["0", "HALT", "q0", "0", "0"]);

    let r = run(&fig1(), 10, RunOptions::traced()).unwrap();
    let ascii = format_trace(&r, TraceStyle { ascii: true });
    assert!(ascii.contains("0->1") && !ascii.contains('→'));
}

#[test]
fn truncated_trace_has_a_footer() {
    let p = parse_dsl("state 0: INC A -> 0").unwrap();
    let r = run(&p, 30, RunOptions { capture_trace: true, trace_cap: 4 }).unwrap();
    let table = format_trace(&r, TraceStyle::default());
    assert_eq!(table.lines().count(), 2 + 4 + 1);
    assert_eq!(table.lines().last(), Some("... trace truncated after 4 rows (30 steps executed)"));
}

#[test]
fn example_document_validates_against_schema() {
    let schema = schema();
    let doc = serde_json::to_value(to_instruction_maps(&fig1())).unwrap();
    assert!(schema.is_valid(&doc));
    let bad = serde_json::json!([{"state": 0, "op": "INC", "counter": "", "next": 0}]);
    assert!(!schema.is_valid(&bad));
}

proptest! {
    #[test]
    fn dsl_round_trip(seed in any::<u64>(), n in 1usize..=12) {
        let p = random_program(seed, n);
        prop_assert_eq!(parse_dsl(&render_dsl(&p)).unwrap(), p);
    }

    #[test]
    fn document_round_trip(seed in any::<u64>(), n in 1usize..=12) {
        let p = random_program(seed, n);
        prop_assert_eq!(from_instruction_maps(&to_instruction_maps(&p)).unwrap(), p.clone());
        prop_assert_eq!(parse_document(&render_document(&p)).unwrap(), p);
    }

    #[test]
    fn emitted_documents_validate(seed in any::<u64>(), n in 1usize..=12) {
        let doc = serde_json::to_value(to_instruction_maps(&random_program(seed, n))).unwrap();
        prop_assert!(schema().is_valid(&doc));
    }

    #[test]
    fn random_programs_are_valid(seed in any::<u64>(), n in 1usize..=16) {
        let p = random_program(seed, n);
        prop_assert!(p.len() <= n && p.has_halt());
        prop_assert_eq!(random_program(seed, n), p);
    }
}
