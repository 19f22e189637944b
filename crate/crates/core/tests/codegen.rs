use std::fs;
use std::path::{Path, PathBuf};

use cm2cypher::codegen::{
    compile_files, gen_qpp_query, gen_qpp_setup, gen_reduce_query, gen_transactions_script, lint_primitives, Approach,
    CompileOptions, ProgramMode, UNBOUNDED,
};
use cm2cypher::cypher::normalize;
use cm2cypher::examples::fig1;
use cm2cypher::frontend::random_program;
use cm2cypher::machine::Instruction;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn read(path: PathBuf) -> String {
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn tokens(text: &str) -> String {
    normalize(text).expect("tokenizes")
}

/// Every generated file for the example, in `fixtures/golden`.
fn generated() -> Vec<(String, String)> {
    let program = fig1();
    let mut files = Vec::new();
    for approach in [Approach::Reduce, Approach::Transactions, Approach::Qpp] {
        files.extend(compile_files(&program, "fig1", approach, &CompileOptions::default()));
    }
    let param = CompileOptions { program_mode: ProgramMode::Parameter, ..CompileOptions::default() };
    files.extend(compile_files(&program, "fig1-param", Approach::Transactions, &param));
    files
}

#[test]
fn golden_files_match_byte_for_byte() {
    let dir = fixtures().join("golden");
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for (name, text) in generated() {
        let path = dir.join(&name);
        if update {
            fs::write(&path, &text).unwrap();
        }
        assert_eq!(read(path), text, "{name} drifted; rerun with UPDATE_GOLDEN=1 to accept");
    }
}

#[test]
fn goldens_match_reference_listings_token_for_token() {
    let golden = |name: &str| read(fixtures().join("golden").join(name));
    let reference = |name: &str| read(fixtures().join("reference").join(name));
    for (g, r) in [
        ("fig1.reduce.cypher", "reduce.cypher"),
        ("fig1.tx.setup.cypher", "tx.setup.cypher"),
        ("fig1.tx.main.cypher", "tx.main.cypher"),
        ("fig1.tx.read.cypher", "tx.read.cypher"),
        ("fig1.qpp.setup.cypher", "qpp.setup.cypher"),
        ("fig1.qpp.query.cypher", "qpp.query.cypher"),
    ] {
        assert_eq!(tokens(&golden(g)), tokens(&reference(r)), "{g} vs {r}");
    }

    // The parameterized listing is setup and stepper in one block.
    let main = golden("fig1-param.tx.main.cypher");
    let joined = golden("fig1-param.tx.setup.cypher") + main.strip_prefix("CYPHER 25\n").unwrap();
    assert_eq!(tokens(&joined), tokens(&reference("tx-param.cypher")));
}

#[test]
fn normalization_ignores_layout_only() {
    let a = "{state:0,  A: 0}\n  RETURN  'a  b'";
    let b = "{ state : 0 , A : 0 } RETURN 'a  b'";
    assert_eq!(tokens(a), tokens(b));
    assert_ne!(tokens("RETURN 'a b'"), tokens("RETURN 'a  b'"));
}

#[test]
fn every_query_opens_with_the_dialect_header_except_readback() {
    let p = fig1();
    assert!(gen_reduce_query(&p, 10).text.starts_with("CYPHER 25\n"));
    assert!(gen_qpp_setup(&p).text.starts_with("CYPHER 25\n"));
    assert!(gen_qpp_query(5).text.starts_with("CYPHER 25\n"));
    let bundle = gen_transactions_script(&p, ProgramMode::Inline);
    for (label, q) in &bundle.queries {
        assert_eq!(q.text.starts_with("CYPHER 25\n"), label != "read", "{label}");
        assert_eq!(q.dialect_header.is_some(), label != "read", "{label}");
    }
}

#[test]
fn qpp_edge_count_matches_instruction_mix() {
    for seed in 0..100 {
        let p = random_program(seed, 8);
        let expected: usize = p
            .instructions()
            .iter()
            .map(|i| match i {
                Instruction::Inc { .. } => 1,
                Instruction::JzDec { .. } => 2,
                Instruction::Halt => 0,
            })
            .sum();
        let text = gen_qpp_setup(&p).text;
        assert_eq!(text.matches(")-[:").count(), expected, "seed {seed}");
        assert_eq!(text.matches(":State").count(), p.len(), "seed {seed}");
    }
}

#[test]
fn generated_reduce_queries_pass_the_lint() {
    for seed in 0..100 {
        let q = gen_reduce_query(&random_program(seed, 8), 5_000);
        assert_eq!(lint_primitives(&q), vec![], "seed {seed}");
    }
}

#[test]
fn qpp_bound_is_substituted() {
    assert!(gen_qpp_query(UNBOUNDED).text.contains("{0, 9223372036854775807}"));
    assert!(gen_qpp_query(12).text.contains("{0, 12}"));
}

#[test]
fn generators_are_pure() {
    assert_eq!(generated(), generated());
}
