//! Cypher 25 generators for the three execution strategies: a pure `reduce()`
//! fold, a transactional stepper over a stored machine node, and a
//! quantified-path traversal over the program's state graph.
//!
//! Output uses a fixed house style (two-space indentation, one clause per
//! line, single-quoted strings), so generated text is stable byte for byte.

mod lint;
mod qpp;
mod reduce;
mod transactions;

use std::fmt;
use std::str::FromStr;

pub use lint::{lint_primitives, Violation};
pub use qpp::{gen_qpp_query, gen_qpp_setup};
pub use reduce::gen_reduce_query;
pub use transactions::{gen_transactions_script, ProgramMode};

use crate::frontend::to_instruction_maps;
use crate::machine::Program;

pub const DIALECT_HEADER: &str = "CYPHER 25";

/// Upper bound used by the transactional stepper and the path quantifier.
pub const UNBOUNDED: i64 = i64::MAX;

pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Approach {
    Reduce,
    Transactions,
    Qpp,
}

impl Approach {
    pub fn name(self) -> &'static str {
        match self {
            Approach::Reduce => "reduce",
            Approach::Transactions => "tx",
            Approach::Qpp => "qpp",
        }
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Approach {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reduce" => Ok(Approach::Reduce),
            "tx" | "transactions" => Ok(Approach::Transactions),
            "qpp" => Ok(Approach::Qpp),
            other => Err(format!("unknown approach `{other}` (expected reduce, tx or qpp)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CypherQuery {
    pub approach: Approach,
    pub text: String,
    /// `Some("CYPHER 25")` when the text opens with the dialect header.
    pub dialect_header: Option<&'static str>,
}

impl CypherQuery {
    fn with_header(approach: Approach, body: String) -> Self {
        CypherQuery { approach, text: format!("{DIALECT_HEADER}\n{body}"), dialect_header: Some(DIALECT_HEADER) }
    }
}

/// Queries meant to run one after another.
#[derive(Debug, Clone, PartialEq)]
pub struct ScriptBundle {
    pub queries: Vec<(String, CypherQuery)>,
    /// Parameter document for queries that reference `$program`.
    pub parameters: Option<serde_json::Value>,
}

impl ScriptBundle {
    pub fn get(&self, label: &str) -> Option<&CypherQuery> {
        self.queries.iter().find(|(l, _)| l == label).map(|(_, q)| q)
    }
}

/// The program as a Cypher list literal, one map per line, indented by
/// `indent` spaces.
pub(crate) fn program_literal(program: &Program, indent: usize) -> String {
    let pad = " ".repeat(indent);
    let maps = to_instruction_maps(program);
    let mut out = String::from("[\n");
    for (i, m) in maps.iter().enumerate() {
        let tail = match (m.next, m.q_zero, m.q_pos) {
            (_, Some(z), Some(p)) => format!("q_zero: {z}, q_pos: {p}"),
            (Some(n), _, _) => format!("next: {n}"),
            _ => unreachable!("every encoded instruction has a target"),
        };
        out.push_str(&format!("{pad}  {{state: {}, op: '{}', counter: '{}', {tail}}}", m.state, m.op, m.counter));
        out.push_str(if i + 1 < maps.len() { ",\n" } else { "\n" });
    }
    out.push_str(&pad);
    out.push(']');
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompileOptions {
    pub max_steps: u64,
    pub max_path: i64,
    pub program_mode: ProgramMode,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { max_steps: DEFAULT_MAX_STEPS, max_path: UNBOUNDED, program_mode: ProgramMode::Inline }
    }
}

/// Generated files for one approach, as `(file name, contents)` pairs.
pub fn compile_files(
    program: &Program,
    name: &str,
    approach: Approach,
    options: &CompileOptions,
) -> Vec<(String, String)> {
    match approach {
        Approach::Reduce => vec![(format!("{name}.reduce.cypher"), gen_reduce_query(program, options.max_steps).text)],
        Approach::Transactions => {
            let bundle = gen_transactions_script(program, options.program_mode);
            let mut files: Vec<(String, String)> =
                bundle.queries.iter().map(|(label, q)| (format!("{name}.tx.{label}.cypher"), q.text.clone())).collect();
            if let Some(params) = bundle.parameters {
                let mut json = serde_json::to_string_pretty(&params).expect("parameters serialize");
                json.push('\n');
                files.push((format!("{name}.tx.params.json"), json));
            }
            files
        }
        Approach::Qpp => vec![
            (format!("{name}.qpp.setup.cypher"), gen_qpp_setup(program).text),
            (format!("{name}.qpp.query.cypher"), gen_qpp_query(options.max_path).text),
        ],
    }
}
