//! Two-counter machines, a reference interpreter, and three Cypher 25
//! encodings of them.
//!
//! - [`machine`]: the instruction set, `step`/`run`, and traces.
//! - [`qpp`]: the state graph and the guarded walk that mirrors the
//!   quantified-path query.
//! - [`frontend`]: `.2cm` text, JSON map documents, trace tables, random
//!   programs.
//! - [`codegen`]: the `reduce()`, transactional and path-query generators
//!   plus the primitive lint.
//! - [`cypher`]: tokenizer, parser and evaluator for the pure-expression
//!   subset the `reduce()` query needs.
//! - [`minsky`]: Turing machine → two stacks → three counters → two
//!   counters.
//! - [`verify`]: the differential corpus check.
//!
//! ```
//! use cm2cypher::{codegen, cypher, examples, machine};
//!
//! let program = examples::fig1();
//! let reference = machine::run(&program, 100, Default::default()).unwrap();
//! let query = codegen::gen_reduce_query(&program, 100);
//! let out = cypher::run_query_text(&query.text, &Default::default()).unwrap();
//! assert_eq!(out["result"].to_string(), "{A:2, B:0, state:-1}");
//! assert_eq!(reference.final_config.a, 2);
//! ```

pub mod codegen;
pub mod cypher;
pub mod examples;
pub mod frontend;
pub mod machine;
pub mod minsky;
pub mod qpp;
pub mod verify;
