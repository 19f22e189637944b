//! Differential check of the generated `reduce()` query and the path walk
//! against the reference interpreter, over a seeded random corpus.
//!
//! Case `i` uses the program `random_program(seed + i, max_states)`, so any
//! failing case reproduces on its own with `--seed <seed + i> --count 1`.
//! With the `parallel` feature, cases are spread over a rayon pool; results
//! come back in case order either way.

use std::fmt;

use crate::codegen::{gen_reduce_query, CypherQuery};
use crate::cypher::{run_query_text, Bindings, Value};
use crate::examples::fig1;
use crate::frontend::{random_program, render_dsl};
use crate::machine::{run, Config, Program, RunOptions};
use crate::qpp::qpp_walk;

/// The query generator under test. Swappable so the harness itself can be
/// mutation-tested.
pub type Generator = fn(&Program, u64) -> CypherQuery;

pub const DEFAULT_GENERATOR: Generator = gen_reduce_query;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub count: usize,
    pub max_states: usize,
    pub fuel: u64,
    /// Prepend the bundled example as an extra case.
    pub include_fig1: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 42, count: 200, max_states: 8, fuel: 5_000, include_fig1: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Interpreter,
    Fold,
    Walk,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Check::Interpreter => "interpreter",
            Check::Fold => "reduce query",
            Check::Walk => "path walk",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub check: Check,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseReport {
    /// `None` for the bundled example.
    pub seed: Option<u64>,
    pub program: Program,
    pub halted: bool,
    pub outcome: Result<(), Failure>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub cases: Vec<CaseReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> usize {
        self.cases.iter().filter(|c| c.outcome.is_ok()).count()
    }

    pub fn failed(&self) -> usize {
        self.cases.len() - self.passed()
    }

    pub fn halting(&self) -> usize {
        self.cases.iter().filter(|c| c.halted).count()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseReport> {
        self.cases.iter().filter(|c| c.outcome.is_err())
    }

    /// Command line that re-runs just this case.
    pub fn repro(&self, case: &CaseReport) -> String {
        match case.seed {
            Some(seed) => format!(
                "cm2cypher verify --seed {seed} --count 1 --max-states {} --fuel {}",
                self.config.max_states, self.config.fuel
            ),
            None => format!("cm2cypher verify --include-fig1 --count 0 --fuel {}", self.config.fuel),
        }
    }

    /// Summary line, then one block per failure.
    pub fn render(&self) -> String {
        let mut out = format!(
            "{} cases: {} passed, {} failed ({} halting within fuel {})\n",
            self.cases.len(),
            self.passed(),
            self.failed(),
            self.halting(),
            self.config.fuel
        );
        for case in self.failures() {
            let failure = case.outcome.as_ref().unwrap_err();
            out.push_str(&format!(
                "FAIL {} ({}): {}\n  repro: {}\n{}",
                case.seed.map_or("fig1".to_string(), |s| format!("seed {s}")),
                failure.check,
                failure.detail,
                self.repro(case),
                indent(&render_dsl(&case.program)),
            ));
        }
        out
    }
}

fn indent(text: &str) -> String {
    text.lines().map(|l| format!("    {l}\n")).collect()
}

fn corpus(config: &VerifyConfig) -> Vec<(Option<u64>, Program)> {
    let fig = config.include_fig1.then(|| (None, fig1()));
    let random = (0..config.count as u64).map(|i| {
        let seed = config.seed.wrapping_add(i);
        (Some(seed), random_program(seed, config.max_states))
    });
    fig.into_iter().chain(random).collect()
}

fn config_value(c: &Config) -> Value {
    Value::map([("state", Value::Int(c.state)), ("A", Value::Int(c.a)), ("B", Value::Int(c.b))])
}

/// Checks one program: the evaluated query must equal the interpreter's
/// final configuration exactly, and on halting runs the path walk must take
/// one step fewer and end on the same counters.
pub fn check_program(program: &Program, fuel: u64, generator: Generator) -> (bool, Result<(), Failure>) {
    let fail = |check, detail: String| Err(Failure { check, detail });
    let reference = match run(program, fuel, RunOptions::default()) {
        Ok(r) => r,
        Err(e) => return (false, fail(Check::Interpreter, e.to_string())),
    };

    let expected = config_value(&reference.final_config);
    let query = generator(program, fuel);
    let outcome = match run_query_text(&query.text, &Bindings::new()) {
        Ok(row) => match row.get("result") {
            Some(v) if *v == expected => Ok(()),
            Some(v) => fail(Check::Fold, format!("query returned {v}, interpreter reached {expected}")),
            None => fail(Check::Fold, "query has no `result` column".into()),
        },
        Err(e) => fail(Check::Fold, format!("evaluation failed: {e}")),
    };
    if outcome.is_err() || !reference.halted {
        return (reference.halted, outcome);
    }

    let outcome = match qpp_walk(program, fuel) {
        Ok(path) => {
            let c = reference.final_config;
            if path.steps + 1 != reference.machine_steps || (path.final_a, path.final_b) != (c.a, c.b) {
                fail(
                    Check::Walk,
                    format!(
                        "walk gave steps={} A={} B={}, interpreter gave steps={} A={} B={}",
                        path.steps, path.final_a, path.final_b, reference.machine_steps, c.a, c.b
                    ),
                )
            } else {
                Ok(())
            }
        }
        Err(e) => fail(Check::Walk, e.to_string()),
    };
    (true, outcome)
}

fn check_case((seed, program): (Option<u64>, Program), fuel: u64, generator: Generator) -> CaseReport {
    let (halted, outcome) = check_program(&program, fuel, generator);
    CaseReport { seed, program, halted, outcome }
}

pub fn verify_sequential(config: &VerifyConfig, generator: Generator) -> VerifyReport {
    let cases = corpus(config).into_iter().map(|c| check_case(c, config.fuel, generator)).collect();
    VerifyReport { config: *config, cases }
}

#[cfg(feature = "parallel")]
pub fn verify_parallel(config: &VerifyConfig, generator: Generator) -> VerifyReport {
    use rayon::prelude::*;
    let cases = corpus(config).into_par_iter().map(|c| check_case(c, config.fuel, generator)).collect();
    VerifyReport { config: *config, cases }
}

/// Parallel when the `parallel` feature is on, sequential otherwise.
pub fn verify(config: &VerifyConfig, generator: Generator) -> VerifyReport {
    #[cfg(feature = "parallel")]
    return verify_parallel(config, generator);
    #[cfg(not(feature = "parallel"))]
    return verify_sequential(config, generator);
}
