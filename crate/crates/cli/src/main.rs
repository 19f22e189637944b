//! `cm2cypher`: run two-counter machines, compile them to Cypher, evaluate
//! the pure queries in-process, check the compiler differentially, and
//! reduce Turing machines to two-counter programs.
//!
//! Exit codes: 0 ok, 1 input error, 2 fuel exhausted, 3 connection failure,
//! 4 semantic mismatch.

mod live;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cm2cypher::codegen::{compile_files, Approach, CompileOptions, ProgramMode, DEFAULT_MAX_STEPS, UNBOUNDED};
use cm2cypher::cypher::{params_from_json, run_query_text, Bindings, Value};
use cm2cypher::frontend::{format_trace, load_program, render_dsl, TraceStyle};
use cm2cypher::machine::{run, Program, RunOptions, DEFAULT_FUEL};
use cm2cypher::minsky::{reduce_tm, StageFuel, TuringMachine, Verdict};
use cm2cypher::verify::{verify, verify_sequential, VerifyConfig, DEFAULT_GENERATOR};

#[derive(Parser)]
#[command(name = "cm2cypher", version, about = "Two-counter machines as Cypher 25 queries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a program with the reference interpreter.
    Run {
        program: PathBuf,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        /// Print the step table.
        #[arg(long)]
        trace: bool,
        /// Use `->` instead of `→` in the table.
        #[arg(long)]
        ascii: bool,
    },
    /// Generate Cypher files for one approach.
    Compile {
        program: PathBuf,
        #[arg(long, value_enum)]
        approach: ApproachArg,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: u64,
        #[arg(long, default_value_t = UNBOUNDED)]
        max_path: i64,
        /// Reference the program as `$program` and write a parameter file
        /// (tx only).
        #[arg(long)]
        params: bool,
    },
    /// Evaluate a pure-expression query in-process.
    Eval {
        query: PathBuf,
        /// JSON object of query parameters.
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Compare the generated reduce() query and the path walk against the
    /// interpreter on random programs.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 8)]
        max_states: usize,
        #[arg(long, default_value_t = 5_000)]
        fuel: u64,
        /// Add the bundled 4-state example to the corpus.
        #[arg(long)]
        include_fig1: bool,
        /// Check cases one at a time.
        #[arg(long)]
        sequential: bool,
    },
    /// Reduce a Turing machine fixture to a two-counter program.
    ReduceTm {
        machine: PathBuf,
        /// Step budget for each stage.
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        #[command(flatten)]
        out: OutputArgs,
        /// Also compile the resulting program.
        #[arg(long, value_enum)]
        compile: Option<ApproachArg>,
    },
    /// Execute the generated script against a live server and compare.
    Live {
        program: PathBuf,
        #[arg(long, value_enum)]
        approach: LiveApproach,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
    },
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Base file name; defaults to the input's stem.
    #[arg(long)]
    name: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ApproachArg {
    Reduce,
    Tx,
    Qpp,
}

impl From<ApproachArg> for Approach {
    fn from(a: ApproachArg) -> Self {
        match a {
            ApproachArg::Reduce => Approach::Reduce,
            ApproachArg::Tx => Approach::Transactions,
            ApproachArg::Qpp => Approach::Qpp,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum LiveApproach {
    Tx,
    Qpp,
}

/// An error carrying its exit code.
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Failure { code, error: error.into() }
    }

    fn input(error: impl Into<anyhow::Error>) -> Self {
        Failure::new(1, error)
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Run { program, fuel, trace, ascii } => cmd_run(&program, fuel, trace, ascii),
        Command::Compile { program, approach, out, max_steps, max_path, params } => {
            let loaded = load(&program)?;
            let options = CompileOptions {
                max_steps,
                max_path,
                program_mode: if params { ProgramMode::Parameter } else { ProgramMode::Inline },
            };
            if max_steps == 0 || max_path < 0 {
                return Err(Failure::input(anyhow!("--max-steps must be positive and --max-path non-negative")));
            }
            write_compiled(&loaded, &out.name_for(&program), approach.into(), &options, &out.out_dir)?;
            Ok(0)
        }
        Command::Eval { query, params } => cmd_eval(&query, params.as_deref()),
        Command::Verify { seed, count, max_states, fuel, include_fig1, sequential } => {
            if max_states == 0 {
                return Err(Failure::input(anyhow!("--max-states must be at least 1")));
            }
            let config = VerifyConfig { seed, count, max_states, fuel, include_fig1 };
            let report = if sequential {
                verify_sequential(&config, DEFAULT_GENERATOR)
            } else {
                verify(&config, DEFAULT_GENERATOR)
            };
            print!("{}", report.render());
            Ok(if report.all_passed() { 0 } else { 4 })
        }
        Command::ReduceTm { machine, fuel, out, compile } => cmd_reduce_tm(&machine, fuel, &out, compile),
        Command::Live { program, approach, fuel } => live::cmd_live(&load(&program)?, approach, fuel),
    }
}

impl OutputArgs {
    fn name_for(&self, input: &Path) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| input.file_stem().map_or_else(|| "program".into(), |s| s.to_string_lossy().into_owned()))
    }
}

fn load(path: &Path) -> Result<Program, Failure> {
    load_program(path).map_err(Failure::input)
}

fn cmd_run(path: &Path, fuel: u64, trace: bool, ascii: bool) -> Outcome {
    let program = load(path)?;
    let options = if trace { RunOptions::traced() } else { RunOptions::default() };
    let result = run(&program, fuel, options).map_err(Failure::input)?;
    if trace {
        print!("{}", format_trace(&result, TraceStyle { ascii }));
    }
    let c = result.final_config;
    let status = if result.halted { "halted" } else { "fuel exhausted" };
    println!("{status} state={} A={} B={} steps={}", c.state, c.a, c.b, result.machine_steps);
    Ok(if result.halted { 0 } else { 2 })
}

fn write_compiled(
    program: &Program,
    name: &str,
    approach: Approach,
    options: &CompileOptions,
    out_dir: &Path,
) -> Result<(), Failure> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))
        .map_err(Failure::input)?;
    for (file, text) in compile_files(program, name, approach, options) {
        let path = out_dir.join(file);
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display())).map_err(Failure::input)?;
        println!("{}", path.display());
    }
    Ok(())
}

/// A lone map-valued column prints as the map itself; anything else prints
/// as a row of `alias: value` pairs.
pub fn render_row(row: &Bindings) -> String {
    if let (1, Some(v @ Value::Map(_))) = (row.len(), row.values().next()) {
        return v.to_string();
    }
    let cells: Vec<String> = row.iter().map(|(k, v)| format!("{k}: {v}")).collect();
    format!("{{{}}}", cells.join(", "))
}

fn cmd_eval(query: &Path, params: Option<&Path>) -> Outcome {
    let read = |p: &Path| {
        fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display())).map_err(Failure::input)
    };
    let text = read(query)?;
    let params = match params {
        Some(p) => params_from_json(&read(p)?).map_err(|e| Failure::input(anyhow!("{}: {e}", p.display())))?,
        None => Bindings::new(),
    };
    let row = run_query_text(&text, &params).map_err(|e| Failure::input(anyhow!("{}:{e}", query.display())))?;
    println!("{}", render_row(&row));
    Ok(0)
}

fn cmd_reduce_tm(path: &Path, fuel: u64, out: &OutputArgs, compile: Option<ApproachArg>) -> Outcome {
    let json =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display())).map_err(Failure::input)?;
    let tm = TuringMachine::from_json(&json).map_err(|e| Failure::input(anyhow!("{}: {e}", path.display())))?;
    let report = reduce_tm(&tm, StageFuel::uniform(fuel)).map_err(Failure::input)?;
    print!("{}", report.table());

    let program = &report.two_counter.program;
    let code = match &report.verdict {
        Verdict::Agree => {
            let counters = report.stages.last().and_then(|s| s.counters.clone()).unwrap_or_default();
            println!("stages agree; 2-counter program has {} states, decoded counters {counters:?}", program.len());
            0
        }
        Verdict::Inconclusive { stage } => {
            println!("inconclusive: {stage} stage ran out of fuel ({fuel})");
            2
        }
        Verdict::Disagree { stage, reason } => {
            return Err(Failure::input(anyhow!("{stage} stage disagrees: {reason}")));
        }
    };

    let name = out.name_for(path);
    fs::create_dir_all(&out.out_dir).map_err(Failure::input)?;
    let target = out.out_dir.join(format!("{name}.2cm"));
    fs::write(&target, render_dsl(program))
        .with_context(|| format!("cannot write {}", target.display()))
        .map_err(Failure::input)?;
    println!("{}", target.display());
    if let Some(approach) = compile {
        write_compiled(program, &name, approach.into(), &CompileOptions::default(), &out.out_dir)?;
    }
    Ok(code)
}
