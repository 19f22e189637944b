//! The two-counter machine model and its reference interpreter.
//!
//! A [`Program`] is a dense, state-indexed list of instructions. State 0 is
//! the initial state. A running machine is described by a [`Config`]; the
//! control state `-1` marks a machine that has executed `HALT`, and stepping a
//! halted configuration returns it unchanged.
//!
//! Two step counts exist side by side. [`run`] counts executed instructions,
//! including the final `HALT`, so the bundled four-state example takes six
//! machine steps. The path walk in [`crate::qpp`] counts traversed
//! relationships, and `HALT` has none, so the same program yields a path of
//! length five. For every halting program the two differ by exactly one.

use std::fmt;

use thiserror::Error;

/// Fuel used when the caller does not supply one.
pub const DEFAULT_FUEL: u64 = 1_000_000;

/// Maximum number of trace rows retained unless overridden.
pub const DEFAULT_TRACE_CAP: usize = 10_000;

/// Control state of a halted machine.
pub const HALTED: i64 = -1;

/// Index of a machine state.
pub type StateId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Counter {
    A,
    B,
}

impl Counter {
    pub const ALL: [Counter; 2] = [Counter::A, Counter::B];

    pub fn name(self) -> &'static str {
        match self {
            Counter::A => "A",
            Counter::B => "B",
        }
    }

    pub fn from_name(name: &str) -> Option<Counter> {
        match name {
            "A" => Some(Counter::A),
            "B" => Some(Counter::B),
            _ => None,
        }
    }
}

impl fmt::Display for Counter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Instruction {
    /// Increment `counter`, then go to `next`.
    Inc {
        counter: Counter,
        next: StateId,
    },
    /// Go to `if_zero` when `counter` is zero, otherwise decrement it and go
    /// to `if_pos`.
    JzDec {
        counter: Counter,
        if_zero: StateId,
        if_pos: StateId,
    },
    Halt,
}

impl Instruction {
    /// States this instruction may transfer control to.
    pub fn targets(&self) -> impl Iterator<Item = StateId> {
        let (first, second) = match *self {
            Instruction::Inc { next, .. } => (Some(next), None),
            Instruction::JzDec { if_zero, if_pos, .. } => (Some(if_zero), Some(if_pos)),
            Instruction::Halt => (None, None),
        };
        first.into_iter().chain(second)
    }

    pub fn is_halt(&self) -> bool {
        matches!(self, Instruction::Halt)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error("program has no instructions")]
    Empty,
    #[error("state {state} refers to state {target}, but the program has {len} states")]
    DanglingReference { state: StateId, target: StateId, len: usize },
}

/// A validated two-counter machine program.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Program {
    instructions: Vec<Instruction>,
}

impl Program {
    /// Builds a program, checking that it is non-empty and that every jump
    /// target names an existing state.
    pub fn new(instructions: Vec<Instruction>) -> Result<Self, ProgramError> {
        if instructions.is_empty() {
            return Err(ProgramError::Empty);
        }
        let len = instructions.len();
        for (state, instr) in instructions.iter().enumerate() {
            if let Some(target) = instr.targets().find(|&t| t >= len) {
                return Err(ProgramError::DanglingReference { state, target, len });
            }
        }
        Ok(Program { instructions })
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn get(&self, state: StateId) -> Option<&Instruction> {
        self.instructions.get(state)
    }

    pub fn has_halt(&self) -> bool {
        self.instructions.iter().any(Instruction::is_halt)
    }
}

/// A machine snapshot: control state plus both counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Config {
    pub state: i64,
    pub a: i64,
    pub b: i64,
}

impl Config {
    pub const fn new(state: i64, a: i64, b: i64) -> Self {
        Config { state, a, b }
    }

    pub const fn initial() -> Self {
        Config::new(0, 0, 0)
    }

    pub fn is_halted(&self) -> bool {
        self.state == HALTED
    }

    pub fn counter(&self, counter: Counter) -> i64 {
        match counter {
            Counter::A => self.a,
            Counter::B => self.b,
        }
    }

    fn with_counter(mut self, counter: Counter, value: i64) -> Self {
        match counter {
            Counter::A => self.a = value,
            Counter::B => self.b = value,
        }
        self
    }
}

impl Default for Config {
    fn default() -> Self {
        Config::initial()
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "state={} A={} B={}", self.state, self.a, self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("counter {counter} overflowed at state {state}")]
    Overflow { state: StateId, counter: Counter },
    #[error("configuration has state {state}, which is not valid for a {len}-state program")]
    InvalidState { state: i64, len: usize },
    #[error("configuration has a negative counter ({config})")]
    NegativeCounter { config: Config },
    #[error("no accepted path to a halting state within {fuel} relationships")]
    NoPath { fuel: u64 },
}

fn current_instruction(program: &Program, config: &Config) -> Result<(StateId, Instruction), MachineError> {
    if config.a < 0 || config.b < 0 {
        return Err(MachineError::NegativeCounter { config: *config });
    }
    usize::try_from(config.state)
        .ok()
        .and_then(|s| program.get(s).map(|instr| (s, *instr)))
        .ok_or(MachineError::InvalidState { state: config.state, len: program.len() })
}

/// Executes a single instruction. Halted configurations are returned as-is.
pub fn step(program: &Program, config: Config) -> Result<Config, MachineError> {
    if config.is_halted() {
        return Ok(config);
    }
    let (state, instr) = current_instruction(program, &config)?;
    apply(state, instr, config)
}

fn apply(state: StateId, instr: Instruction, config: Config) -> Result<Config, MachineError> {
    let next = match instr {
        Instruction::Inc { counter, next } => {
            let value = config.counter(counter).checked_add(1).ok_or(MachineError::Overflow { state, counter })?;
            Config { state: next as i64, ..config.with_counter(counter, value) }
        }
        Instruction::JzDec { counter, if_zero, if_pos } => {
            let value = config.counter(counter);
            if value == 0 {
                Config { state: if_zero as i64, ..config }
            } else {
                Config { state: if_pos as i64, ..config.with_counter(counter, value - 1) }
            }
        }
        Instruction::Halt => Config { state: HALTED, ..config },
    };
    Ok(next)
}

/// One executed instruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRow {
    pub step: u64,
    pub state_before: StateId,
    /// Label such as `INC(A)`, `JZDEC(B), B=0` or `HALT`.
    pub instruction_tag: String,
    pub config_before: Config,
    pub config_after: Config,
}

/// Label of `instr` as executed from `config`.
pub fn instruction_tag(instr: &Instruction, config: &Config) -> String {
    match *instr {
        Instruction::Inc { counter, .. } => format!("INC({counter})"),
        Instruction::JzDec { counter, .. } => {
            let cmp = if config.counter(counter) == 0 { "=0" } else { ">0" };
            format!("JZDEC({counter}), {counter}{cmp}")
        }
        Instruction::Halt => "HALT".to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub capture_trace: bool,
    pub trace_cap: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { capture_trace: false, trace_cap: DEFAULT_TRACE_CAP }
    }
}

impl RunOptions {
    pub fn traced() -> Self {
        RunOptions { capture_trace: true, ..RunOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub final_config: Config,
    /// Executed instructions, the final `HALT` included.
    pub machine_steps: u64,
    pub halted: bool,
    pub trace: Option<Vec<TraceRow>>,
    /// Set when rows were dropped because the trace cap was reached.
    pub trace_truncated: bool,
}

/// Runs `program` from the initial configuration for at most `fuel` steps.
pub fn run(program: &Program, fuel: u64, options: RunOptions) -> Result<RunResult, MachineError> {
    run_from(program, Config::initial(), fuel, options)
}

pub fn run_from(program: &Program, start: Config, fuel: u64, options: RunOptions) -> Result<RunResult, MachineError> {
    let mut config = start;
    let mut machine_steps = 0u64;
    let mut trace = options.capture_trace.then(Vec::new);
    let mut trace_truncated = false;

    while machine_steps < fuel && !config.is_halted() {
        let (state, instr) = current_instruction(program, &config)?;
        let after = apply(state, instr, config)?;
        if let Some(rows) = trace.as_mut() {
            if rows.len() < options.trace_cap {
                rows.push(TraceRow {
                    step: machine_steps,
                    state_before: state,
                    instruction_tag: instruction_tag(&instr, &config),
                    config_before: config,
                    config_after: after,
                });
            } else {
                trace_truncated = true;
            }
        }
        config = after;
        machine_steps += 1;
    }

    Ok(RunResult { final_config: config, machine_steps, halted: config.is_halted(), trace, trace_truncated })
}
