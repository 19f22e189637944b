//! JSON list-of-maps program encoding.
//!
//! Each entry uses the keys `state`, `op`, `counter` and either `next` or
//! `q_zero` + `q_pos`. `HALT` entries carry `counter: ""` and `next` equal to
//! their own state.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::machine::{Counter, Instruction, Program, ProgramError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstructionMap {
    pub state: i64,
    pub op: String,
    pub counter: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub next: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_zero: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_pos: Option<i64>,
}

pub type ProgramDocument = Vec<InstructionMap>;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed program document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("program document is empty")]
    Empty,
    #[error("entry {position} has state {state}; entries must be listed in state order")]
    StateMismatch { position: usize, state: i64 },
    #[error("entry {position}: unknown op `{op}`")]
    UnknownOp { position: usize, op: String },
    #[error("entry {position}: invalid counter `{counter}` for {op}")]
    InvalidCounter { position: usize, op: String, counter: String },
    #[error("entry {position}: {op} requires `{field}`")]
    MissingField { position: usize, op: String, field: &'static str },
    #[error("entry {position}: `{field}` is not allowed for {op}")]
    UnexpectedField { position: usize, op: String, field: &'static str },
    #[error("entry {position}: HALT must have counter \"\" and next {position}")]
    HaltConvention { position: usize },
    #[error("entry {position}: state reference {target} is out of range")]
    BadReference { position: usize, target: i64 },
    #[error(transparent)]
    Program(#[from] ProgramError),
}

pub fn to_instruction_maps(program: &Program) -> ProgramDocument {
    program
        .instructions()
        .iter()
        .enumerate()
        .map(|(state, instr)| {
            let state = state as i64;
            match *instr {
                Instruction::Inc { counter, next } => InstructionMap {
                    state,
                    op: "INC".into(),
                    counter: counter.name().into(),
                    next: Some(next as i64),
                    q_zero: None,
                    q_pos: None,
                },
                Instruction::JzDec { counter, if_zero, if_pos } => InstructionMap {
                    state,
                    op: "JZDEC".into(),
                    counter: counter.name().into(),
                    next: None,
                    q_zero: Some(if_zero as i64),
                    q_pos: Some(if_pos as i64),
                },
                Instruction::Halt => InstructionMap {
                    state,
                    op: "HALT".into(),
                    counter: String::new(),
                    next: Some(state),
                    q_zero: None,
                    q_pos: None,
                },
            }
        })
        .collect()
}

pub fn from_instruction_maps(doc: &[InstructionMap]) -> Result<Program, DocumentError> {
    if doc.is_empty() {
        return Err(DocumentError::Empty);
    }
    let len = doc.len() as i64;
    let target = |position: usize, value: i64| {
        if (0..len).contains(&value) {
            Ok(value as usize)
        } else {
            Err(DocumentError::BadReference { position, target: value })
        }
    };

    let mut instructions = Vec::with_capacity(doc.len());
    for (position, entry) in doc.iter().enumerate() {
        if entry.state != position as i64 {
            return Err(DocumentError::StateMismatch { position, state: entry.state });
        }
        let op = entry.op.as_str();
        let missing = |field| DocumentError::MissingField { position, op: op.into(), field };
        let unexpected = |field| DocumentError::UnexpectedField { position, op: op.into(), field };
        let counter = || {
            Counter::from_name(&entry.counter).ok_or_else(|| DocumentError::InvalidCounter {
                position,
                op: op.into(),
                counter: entry.counter.clone(),
            })
        };

        let instr = match op {
            "INC" => {
                if entry.q_zero.is_some() {
                    return Err(unexpected("q_zero"));
                }
                if entry.q_pos.is_some() {
                    return Err(unexpected("q_pos"));
                }
                Instruction::Inc {
                    counter: counter()?,
                    next: target(position, entry.next.ok_or_else(|| missing("next"))?)?,
                }
            }
            "JZDEC" => {
                if entry.next.is_some() {
                    return Err(unexpected("next"));
                }
                Instruction::JzDec {
                    counter: counter()?,
                    if_zero: target(position, entry.q_zero.ok_or_else(|| missing("q_zero"))?)?,
                    if_pos: target(position, entry.q_pos.ok_or_else(|| missing("q_pos"))?)?,
                }
            }
            "HALT" => {
                if entry.q_zero.is_some() {
                    return Err(unexpected("q_zero"));
                }
                if entry.q_pos.is_some() {
                    return Err(unexpected("q_pos"));
                }
                if !entry.counter.is_empty() || entry.next != Some(entry.state) {
                    return Err(DocumentError::HaltConvention { position });
                }
                Instruction::Halt
            }
            _ => return Err(DocumentError::UnknownOp { position, op: entry.op.clone() }),
        };
        instructions.push(instr);
    }
    Ok(Program::new(instructions)?)
}

/// Parses a JSON program document.
pub fn parse_document(json: &str) -> Result<Program, DocumentError> {
    let doc: ProgramDocument = serde_json::from_str(json)?;
    from_instruction_maps(&doc)
}

/// Renders a program as pretty-printed JSON, one map per line.
pub fn render_document(program: &Program) -> String {
    let doc = to_instruction_maps(program);
    let mut out = String::from("[\n");
    for (i, entry) in doc.iter().enumerate() {
        out.push_str("  ");
        out.push_str(&serde_json::to_string(entry).expect("maps always serialize"));
        if i + 1 < doc.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("]\n");
    out
}
