//! The line-oriented `.2cm` program syntax.
//!
//! ```text
//! # comment
//! state 0: INC A -> 1
//! state 1: JZDEC B ? 2 : 3
//! state 2: HALT
//! ```
//!
//! States may appear in any order but must cover `0..n` exactly once.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::machine::{Counter, Instruction, Program, StateId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{line}:{column}: unknown counter `{name}` (expected A or B)")]
    UnknownCounter { line: usize, column: usize, name: String },
    #[error("{line}: state {state} is defined twice (first on line {first_line})")]
    DuplicateState { line: usize, state: StateId, first_line: usize },
    #[error("state {state} is missing; states must be numbered 0..{len} without gaps")]
    MissingState { state: StateId, len: usize },
    #[error("{line}: state {state} jumps to undefined state {target}")]
    DanglingReference { line: usize, state: StateId, target: StateId },
    #[error("program defines no states")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok<'a> {
    Word(&'a str),
    Number(u64),
    Colon,
    Question,
    Arrow,
}

struct Line<'a> {
    number: usize,
    toks: Vec<(usize, Tok<'a>)>,
    end_column: usize,
    pos: usize,
}

impl<'a> Line<'a> {
    fn lex(number: usize, text: &'a str) -> Result<Self, DslError> {
        let code = match text.find('#') {
            Some(i) => &text[..i],
            None => text,
        };
        let mut toks = Vec::new();
        let bytes = code.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let column = code[..i].chars().count() + 1;
            let c = bytes[i];
            match c {
                b' ' | b'\t' | b'\r' => i += 1,
                b':' => {
                    toks.push((column, Tok::Colon));
                    i += 1;
                }
                b'?' => {
                    toks.push((column, Tok::Question));
                    i += 1;
                }
                b'-' if bytes.get(i + 1) == Some(&b'>') => {
                    toks.push((column, Tok::Arrow));
                    i += 2;
                }
                b'0'..=b'9' => {
                    let start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    let value = code[start..i].parse().map_err(|_| DslError::Syntax {
                        line: number,
                        column,
                        message: format!("state number `{}` is too large", &code[start..i]),
                    })?;
                    toks.push((column, Tok::Number(value)));
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let start = i;
                    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                        i += 1;
                    }
                    toks.push((column, Tok::Word(&code[start..i])));
                }
                _ => {
                    let ch = code[i..].chars().next().unwrap_or('?');
                    return Err(DslError::Syntax {
                        line: number,
                        column,
                        message: format!("unexpected character `{ch}`"),
                    });
                }
            }
        }
        Ok(Line { number, toks, end_column: code.trim_end().chars().count() + 1, pos: 0 })
    }

    fn is_blank(&self) -> bool {
        self.toks.is_empty()
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_column, |(column, _)| *column)
    }

    fn error(&self, message: impl Into<String>) -> DslError {
        DslError::Syntax { line: self.number, column: self.column(), message: message.into() }
    }

    fn expect(&mut self, want: Tok<'static>, what: &str) -> Result<(), DslError> {
        match self.toks.get(self.pos) {
            Some((_, tok)) if *tok == want => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn keyword(&mut self, word: &str) -> Result<(), DslError> {
        match self.toks.get(self.pos) {
            Some((_, Tok::Word(w))) if *w == word => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(format!("expected `{word}`"))),
        }
    }

    fn state(&mut self) -> Result<StateId, DslError> {
        let column = self.column();
        match self.toks.get(self.pos) {
            Some((_, Tok::Number(n))) => {
                let n = *n;
                self.pos += 1;
                usize::try_from(n).map_err(|_| DslError::Syntax {
                    line: self.number,
                    column,
                    message: "state number out of range".into(),
                })
            }
            _ => Err(self.error("expected a state number")),
        }
    }

    fn counter(&mut self) -> Result<Counter, DslError> {
        let column = self.column();
        match self.toks.get(self.pos) {
            Some((_, Tok::Word(name))) => {
                let name = *name;
                self.pos += 1;
                Counter::from_name(name).ok_or_else(|| DslError::UnknownCounter {
                    line: self.number,
                    column,
                    name: name.to_string(),
                })
            }
            _ => Err(self.error("expected a counter name")),
        }
    }

    fn finish(&self) -> Result<(), DslError> {
        if self.pos < self.toks.len() {
            Err(self.error("unexpected trailing input"))
        } else {
            Ok(())
        }
    }

    fn parse(&mut self) -> Result<(StateId, Instruction), DslError> {
        self.keyword("state")?;
        let state = self.state()?;
        self.expect(Tok::Colon, "`:` after the state number")?;
        let instr = match self.toks.get(self.pos) {
            Some((_, Tok::Word("INC"))) => {
                self.pos += 1;
                let counter = self.counter()?;
                self.expect(Tok::Arrow, "`->`")?;
                let next = self.state()?;
                Instruction::Inc { counter, next }
            }
            Some((_, Tok::Word("JZDEC"))) => {
                self.pos += 1;
                let counter = self.counter()?;
                self.expect(Tok::Question, "`?`")?;
                let if_zero = self.state()?;
                self.expect(Tok::Colon, "`:`")?;
                let if_pos = self.state()?;
                Instruction::JzDec { counter, if_zero, if_pos }
            }
            Some((_, Tok::Word("HALT"))) => {
                self.pos += 1;
                Instruction::Halt
            }
            _ => return Err(self.error("expected INC, JZDEC or HALT")),
        };
        self.finish()?;
        Ok((state, instr))
    }
}

/// Parses `.2cm` source text into a validated program.
pub fn parse_dsl(text: &str) -> Result<Program, DslError> {
    let mut defined: BTreeMap<StateId, (usize, Instruction)> = BTreeMap::new();
    for (index, raw) in text.lines().enumerate() {
        let mut line = Line::lex(index + 1, raw)?;
        if line.is_blank() {
            continue;
        }
        let (state, instr) = line.parse()?;
        if let Some((first_line, _)) = defined.get(&state) {
            return Err(DslError::DuplicateState { line: line.number, state, first_line: *first_line });
        }
        defined.insert(state, (line.number, instr));
    }

    let len = defined.len();
    if len == 0 {
        return Err(DslError::Empty);
    }
    // Keys are sorted, so the first key that differs from its rank is a gap.
    if let Some(state) = defined.keys().enumerate().find_map(|(i, &s)| (i != s).then_some(i)) {
        return Err(DslError::MissingState { state, len });
    }
    for (&state, (line, instr)) in &defined {
        if let Some(target) = instr.targets().find(|&t| t >= len) {
            return Err(DslError::DanglingReference { line: *line, state, target });
        }
    }

    let instructions = defined.into_values().map(|(_, instr)| instr).collect();
    Ok(Program::new(instructions).expect("states and references were checked above"))
}

/// Formats a program in `.2cm` syntax, one state per line.
pub fn render_dsl(program: &Program) -> String {
    let mut out = String::new();
    for (state, instr) in program.instructions().iter().enumerate() {
        let _ = match *instr {
            Instruction::Inc { counter, next } => writeln!(out, "state {state}: INC {counter} -> {next}"),
            Instruction::JzDec { counter, if_zero, if_pos } => {
                writeln!(out, "state {state}: JZDEC {counter} ? {if_zero} : {if_pos}")
            }
            Instruction::Halt => writeln!(out, "state {state}: HALT"),
        };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{fig1, FIG1_DSL};

    #[test]
    fn parses_fig1() {
        let text = "state 0: INC A -> 1\nstate 1: JZDEC B ? 2 : 3\nstate 2: INC B -> 0\nstate 3: HALT";
        assert_eq!(parse_dsl(text).unwrap(), fig1());
        assert_eq!(parse_dsl(FIG1_DSL).unwrap(), fig1());
    }

    #[test]
    fn minimal_program() {
        let p = parse_dsl("state 0: HALT").unwrap();
        assert_eq!(p.instructions(), &[Instruction::Halt]);
    }

    #[test]
    fn unknown_counter_is_positioned() {
        let err = parse_dsl("state 0: INC C -> 0").unwrap_err();
        assert_eq!(err, DslError::UnknownCounter { line: 1, column: 14, name: "C".into() });
    }

    #[test]
    fn comments_blank_lines_and_order() {
        let text = "# demo\n\nstate 1: HALT   # stop\nstate 0: JZDEC A ? 1 : 0\n";
        let p = parse_dsl(text).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.get(1).unwrap().is_halt());
    }

    #[test]
    fn duplicate_state() {
        let err = parse_dsl("state 0: HALT\nstate 0: HALT").unwrap_err();
        assert_eq!(err, DslError::DuplicateState { line: 2, state: 0, first_line: 1 });
    }

    #[test]
    fn sparse_numbering_is_rejected() {
        let err = parse_dsl("state 0: INC A -> 2\nstate 2: HALT").unwrap_err();
        assert_eq!(err, DslError::MissingState { state: 1, len: 2 });
    }

    #[test]
    fn dangling_target() {
        let err = parse_dsl("state 0: INC A -> 7").unwrap_err();
        assert_eq!(err, DslError::DanglingReference { line: 1, state: 0, target: 7 });
    }

    #[test]
    fn syntax_errors_carry_columns() {
        match parse_dsl("state 0: INC A 1").unwrap_err() {
            DslError::Syntax { line, column, .. } => assert_eq!((line, column), (1, 16)),
            other => panic!("unexpected {other:?}"),
        }
        match parse_dsl("state 0: HALT extra").unwrap_err() {
            DslError::Syntax { column, .. } => assert_eq!(column, 15),
            other => panic!("unexpected {other:?}"),
        }
        match parse_dsl("state 0: INC A -> ").unwrap_err() {
            DslError::Syntax { message, .. } => assert!(message.contains("state number")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_dsl("state 0; HALT"), Err(DslError::Syntax { .. })));
        assert_eq!(parse_dsl("# nothing\n"), Err(DslError::Empty));
    }

    #[test]
    fn render_round_trips_fig1() {
        assert_eq!(render_dsl(&fig1()), FIG1_DSL);
    }
}
