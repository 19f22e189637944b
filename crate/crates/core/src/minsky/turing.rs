use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    L,
    R,
}

/// The JSON shape of a machine fixture. Transitions are
/// `[state, read, next, write, move]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TmFixture {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub blank: String,
    pub transitions: Vec<(String, String, String, String, Move)>,
    pub initial: String,
    pub halting: Vec<String>,
    #[serde(default)]
    pub input: Vec<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TmError {
    #[error("invalid fixture JSON: {0}")]
    Json(String),
    #[error("machine has no states")]
    NoStates,
    #[error("state `{0}` declared twice")]
    DuplicateState(String),
    #[error("symbol `{0}` declared twice")]
    DuplicateSymbol(String),
    #[error("blank symbol `{0}` is not in the alphabet")]
    BlankNotInAlphabet(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("two transitions for state `{state}` reading `{symbol}`")]
    DuplicateTransition { state: String, symbol: String },
    #[error("halting state `{0}` has an outgoing transition")]
    TransitionFromHalting(String),
    #[error("no transition for state `{state}` reading `{symbol}`")]
    MissingTransition { state: String, symbol: String },
}

/// A deterministic single-tape machine over a two-way infinite tape.
/// States and symbols are indices into `states` and `alphabet`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuringMachine {
    states: Vec<String>,
    alphabet: Vec<String>,
    blank: usize,
    delta: HashMap<(usize, usize), (usize, usize, Move)>,
    initial: usize,
    halting: Vec<bool>,
    input: Vec<usize>,
}

impl TuringMachine {
    pub fn from_fixture(fixture: &TmFixture) -> Result<Self, TmError> {
        if fixture.states.is_empty() {
            return Err(TmError::NoStates);
        }
        let states = index_names(&fixture.states, TmError::DuplicateState)?;
        let symbols = index_names(&fixture.alphabet, TmError::DuplicateSymbol)?;
        let state = |name: &str| states.get(name).copied().ok_or_else(|| TmError::UnknownState(name.into()));
        let symbol = |name: &str| symbols.get(name).copied().ok_or_else(|| TmError::UnknownSymbol(name.into()));

        let blank = symbols
            .get(fixture.blank.as_str())
            .copied()
            .ok_or_else(|| TmError::BlankNotInAlphabet(fixture.blank.clone()))?;
        let initial = state(&fixture.initial)?;
        let mut halting = vec![false; fixture.states.len()];
        for name in &fixture.halting {
            halting[state(name)?] = true;
        }
        let input = fixture.input.iter().map(|s| symbol(s)).collect::<Result<_, _>>()?;

        let mut delta = HashMap::new();
        for (from, read, to, write, mv) in &fixture.transitions {
            let key = (state(from)?, symbol(read)?);
            if halting[key.0] {
                return Err(TmError::TransitionFromHalting(from.clone()));
            }
            if delta.insert(key, (state(to)?, symbol(write)?, *mv)).is_some() {
                return Err(TmError::DuplicateTransition { state: from.clone(), symbol: read.clone() });
            }
        }
        for (q, name) in fixture.states.iter().enumerate() {
            if halting[q] {
                continue;
            }
            for (s, sym) in fixture.alphabet.iter().enumerate() {
                if !delta.contains_key(&(q, s)) {
                    return Err(TmError::MissingTransition { state: name.clone(), symbol: sym.clone() });
                }
            }
        }

        Ok(TuringMachine {
            states: fixture.states.clone(),
            alphabet: fixture.alphabet.clone(),
            blank,
            delta,
            initial,
            halting,
            input,
        })
    }

    pub fn from_json(json: &str) -> Result<Self, TmError> {
        let fixture: TmFixture = serde_json::from_str(json).map_err(|e| TmError::Json(e.to_string()))?;
        Self::from_fixture(&fixture)
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn blank(&self) -> usize {
        self.blank
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn input(&self) -> &[usize] {
        &self.input
    }

    pub fn is_halting(&self, state: usize) -> bool {
        self.halting[state]
    }

    /// `(next state, written symbol, move)`; `None` on halting states.
    pub fn transition(&self, state: usize, symbol: usize) -> Option<(usize, usize, Move)> {
        self.delta.get(&(state, symbol)).copied()
    }

    /// Concatenated symbol names.
    pub fn render(&self, cells: &[usize]) -> String {
        cells.iter().map(|&c| self.alphabet[c].as_str()).collect()
    }
}

fn index_names(names: &[String], dup: fn(String) -> TmError) -> Result<HashMap<&str, usize>, TmError> {
    let mut map = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if map.insert(n.as_str(), i).is_some() {
            return Err(dup(n.clone()));
        }
    }
    Ok(map)
}

/// Strips blank cells from both ends.
pub fn trim_blanks(cells: &[usize], blank: usize) -> &[usize] {
    let start = cells.iter().position(|&c| c != blank).unwrap_or(cells.len());
    let end = cells.iter().rposition(|&c| c != blank).map_or(start, |i| i + 1);
    &cells[start..end]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TmRun {
    pub halted: bool,
    /// Transitions taken.
    pub steps: u64,
    pub state: usize,
    /// Tape contents with surrounding blanks removed.
    pub tape: Vec<usize>,
}

/// Runs from the initial state with the input written at cell 0 and the
/// head on cell 0. Entering a halting state stops the machine; starting in
/// one means zero steps.
pub fn tm_run(tm: &TuringMachine, fuel: u64) -> TmRun {
    let mut tape: BTreeMap<i64, usize> = (0..).zip(tm.input.iter().copied()).collect();
    let mut head = 0i64;
    let mut state = tm.initial;
    let mut steps = 0;
    while !tm.is_halting(state) && steps < fuel {
        let read = tape.get(&head).copied().unwrap_or(tm.blank);
        let (next, write, mv) = tm.transition(state, read).expect("transitions are total on running states");
        tape.insert(head, write);
        head += match mv {
            Move::L => -1,
            Move::R => 1,
        };
        state = next;
        steps += 1;
    }
    let cells: Vec<usize> = tape.values().copied().collect();
    TmRun { halted: tm.is_halting(state), steps, state, tape: trim_blanks(&cells, tm.blank).to_vec() }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const UNARY: &str = r#"{
        "states": ["scan", "done"],
        "alphabet": ["_", "1"],
        "blank": "_",
        "transitions": [["scan", "1", "scan", "1", "R"], ["scan", "_", "done", "1", "L"]],
        "initial": "scan",
        "halting": ["done"],
        "input": ["1"]
    }"#;

    #[test]
    fn unary_successor_appends_a_mark() {
        let tm = TuringMachine::from_json(UNARY).unwrap();
        let r = tm_run(&tm, 100);
        assert!(r.halted);
        assert_eq!(r.steps, 2);
        assert_eq!(tm.render(&r.tape), "11");
    }

    #[test]
    fn zero_fuel_leaves_input() {
        let tm = TuringMachine::from_json(UNARY).unwrap();
        let r = tm_run(&tm, 0);
        assert!(!r.halted);
        assert_eq!(tm.render(&r.tape), "1");
    }

    #[test]
    fn missing_transition_is_rejected() {
        let json = UNARY.replace(r#", ["scan", "_", "done", "1", "L"]"#, "");
        assert_eq!(
            TuringMachine::from_json(&json),
            Err(TmError::MissingTransition { state: "scan".into(), symbol: "_".into() })
        );
    }

    #[test]
    fn blank_must_be_in_alphabet() {
        let json = UNARY.replace(r#""blank": "_""#, r#""blank": "0""#);
        assert_eq!(TuringMachine::from_json(&json), Err(TmError::BlankNotInAlphabet("0".into())));
    }

    #[test]
    fn trim() {
        assert_eq!(trim_blanks(&[0, 0, 1, 0, 1, 0], 0), &[1, 0, 1]);
        assert!(trim_blanks(&[0, 0], 0).is_empty());
    }
}
