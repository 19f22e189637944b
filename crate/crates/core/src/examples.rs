//! Bundled example programs.

use crate::machine::{Counter, Instruction, Program};

/// The four-state demonstration program. From `(0, 0, 0)` it halts with
/// `A = 2, B = 0` after six instructions.
///
/// ```text
/// state 0: INC A -> 1
/// state 1: JZDEC B ? 2 : 3
/// state 2: INC B -> 0
/// state 3: HALT
/// ```
pub fn fig1() -> Program {
    Program::new(vec![
        Instruction::Inc { counter: Counter::A, next: 1 },
        Instruction::JzDec { counter: Counter::B, if_zero: 2, if_pos: 3 },
        Instruction::Inc { counter: Counter::B, next: 0 },
        Instruction::Halt,
    ])
    .expect("example program is valid")
}

/// DSL source of [`fig1`].
pub const FIG1_DSL: &str = "\
state 0: INC A -> 1
state 1: JZDEC B ? 2 : 3
state 2: INC B -> 0
state 3: HALT
";
