//! Turing machine → two-stack machine → three-counter machine → two-counter
//! program, with an interpreter for every stage.
//!
//! - The tape is split at the head into two stacks; the head cell is the top
//!   of the right stack. Reading past either end of the written tape yields
//!   blanks, so the tape is two-way infinite.
//! - Each stack becomes a base-`(|alphabet| + 1)` numeral in its own
//!   counter, with a third counter as scratch for multiply/divide loops.
//! - The three counters are packed into `A = 2^L · 3^R · 5^S`, with `B` as
//!   scratch. The product starts at 1, so the program opens with `INC A`.
//!
//! Each stage's result decodes back to a tape, which is how the stages are
//! compared in [`reduce_tm`].

mod counters;
mod pipeline;
mod prime;
mod turing;
mod two_stack;

pub use counters::{
    decode_stack, encode_stack, mcm_run, mcm_run_observed, two_stack_to_counters, McInstr, McmError, McmRun,
    MultiCounterMachine, StackEncoding, LEFT, RIGHT, SCRATCH,
};
pub use pipeline::{reduce_tm, PipelineError, PipelineReport, Stage, StageFuel, StageReport, Verdict};
pub use prime::{decode_counters, encode_counters, k_counters_to_two, PrimeEncoding, PrimeError, PRIMES};
pub use turing::{tm_run, trim_blanks, Move, TmError, TmFixture, TmRun, TuringMachine};
pub use two_stack::{stacks_to_tape, tm_to_two_stack, tsm_run, Stack, StackOp, TsmRun, TwoStackMachine};
