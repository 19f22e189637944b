use thiserror::Error;

use super::two_stack::{Stack, StackOp, TwoStackMachine};

/// Counter slots used by [`two_stack_to_counters`].
pub const LEFT: usize = 0;
pub const RIGHT: usize = 1;
pub const SCRATCH: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McInstr {
    Inc { counter: usize, next: usize },
    JzDec { counter: usize, if_zero: usize, if_pos: usize },
    Halt,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum McmError {
    #[error("machine has no instructions")]
    Empty,
    #[error("instruction {state} uses counter {counter}, but there are {counters}")]
    UnknownCounter { state: usize, counter: usize, counters: usize },
    #[error("instruction {state} jumps to {target}, past the end ({len} instructions)")]
    DanglingReference { state: usize, target: usize, len: usize },
    #[error("{given} initial values for {counters} counters")]
    InitialArity { given: usize, counters: usize },
    #[error("counter {counter} overflowed at instruction {state}")]
    Overflow { state: usize, counter: usize },
}

/// `k` counters, INC/JZDEC/HALT over counter indices, starting at
/// instruction 0 with `initial` counter values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiCounterMachine {
    counters: usize,
    instructions: Vec<McInstr>,
    initial: Vec<u64>,
}

impl MultiCounterMachine {
    pub fn new(counters: usize, instructions: Vec<McInstr>, initial: Vec<u64>) -> Result<Self, McmError> {
        if instructions.is_empty() {
            return Err(McmError::Empty);
        }
        if initial.len() != counters {
            return Err(McmError::InitialArity { given: initial.len(), counters });
        }
        let len = instructions.len();
        for (state, instr) in instructions.iter().enumerate() {
            let (counter, targets) = match *instr {
                McInstr::Inc { counter, next } => (counter, vec![next]),
                McInstr::JzDec { counter, if_zero, if_pos } => (counter, vec![if_zero, if_pos]),
                McInstr::Halt => continue,
            };
            if counter >= counters {
                return Err(McmError::UnknownCounter { state, counter, counters });
            }
            if let Some(&target) = targets.iter().find(|&&t| t >= len) {
                return Err(McmError::DanglingReference { state, target, len });
            }
        }
        Ok(MultiCounterMachine { counters, instructions, initial })
    }

    pub fn counters(&self) -> usize {
        self.counters
    }

    pub fn instructions(&self) -> &[McInstr] {
        &self.instructions
    }

    pub fn initial(&self) -> &[u64] {
        &self.initial
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McmRun {
    pub halted: bool,
    /// Instructions executed, `Halt` included.
    pub steps: u64,
    pub state: usize,
    pub counters: Vec<u64>,
}

pub fn mcm_run(mcm: &MultiCounterMachine, fuel: u64) -> Result<McmRun, McmError> {
    mcm_run_observed(mcm, fuel, |_, _| {})
}

/// As [`mcm_run`], calling `observe(state, counters)` before every
/// executed instruction.
pub fn mcm_run_observed(
    mcm: &MultiCounterMachine,
    fuel: u64,
    mut observe: impl FnMut(usize, &[u64]),
) -> Result<McmRun, McmError> {
    let mut counters = mcm.initial.clone();
    let mut state = 0;
    let mut steps = 0;
    while steps < fuel {
        observe(state, &counters);
        steps += 1;
        state = match mcm.instructions[state] {
            McInstr::Inc { counter, next } => {
                let c = &mut counters[counter];
                *c = c.checked_add(1).ok_or(McmError::Overflow { state, counter })?;
                next
            }
            McInstr::JzDec { counter, if_zero, if_pos } => {
                if counters[counter] == 0 {
                    if_zero
                } else {
                    counters[counter] -= 1;
                    if_pos
                }
            }
            McInstr::Halt => return Ok(McmRun { halted: true, steps, state, counters }),
        };
    }
    Ok(McmRun { halted: false, steps, state, counters })
}

/// Stack contents (bottom first) as a base-`base` numeral whose least
/// significant digit is the top; symbol `s` is digit `s + 1`, so the empty
/// stack is 0. `None` on overflow.
pub fn encode_stack(stack: &[usize], base: u64) -> Option<u64> {
    stack.iter().try_fold(0u64, |n, &s| n.checked_mul(base)?.checked_add(s as u64 + 1))
}

/// Inverse of [`encode_stack`]; `None` if a digit is 0.
pub fn decode_stack(mut value: u64, base: u64) -> Option<Vec<usize>> {
    let mut top_first = Vec::new();
    while value > 0 {
        let digit = value % base;
        if digit == 0 {
            return None;
        }
        top_first.push(digit as usize - 1);
        value /= base;
    }
    top_first.reverse();
    Some(top_first)
}

/// A compiled two-stack machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StackEncoding {
    pub machine: MultiCounterMachine,
    /// Counter instruction at which each stack op starts.
    pub entries: Vec<usize>,
    /// Stack op each counter instruction belongs to. Consecutive states
    /// with different values mark a gadget boundary.
    pub gadgets: Vec<usize>,
    pub base: u64,
}

/// Three counters: the left stack, the right stack, and a scratch counter.
///
/// With `b = |alphabet| + 1`, a push of digit `d` on a stack holding `c`
/// moves `c` into scratch (`2c + 1` steps), multiplies it back
/// (`(b + 1)c + 1`) and adds `d` (`d`); at most `(b + 3)c + b + 1` steps.
/// A pop divides by `b` into scratch (at most `c + c/b + b` steps) and
/// moves the quotient back (`2c/b + 1`). Every gadget leaves scratch at 0.
/// So a stack op on a stack with numeral `c` takes at most `(b + 3)c + 2b + 2`
/// counter steps, and `n` stack ops with numerals bounded by `c_max` take
/// at most `n((b + 3)c_max + 2b + 2) + 1` steps, `Halt` included.
pub fn two_stack_to_counters(tsm: &TwoStackMachine) -> StackEncoding {
    let base = tsm.alphabet_size as u64 + 1;
    let b = base as usize;
    let mut code = Builder::with_entries(tsm.ops.len());
    let stack_counter = |s: Stack| match s {
        Stack::Left => LEFT,
        Stack::Right => RIGHT,
    };

    for (i, op) in tsm.ops.iter().enumerate() {
        code.gadget = i;
        match op {
            StackOp::Halt { .. } => code.set(i, McInstr::Halt),
            StackOp::Push { stack, symbol, next } => {
                let c = stack_counter(*stack);
                // Drain c into scratch.
                let drain = i;
                let refill = code.alloc();
                let inc_t = code.alloc();
                code.set(drain, McInstr::JzDec { counter: c, if_zero: refill, if_pos: inc_t });
                code.set(inc_t, McInstr::Inc { counter: SCRATCH, next: drain });
                // c = scratch * b, then c += digit.
                let mul = code.chain_incs(c, b, refill);
                let add = code.chain_incs(c, symbol + 1, *next);
                code.set(refill, McInstr::JzDec { counter: SCRATCH, if_zero: add, if_pos: mul });
            }
            StackOp::Pop { stack, on_empty, on_symbol } => {
                let c = stack_counter(*stack);
                // d_k: k units of the current group of b consumed.
                let digits: Vec<usize> = std::iter::once(i).chain((1..b).map(|_| code.alloc())).collect();
                let inc_t = code.alloc();
                for k in 0..b {
                    let exit = if k == 0 { *on_empty } else { on_symbol[k - 1] };
                    let back = code.alloc();
                    let refill = code.alloc();
                    code.set(back, McInstr::JzDec { counter: SCRATCH, if_zero: exit, if_pos: refill });
                    code.set(refill, McInstr::Inc { counter: c, next: back });
                    let if_pos = if k + 1 < b { digits[k + 1] } else { inc_t };
                    code.set(digits[k], McInstr::JzDec { counter: c, if_zero: back, if_pos });
                }
                code.set(inc_t, McInstr::Inc { counter: SCRATCH, next: digits[0] });
            }
        }
    }

    let initial = vec![
        encode_stack(&tsm.left, base).expect("initial stack fits"),
        encode_stack(&tsm.right, base).expect("initial stack fits"),
        0,
    ];
    let (instructions, gadgets) = code.finish();
    StackEncoding {
        machine: MultiCounterMachine::new(3, instructions, initial).expect("gadgets are well-formed"),
        entries: (0..tsm.ops.len()).collect(),
        gadgets,
        base,
    }
}

/// Instruction list with placeholder slots filled in afterwards. New slots
/// are tagged with the current gadget.
struct Builder {
    slots: Vec<Option<McInstr>>,
    owners: Vec<usize>,
    gadget: usize,
}

impl Builder {
    fn with_entries(n: usize) -> Self {
        Builder { slots: vec![None; n], owners: (0..n).collect(), gadget: 0 }
    }

    fn alloc(&mut self) -> usize {
        self.slots.push(None);
        self.owners.push(self.gadget);
        self.slots.len() - 1
    }

    fn set(&mut self, at: usize, instr: McInstr) {
        self.slots[at] = Some(instr);
    }

    /// `n` increments of `counter` ending at `next`; returns the first
    /// (or `next` itself when `n == 0`).
    fn chain_incs(&mut self, counter: usize, n: usize, next: usize) -> usize {
        (0..n).fold(next, |next, _| {
            let at = self.alloc();
            self.set(at, McInstr::Inc { counter, next });
            at
        })
    }

    fn finish(self) -> (Vec<McInstr>, Vec<usize>) {
        (self.slots.into_iter().map(|s| s.expect("every slot is filled")).collect(), self.owners)
    }
}
