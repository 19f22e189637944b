use std::collections::HashMap;

use super::turing::{trim_blanks, Move, TuringMachine};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stack {
    Left,
    Right,
}

/// One micro-operation. Symbols are alphabet indices; targets are op
/// indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StackOp {
    Push {
        stack: Stack,
        symbol: usize,
        next: usize,
    },
    /// Removes the top symbol and branches on it.
    Pop {
        stack: Stack,
        on_empty: usize,
        on_symbol: Vec<usize>,
    },
    /// Corresponds to the halting source state `tm_state`.
    Halt {
        tm_state: usize,
    },
}

/// Two stacks holding the tape: `left` is everything left of the head with
/// its top nearest the head; `right` is the head cell (on top) and
/// everything to its right. Stacks are stored bottom first. Execution
/// starts at op 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoStackMachine {
    pub alphabet_size: usize,
    pub blank: usize,
    pub ops: Vec<StackOp>,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

/// Each source step becomes at most four micro-ops:
///
/// - state entry pops the right stack (empty reads as blank);
/// - a right move pushes the written symbol on the left stack;
/// - a left move pushes the written symbol on the right stack, pops the
///   left stack (empty reads as blank: the tape grows leftwards) and pushes
///   that symbol on the right stack.
///
/// Halting states become `Halt`, so `n` source steps take at most `4n`
/// micro-ops, `Halt` excluded.
pub fn tm_to_two_stack(tm: &TuringMachine) -> TwoStackMachine {
    let n = tm.states().len();
    let symbols = tm.alphabet().len();
    // Entry op of each state, with the initial state first.
    let order: Vec<usize> = std::iter::once(tm.initial()).chain((0..n).filter(|&q| q != tm.initial())).collect();
    let mut entry = vec![0; n];
    for (i, &q) in order.iter().enumerate() {
        entry[q] = i;
    }

    let mut ops: Vec<StackOp> = vec![StackOp::Halt { tm_state: 0 }; n];
    let mut restore: HashMap<(usize, usize), usize> = HashMap::new();
    let push = |ops: &mut Vec<StackOp>, op: StackOp| {
        ops.push(op);
        ops.len() - 1
    };

    for &q in &order {
        if tm.is_halting(q) {
            ops[entry[q]] = StackOp::Halt { tm_state: q };
            continue;
        }
        let mut handler = Vec::with_capacity(symbols);
        for read in 0..symbols {
            let (next, write, mv) = tm.transition(q, read).expect("total on running states");
            let op = match mv {
                Move::R => push(&mut ops, StackOp::Push { stack: Stack::Left, symbol: write, next: entry[next] }),
                Move::L => {
                    let mut back = |sym: usize, ops: &mut Vec<StackOp>| {
                        *restore.entry((next, sym)).or_insert_with(|| {
                            push(ops, StackOp::Push { stack: Stack::Right, symbol: sym, next: entry[next] })
                        })
                    };
                    let on_empty = back(tm.blank(), &mut ops);
                    let on_symbol = (0..symbols).map(|s| back(s, &mut ops)).collect();
                    let pop = push(&mut ops, StackOp::Pop { stack: Stack::Left, on_empty, on_symbol });
                    push(&mut ops, StackOp::Push { stack: Stack::Right, symbol: write, next: pop })
                }
            };
            handler.push(op);
        }
        ops[entry[q]] = StackOp::Pop { stack: Stack::Right, on_empty: handler[tm.blank()], on_symbol: handler };
    }

    TwoStackMachine {
        alphabet_size: symbols,
        blank: tm.blank(),
        ops,
        left: Vec::new(),
        right: tm.input().iter().rev().copied().collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TsmRun {
    pub halted: bool,
    /// Micro-ops executed, `Halt` excluded.
    pub steps: u64,
    pub op: usize,
    /// Source state of the `Halt` reached, if any.
    pub tm_state: Option<usize>,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl TsmRun {
    /// Left stack bottom to top, then right stack top to bottom, blanks
    /// trimmed.
    pub fn tape(&self, blank: usize) -> Vec<usize> {
        stacks_to_tape(&self.left, &self.right, blank)
    }
}

pub fn stacks_to_tape(left: &[usize], right: &[usize], blank: usize) -> Vec<usize> {
    let cells: Vec<usize> = left.iter().chain(right.iter().rev()).copied().collect();
    trim_blanks(&cells, blank).to_vec()
}

pub fn tsm_run(tsm: &TwoStackMachine, fuel: u64) -> TsmRun {
    let mut left = tsm.left.clone();
    let mut right = tsm.right.clone();
    let mut op = 0;
    let mut steps = 0;
    loop {
        if let StackOp::Halt { tm_state } = tsm.ops[op] {
            return TsmRun { halted: true, steps, op, tm_state: Some(tm_state), left, right };
        }
        if steps == fuel {
            return TsmRun { halted: false, steps, op, tm_state: None, left, right };
        }
        op = match &tsm.ops[op] {
            StackOp::Push { stack, symbol, next } => {
                pick(&mut left, &mut right, *stack).push(*symbol);
                *next
            }
            StackOp::Pop { stack, on_empty, on_symbol } => match pick(&mut left, &mut right, *stack).pop() {
                Some(s) => on_symbol[s],
                None => *on_empty,
            },
            StackOp::Halt { .. } => unreachable!(),
        };
        steps += 1;
    }
}

fn pick<'a>(left: &'a mut Vec<usize>, right: &'a mut Vec<usize>, stack: Stack) -> &'a mut Vec<usize> {
    match stack {
        Stack::Left => left,
        Stack::Right => right,
    }
}
