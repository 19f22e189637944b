use thiserror::Error;

use super::counters::{McInstr, MultiCounterMachine};
use crate::machine::{Config, Counter, Instruction, Program, StateId};

/// Prime assigned to each counter slot.
pub const PRIMES: [u64; 4] = [2, 3, 5, 7];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PrimeError {
    #[error("{0} counters do not fit the prime encoding (at most 4)")]
    TooManyCounters(usize),
    #[error("A = 0 is not a product of prime powers")]
    Zero,
    #[error("A = {value} leaves residue {residue} after dividing out the first {k} primes")]
    Residue { value: i64, residue: i64, k: usize },
}

/// A compiled counter machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeEncoding {
    pub program: Program,
    /// Two-counter state at which each counter instruction starts.
    pub entries: Vec<StateId>,
    /// Gadget each state belongs to: the counter instruction it implements,
    /// or an id past the instruction count for the bootstrap. Consecutive
    /// states with different values mark a gadget boundary.
    pub gadgets: Vec<usize>,
    pub counters: usize,
}

/// Counters `c1..ck` live in `A = 2^c1 · 3^c2 · 5^c3 · 7^c4`; `B` is
/// scratch and is 0 whenever a gadget starts or ends.
///
/// - State 0 is `INC A` (the empty product is 1, and machines start at
///   `A = 0`), followed by one multiply gadget per unit of initial counter
///   value.
/// - `Inc(ci)` multiplies `A` by `p_i`.
/// - `JzDec(ci)` divides `A` by `p_i` into `B`; on remainder 0 it moves the
///   quotient back and takes the positive branch, otherwise it rebuilds
///   `A` from quotient and remainder and takes the zero branch.
///
/// Both gadgets take `O(p·A)` steps, so the encoding is exponentially
/// slower than the source machine.
pub fn k_counters_to_two(mcm: &MultiCounterMachine) -> Result<PrimeEncoding, PrimeError> {
    let k = mcm.counters();
    if k > PRIMES.len() {
        return Err(PrimeError::TooManyCounters(k));
    }
    let n = mcm.instructions().len();
    // Slot 0 is the bootstrap INC; slot i + 1 is instruction i's entry.
    let owners = std::iter::once(n).chain(0..n).collect();
    let mut code = Builder { slots: vec![None; n + 1], owners, gadget: n };
    let entry = |i: usize| i + 1;

    // Bootstrap.
    let mut start = entry(0);
    for (i, &value) in mcm.initial().iter().enumerate().rev() {
        for _ in 0..value {
            code.gadget += 1;
            let at = code.alloc();
            code.multiply(at, PRIMES[i] as usize, start);
            start = at;
        }
    }
    code.set(0, Instruction::Inc { counter: Counter::A, next: start });

    for (i, instr) in mcm.instructions().iter().enumerate() {
        code.gadget = i;
        match *instr {
            McInstr::Halt => code.set(entry(i), Instruction::Halt),
            McInstr::Inc { counter, next } => code.multiply(entry(i), PRIMES[counter] as usize, entry(next)),
            McInstr::JzDec { counter, if_zero, if_pos } => {
                code.divide(entry(i), PRIMES[counter] as usize, entry(if_zero), entry(if_pos))
            }
        }
    }

    let (instructions, gadgets) = code.finish();
    let program = Program::new(instructions).expect("gadgets reference allocated states");
    Ok(PrimeEncoding { program, entries: (0..n).map(entry).collect(), gadgets, counters: k })
}

/// `A` for the counter vector, or `None` if it exceeds 64 bits.
pub fn encode_counters(counters: &[u64]) -> Option<i64> {
    counters
        .iter()
        .zip(PRIMES)
        .try_fold(1i64, |acc, (&c, p)| acc.checked_mul((p as i64).checked_pow(u32::try_from(c).ok()?)?))
}

/// Exponents of the first `k` primes in `config.a`.
pub fn decode_counters(config: &Config, k: usize) -> Result<Vec<u64>, PrimeError> {
    if k > PRIMES.len() {
        return Err(PrimeError::TooManyCounters(k));
    }
    if config.a <= 0 {
        return Err(PrimeError::Zero);
    }
    let mut rest = config.a;
    let counters = PRIMES[..k]
        .iter()
        .map(|&p| {
            let p = p as i64;
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            e
        })
        .collect();
    if rest != 1 {
        return Err(PrimeError::Residue { value: config.a, residue: rest, k });
    }
    Ok(counters)
}

/// New slots are tagged with the current gadget.
struct Builder {
    slots: Vec<Option<Instruction>>,
    owners: Vec<usize>,
    gadget: usize,
}

impl Builder {
    fn alloc(&mut self) -> usize {
        self.slots.push(None);
        self.owners.push(self.gadget);
        self.slots.len() - 1
    }

    fn set(&mut self, at: usize, instr: Instruction) {
        self.slots[at] = Some(instr);
    }

    fn incs(&mut self, counter: Counter, n: usize, next: usize) -> usize {
        (0..n).fold(next, |next, _| {
            let at = self.alloc();
            self.set(at, Instruction::Inc { counter, next });
            at
        })
    }

    /// Moves `B` into `A`, adding `times` to `A` per unit, then goes to
    /// `exit`.
    fn drain_b(&mut self, times: usize, exit: usize) -> usize {
        let at = self.alloc();
        let body = self.incs(Counter::A, times, at);
        self.set(at, Instruction::JzDec { counter: Counter::B, if_zero: exit, if_pos: body });
        at
    }

    /// `A *= p` starting at `at`.
    fn multiply(&mut self, at: usize, p: usize, exit: usize) {
        let back = self.drain_b(1, exit);
        let body = self.incs(Counter::B, p, at);
        self.set(at, Instruction::JzDec { counter: Counter::A, if_zero: back, if_pos: body });
    }

    /// Divisibility test by `p` starting at `at`.
    fn divide(&mut self, at: usize, p: usize, if_zero: usize, if_pos: usize) {
        // d_k: k units of the current group of p consumed.
        let digits: Vec<usize> = std::iter::once(at).chain((1..p).map(|_| self.alloc())).collect();
        let inc_b = self.alloc();
        self.set(inc_b, Instruction::Inc { counter: Counter::B, next: at });
        for (k, &d) in digits.iter().enumerate() {
            let on_empty = if k == 0 {
                self.drain_b(1, if_pos)
            } else {
                let add = self.incs(Counter::A, k, if_zero);
                self.drain_b(p, add)
            };
            let next = digits.get(k + 1).copied().unwrap_or(inc_b);
            self.set(d, Instruction::JzDec { counter: Counter::A, if_zero: on_empty, if_pos: next });
        }
    }

    fn finish(self) -> (Vec<Instruction>, Vec<usize>) {
        (self.slots.into_iter().map(|s| s.expect("every slot is filled")).collect(), self.owners)
    }
}
