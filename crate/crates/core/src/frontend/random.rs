use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::machine::{Counter, Instruction, Program};

/// Generates a valid program with between 1 and `max_states` states and at
/// least one `HALT`. The result depends only on `seed` and `max_states`.
pub fn random_program(seed: u64, max_states: usize) -> Program {
    assert!(max_states >= 1, "max_states must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = rng.gen_range(1..=max_states);
    let halt_at = rng.gen_range(0..len);

    let instructions = (0..len)
        .map(|state| {
            if state == halt_at {
                return Instruction::Halt;
            }
            let counter = if rng.gen_bool(0.5) { Counter::A } else { Counter::B };
            match rng.gen_range(0..10) {
                0 => Instruction::Halt,
                1..=5 => Instruction::Inc { counter, next: rng.gen_range(0..len) },
                _ => Instruction::JzDec { counter, if_zero: rng.gen_range(0..len), if_pos: rng.gen_range(0..len) },
            }
        })
        .collect();
    Program::new(instructions).expect("generated targets are in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_in_seed() {
        assert_eq!(random_program(0, 4), random_program(0, 4));
    }

    #[test]
    fn corpus_is_valid() {
        for seed in 1..=100 {
            let p = random_program(seed, 8);
            assert!(p.len() <= 8);
            assert!(p.has_halt());
            assert_eq!(Program::new(p.instructions().to_vec()).as_ref(), Ok(&p));
        }
    }

    #[test]
    fn single_state_is_halt() {
        assert_eq!(random_program(5, 1).instructions(), &[Instruction::Halt]);
    }
}
