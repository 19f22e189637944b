use super::{program_literal, Approach, CypherQuery};
use crate::machine::Program;

const FOLD: &str = "\
LET result = reduce(
  machine = {state: 0, A: 0, B: 0},
  step IN range(1, max_steps) |
  CASE WHEN machine.state = -1
    THEN machine
  ELSE
    head([instr IN [program[machine.state]] |
      CASE instr.op
        WHEN 'INC' THEN
          CASE instr.counter
            WHEN 'A' THEN {state: instr.next, A: machine.A + 1, B: machine.B}
            WHEN 'B' THEN {state: instr.next, A: machine.A, B: machine.B + 1}
          END
        WHEN 'JZDEC' THEN
          CASE instr.counter
            WHEN 'A' THEN
              CASE WHEN machine.A = 0
                THEN {state: instr.q_zero, A: 0, B: machine.B}
                ELSE {state: instr.q_pos, A: machine.A - 1, B: machine.B}
              END
            WHEN 'B' THEN
              CASE WHEN machine.B = 0
                THEN {state: instr.q_zero, A: machine.A, B: 0}
                ELSE {state: instr.q_pos, A: machine.A, B: machine.B - 1}
              END
          END
        WHEN 'HALT' THEN {state: -1, A: machine.A, B: machine.B}
      END
    ])
  END
)
RETURN result
";

/// A single `RETURN` whose `reduce()` performs one machine step per
/// iteration, `max_steps` iterations in total. Once the machine halts the
/// fold returns its accumulator unchanged.
pub fn gen_reduce_query(program: &Program, max_steps: u64) -> CypherQuery {
    assert!(max_steps >= 1, "max_steps must be at least 1");
    let body = format!("LET program = {}\nLET max_steps = {max_steps}\n\n{FOLD}", program_literal(program, 0));
    CypherQuery::with_header(Approach::Reduce, body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::fig1;

    #[test]
    fn contains_the_key_constructs() {
        let q = gen_reduce_query(&fig1(), 1_000_000);
        assert!(q.text.starts_with("CYPHER 25\nLET program = [\n  {state: 0, op: 'INC', counter: 'A', next: 1},"));
        assert!(q.text.contains("LET max_steps = 1000000\n"));
        assert!(q.text.contains("head([instr IN [program[machine.state]] |"));
        assert!(q.text.contains("CASE WHEN machine.state = -1"));
        assert!(q.text.ends_with("RETURN result\n"));
    }

    #[test]
    fn generation_is_pure() {
        assert_eq!(gen_reduce_query(&fig1(), 7), gen_reduce_query(&fig1(), 7));
    }
}
