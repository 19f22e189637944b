use std::fmt::Write as _;

use super::{Approach, CypherQuery};
use crate::machine::Program;
use crate::qpp::StateGraph;

/// `CREATE` statements for the state graph: node `q<i>` per state (`:Init`
/// on state 0, `:Halt` on halting states) and one typed relationship per
/// branch.
pub fn gen_qpp_setup(program: &Program) -> CypherQuery {
    let graph = StateGraph::from_program(program);
    let mut body = String::new();
    for (i, labels) in graph.nodes().iter().enumerate() {
        let mut label = String::from(":State");
        if labels.init {
            label.push_str(":Init");
        }
        if labels.halt {
            label.push_str(":Halt");
        }
        let _ = writeln!(body, "CREATE (q{i}{label} {{name: 'q{i}'}})");
    }
    for rel in graph.relationships() {
        let _ = writeln!(
            body,
            "CREATE (q{})-[:{} {{c: '{}'}}]->(q{})",
            rel.source,
            rel.rel.name(),
            rel.counter,
            rel.target
        );
    }
    CypherQuery::with_header(Approach::Qpp, body)
}

const ACCUMULATE: &str = "\
  CASE
    WHEN r:INC AND r.c = 'A' THEN {A: m.A + 1, B: m.B}
    WHEN r:INC AND r.c = 'B' THEN {A: m.A, B: m.B + 1}
    WHEN r:JZDEC_POS AND r.c = 'A' THEN {A: m.A - 1, B: m.B}
    WHEN r:JZDEC_POS AND r.c = 'B' THEN {A: m.A, B: m.B - 1}
    ELSE m
  END";

/// Path search from `:Init` to `:Halt` with up to `max_path` relationships,
/// pruned by `allReduce()`, followed by a `NEXT` stage that re-folds the
/// counters because `allReduce()` does not return its accumulator.
pub fn gen_qpp_query(max_path: i64) -> CypherQuery {
    assert!(max_path >= 0, "max_path must be non-negative");
    let next_stage = ACCUMULATE.replace('\n', "\n  ");
    let body = format!(
        "\
MATCH REPEATABLE ELEMENTS
  p = (init:Init)
    -[rels:INC|JZDEC_ZERO|JZDEC_POS]->
      {{0, {max_path}}}
    (h:Halt)
WHERE allReduce(
  m = {{A: 0, B: 0}}, r IN rels |
{ACCUMULATE},
  CASE
    WHEN r:JZDEC_ZERO AND r.c = 'A' THEN m.A = 0
    WHEN r:JZDEC_ZERO AND r.c = 'B' THEN m.B = 0
    WHEN r:JZDEC_POS AND r.c = 'A' THEN m.A >= 0
    WHEN r:JZDEC_POS AND r.c = 'B' THEN m.B >= 0
    ELSE true
  END
)
RETURN rels, length(p) AS steps
NEXT
LET final = reduce(m = {{A: 0, B: 0}},
    r IN rels |
  {next_stage}
  )
RETURN steps, final.A AS ctrA, final.B AS ctrB
"
    );
    CypherQuery::with_header(Approach::Qpp, body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::fig1;
    use crate::machine::Instruction;

    #[test]
    fn halt_only_setup() {
        let p = Program::new(vec![Instruction::Halt]).unwrap();
        let q = gen_qpp_setup(&p);
        assert_eq!(q.text, "CYPHER 25\nCREATE (q0:State:Init:Halt {name: 'q0'})\n");
    }

    #[test]
    fn fig1_setup_lines() {
        let q = gen_qpp_setup(&fig1());
        let lines: Vec<_> = q.text.lines().collect();
        assert_eq!(lines.len(), 1 + 4 + 4);
        assert_eq!(lines[1], "CREATE (q0:State:Init {name: 'q0'})");
        assert_eq!(lines[4], "CREATE (q3:State:Halt {name: 'q3'})");
        assert_eq!(lines[6], "CREATE (q1)-[:JZDEC_ZERO {c: 'B'}]->(q2)");
    }

    #[test]
    fn predicate_uses_non_strict_checks() {
        let q = gen_qpp_query(i64::MAX);
        assert!(q.text.contains("{0, 9223372036854775807}"));
        assert!(q.text.contains("THEN m.A >= 0"));
        assert!(q.text.contains("THEN m.B >= 0"));
        assert!(!q.text.contains("> 0\n"));
        assert!(q.text.contains("RETURN steps, final.A AS ctrA, final.B AS ctrB"));
    }
}
