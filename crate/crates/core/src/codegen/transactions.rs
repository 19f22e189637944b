use super::{program_literal, Approach, CypherQuery, ScriptBundle, UNBOUNDED};
use crate::frontend::to_instruction_maps;
use crate::machine::Program;

/// How the stepper query gets the program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProgramMode {
    /// `LET program = [...]` at the top of the stepper.
    #[default]
    Inline,
    /// `$program`, supplied through the bundle's parameter document.
    Parameter,
}

const SETUP: &str = "CREATE (:Machine {state: 0, A: 0, B: 0});\n";

const READBACK: &str = "// Read result:\nMATCH (m:Machine) RETURN m;\n";

/// The per-row body. `{program}` is replaced by `program` or `$program`.
///
/// A halted machine trips `1/0` before the program is indexed, so
/// `ON ERROR BREAK` stops the loop instead of reading `program[-1]`.
const STEPPER: &str = "\
CALL (step) {
  MATCH (m:Machine)
  WITH m,
    CASE WHEN m.state = -1 THEN 1/0
         ELSE {program}[m.state]
    END AS instr
  SET m.state = CASE instr.op
    WHEN 'INC' THEN instr.next
    WHEN 'JZDEC' THEN
      CASE instr.counter
        WHEN 'A' THEN CASE WHEN m.A = 0 THEN instr.q_zero ELSE instr.q_pos END
        WHEN 'B' THEN CASE WHEN m.B = 0 THEN instr.q_zero ELSE instr.q_pos END
      END
    WHEN 'HALT' THEN -1
    END,
  m.A = CASE
    WHEN instr.op = 'INC' AND instr.counter = 'A' THEN m.A + 1
    WHEN instr.op = 'JZDEC' AND instr.counter = 'A' AND m.A > 0 THEN m.A - 1
    ELSE m.A END,
  m.B = CASE
    WHEN instr.op = 'INC' AND instr.counter = 'B' THEN m.B + 1
    WHEN instr.op = 'JZDEC' AND instr.counter = 'B' AND m.B > 0 THEN m.B - 1
    ELSE m.B END
} IN TRANSACTIONS OF 1 ROW
  ON ERROR BREAK
";

/// Setup, stepper and readback queries, labelled `setup`, `main` and `read`.
pub fn gen_transactions_script(program: &Program, mode: ProgramMode) -> ScriptBundle {
    let (prelude, reference, parameters) = match mode {
        ProgramMode::Inline => (format!("LET program = {}\n\n", program_literal(program, 0)), "program", None),
        ProgramMode::Parameter => {
            (String::new(), "$program", Some(serde_json::json!({ "program": to_instruction_maps(program) })))
        }
    };
    let main = format!("{prelude}UNWIND range(1, {UNBOUNDED}) AS step\n{}", STEPPER.replace("{program}", reference));

    ScriptBundle {
        queries: vec![
            ("setup".into(), CypherQuery::with_header(Approach::Transactions, SETUP.into())),
            ("main".into(), CypherQuery::with_header(Approach::Transactions, main)),
            (
                "read".into(),
                CypherQuery { approach: Approach::Transactions, text: READBACK.into(), dialect_header: None },
            ),
        ],
        parameters,
    }
}
