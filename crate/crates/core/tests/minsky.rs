use std::path::Path;

use proptest::prelude::*;

use cm2cypher::machine::{run, Config, RunOptions};
use cm2cypher::minsky::{
    decode_counters, decode_stack, encode_counters, encode_stack, k_counters_to_two, mcm_run, mcm_run_observed,
    reduce_tm, stacks_to_tape, tm_run, tm_to_two_stack, trim_blanks, two_stack_to_counters, McInstr,
    MultiCounterMachine, PrimeError, StageFuel, TmError, TuringMachine, Verdict, LEFT, RIGHT, SCRATCH,
};

fn fixture_json(name: &str) -> serde_json::Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/tm").join(format!("{name}.json"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn fixture(name: &str) -> TuringMachine {
    TuringMachine::from_json(&fixture_json(name).to_string()).unwrap()
}

/// The fixture with its input replaced by `ones` copies of `1`.
fn with_input(name: &str, ones: usize) -> TuringMachine {
    let mut doc = fixture_json(name);
    doc["input"] = serde_json::json!(vec!["1"; ones]);
    TuringMachine::from_json(&doc.to_string()).unwrap()
}

/// Checks TM → TSM → 3CM agreement and the step bounds between them.
fn check_upper_stages(tm: &TuringMachine, fuel: u64) {
    let blank = tm.blank();
    let t = tm_run(tm, fuel);
    assert!(t.halted, "fixture should halt within {fuel}");
    let tape = trim_blanks(&t.tape, blank).to_vec();

    let tsm = tm_to_two_stack(tm);
    let s = cm2cypher::minsky::tsm_run(&tsm, 4 * t.steps);
    assert!(s.halted, "two-stack run exceeds 4 ops per TM step");
    assert_eq!(trim_blanks(&s.tape(blank), blank), tape.as_slice());

    let enc = two_stack_to_counters(&tsm);
    let mut c_max = 0;
    let mut previous = None;
    let m = mcm_run_observed(&enc.machine, u64::MAX, |state, counters| {
        let gadget = enc.gadgets[state];
        if previous != Some(gadget) {
            assert_eq!(counters[SCRATCH], 0, "scratch nonzero entering gadget {gadget} at {state}");
            c_max = c_max.max(counters[LEFT]).max(counters[RIGHT]);
            previous = Some(gadget);
        }
    })
    .unwrap();
    assert!(m.halted);
    assert_eq!(m.counters[SCRATCH], 0);
    let b = enc.base;
    let bound = s.steps * ((b + 3) * c_max + 2 * b + 2) + 1;
    assert!(m.steps <= bound, "{} counter steps exceed bound {bound}", m.steps);
    let left = decode_stack(m.counters[LEFT], b).unwrap();
    let right = decode_stack(m.counters[RIGHT], b).unwrap();
    assert_eq!(trim_blanks(&stacks_to_tape(&left, &right, blank), blank), tape.as_slice());
}

#[test]
fn unary_successor_upper_stages_for_growing_inputs() {
    for n in 0..=6 {
        check_upper_stages(&with_input("unary-successor", n), 1_000);
    }
}

#[test]
fn small_fixtures_upper_stages() {
    for name in ["immediate-halt", "right-move"] {
        check_upper_stages(&fixture(name), 1_000);
    }
    for n in 0..=4 {
        check_upper_stages(&with_input("right-move", n), 1_000);
    }
}

#[test]
fn full_pipeline_agrees_on_the_fixtures() {
    for (name, expected_tape) in [("immediate-halt", ""), ("unary-successor", "11"), ("right-move", "1")] {
        let report = reduce_tm(&fixture(name), StageFuel::uniform(1_000_000)).unwrap();
        assert_eq!(report.verdict, Verdict::Agree, "{name}\n{}", report.table());
        for stage in &report.stages {
            assert!(stage.halted, "{name}: {} did not halt", stage.stage.name());
            if let Some(tape) = &stage.tape {
                assert_eq!(tape, expected_tape, "{name}: {}", stage.stage.name());
            }
        }
    }
}

#[test]
fn two_counter_stage_decodes_the_three_counters() {
    let report = reduce_tm(&fixture("unary-successor"), StageFuel::uniform(1_000_000)).unwrap();
    let run2 = run(&report.two_counter.program, 1_000_000, RunOptions::default()).unwrap();
    assert!(run2.halted);
    let decoded = decode_counters(&run2.final_config, 3).unwrap();
    let m = mcm_run(&report.three_counter.machine, 1_000_000).unwrap();
    assert_eq!(decoded, m.counters);
    assert_eq!(report.stages.last().unwrap().counters.as_ref(), Some(&m.counters));
}

#[test]
fn prime_gadgets_leave_scratch_empty() {
    let tm = with_input("unary-successor", 1);
    let enc = two_stack_to_counters(&tm_to_two_stack(&tm));
    let prime = k_counters_to_two(&enc.machine).unwrap();
    let r = run(&prime.program, 1_000_000, RunOptions { capture_trace: true, trace_cap: usize::MAX }).unwrap();
    assert!(r.halted);
    let mut previous = None;
    let mut crossings = 0;
    for row in r.trace.unwrap() {
        let gadget = prime.gadgets[row.state_before];
        if previous != Some(gadget) {
            assert_eq!(row.config_before.b, 0, "B nonzero entering gadget {gadget} at step {}", row.step);
            crossings += 1;
            previous = Some(gadget);
        }
    }
    assert!(crossings > prime.entries.len() / 2);
    assert_eq!(r.final_config.b, 0);
}

#[test]
fn decode_examples() {
    assert_eq!(decode_counters(&Config::new(-1, 12, 0), 2), Ok(vec![2, 1]));
    assert_eq!(decode_counters(&Config::new(-1, 1, 0), 4), Ok(vec![0, 0, 0, 0]));
    assert!(matches!(decode_counters(&Config::new(-1, 10, 0), 2), Err(PrimeError::Residue { .. })));
    assert_eq!(decode_counters(&Config::new(-1, 0, 0), 2), Err(PrimeError::Zero));
}

#[test]
fn missing_transition_is_a_validation_error() {
    let json = fixture_json("missing-transition").to_string();
    assert!(matches!(TuringMachine::from_json(&json), Err(TmError::MissingTransition { .. })));
}

#[test]
fn fuel_zero_never_halts_a_running_machine() {
    let t = tm_run(&fixture("unary-successor"), 0);
    assert!(!t.halted);
    assert_eq!(t.steps, 0);
    let report = reduce_tm(&fixture("unary-successor"), StageFuel::uniform(0)).unwrap();
    assert!(matches!(report.verdict, Verdict::Inconclusive { .. }));
}

/// A random machine over `k` counters whose jumps stay in range.
fn random_mcm() -> impl Strategy<Value = MultiCounterMachine> {
    (1usize..=3, 1usize..=6).prop_flat_map(|(k, n)| {
        let instr = prop_oneof![
            (0..k, 0..=n).prop_map(|(counter, next)| McInstr::Inc { counter, next }),
            (0..k, 0..=n, 0..=n).prop_map(|(counter, if_zero, if_pos)| McInstr::JzDec { counter, if_zero, if_pos }),
        ];
        (prop::collection::vec(instr, n), prop::collection::vec(0u64..3, k)).prop_map(move |(mut body, initial)| {
            body.push(McInstr::Halt);
            MultiCounterMachine::new(k, body, initial).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Compiled programs halt exactly when the source halts, with the same
    /// decoded counters, and scratch empty.
    #[test]
    fn prime_encoding_simulates_counter_machines(mcm in random_mcm()) {
        let mut largest = 1i64;
        let source = mcm_run_observed(&mcm, 40, |_, c| {
            largest = largest.max(encode_counters(c).unwrap_or(i64::MAX));
        }).unwrap();
        prop_assume!(source.halted && largest <= 5_000);

        let prime = k_counters_to_two(&mcm).unwrap();
        let r = run(&prime.program, 5_000_000, RunOptions::default()).unwrap();
        prop_assert!(r.halted);
        prop_assert_eq!(r.final_config.b, 0);
        prop_assert_eq!(decode_counters(&r.final_config, mcm.counters()).unwrap(), source.counters);
    }

    #[test]
    fn stack_numerals_round_trip(stack in prop::collection::vec(0usize..3, 0..12)) {
        let n = encode_stack(&stack, 4).unwrap();
        prop_assert_eq!(decode_stack(n, 4), Some(stack));
    }

    #[test]
    fn prime_numerals_round_trip(counters in prop::collection::vec(0u64..8, 0..=4)) {
        let a = encode_counters(&counters).unwrap();
        let k = counters.len();
        prop_assert_eq!(decode_counters(&Config::new(-1, a, 0), k).unwrap(), counters);
    }
}
