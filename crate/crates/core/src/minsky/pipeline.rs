use std::fmt;

use thiserror::Error;

use super::counters::{decode_stack, mcm_run, two_stack_to_counters, McmError, StackEncoding, LEFT, RIGHT, SCRATCH};
use super::prime::{decode_counters, k_counters_to_two, PrimeEncoding, PrimeError};
use super::turing::{tm_run, TuringMachine};
use super::two_stack::{stacks_to_tape, tm_to_two_stack, tsm_run, TwoStackMachine};
use crate::machine::{run, MachineError, RunOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Turing,
    TwoStack,
    ThreeCounter,
    TwoCounter,
}

impl Stage {
    pub const ALL: [Stage; 4] = [Stage::Turing, Stage::TwoStack, Stage::ThreeCounter, Stage::TwoCounter];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Turing => "turing",
            Stage::TwoStack => "two-stack",
            Stage::ThreeCounter => "3-counter",
            Stage::TwoCounter => "2-counter",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Step budget for each stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageFuel {
    pub turing: u64,
    pub two_stack: u64,
    pub three_counter: u64,
    pub two_counter: u64,
}

impl StageFuel {
    pub fn uniform(fuel: u64) -> Self {
        StageFuel { turing: fuel, two_stack: fuel, three_counter: fuel, two_counter: fuel }
    }

    fn get(&self, stage: Stage) -> u64 {
        match stage {
            Stage::Turing => self.turing,
            Stage::TwoStack => self.two_stack,
            Stage::ThreeCounter => self.three_counter,
            Stage::TwoCounter => self.two_counter,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageReport {
    pub stage: Stage,
    pub halted: bool,
    pub steps: u64,
    /// Decoded tape, blanks trimmed; `None` when the final state does not
    /// decode.
    pub tape: Option<String>,
    /// Counter vector, for the counter stages.
    pub counters: Option<Vec<u64>>,
    /// Free-form description of the final state.
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Every stage halted with the same tape.
    Agree,
    /// A stage ran out of fuel while the source machine halted.
    Inconclusive { stage: Stage },
    /// A stage halted differently or decoded to a different tape.
    Disagree { stage: Stage, reason: String },
}

#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub tm: TuringMachine,
    pub two_stack: TwoStackMachine,
    pub three_counter: StackEncoding,
    pub two_counter: PrimeEncoding,
    pub stages: Vec<StageReport>,
    pub verdict: Verdict,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Prime(#[from] PrimeError),
    #[error("3-counter stage: {0}")]
    Counters(#[from] McmError),
    #[error("2-counter stage: {0}")]
    Machine(#[from] MachineError),
}

/// Compiles `tm` down to a two-counter program, runs every stage on its own
/// fuel and compares halting and decoded tapes against the source machine.
pub fn reduce_tm(tm: &TuringMachine, fuel: StageFuel) -> Result<PipelineReport, PipelineError> {
    let two_stack = tm_to_two_stack(tm);
    let three_counter = two_stack_to_counters(&two_stack);
    let two_counter = k_counters_to_two(&three_counter.machine)?;
    let blank = tm.blank();
    let base = three_counter.base;
    let tape_of = |counters: &[u64]| -> Option<String> {
        if counters[SCRATCH] != 0 {
            return None;
        }
        let left = decode_stack(counters[LEFT], base)?;
        let right = decode_stack(counters[RIGHT], base)?;
        Some(tm.render(&stacks_to_tape(&left, &right, blank)))
    };

    let t = tm_run(tm, fuel.turing);
    let s = tsm_run(&two_stack, fuel.two_stack);
    let m = mcm_run(&three_counter.machine, fuel.three_counter)?;
    let c = run(&two_counter.program, fuel.two_counter, RunOptions::default())?;
    let decoded = decode_counters(&c.final_config, 3);

    let stages = vec![
        StageReport {
            stage: Stage::Turing,
            halted: t.halted,
            steps: t.steps,
            tape: Some(tm.render(&t.tape)),
            counters: None,
            detail: format!("state {}", tm.states()[t.state]),
        },
        StageReport {
            stage: Stage::TwoStack,
            halted: s.halted,
            steps: s.steps,
            tape: Some(tm.render(&s.tape(blank))),
            counters: None,
            detail: format!("left {:?} right {:?}", tm.render(&s.left), tm.render(&s.right)),
        },
        StageReport {
            stage: Stage::ThreeCounter,
            halted: m.halted,
            steps: m.steps,
            tape: tape_of(&m.counters),
            detail: format!("counters {:?}", m.counters),
            counters: Some(m.counters),
        },
        StageReport {
            stage: Stage::TwoCounter,
            halted: c.halted,
            steps: c.machine_steps,
            tape: decoded.as_ref().ok().and_then(|v| tape_of(v)),
            detail: match &decoded {
                Ok(v) => format!("A={} decodes to {v:?}", c.final_config.a),
                Err(e) => e.to_string(),
            },
            counters: decoded.ok(),
        },
    ];
    let verdict = judge(&stages, &fuel);
    Ok(PipelineReport { tm: tm.clone(), two_stack, three_counter, two_counter, stages, verdict })
}

fn judge(stages: &[StageReport], fuel: &StageFuel) -> Verdict {
    let source = &stages[0];
    for s in &stages[1..] {
        if !source.halted {
            // Nothing to compare beyond the source's own horizon.
            return Verdict::Inconclusive { stage: Stage::Turing };
        }
        if !s.halted {
            return if s.steps >= fuel.get(s.stage) {
                Verdict::Inconclusive { stage: s.stage }
            } else {
                Verdict::Disagree { stage: s.stage, reason: "stopped without halting".into() }
            };
        }
        if s.tape != source.tape {
            return Verdict::Disagree {
                stage: s.stage,
                reason: format!("tape {:?}, expected {:?} ({})", s.tape, source.tape, s.detail),
            };
        }
    }
    Verdict::Agree
}

impl PipelineReport {
    /// One row per stage.
    pub fn table(&self) -> String {
        let mut out = format!("{:<10} | {:<6} | {:>10} | {:<8} | detail\n", "stage", "halted", "steps", "tape");
        for s in &self.stages {
            out.push_str(&format!(
                "{:<10} | {:<6} | {:>10} | {:<8} | {}\n",
                s.stage.name(),
                if s.halted { "yes" } else { "no" },
                s.steps,
                s.tape.as_deref().map_or("?".to_string(), |t| format!("{t:?}")),
                s.detail
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn immediate_halt_compiles_to_bootstrap_and_halt() {
        let tm = TuringMachine::from_json(
            r#"{"states": ["h"], "alphabet": ["_"], "blank": "_", "transitions": [],
                "initial": "h", "halting": ["h"], "input": []}"#,
        )
        .unwrap();
        let report = reduce_tm(&tm, StageFuel::uniform(1000)).unwrap();
        assert_eq!(report.verdict, Verdict::Agree);
        assert_eq!(report.two_counter.program.len(), 2);
        assert!(report.stages.iter().all(|s| s.tape.as_deref() == Some("")));
    }
}
