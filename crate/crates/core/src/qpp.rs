//! Model-level simulation of the graph-native traversal.
//!
//! The program is viewed as a state graph: one node per state, `INC`
//! relationships for increments and a `JZDEC_ZERO` / `JZDEC_POS` pair for
//! every zero test. A path from the initial node to a halting node is
//! accepted when, folding the counters along its relationships, the guard of
//! every relationship holds on the updated counters. `JZDEC_ZERO` leaves the
//! counters untouched and requires the tested counter to be zero;
//! `JZDEC_POS` decrements and requires the result to be at least zero.
//!
//! Exactly one outgoing relationship of any node passes its guard, so the
//! accepted path is found by a guarded walk without backtracking.

use std::fmt;

use crate::machine::{Counter, Instruction, MachineError, Program, StateId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelType {
    Inc,
    JzDecZero,
    JzDecPos,
}

impl RelType {
    pub fn name(self) -> &'static str {
        match self {
            RelType::Inc => "INC",
            RelType::JzDecZero => "JZDEC_ZERO",
            RelType::JzDecPos => "JZDEC_POS",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Relationship {
    pub source: StateId,
    pub rel: RelType,
    pub counter: Counter,
    pub target: StateId,
}

impl Relationship {
    /// Tag such as `JZDEC_POS(B)`.
    pub fn tag(&self) -> String {
        format!("{}({})", self.rel.name(), self.counter)
    }
}

impl fmt::Display for Relationship {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}-[:{} {{c:'{}'}}]->q{}", self.source, self.rel.name(), self.counter, self.target)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeLabels {
    pub init: bool,
    pub halt: bool,
}

/// The state graph of a program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateGraph {
    nodes: Vec<NodeLabels>,
    relationships: Vec<Relationship>,
}

impl StateGraph {
    pub fn from_program(program: &Program) -> Self {
        let nodes = program
            .instructions()
            .iter()
            .enumerate()
            .map(|(state, instr)| NodeLabels { init: state == 0, halt: instr.is_halt() })
            .collect();

        let mut relationships = Vec::new();
        for (source, instr) in program.instructions().iter().enumerate() {
            match *instr {
                Instruction::Inc { counter, next } => {
                    relationships.push(Relationship { source, rel: RelType::Inc, counter, target: next })
                }
                Instruction::JzDec { counter, if_zero, if_pos } => {
                    relationships.push(Relationship { source, rel: RelType::JzDecZero, counter, target: if_zero });
                    relationships.push(Relationship { source, rel: RelType::JzDecPos, counter, target: if_pos });
                }
                Instruction::Halt => {}
            }
        }
        StateGraph { nodes, relationships }
    }

    pub fn nodes(&self) -> &[NodeLabels] {
        &self.nodes
    }

    pub fn relationships(&self) -> &[Relationship] {
        &self.relationships
    }

    pub fn outgoing(&self, node: StateId) -> impl Iterator<Item = &Relationship> {
        self.relationships.iter().filter(move |r| r.source == node)
    }
}

/// Counter accumulator carried along a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counters {
    pub a: i64,
    pub b: i64,
}

impl Counters {
    fn get(&self, counter: Counter) -> i64 {
        match counter {
            Counter::A => self.a,
            Counter::B => self.b,
        }
    }

    fn set(mut self, counter: Counter, value: i64) -> Self {
        match counter {
            Counter::A => self.a = value,
            Counter::B => self.b = value,
        }
        self
    }
}

/// Accumulator update for one relationship. `None` on overflow.
pub fn accumulate(rel: &Relationship, m: Counters) -> Option<Counters> {
    let c = rel.counter;
    match rel.rel {
        RelType::Inc => m.get(c).checked_add(1).map(|v| m.set(c, v)),
        RelType::JzDecPos => m.get(c).checked_sub(1).map(|v| m.set(c, v)),
        RelType::JzDecZero => Some(m),
    }
}

/// Guard evaluated on the post-update accumulator.
pub fn guard(rel: &Relationship, m: Counters) -> bool {
    match rel.rel {
        RelType::Inc => true,
        RelType::JzDecZero => m.get(rel.counter) == 0,
        RelType::JzDecPos => m.get(rel.counter) >= 0,
    }
}

/// Re-derives the counters from a relationship sequence, without guards.
pub fn fold_counters(rels: &[Relationship]) -> Option<Counters> {
    rels.iter().try_fold(Counters::default(), |m, r| accumulate(r, m))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathResult {
    pub relationships: Vec<Relationship>,
    /// Tags such as `INC(A)` or `JZDEC_POS(B)`, one per relationship.
    pub edge_tags: Vec<String>,
    /// Path length in relationships; one less than the machine step count.
    pub steps: u64,
    pub final_a: i64,
    pub final_b: i64,
}

/// Walks the state graph of `program` from the initial node, following the
/// single relationship whose guard holds, until a halting node is reached.
///
/// `fuel` bounds the path length. Reaching the bound first is reported as
/// [`MachineError::NoPath`].
pub fn qpp_walk(program: &Program, fuel: u64) -> Result<PathResult, MachineError> {
    let graph = StateGraph::from_program(program);
    walk_graph(&graph, fuel)
}

pub fn walk_graph(graph: &StateGraph, fuel: u64) -> Result<PathResult, MachineError> {
    let mut node = 0;
    let mut m = Counters::default();
    let mut path = Vec::new();

    while !graph.nodes[node].halt {
        if path.len() as u64 >= fuel {
            return Err(MachineError::NoPath { fuel });
        }
        let mut accepted = None;
        for rel in graph.outgoing(node) {
            let updated = accumulate(rel, m).ok_or(MachineError::Overflow { state: node, counter: rel.counter })?;
            if guard(rel, updated) {
                assert!(accepted.is_none(), "two relationships out of q{node} pass their guards");
                accepted = Some((*rel, updated));
            }
        }
        let (rel, updated) = accepted.expect("every non-halting node has exactly one passing relationship");
        path.push(rel);
        m = updated;
        node = rel.target;
    }

    // Counters come from a second, unguarded fold over the accepted path.
    let last = fold_counters(&path).expect("fold already succeeded during the walk");
    debug_assert_eq!(last, m);
    Ok(PathResult {
        edge_tags: path.iter().map(Relationship::tag).collect(),
        steps: path.len() as u64,
        relationships: path,
        final_a: last.a,
        final_b: last.b,
    })
}
