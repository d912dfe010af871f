use std::collections::{BTreeMap, VecDeque};

use super::binding::bind_tree;
use super::escalation::{escalate_optionals, EscalationState, OptionalSet};
use super::template::{next_k, MethodTemplate};
use super::{Session, Strategy, StrategyKind, TestCase};
use crate::execution::{process_result, ExecutionResult};
use crate::tree::NodeId;

#[derive(Debug, Clone)]
enum Slot {
    Required { node: NodeId, op: usize },
    Escalate { node: NodeId, op: usize },
    Optional { node: NodeId, op: usize, set: OptionalSet },
}

/// Walks every tree depth-first once per round, applying the method
/// template at each node and escalating optional parameters one level per
/// round.
#[derive(Debug, Default)]
pub struct TreeStrategy {
    queue: VecDeque<Slot>,
    round: u64,
    escalation: BTreeMap<usize, EscalationState>,
}

impl TreeStrategy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn escalation(&self, op: usize) -> Option<&EscalationState> {
        self.escalation.get(&op)
    }

    fn plan_round(&mut self, s: &mut Session) {
        self.round += 1;
        let order: Vec<NodeId> = s.forest.dfs_order();
        for node in order {
            let k = next_k(s.options.k_range, &mut s.rng);
            let template = MethodTemplate::new(k, s.options.include_patch);
            let tree_node = s.forest.node(node);
            for (method, reps) in template.plan(tree_node.methods()) {
                let Some(op) = tree_node.operation(method) else {
                    continue;
                };
                for _ in 0..reps {
                    self.queue.push_back(Slot::Required { node, op });
                }
                if s.options.escalate {
                    self.queue.push_back(Slot::Escalate { node, op });
                }
            }
        }
    }

    fn case(&self, s: &mut Session, node: NodeId, op: usize, set: OptionalSet) -> TestCase {
        let bindings = bind_tree(s, op, node, &set);
        let operation = &s.spec.operations[op];
        TestCase {
            round: self.round,
            operation: op,
            node,
            method: operation.method,
            path: operation.path.clone(),
            bindings,
            optional_set: set,
        }
    }
}

impl Strategy for TreeStrategy {
    fn kind(&self) -> StrategyKind {
        StrategyKind::Tree
    }

    fn next_case(&mut self, s: &mut Session) -> Option<TestCase> {
        if s.spec.operations.is_empty() {
            return None;
        }
        loop {
            if self.queue.is_empty() {
                self.plan_round(s);
            }
            match self.queue.pop_front()? {
                Slot::Required { node, op } => return Some(self.case(s, node, op, Vec::new())),
                Slot::Optional { node, op, set } => return Some(self.case(s, node, op, set)),
                Slot::Escalate { node, op } => {
                    let state = self.escalation.entry(op).or_default();
                    let sets = escalate_optionals(&s.spec.operations[op], state, s.options.ordered_pairs);
                    for set in sets.into_iter().rev() {
                        self.queue.push_front(Slot::Optional { node, op, set });
                    }
                }
            }
        }
    }

    fn observe(&mut self, case: &TestCase, result: &ExecutionResult, s: &mut Session) {
        process_result(case, result, s);
        if !case.optional_set.is_empty() {
            if let Some(state) = self.escalation.get_mut(&case.operation) {
                state.record(&case.optional_set, result.class.is_success());
            }
        }
    }

    fn round(&self) -> u64 {
        self.round
    }
}
