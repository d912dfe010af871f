use super::binding::bind_flat;
use super::graph::{DependencyGraph, TopoResult};
use super::{Session, Strategy, StrategyKind, TestCase};
use crate::execution::{deleted_resource, extract_tuples, update_scores, ExecutionResult, StatusClass};
use crate::pool::SubPool;
use crate::tree::NodeId;

const FLAT_LEVEL: NodeId = usize::MAX;

/// Dependency-ordered baseline: every round sends each operation once, in
/// topological order of the dependency graph, with required parameters
/// only, drawing values from one unstructured pool.
pub struct TopoStrategy {
    sort: TopoResult,
    nodes: Vec<NodeId>,
    pos: usize,
    round: u64,
    flat: SubPool,
    next_seq: u64,
}

impl TopoStrategy {
    pub fn new(session: &Session) -> Self {
        let graph = DependencyGraph::build(&session.spec, &session.table, &session.pairs);
        let sort = graph.topo_order();
        let nodes = (0..session.spec.operations.len()).map(|op| session.node_of(op)).collect();
        TopoStrategy {
            sort,
            nodes,
            pos: 0,
            round: 0,
            flat: SubPool::new(session.pool.capacity()),
            next_seq: 0,
        }
    }

    pub fn order(&self) -> &TopoResult {
        &self.sort
    }

    pub fn pool(&self) -> &SubPool {
        &self.flat
    }
}

impl Strategy for TopoStrategy {
    fn kind(&self) -> StrategyKind {
        StrategyKind::Topo
    }

    fn next_case(&mut self, s: &mut Session) -> Option<TestCase> {
        if self.sort.order.is_empty() {
            return None;
        }
        if self.round == 0 || self.pos == self.sort.order.len() {
            self.pos = 0;
            self.round += 1;
        }
        let op = self.sort.order[self.pos];
        self.pos += 1;
        let bindings = bind_flat(s, &self.flat, FLAT_LEVEL, op, &[]);
        let operation = &s.spec.operations[op];
        Some(TestCase {
            round: self.round,
            operation: op,
            node: self.nodes[op],
            method: operation.method,
            path: operation.path.clone(),
            bindings,
            optional_set: Vec::new(),
        })
    }

    fn observe(&mut self, case: &TestCase, result: &ExecutionResult, s: &mut Session) {
        update_scores(case, result.class, &mut s.pairs);
        if !result.class.is_success() {
            return;
        }
        let op = &s.spec.operations[case.operation];
        for tuple in extract_tuples(op, case, result) {
            self.flat.push(tuple, self.next_seq);
            self.next_seq += 1;
        }
        if result.class == StatusClass::Success {
            if let Some(gone) = deleted_resource(op, case) {
                for field in &gone.fields {
                    self.flat.invalidate(field, &gone.value);
                }
            }
        }
    }

    fn round(&self) -> u64 {
        self.round
    }
}
