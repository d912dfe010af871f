use std::collections::VecDeque;

use rand::Rng;

use super::binding::fuzz_binding;
use super::graph::DependencyGraph;
use super::{Binding, Session, Strategy, StrategyKind, TestCase, ValueSource};
use crate::execution::{extract_tuples, ExecutionResult};
use crate::matching::normalize;
use crate::pool::ResourceTuple;
use crate::tree::NodeId;

#[derive(Debug)]
struct Running {
    path: Vec<usize>,
    pos: usize,
    produced: Vec<Vec<ResourceTuple>>,
}

/// Breadth-first sequence exploration over the dependency graph. Every
/// sequence is replayed from its first request; a sequence whose last
/// request succeeds is extended by each consumer of that request.
pub struct BfsStrategy {
    graph: DependencyGraph,
    roots: Vec<usize>,
    queue: VecDeque<Vec<usize>>,
    current: Option<Running>,
    round: u64,
    nodes: Vec<NodeId>,
}

impl BfsStrategy {
    pub fn new(session: &Session) -> Self {
        let graph = DependencyGraph::build(&session.spec, &session.table, &session.pairs);
        let n = session.spec.operations.len();
        let mut roots: Vec<usize> = (0..n).filter(|&op| graph.in_degree(op) == 0).collect();
        if roots.is_empty() {
            roots = (0..n).collect();
        }
        BfsStrategy {
            graph,
            roots,
            queue: VecDeque::new(),
            current: None,
            round: 0,
            nodes: (0..n).map(|op| session.node_of(op)).collect(),
        }
    }

    pub fn queue_len(&self) -> usize {
        self.queue.len()
    }

    /// Latest earlier response in the sequence with a field denoting the
    /// parameter's resource. Exact name matches win within one response.
    fn from_sequence(s: &mut Session, produced: &[Vec<ResourceTuple>], param: &str) -> Option<Binding> {
        let resource = s.table.search(param);
        let wanted = normalize(param);
        for tuples in produced.iter().rev() {
            let mut exact = Vec::new();
            let mut alias = Vec::new();
            for t in tuples {
                for (field, value) in &t.fields {
                    if normalize(field) == wanted {
                        exact.push(value);
                    } else if s.table.field_matches(field, &resource) {
                        alias.push(value);
                    }
                }
            }
            let class = if exact.is_empty() { alias } else { exact };
            if !class.is_empty() {
                let pick = class[s.rng.gen_range(0..class.len())].clone();
                return Some(Binding {
                    value: pick,
                    source: ValueSource::Pool,
                    pair: None,
                });
            }
        }
        None
    }
}

impl Strategy for BfsStrategy {
    fn kind(&self) -> StrategyKind {
        StrategyKind::Bfs
    }

    fn next_case(&mut self, s: &mut Session) -> Option<TestCase> {
        if self.roots.is_empty() {
            return None;
        }
        if self.current.is_none() {
            if self.queue.is_empty() {
                self.round += 1;
                self.queue.extend(self.roots.iter().map(|&r| vec![r]));
            }
            let path = self.queue.pop_front()?;
            self.current = Some(Running {
                path,
                pos: 0,
                produced: Vec::new(),
            });
        }
        let running = self.current.as_ref()?;
        let op = running.path[running.pos];
        let operation = s.spec.operations[op].clone();
        let mut bindings = Vec::new();
        for param in &operation.required_params {
            let b = match Self::from_sequence(s, &running.produced, &param.name) {
                Some(b) => b,
                None => fuzz_binding(param, &s.options, &mut s.rng),
            };
            bindings.push((param.name.clone(), b));
        }
        Some(TestCase {
            round: self.round,
            operation: op,
            node: self.nodes[op],
            method: operation.method,
            path: operation.path,
            bindings,
            optional_set: Vec::new(),
        })
    }

    fn observe(&mut self, case: &TestCase, result: &ExecutionResult, s: &mut Session) {
        let Some(running) = self.current.as_mut() else {
            return;
        };
        if !result.class.is_success() {
            self.current = None;
            return;
        }
        let op = &s.spec.operations[case.operation];
        running.produced.push(extract_tuples(op, case, result));
        running.pos += 1;
        if running.pos < running.path.len() {
            return;
        }
        let path = std::mem::take(&mut running.path);
        self.current = None;
        let last = *path.last().expect("non-empty sequence");
        for next in self.graph.successors(last) {
            if path.contains(&next) {
                continue;
            }
            if self.queue.len() >= s.options.bfs_queue_cap {
                break;
            }
            let mut longer = path.clone();
            longer.push(next);
            self.queue.push_back(longer);
        }
    }

    fn round(&self) -> u64 {
        self.round
    }
}
