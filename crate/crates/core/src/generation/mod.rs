//! Test-case generation: the tree-driven strategy and two baselines that
//! order requests by a producer/consumer dependency graph.

mod binding;
pub mod bfs;
pub mod escalation;
pub mod fuzz;
pub mod graph;
pub mod template;
pub mod topo;
pub mod tree_strategy;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::execution::ExecutionResult;
use crate::matching::{AnnotationTable, PairKey, PairStore, ScoreParams};
use crate::pool::ResourcePool;
use crate::spec::{ApiSpec, Method};
use crate::tree::{ApiForest, NodeId};

pub use bfs::BfsStrategy;
pub use escalation::{escalate_optionals, EscalationState, OptionalSet};
pub use fuzz::{fuzz_value, FuzzRange};
pub use graph::{DependencyEdge, DependencyGraph, TopoResult};
pub use template::{next_k, respects_template, KRange, MethodTemplate};
pub use topo::TopoStrategy;
pub use tree_strategy::TreeStrategy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueSource {
    /// Drawn from the resource pool through a scored match.
    Pool,
    /// Copied from the path arguments of a tuple already used by the same
    /// request.
    Context,
    Fuzz,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Binding {
    pub value: Value,
    pub source: ValueSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<PairKey>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestCase {
    pub round: u64,
    pub operation: usize,
    pub node: NodeId,
    pub method: Method,
    pub path: String,
    /// In parameter declaration order, required first.
    pub bindings: Vec<(String, Binding)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub optional_set: Vec<String>,
}

impl TestCase {
    pub fn binding(&self, name: &str) -> Option<&Binding> {
        self.bindings.iter().find(|(n, _)| n == name).map(|(_, b)| b)
    }

    pub fn pairs(&self) -> impl Iterator<Item = &PairKey> {
        self.bindings.iter().filter_map(|(_, b)| b.pair.as_ref())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    Tree,
    Bfs,
    Topo,
}

impl StrategyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StrategyKind::Tree => "tree",
            StrategyKind::Bfs => "bfs",
            StrategyKind::Topo => "topo",
        }
    }
}

impl std::str::FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tree" => Ok(StrategyKind::Tree),
            "bfs" => Ok(StrategyKind::Bfs),
            "topo" => Ok(StrategyKind::Topo),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenOptions {
    pub k_range: KRange,
    pub escalate: bool,
    pub include_patch: bool,
    pub ordered_pairs: bool,
    pub fuzz: FuzzRange,
    /// Parameter names whose reused values collide on creation.
    pub uniqueness: Vec<String>,
    pub suffix_probability: f64,
    pub bfs_queue_cap: usize,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            k_range: KRange::default(),
            escalate: true,
            include_patch: false,
            ordered_pairs: false,
            fuzz: FuzzRange::default(),
            uniqueness: ["name", "path", "title", "slug", "username", "email"]
                .map(String::from)
                .to_vec(),
            suffix_probability: 0.8,
            bfs_queue_cap: 10_000,
        }
    }
}

/// Mutable fuzzing state shared by a strategy and the response processor.
pub struct Session {
    pub spec: ApiSpec,
    pub forest: ApiForest,
    pub table: AnnotationTable,
    pub pool: ResourcePool,
    pub pairs: PairStore,
    pub rng: ChaCha8Rng,
    pub options: GenOptions,
}

impl Session {
    pub fn new(
        spec: ApiSpec,
        table: AnnotationTable,
        options: GenOptions,
        scores: ScoreParams,
        pool_capacity: usize,
        seed: u64,
    ) -> Self {
        let forest = ApiForest::build(&spec);
        Session {
            spec,
            forest,
            table,
            pool: ResourcePool::new(pool_capacity),
            pairs: PairStore::new(scores),
            rng: ChaCha8Rng::seed_from_u64(seed),
            options,
        }
    }

    /// Tree node carrying operation `op`.
    pub fn node_of(&self, op: usize) -> NodeId {
        self.forest
            .nodes()
            .iter()
            .find(|n| n.operations.iter().any(|(_, i)| *i == op))
            .map_or(0, |n| n.id)
    }
}

pub trait Strategy {
    fn kind(&self) -> StrategyKind;

    /// Next request to send, or `None` when the spec offers nothing to test.
    fn next_case(&mut self, session: &mut Session) -> Option<TestCase>;

    /// Feeds back the outcome of the case most recently returned.
    fn observe(&mut self, case: &TestCase, result: &ExecutionResult, session: &mut Session);

    fn round(&self) -> u64;
}

pub fn make_strategy(kind: StrategyKind, session: &Session) -> Box<dyn Strategy + Send> {
    match kind {
        StrategyKind::Tree => Box::new(TreeStrategy::new()),
        StrategyKind::Bfs => Box::new(BfsStrategy::new(session)),
        StrategyKind::Topo => Box::new(TopoStrategy::new(session)),
    }
}
