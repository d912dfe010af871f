//! Hierarchical resource pool: one bounded sub-pool per token node.
//!
//! Tuples hold the fields of one successful exchange together, because only
//! those combinations are known to be valid. Retrieval walks from the
//! requesting node's nearest token ancestor outwards and the nearest level
//! holding a live match always wins.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;
use serde::Serialize;
use serde_json::Value;

use crate::matching::normalize;
use crate::spec::Method;
use crate::tree::{ApiForest, NodeId};

pub const DEFAULT_CAPACITY: usize = 128;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourceTuple {
    pub fields: BTreeMap<String, Value>,
    /// Path arguments of the producing request, kept so that a later
    /// request can bind sibling arguments consistently with this tuple.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub context: BTreeMap<String, Value>,
    pub origin_method: Method,
    pub origin_node: NodeId,
    pub sequence_no: u64,
    pub live: bool,
}

impl ResourceTuple {
    pub fn new(fields: BTreeMap<String, Value>, origin_method: Method, origin_node: NodeId) -> Self {
        ResourceTuple {
            fields,
            context: BTreeMap::new(),
            origin_method,
            origin_node,
            sequence_no: 0,
            live: true,
        }
    }

    pub fn with_context(mut self, context: BTreeMap<String, Value>) -> Self {
        self.context = context;
        self
    }

    fn preferred(&self) -> bool {
        self.origin_method.is_producer()
    }
}

/// Loose scalar equality: `7` and `"7"` denote the same path value.
pub fn same_scalar(a: &Value, b: &Value) -> bool {
    a == b || scalar_text(a) == scalar_text(b)
}

pub fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SubPool {
    tuples: VecDeque<ResourceTuple>,
    #[serde(skip)]
    capacity: usize,
}

impl SubPool {
    pub fn new(capacity: usize) -> Self {
        SubPool {
            tuples: VecDeque::new(),
            capacity: capacity.max(1),
        }
    }

    /// Appends with the given stamp, evicting the oldest tuples past capacity.
    pub fn push(&mut self, mut tuple: ResourceTuple, sequence_no: u64) {
        tuple.sequence_no = sequence_no;
        self.tuples.push_back(tuple);
        while self.tuples.len() > self.capacity {
            self.tuples.pop_front();
        }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> impl Iterator<Item = &ResourceTuple> {
        self.tuples.iter()
    }

    pub fn tuple(&self, sequence_no: u64) -> Option<&ResourceTuple> {
        self.tuples.iter().find(|t| t.sequence_no == sequence_no)
    }

    /// Field names present in live tuples, sorted.
    pub fn live_fields(&self) -> BTreeSet<&str> {
        self.tuples
            .iter()
            .filter(|t| t.live)
            .flat_map(|t| t.fields.keys().map(String::as_str))
            .collect()
    }

    /// Draws a value for `field` from live tuples, producer-origin tuples
    /// first. Returns the value and the stamp of its tuple.
    pub fn draw<R: Rng + ?Sized>(&self, field: &str, rng: &mut R) -> Option<(Value, u64)> {
        let wanted = normalize(field);
        let mut preferred = Vec::new();
        let mut fallback = Vec::new();
        for t in self.tuples.iter().filter(|t| t.live) {
            for (name, value) in &t.fields {
                if normalize(name) == wanted {
                    let entry = (value, t.sequence_no);
                    if t.preferred() {
                        preferred.push(entry);
                    } else {
                        fallback.push(entry);
                    }
                }
            }
        }
        let class = if preferred.is_empty() { fallback } else { preferred };
        if class.is_empty() {
            return None;
        }
        let (v, seq) = class[rng.gen_range(0..class.len())];
        Some((v.clone(), seq))
    }

    pub fn invalidate(&mut self, field: &str, value: &Value) -> usize {
        let mut n = 0;
        for t in self.tuples.iter_mut().filter(|t| t.live) {
            if t.fields.get(field).is_some_and(|v| same_scalar(v, value)) {
                t.live = false;
                n += 1;
            }
        }
        n
    }

    fn invalidate_context(&mut self, name: &str, value: &Value) -> usize {
        let mut n = 0;
        for t in self.tuples.iter_mut().filter(|t| t.live) {
            if t.context.get(name).is_some_and(|v| same_scalar(v, value)) {
                t.live = false;
                n += 1;
            }
        }
        n
    }
}

/// A value served by the pool with the location of its tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct Retrieved {
    pub value: Value,
    pub level: NodeId,
    pub sequence_no: u64,
}

#[derive(Debug, Clone)]
pub struct ResourcePool {
    sub_pools: BTreeMap<NodeId, SubPool>,
    capacity: usize,
    next_seq: u64,
}

impl Default for ResourcePool {
    fn default() -> Self {
        ResourcePool::new(DEFAULT_CAPACITY)
    }
}

impl ResourcePool {
    pub fn new(capacity: usize) -> Self {
        ResourcePool {
            sub_pools: BTreeMap::new(),
            capacity,
            next_seq: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Stores the tuple in the sub-pool of the node's nearest token
    /// ancestor and returns that sub-pool's key. Parameter roots have no
    /// token ancestor and store nothing.
    pub fn add(&mut self, forest: &ApiForest, node: NodeId, tuple: ResourceTuple) -> Option<NodeId> {
        if tuple.fields.is_empty() {
            return None;
        }
        let key = forest.nearest_token_ancestor(node);
        if !forest.node(key).kind.is_token() {
            return None;
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.sub_pools
            .entry(key)
            .or_insert_with(|| SubPool::new(self.capacity))
            .push(tuple, seq);
        Some(key)
    }

    pub fn sub_pool(&self, node: NodeId) -> Option<&SubPool> {
        self.sub_pools.get(&node)
    }

    pub fn keys(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.sub_pools.keys().copied()
    }

    /// Existing sub-pools on the token chain of `node`, nearest first.
    pub fn levels(&self, forest: &ApiForest, node: NodeId) -> Vec<(NodeId, &SubPool)> {
        forest
            .token_chain(node)
            .into_iter()
            .filter_map(|n| self.sub_pools.get(&n).map(|p| (n, p)))
            .collect()
    }

    pub fn retrieve<R: Rng + ?Sized>(
        &self,
        resource_id: &str,
        forest: &ApiForest,
        node: NodeId,
        rng: &mut R,
    ) -> Option<Value> {
        self.retrieve_entry(resource_id, forest, node, rng).map(|r| r.value)
    }

    pub fn retrieve_entry<R: Rng + ?Sized>(
        &self,
        resource_id: &str,
        forest: &ApiForest,
        node: NodeId,
        rng: &mut R,
    ) -> Option<Retrieved> {
        retrieve_from_levels(resource_id, &self.levels(forest, node), rng)
    }

    pub fn tuple(&self, level: NodeId, sequence_no: u64) -> Option<&ResourceTuple> {
        self.sub_pools.get(&level)?.tuple(sequence_no)
    }

    /// Marks dead every tuple in the node's sub-pool whose `field` equals
    /// `value`.
    pub fn invalidate(&mut self, forest: &ApiForest, node: NodeId, field: &str, value: &Value) -> usize {
        let key = forest.nearest_token_ancestor(node);
        self.sub_pools
            .get_mut(&key)
            .map_or(0, |p| p.invalidate(field, value))
    }

    /// Marks dead the tuples below `node` that were produced under path
    /// argument `name = value`.
    pub fn invalidate_descendants(
        &mut self,
        forest: &ApiForest,
        node: NodeId,
        name: &str,
        value: &Value,
    ) -> usize {
        let mut n = 0;
        for (&key, pool) in self.sub_pools.iter_mut() {
            if key != node && forest.is_ancestor(node, key) {
                n += pool.invalidate_context(name, value);
            }
        }
        n
    }

    /// JSON view keyed by endpoint, for debugging dumps.
    pub fn snapshot(&self, forest: &ApiForest) -> Value {
        let mut out = serde_json::Map::new();
        for (&key, pool) in &self.sub_pools {
            let tuples: Vec<&ResourceTuple> = pool.tuples().collect();
            out.insert(
                forest.endpoint_of(key),
                serde_json::to_value(tuples).unwrap_or(Value::Null),
            );
        }
        Value::Object(out)
    }
}

pub fn retrieve_from_levels<R: Rng + ?Sized>(
    resource_id: &str,
    levels: &[(NodeId, &SubPool)],
    rng: &mut R,
) -> Option<Retrieved> {
    levels.iter().find_map(|&(level, pool)| {
        pool.draw(resource_id, rng).map(|(value, sequence_no)| Retrieved {
            value,
            level,
            sequence_no,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{ApiOperation, ApiSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use serde_json::json;

    fn forest() -> ApiForest {
        let ops = [
            "/projects",
            "/projects/{id}",
            "/projects/{id}/branches",
            "/projects/{id}/branches/{branch}",
        ];
        let spec = ApiSpec {
            operations: ops
                .iter()
                .map(|p| ApiOperation {
                    path: p.to_string(),
                    method: Method::Get,
                    required_params: vec![],
                    optional_params: vec![],
                    response_fields: vec![],
                })
                .collect(),
            ..ApiSpec::default()
        };
        ApiForest::build(&spec)
    }

    // Node ids follow insertion: projects=0, {id}=1, branches=2, {branch}=3.
    fn tuple(fields: serde_json::Value, method: Method) -> ResourceTuple {
        let map = fields.as_object().unwrap().clone().into_iter().collect();
        ResourceTuple::new(map, method, 0)
    }

    #[test]
    fn add_lands_in_nearest_token_pool() {
        let f = forest();
        let mut pool = ResourcePool::new(8);
        assert_eq!(pool.add(&f, 0, tuple(json!({"id": 7, "name": "a", "path": "a"}), Method::Post)), Some(0));
        assert_eq!(pool.add(&f, 1, tuple(json!({"id": 8}), Method::Get)), Some(0));
        assert_eq!(pool.sub_pool(0).unwrap().len(), 2);
        assert!(pool.sub_pool(1).is_none());
        assert_eq!(pool.add(&f, 3, tuple(json!({"name": "dev"}), Method::Post)), Some(2));
        assert!(pool.keys().all(|k| f.node(k).kind.is_token()));
    }

    #[test]
    fn fifo_eviction() {
        let f = forest();
        let mut pool = ResourcePool::new(2);
        for i in 0..3 {
            pool.add(&f, 0, tuple(json!({ "id": i }), Method::Post));
        }
        // Reference FIFO: keep the last `capacity` insertions.
        let expected: Vec<u64> = (0..3u64).skip(1).collect();
        let got: Vec<u64> = pool.sub_pool(0).unwrap().tuples().map(|t| t.sequence_no).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn retrieve_walks_to_ancestors() {
        let f = forest();
        let mut pool = ResourcePool::new(8);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(pool.retrieve("id", &f, 2, &mut rng).is_none());
        pool.add(&f, 0, tuple(json!({"id": 7}), Method::Post));
        assert_eq!(pool.retrieve("id", &f, 2, &mut rng), Some(json!(7)));
        assert_eq!(pool.retrieve("ID", &f, 3, &mut rng), Some(json!(7)));
    }

    #[test]
    fn producer_origin_is_preferred() {
        let f = forest();
        let mut pool = ResourcePool::new(8);
        pool.add(&f, 0, tuple(json!({"id": 1}), Method::Get));
        pool.add(&f, 0, tuple(json!({"id": 2}), Method::Post));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            assert_eq!(pool.retrieve("id", &f, 1, &mut rng), Some(json!(2)));
        }
    }

    #[test]
    fn get_origin_still_served_alone() {
        let f = forest();
        let mut pool = ResourcePool::new(8);
        pool.add(&f, 0, tuple(json!({"id": 1}), Method::Get));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(pool.retrieve("id", &f, 1, &mut rng), Some(json!(1)));
    }

    #[test]
    fn invalidate_hides_values() {
        let f = forest();
        let mut pool = ResourcePool::new(8);
        for id in [5, 7, 7] {
            pool.add(&f, 0, tuple(json!({ "id": id }), Method::Post));
        }
        assert_eq!(pool.invalidate(&f, 1, "id", &json!("7")), 2);
        assert_eq!(pool.invalidate(&f, 1, "id", &json!(99)), 0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            assert_eq!(pool.retrieve("id", &f, 1, &mut rng), Some(json!(5)));
        }
        pool.invalidate(&f, 1, "id", &json!(5));
        assert!(pool.retrieve("id", &f, 1, &mut rng).is_none());
    }

    #[test]
    fn descendant_invalidation_uses_context() {
        let f = forest();
        let mut pool = ResourcePool::new(8);
        let ctx: BTreeMap<String, Value> = [("id".to_string(), json!(7))].into();
        pool.add(&f, 3, tuple(json!({"name": "dev"}), Method::Post).with_context(ctx));
        assert_eq!(pool.invalidate_descendants(&f, 1, "id", &json!(7)), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(pool.retrieve("name", &f, 3, &mut rng).is_none());
    }

    #[test]
    fn snapshot_is_keyed_by_endpoint() {
        let f = forest();
        let mut pool = ResourcePool::new(8);
        pool.add(&f, 1, tuple(json!({"id": 7}), Method::Post));
        let snap = pool.snapshot(&f);
        assert_eq!(snap["/projects"][0]["fields"]["id"], json!(7));
    }
}
