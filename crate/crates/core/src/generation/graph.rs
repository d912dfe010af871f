//! Producer/consumer dependency graph over operations.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::matching::{AnnotationTable, PairKey, PairStore};
use crate::spec::ApiSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DependencyEdge {
    pub producer: usize,
    pub consumer: usize,
    /// Response field of the producer.
    pub field: String,
    /// Required parameter of the consumer.
    pub param: String,
    pub score: f64,
}

#[derive(Debug, Clone, Default)]
pub struct DependencyGraph {
    nodes: usize,
    edges: Vec<DependencyEdge>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct TopoResult {
    pub order: Vec<usize>,
    /// Edges removed to break cycles, in removal order.
    pub dropped: Vec<DependencyEdge>,
}

impl DependencyGraph {
    /// One edge per (producer, consumer, parameter): the first response
    /// field of the producer that denotes the parameter's resource.
    pub fn build(spec: &ApiSpec, table: &AnnotationTable, pairs: &PairStore) -> Self {
        let mut edges = Vec::new();
        for (c, consumer) in spec.operations.iter().enumerate() {
            for param in &consumer.required_params {
                let resource = table.search(&param.name);
                for (p, producer) in spec.operations.iter().enumerate() {
                    if p == c {
                        continue;
                    }
                    let field = producer
                        .response_fields
                        .iter()
                        .map(|(f, _)| f)
                        .find(|f| table.field_matches(f, &resource));
                    if let Some(field) = field {
                        let key = PairKey {
                            operation: c,
                            param_name: param.name.clone(),
                            resource_id: field.clone(),
                        };
                        edges.push(DependencyEdge {
                            producer: p,
                            consumer: c,
                            field: field.clone(),
                            param: param.name.clone(),
                            score: pairs.score(&key),
                        });
                    }
                }
            }
        }
        DependencyGraph {
            nodes: spec.operations.len(),
            edges,
        }
    }

    pub fn from_edges(nodes: usize, edges: Vec<DependencyEdge>) -> Self {
        DependencyGraph { nodes, edges }
    }

    pub fn len(&self) -> usize {
        self.nodes
    }

    pub fn is_empty(&self) -> bool {
        self.nodes == 0
    }

    pub fn edges(&self) -> &[DependencyEdge] {
        &self.edges
    }

    /// Distinct consumers of `op`, ascending.
    pub fn successors(&self, op: usize) -> BTreeSet<usize> {
        self.edges
            .iter()
            .filter(|e| e.producer == op)
            .map(|e| e.consumer)
            .collect()
    }

    pub fn in_degree(&self, op: usize) -> usize {
        self.edges
            .iter()
            .filter(|e| e.consumer == op)
            .map(|e| e.producer)
            .collect::<BTreeSet<_>>()
            .len()
    }

    /// Kahn's algorithm, smallest index first among ready nodes. When it
    /// stalls on a cycle the weakest edge of that cycle is dropped (ties go
    /// to the edge whose producer comes latest) and sorting resumes.
    pub fn topo_order(&self) -> TopoResult {
        let mut live: Vec<bool> = vec![true; self.edges.len()];
        let mut placed = vec![false; self.nodes];
        let mut result = TopoResult::default();
        while result.order.len() < self.nodes {
            let mut indeg = vec![0usize; self.nodes];
            for (i, e) in self.edges.iter().enumerate() {
                if live[i] && !placed[e.producer] && !placed[e.consumer] {
                    indeg[e.consumer] += 1;
                }
            }
            let ready = (0..self.nodes).find(|&n| !placed[n] && indeg[n] == 0);
            match ready {
                Some(n) => {
                    placed[n] = true;
                    result.order.push(n);
                }
                None => {
                    let cycle = self.find_cycle(&live, &placed);
                    let weakest = cycle
                        .into_iter()
                        .min_by(|&a, &b| {
                            let (ea, eb) = (&self.edges[a], &self.edges[b]);
                            ea.score
                                .total_cmp(&eb.score)
                                .then(eb.producer.cmp(&ea.producer))
                                .then(eb.consumer.cmp(&ea.consumer))
                        })
                        .expect("a stalled sort has a cycle");
                    // Dropping one dependency removes every parallel edge
                    // between the same two operations.
                    let (p, c) = (self.edges[weakest].producer, self.edges[weakest].consumer);
                    for (i, e) in self.edges.iter().enumerate() {
                        if live[i] && e.producer == p && e.consumer == c {
                            live[i] = false;
                            result.dropped.push(e.clone());
                        }
                    }
                }
            }
        }
        if !result.dropped.is_empty() {
            let listed: Vec<String> = result
                .dropped
                .iter()
                .take(6)
                .map(|e| format!("{}->{} ({})", e.producer, e.consumer, e.param))
                .collect();
            let more = result.dropped.len().saturating_sub(listed.len());
            let tail = if more > 0 { format!(" and {more} more") } else { String::new() };
            log::warn!("cyclic dependency: dropped {}{tail}", listed.join(", "));
        }
        result
    }

    /// Edge indices of one cycle among unplaced nodes.
    fn find_cycle(&self, live: &[bool], placed: &[bool]) -> Vec<usize> {
        let mut out_edges: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            if live[i] && !placed[e.producer] && !placed[e.consumer] {
                out_edges.entry(e.producer).or_default().push(i);
            }
        }
        // Every unplaced node has an unplaced predecessor, so walking
        // backwards along incoming edges must revisit a node.
        let mut in_edge: BTreeMap<usize, usize> = BTreeMap::new();
        for edges in out_edges.values() {
            for &i in edges {
                in_edge.entry(self.edges[i].consumer).or_insert(i);
            }
        }
        let start = (0..self.nodes).find(|&n| !placed[n]).expect("unplaced node");
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        let mut trail: Vec<usize> = Vec::new();
        let mut cur = start;
        loop {
            if let Some(&pos) = seen.get(&cur) {
                return trail[pos..].to_vec();
            }
            seen.insert(cur, trail.len());
            let e = in_edge[&cur];
            trail.push(e);
            cur = self.edges[e].producer;
        }
    }
}
