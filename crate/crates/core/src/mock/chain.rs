use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::{error, MockRequest, Service};
use crate::execution::HttpResponse;
use crate::spec::Method;

/// Number of unrelated `/dN` collections served next to the chain.
pub const CHAIN_DISTRACTORS: usize = 10;

const LEVELS: [&str; 4] = ["a", "b", "c", "d"];

/// A four-level creation chain `/a/{id}/b/{b_id}/c/{c_id}/d/{d_id}` plus
/// flat distractor collections. Every resource answers `{id, name}` and all
/// ids come from one counter, so an id is only valid under its own parent.
#[derive(Debug, Clone, Default)]
pub struct ChainMock {
    /// id -> (level, parent id, name)
    entities: BTreeMap<u64, (usize, Option<u64>, String)>,
    distractors: BTreeMap<u64, (usize, String)>,
    next_id: u64,
}

impl ChainMock {
    pub fn new() -> Self {
        Self::default()
    }

    fn take_id(&mut self) -> u64 {
        self.next_id += 1;
        self.next_id
    }

    /// Resolves `[a, id, b, b_id, ...]` and returns the id of the deepest
    /// entity named, after checking every parent link.
    fn resolve(&self, segs: &[&str]) -> Result<Option<u64>, HttpResponse> {
        let mut parent: Option<u64> = None;
        for (level, pair) in segs.chunks(2).enumerate() {
            if level >= LEVELS.len() || pair[0] != LEVELS[level] {
                return Err(error(404, "not found"));
            }
            if pair.len() == 1 {
                break;
            }
            let id: u64 = pair[1].parse().map_err(|_| error(404, "not found"))?;
            match self.entities.get(&id) {
                Some((l, p, _)) if *l == level && *p == parent => parent = Some(id),
                _ => return Err(error(404, "not found")),
            }
        }
        Ok(parent)
    }
}

fn name_of(req: &MockRequest) -> Option<String> {
    req.body_str("name").filter(|s| !s.is_empty()).map(String::from)
}

impl Service for ChainMock {
    fn handle(&mut self, req: &MockRequest) -> HttpResponse {
        let segs: Vec<&str> = req.segments.iter().map(String::as_str).collect();
        if let Some(first) = segs.first() {
            if let Some(n) = first.strip_prefix('d').and_then(|d| d.parse::<usize>().ok()) {
                if n >= CHAIN_DISTRACTORS || segs.len() != 1 {
                    return error(404, "not found");
                }
                return match req.method {
                    Method::Get => {
                        let items: Vec<Value> = self
                            .distractors
                            .iter()
                            .filter(|(_, (k, _))| *k == n)
                            .map(|(id, (_, name))| json!({ "id": id, "name": name }))
                            .collect();
                        HttpResponse::json(200, &Value::Array(items))
                    }
                    Method::Post => match name_of(req) {
                        Some(name) => {
                            let id = self.take_id();
                            self.distractors.insert(id, (n, name.clone()));
                            HttpResponse::json(201, &json!({ "id": id, "name": name }))
                        }
                        None => error(400, "name is required"),
                    },
                    _ => error(405, "method not allowed"),
                };
            }
        }
        if segs.is_empty() {
            return error(404, "not found");
        }
        let parent = match self.resolve(&segs) {
            Ok(p) => p,
            Err(r) => return r,
        };
        let level = (segs.len() - 1) / 2;
        let collection = segs.len() % 2 == 1;
        match (req.method, collection) {
            (Method::Post, true) => match name_of(req) {
                Some(name) => {
                    let id = self.take_id();
                    self.entities.insert(id, (level, parent, name.clone()));
                    HttpResponse::json(201, &json!({ "id": id, "name": name }))
                }
                None => error(400, "name is required"),
            },
            (Method::Get, false) if level == LEVELS.len() - 1 => {
                let id = parent.expect("item path names an id");
                let name = &self.entities[&id].2;
                HttpResponse::json(200, &json!({ "id": id, "name": name }))
            }
            _ => error(405, "method not allowed"),
        }
    }
}
