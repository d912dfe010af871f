use std::collections::{BTreeMap, BTreeSet};

use serde_json::Value;

use super::transport::{ExecutionResult, StatusClass};
use crate::generation::{Session, TestCase};
use crate::matching::PairStore;
use crate::pool::ResourceTuple;
use crate::spec::{path_segments, ApiOperation, Method, ParamLocation, Segment};

/// Elements taken from a top-level array response.
pub const MAX_ARRAY_TUPLES: usize = 8;
const MAX_VALUE_DEPTH: usize = 8;

fn flatten_value(value: &Value, prefix: &str, depth: usize, out: &mut BTreeMap<String, Value>) {
    if depth > MAX_VALUE_DEPTH {
        return;
    }
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten_value(v, &key, depth + 1, out);
            }
        }
        Value::Array(items) => {
            if let Some(first) = items.first() {
                if first.is_object() {
                    flatten_value(first, prefix, depth + 1, out);
                }
            }
        }
        Value::Null => {}
        scalar => {
            if !prefix.is_empty() {
                out.insert(prefix.to_string(), scalar.clone());
            }
        }
    }
}

/// Fields of one response object restricted to those the success schema
/// declares.
fn schema_fields(op: &ApiOperation, value: &Value) -> BTreeMap<String, Value> {
    let declared: BTreeSet<&str> = op.response_fields.iter().map(|(f, _)| f.as_str()).collect();
    let mut all = BTreeMap::new();
    flatten_value(value, "", 0, &mut all);
    all.retain(|k, _| declared.contains(k.as_str()));
    all
}

/// Tuples harvested from a successful exchange. A JSON object yields one
/// tuple, an array one per element. POST and PUT tuples also carry the
/// body values sent, and every tuple records the path arguments used.
pub fn extract_tuples(op: &ApiOperation, case: &TestCase, result: &ExecutionResult) -> Vec<ResourceTuple> {
    let context: BTreeMap<String, Value> = path_segments(&op.path)
        .filter_map(|s| match s {
            Segment::Param(name) => case.binding(name).map(|b| (name.to_string(), b.value.clone())),
            Segment::Token(_) => None,
        })
        .collect();
    let echo: BTreeMap<String, Value> = if op.method.is_producer() {
        case.bindings
            .iter()
            .filter(|(n, _)| op.param(n).is_some_and(|p| p.location == ParamLocation::Body))
            .map(|(n, b)| (n.clone(), b.value.clone()))
            .collect()
    } else {
        BTreeMap::new()
    };

    let mut field_sets: Vec<BTreeMap<String, Value>> = match &result.json {
        Some(Value::Array(items)) => items
            .iter()
            .take(MAX_ARRAY_TUPLES)
            .map(|item| schema_fields(op, item))
            .filter(|f| !f.is_empty())
            .collect(),
        Some(v @ Value::Object(_)) => {
            let mut fields = echo.clone();
            fields.extend(schema_fields(op, v));
            vec![fields]
        }
        _ => vec![echo],
    };
    field_sets.retain(|f| !f.is_empty());
    field_sets
        .into_iter()
        .map(|fields| ResourceTuple::new(fields, op.method, case.node).with_context(context.clone()))
        .collect()
}

pub fn update_scores(case: &TestCase, class: StatusClass, pairs: &mut PairStore) {
    match class {
        StatusClass::Success | StatusClass::Redirect => case.pairs().for_each(|k| pairs.reward(k)),
        StatusClass::ClientError => case.pairs().for_each(|k| pairs.penalize(k)),
        StatusClass::ServerError | StatusClass::TransportError => {}
    }
}

/// The resource a DELETE removed: its path argument and the pool fields
/// that may hold its value.
#[derive(Debug, Clone, PartialEq)]
pub struct Deleted {
    pub param: String,
    pub value: Value,
    pub fields: Vec<String>,
}

pub fn deleted_resource(op: &ApiOperation, case: &TestCase) -> Option<Deleted> {
    if op.method != Method::Delete {
        return None;
    }
    let param = path_segments(&op.path)
        .filter_map(|s| match s {
            Segment::Param(n) => Some(n),
            Segment::Token(_) => None,
        })
        .last()?;
    let binding = case.binding(param)?;
    let mut fields = vec![param.to_string()];
    if let Some(pair) = &binding.pair {
        if pair.resource_id != param {
            fields.push(pair.resource_id.clone());
        }
    }
    Some(Deleted {
        param: param.to_string(),
        value: binding.value.clone(),
        fields,
    })
}

/// Updates pool and scores after one exchange of the tree strategy and
/// returns the number of tuples stored.
pub fn process_result(case: &TestCase, result: &ExecutionResult, s: &mut Session) -> usize {
    update_scores(case, result.class, &mut s.pairs);
    if !result.class.is_success() {
        return 0;
    }
    let op = &s.spec.operations[case.operation];
    let mut added = 0;
    for tuple in extract_tuples(op, case, result) {
        if s.pool.add(&s.forest, case.node, tuple).is_some() {
            added += 1;
        }
    }
    if result.class == StatusClass::Success {
        if let Some(gone) = deleted_resource(op, case) {
            for field in &gone.fields {
                s.pool.invalidate(&s.forest, case.node, field, &gone.value);
            }
            if let Some(param_node) = s.forest.param_node(case.node, &gone.param) {
                s.pool
                    .invalidate_descendants(&s.forest, param_node, &gone.param, &gone.value);
            }
        }
    }
    added
}
