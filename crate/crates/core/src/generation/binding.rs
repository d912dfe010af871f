use rand::Rng;
use serde_json::Value;

use super::fuzz::{fuzz_value, unique_suffix};
use super::{Binding, GenOptions, Session, ValueSource};
use crate::matching::{fuzzy_match, normalize, AnnotationTable, PairKey, PairStore};
use crate::pool::{retrieve_from_levels, SubPool};
use crate::spec::{ApiOperation, Method, ParamLocation, ParamSpec};
use crate::tree::NodeId;

/// Required parameters plus the chosen optional ones, in declaration order.
pub(crate) fn selected_params<'a>(op: &'a ApiOperation, optional: &[String]) -> Vec<&'a ParamSpec> {
    op.required_params
        .iter()
        .chain(optional.iter().filter_map(|n| op.optional_params.iter().find(|p| &p.name == n)))
        .collect()
}

struct Matcher<'a, R: Rng> {
    table: &'a AnnotationTable,
    pairs: &'a PairStore,
    options: &'a GenOptions,
    rng: &'a mut R,
    operation: usize,
    method: Method,
}

impl<R: Rng> Matcher<'_, R> {
    /// Scored match against `levels`, then retrieval from the matched level
    /// outwards. Returns the binding and the tuple it came from.
    fn pooled(&mut self, param: &ParamSpec, levels: &[(NodeId, &SubPool)]) -> Option<(Binding, NodeId, u64)> {
        let resource = self.table.search(&param.name);
        let hit = fuzzy_match(
            &resource,
            levels,
            self.table,
            self.pairs,
            self.operation,
            &param.name,
            self.rng,
        )?;
        let from = levels.iter().position(|(l, _)| *l == hit.level).unwrap_or(0);
        let got = retrieve_from_levels(&hit.field, &levels[from..], self.rng)?;
        let value = self.decorate(param, got.value);
        let binding = Binding {
            value,
            source: ValueSource::Pool,
            pair: Some(PairKey {
                operation: self.operation,
                param_name: param.name.clone(),
                resource_id: hit.field,
            }),
        };
        Some((binding, got.level, got.sequence_no))
    }

    /// Reused names and paths collide when creating, so most of them get a
    /// fresh suffix.
    fn decorate(&mut self, param: &ParamSpec, value: Value) -> Value {
        let wanted = normalize(&param.name);
        let sensitive = self.options.uniqueness.iter().any(|u| normalize(u) == wanted);
        match value {
            Value::String(s)
                if self.method == Method::Post
                    && sensitive
                    && self.rng.gen_bool(self.options.suffix_probability.clamp(0.0, 1.0)) =>
            {
                Value::String(s + &unique_suffix(self.rng))
            }
            other => other,
        }
    }

    fn fuzz(&mut self, param: &ParamSpec) -> Binding {
        Binding {
            value: fuzz_value(param, &self.options.fuzz, self.rng),
            source: ValueSource::Fuzz,
            pair: None,
        }
    }
}

/// Binds against the hierarchical pool. Parameters anchored deeper in the
/// tree go first so that shallower path arguments can be taken from the
/// context of the tuple already chosen.
pub(crate) fn bind_tree(session: &mut Session, op: usize, node: NodeId, optional: &[String]) -> Vec<(String, Binding)> {
    let Session {
        spec,
        forest,
        table,
        pool,
        pairs,
        rng,
        options,
    } = session;
    let operation = &spec.operations[op];
    let params = selected_params(operation, optional);
    let anchors: Vec<NodeId> = params
        .iter()
        .map(|p| match p.location {
            ParamLocation::Path => forest.param_node(node, &p.name).unwrap_or(node),
            _ => node,
        })
        .collect();
    let mut order: Vec<usize> = (0..params.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(forest.node(anchors[i]).depth));

    let mut m = Matcher {
        table,
        pairs,
        options,
        rng,
        operation: op,
        method: operation.method,
    };
    let mut chosen: Vec<(NodeId, u64)> = Vec::new();
    let mut out: Vec<Option<Binding>> = vec![None; params.len()];
    for i in order {
        let param = params[i];
        let coherent = chosen
            .iter()
            .find_map(|&(level, seq)| pool.tuple(level, seq)?.context.get(&param.name).cloned());
        if let Some(value) = coherent {
            out[i] = Some(Binding {
                value,
                source: ValueSource::Context,
                pair: None,
            });
            continue;
        }
        let levels = pool.levels(forest, anchors[i]);
        out[i] = Some(match m.pooled(param, &levels) {
            Some((binding, level, seq)) => {
                chosen.push((level, seq));
                binding
            }
            None => m.fuzz(param),
        });
    }
    params
        .iter()
        .zip(out)
        .map(|(p, b)| (p.name.clone(), b.expect("every parameter bound")))
        .collect()
}

/// Binds against a single unstructured pool.
pub(crate) fn bind_flat(
    session: &mut Session,
    flat: &SubPool,
    flat_level: NodeId,
    op: usize,
    optional: &[String],
) -> Vec<(String, Binding)> {
    let Session {
        spec,
        table,
        pairs,
        rng,
        options,
        ..
    } = session;
    let operation = &spec.operations[op];
    let mut m = Matcher {
        table,
        pairs,
        options,
        rng,
        operation: op,
        method: operation.method,
    };
    let levels = [(flat_level, flat)];
    selected_params(operation, optional)
        .into_iter()
        .map(|p| {
            let b = match m.pooled(p, &levels) {
                Some((b, _, _)) => b,
                None => m.fuzz(p),
            };
            (p.name.clone(), b)
        })
        .collect()
}

/// Fuzz-only binding, used when nothing earlier can supply a value.
pub(crate) fn fuzz_binding<R: Rng>(param: &ParamSpec, options: &GenOptions, rng: &mut R) -> Binding {
    Binding {
        value: fuzz_value(param, &options.fuzz, rng),
        source: ValueSource::Fuzz,
        pair: None,
    }
}
