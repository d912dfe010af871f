//! Optional-parameter escalation.
//!
//! Level 1 tries every optional parameter alone. Each later level is built
//! from unions of the previous level's successful sets, restricted to
//! parameters that succeeded alone, and growing by exactly one parameter.
//! The first level without a success (or without candidates) ends it.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::spec::ApiOperation;

pub type OptionalSet = Vec<String>;

#[derive(Debug, Clone, Default, Serialize)]
pub struct EscalationState {
    /// Size of the sets most recently issued; 0 before the first level.
    pub level: usize,
    pub successful_singletons: BTreeSet<String>,
    /// Successful sets by level, each stored sorted.
    pub successful_sets: BTreeMap<usize, BTreeSet<OptionalSet>>,
    pub exhausted: bool,
}

impl EscalationState {
    pub fn record(&mut self, set: &[String], success: bool) {
        if !success || set.is_empty() {
            return;
        }
        let mut sorted = set.to_vec();
        sorted.sort();
        sorted.dedup();
        if sorted.len() == 1 {
            self.successful_singletons.insert(sorted[0].clone());
        }
        self.successful_sets.entry(sorted.len()).or_default().insert(sorted);
    }

    /// Largest successful sets found so far.
    pub fn frontier(&self) -> BTreeSet<OptionalSet> {
        self.successful_sets
            .iter()
            .next_back()
            .map(|(_, sets)| sets.clone())
            .unwrap_or_default()
    }
}

/// Issues the next level's optional sets and advances `state`.
///
/// With `ordered_pairs`, level 2 emits both orderings of every pair, which
/// gives the `m*(m-1)` count; otherwise sets are unordered.
pub fn escalate_optionals(
    op: &ApiOperation,
    state: &mut EscalationState,
    ordered_pairs: bool,
) -> Vec<OptionalSet> {
    if state.exhausted {
        return Vec::new();
    }
    if state.level == 0 {
        let sets: Vec<OptionalSet> = op
            .optional_params
            .iter()
            .map(|p| vec![p.name.clone()])
            .collect();
        if sets.is_empty() {
            state.exhausted = true;
        } else {
            state.level = 1;
        }
        return sets;
    }

    let previous = state.successful_sets.get(&state.level).cloned().unwrap_or_default();
    let next = state.level + 1;
    let mut candidates: BTreeSet<OptionalSet> = BTreeSet::new();
    let prev: Vec<&OptionalSet> = previous.iter().collect();
    for (i, a) in prev.iter().enumerate() {
        for b in &prev[i + 1..] {
            let union: BTreeSet<&String> = a.iter().chain(b.iter()).collect();
            if union.len() == next && union.iter().all(|n| state.successful_singletons.contains(*n)) {
                candidates.insert(union.into_iter().cloned().collect());
            }
        }
    }
    if candidates.is_empty() {
        state.exhausted = true;
        return Vec::new();
    }
    state.level = next;
    let mut sets: Vec<OptionalSet> = candidates.into_iter().collect();
    if ordered_pairs && next == 2 {
        sets = sets
            .into_iter()
            .flat_map(|s| {
                let rev: OptionalSet = s.iter().rev().cloned().collect();
                [s, rev]
            })
            .collect();
    }
    sets
}
