//! Name resolution: the annotation table, normalization-based fuzzy
//! matching, and adaptive scores for (parameter, resource) pairs.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{AnnotationError, ConfigError};
use crate::pool::SubPool;
use crate::tree::NodeId;

/// Folds case and drops spaces, underscores and hyphens.
pub fn normalize(name: &str) -> String {
    name.trim()
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '_' && *c != '-')
        .flat_map(char::to_lowercase)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceIdentity {
    #[serde(rename = "id")]
    pub canonical_id: String,
    pub names: BTreeSet<String>,
}

/// Alias sets naming the same resource. Name sets are disjoint after
/// normalization and each contains its canonical id.
#[derive(Debug, Clone, Default)]
pub struct AnnotationTable {
    entries: Vec<ResourceIdentity>,
    index: HashMap<String, usize>,
}

impl AnnotationTable {
    pub fn new(entries: Vec<ResourceIdentity>) -> Result<Self, AnnotationError> {
        let mut table = AnnotationTable::default();
        for mut entry in entries {
            entry.names.insert(entry.canonical_id.clone());
            let slot = table.entries.len();
            for name in &entry.names {
                let key = normalize(name);
                if let Some(&other) = table.index.get(&key) {
                    if other != slot {
                        return Err(AnnotationError::OverlappingNames {
                            name: name.clone(),
                            first: table.entries[other].canonical_id.clone(),
                            second: entry.canonical_id.clone(),
                        });
                    }
                }
                table.index.insert(key, slot);
            }
            table.entries.push(entry);
        }
        Ok(table)
    }

    /// Reads the JSON list form `[{"id": "...", "names": ["..."]}]`.
    pub fn from_json(text: &str) -> Result<Self, AnnotationError> {
        let entries: Vec<ResourceIdentity> = serde_json::from_str(text)?;
        Self::new(entries)
    }

    pub fn entries(&self) -> &[ResourceIdentity] {
        &self.entries
    }

    /// Canonical id whose name set holds `name`, else `name` unchanged.
    pub fn search(&self, name: &str) -> String {
        match self.index.get(&normalize(name)) {
            Some(&i) => self.entries[i].canonical_id.clone(),
            None => name.to_string(),
        }
    }

    /// Whether a pool field denotes `resource_id` under this table.
    pub fn field_matches(&self, field: &str, resource_id: &str) -> bool {
        normalize(&self.search(field)) == normalize(resource_id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreParams {
    pub initial: f64,
    pub increase: f64,
    pub decrease: f64,
    pub threshold: f64,
    pub epsilon: f64,
}

impl Default for ScoreParams {
    fn default() -> Self {
        ScoreParams {
            initial: 0.5,
            increase: 0.1,
            decrease: 0.2,
            threshold: 0.2,
            epsilon: 0.1,
        }
    }
}

impl ScoreParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let fields = [
            ("initial", self.initial),
            ("increase", self.increase),
            ("decrease", self.decrease),
            ("threshold", self.threshold),
            ("epsilon", self.epsilon),
        ];
        for (name, v) in fields {
            if !(0.0..=1.0).contains(&v) {
                return Err(ConfigError::BadScore(name));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchPair {
    pub param_name: String,
    pub resource_id: String,
    pub score: f64,
    pub uses: u32,
    pub successes: u32,
}

impl MatchPair {
    pub fn new(param_name: &str, resource_id: &str, initial: f64) -> Self {
        MatchPair {
            param_name: param_name.to_string(),
            resource_id: resource_id.to_string(),
            score: initial,
            uses: 0,
            successes: 0,
        }
    }
}

pub fn increase_score(mut pair: MatchPair, params: &ScoreParams) -> MatchPair {
    pair.score = (pair.score + params.increase).min(1.0);
    pair.successes += 1;
    pair.uses += 1;
    pair
}

pub fn decrease_score(mut pair: MatchPair, params: &ScoreParams) -> MatchPair {
    pair.score = (pair.score - params.decrease).max(0.0);
    pair.uses += 1;
    pair
}

/// Pairs are scoped to the operation whose parameter they bind.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PairKey {
    pub operation: usize,
    pub param_name: String,
    pub resource_id: String,
}

#[derive(Debug, Clone, Default)]
pub struct PairStore {
    pairs: BTreeMap<PairKey, MatchPair>,
    params: ScoreParams,
}

impl PairStore {
    pub fn new(params: ScoreParams) -> Self {
        PairStore {
            pairs: BTreeMap::new(),
            params,
        }
    }

    pub fn params(&self) -> &ScoreParams {
        &self.params
    }

    pub fn score(&self, key: &PairKey) -> f64 {
        self.pairs.get(key).map_or(self.params.initial, |p| p.score)
    }

    pub fn get(&self, key: &PairKey) -> Option<&MatchPair> {
        self.pairs.get(key)
    }

    fn entry(&mut self, key: &PairKey) -> MatchPair {
        self.pairs
            .remove(key)
            .unwrap_or_else(|| MatchPair::new(&key.param_name, &key.resource_id, self.params.initial))
    }

    pub fn reward(&mut self, key: &PairKey) {
        let pair = increase_score(self.entry(key), &self.params);
        self.pairs.insert(key.clone(), pair);
    }

    pub fn penalize(&mut self, key: &PairKey) {
        let pair = decrease_score(self.entry(key), &self.params);
        self.pairs.insert(key.clone(), pair);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PairKey, &MatchPair)> {
        self.pairs.iter()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Outcome of a fuzzy match: the pool field chosen and the sub-pool level
/// it was found at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzyHit {
    pub field: String,
    pub level: NodeId,
}

/// Searches `levels` (nearest first) for live pool fields denoting
/// `resource_id` whose pair score clears the threshold.
///
/// The nearest level with any candidate wins and one of its candidates is
/// drawn uniformly. With probability epsilon nothing is returned, whatever
/// the pool holds.
#[allow(clippy::too_many_arguments)]
pub fn fuzzy_match<R: Rng + ?Sized>(
    resource_id: &str,
    levels: &[(NodeId, &SubPool)],
    table: &AnnotationTable,
    pairs: &PairStore,
    operation: usize,
    param_name: &str,
    rng: &mut R,
) -> Option<FuzzyHit> {
    let params = pairs.params();
    if params.epsilon > 0.0 && rng.gen::<f64>() < params.epsilon {
        return None;
    }
    for &(level, pool) in levels {
        let candidates: Vec<&str> = pool
            .live_fields()
            .into_iter()
            .filter(|f| table.field_matches(f, resource_id))
            .filter(|f| {
                let key = PairKey {
                    operation,
                    param_name: param_name.to_string(),
                    resource_id: f.to_string(),
                };
                pairs.score(&key) >= params.threshold
            })
            .collect();
        if !candidates.is_empty() {
            let pick = candidates[rng.gen_range(0..candidates.len())];
            return Some(FuzzyHit {
                field: pick.to_string(),
                level,
            });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pool::ResourceTuple;
    use crate::spec::Method;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use serde_json::json;

    fn regex_free_oracle(s: &str) -> String {
        let mut out = String::new();
        for c in s.trim().to_lowercase().chars() {
            if c == '_' || c == '-' || c.is_whitespace() {
                continue;
            }
            out.push(c);
        }
        out
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize("Order_By"), "orderby");
        assert_eq!(normalize(""), "");
        assert_eq!(normalize("created at"), normalize("created_at"));
        assert_eq!(normalize("  Project-ID "), "projectid");
    }

    fn table() -> AnnotationTable {
        AnnotationTable::from_json(r#"[{"id": "id", "names": ["id", "path"]}]"#).unwrap()
    }

    #[test]
    fn search_finds_canonical_or_passes_through() {
        let t = table();
        assert_eq!(t.search("path"), "id");
        assert_eq!(t.search("PATH"), "id");
        assert_eq!(t.search("branch"), "branch");
        assert_eq!(AnnotationTable::default().search("x_Y"), "x_Y");
    }

    #[test]
    fn canonical_is_member_and_overlaps_rejected() {
        let t = AnnotationTable::from_json(r#"[{"id": "user", "names": ["author"]}]"#).unwrap();
        assert_eq!(t.search("user"), "user");
        assert_eq!(t.search("author"), "user");
        let err = AnnotationTable::from_json(
            r#"[{"id": "a", "names": ["x"]}, {"id": "b", "names": ["X"]}]"#,
        )
        .unwrap_err();
        assert!(matches!(err, AnnotationError::OverlappingNames { .. }));
        assert!(AnnotationTable::from_json("{").is_err());
    }

    #[test]
    fn score_arithmetic_and_clamps() {
        let p = ScoreParams::default();
        let pair = MatchPair::new("id", "id", 0.5);
        let up = increase_score(pair.clone(), &p);
        assert!((up.score - 0.6).abs() < 1e-12);
        assert_eq!((up.uses, up.successes), (1, 1));
        let zero = MatchPair { score: 0.0, ..pair.clone() };
        assert_eq!(decrease_score(zero, &p).score, 0.0);
        let one = MatchPair { score: 1.0, ..pair.clone() };
        assert_eq!(increase_score(one, &p).score, 1.0);
        let down = decrease_score(pair, &p);
        assert_eq!((down.uses, down.successes), (1, 0));
    }

    #[test]
    fn two_decreases_fall_below_threshold() {
        let p = ScoreParams::default();
        let mut pair = MatchPair::new("id", "description", p.initial);
        pair = decrease_score(pair, &p);
        assert!(pair.score >= p.threshold);
        pair = decrease_score(pair, &p);
        assert!(pair.score < p.threshold);
    }

    fn pool_with(fields: &[(&str, serde_json::Value)]) -> SubPool {
        let mut pool = SubPool::new(8);
        let tuple = ResourceTuple::new(
            fields.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            Method::Post,
            0,
        );
        pool.push(tuple, 0);
        pool
    }

    #[test]
    fn fuzzy_match_without_epsilon() {
        let params = ScoreParams { epsilon: 0.0, ..ScoreParams::default() };
        let pairs = PairStore::new(params);
        let t = AnnotationTable::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let parent = pool_with(&[("id", json!(7)), ("name", json!("a")), ("path", json!("a"))]);
        let empty = SubPool::new(8);
        let levels = [(5, &empty), (1, &parent)];
        let hit = fuzzy_match("id", &levels, &t, &pairs, 0, "id", &mut rng).unwrap();
        assert_eq!(hit, FuzzyHit { field: "id".into(), level: 1 });
        assert!(fuzzy_match("branch", &levels, &t, &pairs, 0, "branch", &mut rng).is_none());
        assert!(fuzzy_match("id", &[(5, &empty)], &t, &pairs, 0, "id", &mut rng).is_none());
    }

    #[test]
    fn nearest_level_shadows_ancestors() {
        let params = ScoreParams { epsilon: 0.0, ..ScoreParams::default() };
        let pairs = PairStore::new(params);
        let t = table();
        let near = pool_with(&[("path", json!("p"))]);
        let far = pool_with(&[("id", json!(1))]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            let hit = fuzzy_match("id", &[(2, &near), (1, &far)], &t, &pairs, 0, "id", &mut rng);
            assert_eq!(hit.unwrap().level, 2);
        }
    }

    #[test]
    fn low_scored_pairs_are_skipped() {
        let params = ScoreParams { epsilon: 0.0, ..ScoreParams::default() };
        let mut pairs = PairStore::new(params);
        let key = PairKey { operation: 0, param_name: "id".into(), resource_id: "id".into() };
        pairs.penalize(&key);
        pairs.penalize(&key);
        let pool = pool_with(&[("id", json!(1))]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = AnnotationTable::default();
        assert!(fuzzy_match("id", &[(0, &pool)], &t, &pairs, 0, "id", &mut rng).is_none());
        // Other operations keep their own pair.
        assert!(fuzzy_match("id", &[(0, &pool)], &t, &pairs, 1, "id", &mut rng).is_some());
    }

    #[test]
    fn epsilon_one_always_declines() {
        let params = ScoreParams { epsilon: 1.0, ..ScoreParams::default() };
        let pairs = PairStore::new(params);
        let pool = pool_with(&[("id", json!(1))]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = AnnotationTable::default();
        for _ in 0..20 {
            assert!(fuzzy_match("id", &[(0, &pool)], &t, &pairs, 0, "id", &mut rng).is_none());
        }
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(s in "\\PC{0,24}") {
            let once = normalize(&s);
            prop_assert_eq!(normalize(&once), once);
        }

        #[test]
        fn normalize_agrees_with_oracle(s in "[a-zA-Z _\\-]{0,24}") {
            prop_assert_eq!(normalize(&s), regex_free_oracle(&s));
        }

        #[test]
        fn search_agrees_with_linear_scan(
            sets in proptest::collection::vec(proptest::collection::btree_set("[a-z]{1,3}", 1..4), 0..5),
            query in "[a-z]{1,3}",
        ) {
            // Build disjoint entries by dropping names already taken.
            let mut taken = BTreeSet::new();
            let mut entries = Vec::new();
            for (i, names) in sets.into_iter().enumerate() {
                let names: BTreeSet<String> = names.into_iter().filter(|n| taken.insert(n.clone())).collect();
                if names.is_empty() { continue; }
                let canonical = format!("r{i}");
                if !taken.insert(canonical.clone()) { continue; }
                entries.push(ResourceIdentity { canonical_id: canonical, names });
            }
            let table = AnnotationTable::new(entries.clone()).unwrap();
            let expected = entries
                .iter()
                .find(|e| e.canonical_id == query || e.names.contains(&query))
                .map(|e| e.canonical_id.clone())
                .unwrap_or_else(|| query.clone());
            prop_assert_eq!(table.search(&query), expected);
        }
    }
}
