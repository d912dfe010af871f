use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::spec::Method;

/// Inclusive range the POST repetition count is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KRange {
    pub min: u32,
    pub max: u32,
}

impl Default for KRange {
    fn default() -> Self {
        KRange { min: 2, max: 5 }
    }
}

impl KRange {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.min >= 1 && self.min <= self.max && self.max <= 16 {
            Ok(())
        } else {
            Err(ConfigError::BadKRange(self.min, self.max))
        }
    }
}

pub fn next_k<R: Rng + ?Sized>(range: KRange, rng: &mut R) -> u32 {
    rng.gen_range(range.min..=range.max)
}

/// Per-node request order: one GET, `k` POSTs, PUT, (PATCH), DELETE.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MethodTemplate {
    pub k: u32,
    pub include_patch: bool,
}

impl MethodTemplate {
    pub fn new(k: u32, include_patch: bool) -> Self {
        MethodTemplate {
            k: k.max(1),
            include_patch,
        }
    }

    pub fn full_sequence(&self) -> Vec<Method> {
        let mut seq = vec![Method::Get];
        seq.extend(std::iter::repeat_n(Method::Post, self.k as usize));
        seq.push(Method::Put);
        if self.include_patch {
            seq.push(Method::Patch);
        }
        seq.push(Method::Delete);
        seq
    }

    /// Template order restricted to `supported`, as (method, repetitions).
    pub fn plan(&self, supported: impl IntoIterator<Item = Method>) -> Vec<(Method, u32)> {
        let supported: Vec<Method> = supported.into_iter().collect();
        let mut order = vec![Method::Get, Method::Post, Method::Put];
        if self.include_patch {
            order.push(Method::Patch);
        }
        order.push(Method::Delete);
        order
            .into_iter()
            .filter(|m| supported.contains(m))
            .map(|m| (m, if m == Method::Post { self.k } else { 1 }))
            .collect()
    }
}

/// Checks one node's method sequence against the template ordering: GET
/// first when present, every POST before PUT, PUT before DELETE.
pub fn respects_template(seq: &[Method]) -> bool {
    let rank = |m: &Method| match m {
        Method::Get => 0,
        Method::Post => 1,
        Method::Put => 2,
        Method::Patch => 3,
        Method::Delete => 4,
    };
    seq.windows(2).all(|w| rank(&w[0]) <= rank(&w[1]))
        && seq.iter().filter(|m| **m == Method::Get).count() <= 1
}
