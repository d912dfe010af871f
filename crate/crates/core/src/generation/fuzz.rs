use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::spec::{ParamSpec, ValueType};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FuzzRange {
    /// Half-open integer range `[int_min, int_max)`.
    pub int_min: i64,
    pub int_max: i64,
    pub max_string_len: usize,
}

impl Default for FuzzRange {
    fn default() -> Self {
        FuzzRange {
            int_min: -(1 << 31),
            int_max: 1 << 31,
            max_string_len: 32,
        }
    }
}

// Mixed scripts for the UTF-8 branch of string fuzzing.
const UTF8_RANGES: [(u32, u32); 5] = [
    (0x00A1, 0x00FF),
    (0x0400, 0x04FF),
    (0x3040, 0x309F),
    (0x4E00, 0x4FFF),
    (0x1F600, 0x1F64F),
];

pub fn fuzz_value<R: Rng + ?Sized>(spec: &ParamSpec, range: &FuzzRange, rng: &mut R) -> Value {
    match spec.value_type {
        ValueType::String => Value::String(fuzz_string(range.max_string_len, rng)),
        ValueType::Integer => Value::from(rng.gen_range(range.int_min..range.int_max)),
        ValueType::Number => {
            let x = rng.gen_range(range.int_min as f64..range.int_max as f64);
            serde_json::Number::from_f64(x).map_or(Value::from(0), Value::Number)
        }
        ValueType::Boolean => Value::Bool(rng.gen()),
        ValueType::Object => Value::Object(serde_json::Map::new()),
    }
}

/// Random ASCII-printable or multi-script UTF-8 text, 1 to `max_len` chars.
pub fn fuzz_string<R: Rng + ?Sized>(max_len: usize, rng: &mut R) -> String {
    let len = rng.gen_range(1..=max_len.max(1));
    if rng.gen_bool(0.5) {
        (0..len).map(|_| rng.gen_range(0x20u8..0x7f) as char).collect()
    } else {
        (0..len)
            .map(|_| {
                let (lo, hi) = UTF8_RANGES[rng.gen_range(0..UTF8_RANGES.len())];
                char::from_u32(rng.gen_range(lo..=hi)).unwrap_or('?')
            })
            .collect()
    }
}

/// Short suffix appended to uniqueness-sensitive values.
pub fn unique_suffix<R: Rng + ?Sized>(rng: &mut R) -> String {
    const ALPHABET: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789";
    let tail: String = (0..6)
        .map(|_| ALPHABET[rng.gen_range(0..ALPHABET.len())] as char)
        .collect();
    format!("_{tail}")
}
