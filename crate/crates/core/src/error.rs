use thiserror::Error;

use crate::spec::Method;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("malformed document: {0}")]
    MalformedDocument(String),
    #[error("unresolved reference `{0}`")]
    UnresolvedReference(String),
    #[error("duplicate operation {method} {path}")]
    DuplicateOperation { path: String, method: Method },
    #[error("schema nesting exceeds depth cap of {cap}")]
    SchemaTooDeep { cap: usize },
}

#[derive(Debug, Error)]
pub enum RequestError {
    #[error("required parameter `{0}` has no binding")]
    MissingBinding(String),
    #[error("invalid url: {0}")]
    InvalidUrl(String),
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("duration budget must be positive")]
    ZeroDuration,
    #[error("rate limit must be positive")]
    ZeroRate,
    #[error("k range {0}..={1} must satisfy 1 <= min <= max <= 16")]
    BadKRange(u32, u32),
    #[error("score parameter `{0}` must lie in [0, 1]")]
    BadScore(&'static str),
    #[error("pool capacity must be positive")]
    ZeroCapacity,
}

#[derive(Debug, Error)]
pub enum AnnotationError {
    #[error("annotation file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("alias `{name}` appears in both `{first}` and `{second}`")]
    OverlappingNames {
        name: String,
        first: String,
        second: String,
    },
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Annotation(#[from] AnnotationError),
    #[error("target unreachable: {0}")]
    Unreachable(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}
