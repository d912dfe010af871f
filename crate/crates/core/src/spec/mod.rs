//! Normalized in-memory model of a Swagger 2.0 / OpenAPI 3.0 document.
//!
//! Every operation is identified by its `(path, method)` pair. Paths are
//! stored in canonical form: a leading slash, no trailing slash, no empty
//! segments, and path arguments spelled `{name}` regardless of whether the
//! document used `:name` or `{name}`.

mod parse;
mod schema;

use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

pub use parse::{normalize_path, parse_spec, FormatHint};
pub use schema::{flatten_response_schema, Schema, MAX_SCHEMA_DEPTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    Get,
    Post,
    Put,
    Delete,
    Patch,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Get,
        Method::Post,
        Method::Put,
        Method::Delete,
        Method::Patch,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Get => "GET",
            Method::Post => "POST",
            Method::Put => "PUT",
            Method::Delete => "DELETE",
            Method::Patch => "PATCH",
        }
    }

    pub fn from_key(key: &str) -> Option<Method> {
        match key.to_ascii_lowercase().as_str() {
            "get" => Some(Method::Get),
            "post" => Some(Method::Post),
            "put" => Some(Method::Put),
            "delete" => Some(Method::Delete),
            "patch" => Some(Method::Patch),
            _ => None,
        }
    }

    /// Methods whose successful responses create or replace server state.
    pub fn is_producer(self) -> bool {
        matches!(self, Method::Post | Method::Put)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamLocation {
    Path,
    Query,
    Body,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueType {
    String,
    Integer,
    Number,
    Boolean,
    Object,
}

/// Primitive type of a flattened response field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldType {
    String,
    Integer,
    Number,
    Boolean,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub location: ParamLocation,
    pub value_type: ValueType,
    pub required: bool,
}

/// Identity of an operation: canonical path plus method.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OperationKey {
    pub path: String,
    pub method: Method,
}

impl fmt::Display for OperationKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.method, self.path)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ApiOperation {
    pub path: String,
    pub method: Method,
    pub required_params: Vec<ParamSpec>,
    pub optional_params: Vec<ParamSpec>,
    /// Dot-path fields of the 2XX response schema; empty when the document
    /// declares no success schema.
    pub response_fields: Vec<(String, FieldType)>,
}

impl ApiOperation {
    pub fn key(&self) -> OperationKey {
        OperationKey {
            path: self.path.clone(),
            method: self.method,
        }
    }

    pub fn segments(&self) -> impl Iterator<Item = &str> {
        self.path.split('/').filter(|s| !s.is_empty())
    }

    pub fn params(&self) -> impl Iterator<Item = &ParamSpec> {
        self.required_params.iter().chain(&self.optional_params)
    }

    pub fn param(&self, name: &str) -> Option<&ParamSpec> {
        self.params().find(|p| p.name == name)
    }
}

impl PartialEq for ApiOperation {
    fn eq(&self, other: &Self) -> bool {
        self.path == other.path && self.method == other.method
    }
}

impl Eq for ApiOperation {}

impl Hash for ApiOperation {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.path.hash(state);
        self.method.hash(state);
    }
}

#[derive(Debug, Clone, Default)]
pub struct ApiSpec {
    pub title: String,
    pub base_path: String,
    pub operations: Vec<ApiOperation>,
    pub schemas: BTreeMap<String, Schema>,
}

impl ApiSpec {
    pub fn operation(&self, key: &OperationKey) -> Option<&ApiOperation> {
        self.operations
            .iter()
            .find(|op| op.path == key.path && op.method == key.method)
    }

    pub fn operation_index(&self, path: &str, method: Method) -> Option<usize> {
        self.operations
            .iter()
            .position(|op| op.path == path && op.method == method)
    }
}

/// Splits a canonical path into segments and reports whether each one is a
/// `{name}` argument.
pub fn path_segments(path: &str) -> impl Iterator<Item = Segment<'_>> {
    path.split('/').filter(|s| !s.is_empty()).map(Segment::parse)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segment<'a> {
    Token(&'a str),
    Param(&'a str),
}

impl<'a> Segment<'a> {
    pub fn parse(raw: &'a str) -> Self {
        match raw.strip_prefix('{').and_then(|s| s.strip_suffix('}')) {
            Some(name) => Segment::Param(name),
            None => Segment::Token(raw),
        }
    }
}
