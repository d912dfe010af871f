//! In-process stateful services that stand in for a real target. They sit
//! behind the same [`Transport`] interface as the HTTP client, so a run
//! against them exercises the whole pipeline without a network.

mod chain;
mod gitlab;

use std::collections::BTreeMap;

use percent_encoding::percent_decode_str;
use serde_json::{json, Value};

use crate::execution::{HttpRequest, HttpResponse, Transport, TransportError};
use crate::spec::Method;

pub use chain::{ChainMock, CHAIN_DISTRACTORS};
pub use gitlab::{FaultRule, GitlabMock, MockState, Trigger};

/// Scheme that routes a base URL to an embedded mock.
pub const MOCK_SCHEME: &str = "mock";

/// A decoded request as seen by a mock service.
#[derive(Debug, Clone)]
pub struct MockRequest {
    pub method: Method,
    pub segments: Vec<String>,
    pub query: BTreeMap<String, String>,
    pub body: Option<Value>,
}

impl MockRequest {
    pub fn body_str(&self, key: &str) -> Option<&str> {
        self.body.as_ref()?.get(key)?.as_str()
    }
}

pub trait Service {
    fn handle(&mut self, request: &MockRequest) -> HttpResponse;
}

pub fn error(status: u16, message: &str) -> HttpResponse {
    HttpResponse::json(status, &json!({ "message": message }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MockKind {
    Gitlab,
    Chain,
}

impl MockKind {
    pub fn base_url(self) -> &'static str {
        match self {
            MockKind::Gitlab => "mock://gitlab",
            MockKind::Chain => "mock://chain",
        }
    }

    pub fn from_base_url(url: &str) -> Option<MockKind> {
        let rest = url.strip_prefix("mock://")?;
        match rest.trim_end_matches('/') {
            "" | "gitlab" => Some(MockKind::Gitlab),
            "chain" => Some(MockKind::Chain),
            _ => None,
        }
    }

    /// The OpenAPI 3.0 document describing this mock.
    pub fn document(self) -> &'static str {
        match self {
            MockKind::Gitlab => include_str!("../../assets/mock_openapi.json"),
            MockKind::Chain => include_str!("../../assets/chain_openapi.json"),
        }
    }

    pub fn transport(self) -> MockTransport {
        let service: Box<dyn Service + Send> = match self {
            MockKind::Gitlab => Box::new(GitlabMock::new()),
            MockKind::Chain => Box::new(ChainMock::new()),
        };
        MockTransport::new(service)
    }
}

/// Adapts a [`Service`] to the [`Transport`] interface. The URL's host is
/// ignored; only its path, query and body reach the service.
pub struct MockTransport {
    service: Box<dyn Service + Send>,
    prefix: Vec<String>,
}

impl MockTransport {
    pub fn new(service: Box<dyn Service + Send>) -> Self {
        MockTransport {
            service,
            prefix: Vec::new(),
        }
    }

    /// Strips these leading path segments before dispatch.
    pub fn with_prefix(mut self, base_path: &str) -> Self {
        self.prefix = base_path
            .split('/')
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect();
        self
    }

    pub fn decode(&self, request: &HttpRequest) -> Result<MockRequest, TransportError> {
        let url = url::Url::parse(&request.url).map_err(|e| TransportError(e.to_string()))?;
        let path = url.path();
        let raw: Vec<&str> = path.strip_prefix('/').unwrap_or(path).split('/').collect();
        let mut segments: Vec<String> = raw
            .iter()
            .map(|s| percent_decode_str(s).decode_utf8_lossy().into_owned())
            .collect();
        if segments.len() == 1 && segments[0].is_empty() {
            segments.clear();
        }
        if segments.len() >= self.prefix.len() && segments[..self.prefix.len()] == self.prefix[..] {
            segments.drain(..self.prefix.len());
        }
        let query = url.query_pairs().map(|(k, v)| (k.into_owned(), v.into_owned())).collect();
        let body = request
            .body
            .as_ref()
            .map(|text| serde_json::from_str(text).unwrap_or(Value::Null));
        Ok(MockRequest {
            method: request.method,
            segments,
            query,
            body,
        })
    }
}

impl Transport for MockTransport {
    fn send(&mut self, request: &HttpRequest) -> Result<HttpResponse, TransportError> {
        let decoded = self.decode(request)?;
        if decoded.segments.iter().any(String::is_empty) {
            return Ok(error(404, "not found"));
        }
        if matches!(decoded.body, Some(Value::Null)) {
            return Ok(error(400, "malformed JSON body"));
        }
        Ok(self.service.handle(&decoded))
    }
}
