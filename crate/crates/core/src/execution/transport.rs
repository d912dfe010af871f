use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::limiter::Clock;
use super::request::HttpRequest;
use crate::spec::Method;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: Vec<u8>,
}

impl HttpResponse {
    pub fn json(status: u16, body: &Value) -> Self {
        HttpResponse {
            status,
            body: body.to_string().into_bytes(),
        }
    }

    pub fn empty(status: u16) -> Self {
        HttpResponse {
            status,
            body: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("{0}")]
pub struct TransportError(pub String);

pub trait Transport {
    fn send(&mut self, request: &HttpRequest) -> Result<HttpResponse, TransportError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StatusClass {
    #[serde(rename = "2XX")]
    Success,
    #[serde(rename = "3XX")]
    Redirect,
    #[serde(rename = "4XX")]
    ClientError,
    #[serde(rename = "5XX")]
    ServerError,
    #[serde(rename = "transport_error")]
    TransportError,
}

impl StatusClass {
    pub fn of(status: u16) -> Self {
        match status {
            0..=299 => StatusClass::Success,
            300..=399 => StatusClass::Redirect,
            400..=499 => StatusClass::ClientError,
            _ => StatusClass::ServerError,
        }
    }

    /// 2XX and 3XX both count as the request having been accepted.
    pub fn is_success(self) -> bool {
        matches!(self, StatusClass::Success | StatusClass::Redirect)
    }

    pub fn label(self) -> &'static str {
        match self {
            StatusClass::Success => "2XX",
            StatusClass::Redirect => "3XX",
            StatusClass::ClientError => "4XX",
            StatusClass::ServerError => "5XX",
            StatusClass::TransportError => "transport_error",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionResult {
    pub class: StatusClass,
    pub status: Option<u16>,
    pub latency: Duration,
    pub body: Vec<u8>,
    pub json: Option<Value>,
    pub error: Option<String>,
}

impl ExecutionResult {
    pub fn from_response(response: HttpResponse, latency: Duration) -> Self {
        let json = if response.body.is_empty() {
            None
        } else {
            serde_json::from_slice(&response.body).ok()
        };
        ExecutionResult {
            class: StatusClass::of(response.status),
            status: Some(response.status),
            latency,
            body: response.body,
            json,
            error: None,
        }
    }

    pub fn from_error(err: TransportError, latency: Duration) -> Self {
        ExecutionResult {
            class: StatusClass::TransportError,
            status: None,
            latency,
            body: Vec::new(),
            json: None,
            error: Some(err.0),
        }
    }
}

/// Sends and classifies the outcome. Rate limiting is the caller's job.
pub fn execute(request: &HttpRequest, transport: &mut dyn Transport, clock: &dyn Clock) -> ExecutionResult {
    let start = clock.now();
    let outcome = transport.send(request);
    let latency = clock.now().saturating_sub(start);
    match outcome {
        Ok(r) => ExecutionResult::from_response(r, latency),
        Err(e) => ExecutionResult::from_error(e, latency),
    }
}

/// Blocking HTTP client. Redirects are not followed so that 3XX answers
/// reach the classifier.
pub struct HttpTransport {
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .max_redirects(0)
            .http_status_as_error(false)
            .build();
        HttpTransport {
            agent: config.into(),
        }
    }
}

impl Default for HttpTransport {
    fn default() -> Self {
        Self::new(Duration::from_secs(10))
    }
}

impl Transport for HttpTransport {
    fn send(&mut self, request: &HttpRequest) -> Result<HttpResponse, TransportError> {
        let err = |e: ureq::Error| TransportError(e.to_string());
        let mut builder = ureq::http::Request::builder()
            .method(request.method.as_str())
            .uri(&request.url);
        for (name, value) in &request.headers {
            builder = builder.header(name, value);
        }
        let body = request.body.clone().unwrap_or_default();
        let req = builder.body(body).map_err(|e| TransportError(e.to_string()))?;
        let mut response = self.agent.run(req).map_err(err)?;
        let status = response.status().as_u16();
        let body = response.body_mut().read_to_vec().map_err(err)?;
        Ok(HttpResponse { status, body })
    }
}

/// Cheapest reachability probe: one GET against the base URL.
pub fn probe(transport: &mut dyn Transport, base_url: &str) -> Result<u16, TransportError> {
    let req = HttpRequest {
        method: Method::Get,
        url: base_url.to_string(),
        headers: Vec::new(),
        body: None,
    };
    transport.send(&req).map(|r| r.status)
}
