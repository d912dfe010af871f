use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::RequestError;
use crate::generation::TestCase;
use crate::pool::scalar_text;
use crate::spec::{path_segments, ApiOperation, Method, ParamLocation, Segment};

/// Everything except RFC 3986 unreserved characters is escaped in a path
/// segment.
const SEGMENT: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'.').remove(b'_').remove(b'~');

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HttpRequest {
    pub method: Method,
    pub url: String,
    pub headers: Vec<(String, String)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub body: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuthHeader {
    pub name: String,
    pub value: String,
}

impl HttpRequest {
    /// Copy with the authentication value masked, for persisting.
    pub fn redacted(&self, auth: Option<&AuthHeader>) -> HttpRequest {
        let mut out = self.clone();
        if let Some(a) = auth {
            for (n, v) in &mut out.headers {
                if n.eq_ignore_ascii_case(&a.name) {
                    *v = "<redacted>".into();
                }
            }
        }
        out
    }
}

pub fn compose_request(
    case: &TestCase,
    op: &ApiOperation,
    base_url: &str,
    base_path: &str,
    auth: Option<&AuthHeader>,
) -> Result<HttpRequest, RequestError> {
    for p in &op.required_params {
        if case.binding(&p.name).is_none() {
            return Err(RequestError::MissingBinding(p.name.clone()));
        }
    }

    let mut url = base_url.trim_end_matches('/').to_string();
    for seg in path_segments(base_path).chain(path_segments(&op.path)) {
        url.push('/');
        match seg {
            Segment::Token(t) => url.push_str(t),
            Segment::Param(name) => {
                let b = case
                    .binding(name)
                    .ok_or_else(|| RequestError::MissingBinding(name.to_string()))?;
                url.extend(utf8_percent_encode(&scalar_text(&b.value), SEGMENT));
            }
        }
    }
    if url.is_empty() || !url.contains("://") {
        return Err(RequestError::InvalidUrl(url));
    }

    let mut query = url::form_urlencoded::Serializer::new(String::new());
    let mut has_query = false;
    let mut body = Map::new();
    for (name, b) in &case.bindings {
        let Some(p) = op.param(name) else { continue };
        match p.location {
            ParamLocation::Query => {
                query.append_pair(name, &scalar_text(&b.value));
                has_query = true;
            }
            ParamLocation::Body => {
                body.insert(name.clone(), b.value.clone());
            }
            ParamLocation::Path => {}
        }
    }
    if has_query {
        url.push('?');
        url.push_str(&query.finish());
    }
    url::Url::parse(&url).map_err(|e| RequestError::InvalidUrl(format!("{url}: {e}")))?;

    let mut headers = vec![("Accept".to_string(), "application/json".to_string())];
    let body = if body.is_empty() {
        None
    } else {
        headers.push(("Content-Type".to_string(), "application/json".to_string()));
        Some(Value::Object(body).to_string())
    };
    if let Some(a) = auth {
        headers.push((a.name.clone(), a.value.clone()));
    }
    Ok(HttpRequest {
        method: op.method,
        url,
        headers,
        body,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generation::{Binding, ValueSource};
    use crate::spec::{ParamSpec, ValueType};
    use serde_json::json;

    fn param(name: &str, location: ParamLocation, required: bool) -> ParamSpec {
        ParamSpec {
            name: name.into(),
            location,
            value_type: ValueType::String,
            required,
        }
    }

    fn op() -> ApiOperation {
        ApiOperation {
            path: "/projects/{id}/branches".into(),
            method: Method::Post,
            required_params: vec![
                param("id", ParamLocation::Path, true),
                param("branch", ParamLocation::Body, true),
            ],
            optional_params: vec![param("search", ParamLocation::Query, false)],
            response_fields: vec![],
        }
    }

    fn case(bindings: &[(&str, Value)]) -> TestCase {
        TestCase {
            round: 1,
            operation: 0,
            node: 0,
            method: Method::Post,
            path: "/projects/{id}/branches".into(),
            bindings: bindings
                .iter()
                .map(|(n, v)| {
                    (
                        n.to_string(),
                        Binding {
                            value: v.clone(),
                            source: ValueSource::Fuzz,
                            pair: None,
                        },
                    )
                })
                .collect(),
            optional_set: vec![],
        }
    }

    #[test]
    fn composes_path_query_and_body() {
        let c = case(&[("id", json!(7)), ("branch", json!("dev")), ("search", json!("a b&c"))]);
        let auth = AuthHeader {
            name: "PRIVATE-TOKEN".into(),
            value: "s3cret".into(),
        };
        let r = compose_request(&c, &op(), "http://h:1/", "/api/v4", Some(&auth)).unwrap();
        assert_eq!(r.url, "http://h:1/api/v4/projects/7/branches?search=a+b%26c");
        assert_eq!(r.body.as_deref(), Some(r#"{"branch":"dev"}"#));
        assert!(r.headers.iter().any(|(n, v)| n == "PRIVATE-TOKEN" && v == "s3cret"));
        let masked = r.redacted(Some(&auth));
        assert!(masked.headers.iter().any(|(n, v)| n == "PRIVATE-TOKEN" && v == "<redacted>"));
    }

    #[test]
    fn path_values_are_escaped() {
        let c = case(&[("id", json!("a/b c")), ("branch", json!("x"))]);
        let r = compose_request(&c, &op(), "http://h", "", None).unwrap();
        assert_eq!(r.url, "http://h/projects/a%2Fb%20c/branches");
    }

    #[test]
    fn missing_required_binding_is_an_error() {
        let c = case(&[("id", json!(1))]);
        assert!(matches!(
            compose_request(&c, &op(), "http://h", "", None),
            Err(RequestError::MissingBinding(n)) if n == "branch"
        ));
    }

    #[test]
    fn bad_base_url_is_rejected() {
        let c = case(&[("id", json!(1)), ("branch", json!("x"))]);
        assert!(matches!(
            compose_request(&c, &op(), "not a url", "", None),
            Err(RequestError::InvalidUrl(_))
        ));
    }
}
