use std::collections::{BTreeMap, HashSet};

use serde_json::{Map, Value};

use super::schema::{flatten_truncated, Schema};
use super::{ApiOperation, ApiSpec, FieldType, Method, ParamLocation, ParamSpec, Segment, ValueType};
use crate::error::SpecError;

const MAX_INLINE_DEPTH: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FormatHint {
    #[default]
    Auto,
    Swagger2,
    OpenApi3,
}

/// Canonical spelling of an endpoint path.
///
/// Duplicate slashes collapse, the trailing slash goes, and `:arg` becomes
/// `{arg}`. Nothing is percent-decoded.
pub fn normalize_path(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len() + 1);
    for seg in raw.split('/').filter(|s| !s.is_empty()) {
        out.push('/');
        match seg.strip_prefix(':') {
            Some(name) if !name.is_empty() => {
                out.push('{');
                out.push_str(name);
                out.push('}');
            }
            _ => out.push_str(seg),
        }
    }
    out
}

/// Parses a Swagger 2.0 or OpenAPI 3.0 document given as JSON or YAML.
pub fn parse_spec(document: &[u8], hint: FormatHint) -> Result<ApiSpec, SpecError> {
    let text = std::str::from_utf8(document)
        .map_err(|e| SpecError::MalformedDocument(format!("not UTF-8: {e}")))?;
    let root = load_value(text)?;
    if !root.is_object() {
        return Err(SpecError::MalformedDocument(
            "document root is not a mapping".into(),
        ));
    }
    let flavor = detect(&root, hint)?;
    Parser::new(&root, flavor)?.run()
}

fn load_value(text: &str) -> Result<Value, SpecError> {
    if let Ok(v) = serde_json::from_str::<Value>(text) {
        return Ok(v);
    }
    let yaml: serde_yaml::Value = serde_yaml::from_str(text)
        .map_err(|e| SpecError::MalformedDocument(e.to_string()))?;
    Ok(yaml_to_json(yaml))
}

fn yaml_to_json(v: serde_yaml::Value) -> Value {
    use serde_yaml::Value as Y;
    match v {
        Y::Null => Value::Null,
        Y::Bool(b) => Value::Bool(b),
        Y::Number(n) => {
            if let Some(i) = n.as_i64() {
                Value::from(i)
            } else if let Some(u) = n.as_u64() {
                Value::from(u)
            } else {
                n.as_f64()
                    .and_then(serde_json::Number::from_f64)
                    .map(Value::Number)
                    .unwrap_or(Value::Null)
            }
        }
        Y::String(s) => Value::String(s),
        Y::Sequence(items) => Value::Array(items.into_iter().map(yaml_to_json).collect()),
        Y::Mapping(map) => {
            let mut out = Map::new();
            for (k, v) in map {
                let key = match k {
                    Y::String(s) => s,
                    Y::Number(n) => n.to_string(),
                    Y::Bool(b) => b.to_string(),
                    other => serde_yaml::to_string(&other)
                        .unwrap_or_default()
                        .trim()
                        .to_string(),
                };
                out.insert(key, yaml_to_json(v));
            }
            Value::Object(out)
        }
        Y::Tagged(t) => yaml_to_json(t.value),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flavor {
    Swagger2,
    OpenApi3,
}

fn detect(root: &Value, hint: FormatHint) -> Result<Flavor, SpecError> {
    match hint {
        FormatHint::Swagger2 => return Ok(Flavor::Swagger2),
        FormatHint::OpenApi3 => return Ok(Flavor::OpenApi3),
        FormatHint::Auto => {}
    }
    let version = |key: &str| match root.get(key) {
        Some(Value::String(s)) => Some(s.clone()),
        Some(Value::Number(n)) => Some(n.to_string()),
        _ => None,
    };
    if version("swagger").is_some_and(|v| v.starts_with('2')) {
        Ok(Flavor::Swagger2)
    } else if version("openapi").is_some_and(|v| v.starts_with('3')) {
        Ok(Flavor::OpenApi3)
    } else {
        Err(SpecError::MalformedDocument(
            "neither `swagger: 2.x` nor `openapi: 3.x` found".into(),
        ))
    }
}

struct Parser<'a> {
    root: &'a Value,
    flavor: Flavor,
    schemas: BTreeMap<String, Schema>,
}

impl<'a> Parser<'a> {
    fn new(root: &'a Value, flavor: Flavor) -> Result<Self, SpecError> {
        let mut parser = Parser {
            root,
            flavor,
            schemas: BTreeMap::new(),
        };
        let defs = match flavor {
            Flavor::Swagger2 => root.get("definitions"),
            Flavor::OpenApi3 => root.pointer("/components/schemas"),
        };
        if let Some(Value::Object(defs)) = defs {
            for (name, raw) in defs {
                let schema = parser.to_schema(raw, 0)?;
                parser.schemas.insert(name.clone(), schema);
            }
        }
        let mut refs = Vec::new();
        parser.schemas.values().for_each(|s| s.refs(&mut refs));
        parser.check_refs(&refs)?;
        Ok(parser)
    }

    fn check_refs(&self, refs: &[String]) -> Result<(), SpecError> {
        match refs.iter().find(|r| !self.schemas.contains_key(*r)) {
            Some(missing) => Err(SpecError::UnresolvedReference(missing.clone())),
            None => Ok(()),
        }
    }

    fn run(self) -> Result<ApiSpec, SpecError> {
        let title = self
            .root
            .pointer("/info/title")
            .and_then(Value::as_str)
            .unwrap_or_default()
            .to_string();
        let base_path = self.base_path();
        let mut operations = Vec::new();
        let mut seen = HashSet::new();

        let paths = match self.root.get("paths") {
            None | Some(Value::Null) => None,
            Some(Value::Object(p)) => Some(p),
            Some(_) => {
                return Err(SpecError::MalformedDocument(
                    "`paths` is not a mapping".into(),
                ))
            }
        };
        for (raw_path, item) in paths.into_iter().flatten() {
            let item = self.deref(item, 0)?;
            let Some(item) = item.as_object() else {
                continue;
            };
            let path = normalize_path(raw_path);
            if path.is_empty() {
                log::warn!("skipping operations on root path `{raw_path}`");
                continue;
            }
            let shared = item.get("parameters");
            for (key, body) in item {
                let Some(method) = Method::from_key(key) else {
                    continue;
                };
                if !seen.insert((path.clone(), method)) {
                    return Err(SpecError::DuplicateOperation { path, method });
                }
                let op = self.operation(&path, method, shared, body)?;
                operations.push(op);
            }
        }

        Ok(ApiSpec {
            title,
            base_path,
            operations,
            schemas: self.schemas,
        })
    }

    fn base_path(&self) -> String {
        let raw = match self.flavor {
            Flavor::Swagger2 => self
                .root
                .get("basePath")
                .and_then(Value::as_str)
                .unwrap_or_default()
                .to_string(),
            Flavor::OpenApi3 => {
                let server = self
                    .root
                    .pointer("/servers/0/url")
                    .and_then(Value::as_str)
                    .unwrap_or_default();
                match url::Url::parse(server) {
                    Ok(u) => u.path().to_string(),
                    Err(_) => server.to_string(),
                }
            }
        };
        normalize_path(&raw)
    }

    fn operation(
        &self,
        path: &str,
        method: Method,
        shared: Option<&Value>,
        body: &Value,
    ) -> Result<ApiOperation, SpecError> {
        let mut raw_params: Vec<&Value> = Vec::new();
        let mut keys: Vec<(String, String)> = Vec::new();
        // Operation-level parameters override path-level ones by (name, in).
        for list in [body.get("parameters"), shared] {
            for p in list.and_then(Value::as_array).into_iter().flatten() {
                let p = self.deref(p, 0)?;
                let key = (
                    str_field(p, "name").to_string(),
                    str_field(p, "in").to_string(),
                );
                if !keys.contains(&key) {
                    keys.push(key);
                    raw_params.push(p);
                }
            }
        }

        let mut params: Vec<ParamSpec> = Vec::new();
        for p in raw_params {
            self.collect_param(p, &mut params)?;
        }
        if self.flavor == Flavor::OpenApi3 {
            if let Some(rb) = body.get("requestBody") {
                self.collect_request_body(rb, &mut params)?;
            }
        }

        let args: Vec<&str> = super::path_segments(path)
            .filter_map(|s| match s {
                Segment::Param(n) => Some(n),
                Segment::Token(_) => None,
            })
            .collect();
        params.retain(|p| {
            let keep = p.location != ParamLocation::Path || args.contains(&p.name.as_str());
            if !keep {
                log::warn!("{method} {path}: path parameter `{}` not in path", p.name);
            }
            keep
        });
        for arg in &args {
            if !params
                .iter()
                .any(|p| p.location == ParamLocation::Path && p.name == *arg)
            {
                params.push(ParamSpec {
                    name: arg.to_string(),
                    location: ParamLocation::Path,
                    value_type: ValueType::String,
                    required: true,
                });
            }
        }
        let mut names = HashSet::new();
        params.retain(|p| names.insert(p.name.clone()));
        let (required_params, optional_params) = params.into_iter().partition(|p| p.required);

        let response_fields = match self.success_schema(body)? {
            Some(schema) => flatten_truncated(&schema, &self.schemas),
            None => Vec::new(),
        };

        Ok(ApiOperation {
            path: path.to_string(),
            method,
            required_params,
            optional_params,
            response_fields,
        })
    }

    fn collect_param(&self, p: &Value, out: &mut Vec<ParamSpec>) -> Result<(), SpecError> {
        let name = str_field(p, "name");
        let required = p.get("required").and_then(Value::as_bool).unwrap_or(false);
        let location = match str_field(p, "in") {
            "path" => ParamLocation::Path,
            "query" => ParamLocation::Query,
            "formData" => ParamLocation::Body,
            "body" => {
                if let Some(schema) = p.get("schema") {
                    self.collect_body_schema(schema, required, out)?;
                }
                return Ok(());
            }
            _ => return Ok(()),
        };
        if name.is_empty() {
            return Ok(());
        }
        let value_type = match p.get("schema") {
            Some(schema) => self.value_type(schema)?,
            None => type_from_str(str_field(p, "type")),
        };
        out.push(ParamSpec {
            name: name.to_string(),
            location,
            value_type,
            required: required || location == ParamLocation::Path,
        });
        Ok(())
    }

    fn collect_request_body(&self, rb: &Value, out: &mut Vec<ParamSpec>) -> Result<(), SpecError> {
        let rb = self.deref(rb, 0)?;
        let required = rb.get("required").and_then(Value::as_bool).unwrap_or(false);
        let Some(content) = rb.get("content").and_then(Value::as_object) else {
            return Ok(());
        };
        let media = content
            .get("application/json")
            .or_else(|| content.values().find(|m| m.get("schema").is_some()));
        if let Some(schema) = media.and_then(|m| m.get("schema")) {
            self.collect_body_schema(schema, required, out)?;
        }
        Ok(())
    }

    /// Turns the properties of a body schema into body parameters.
    fn collect_body_schema(
        &self,
        schema: &Value,
        body_required: bool,
        out: &mut Vec<ParamSpec>,
    ) -> Result<(), SpecError> {
        let mut props = Vec::new();
        let mut required = Vec::new();
        self.object_members(schema, &mut props, &mut required, 0)?;
        for (name, prop) in props {
            out.push(ParamSpec {
                value_type: self.value_type(prop)?,
                required: body_required && required.contains(&name),
                name,
                location: ParamLocation::Body,
            });
        }
        Ok(())
    }

    fn object_members<'v>(
        &'v self,
        schema: &'v Value,
        props: &mut Vec<(String, &'v Value)>,
        required: &mut Vec<String>,
        depth: usize,
    ) -> Result<(), SpecError> {
        if depth > MAX_INLINE_DEPTH {
            return Ok(());
        }
        let schema = self.deref(schema, 0)?;
        if let Some(Value::Object(p)) = schema.get("properties") {
            for (name, prop) in p {
                if !props.iter().any(|(n, _)| n == name) {
                    props.push((name.clone(), prop));
                }
            }
        }
        for r in schema.get("required").and_then(Value::as_array).into_iter().flatten() {
            if let Some(r) = r.as_str() {
                required.push(r.to_string());
            }
        }
        for part in schema.get("allOf").and_then(Value::as_array).into_iter().flatten() {
            self.object_members(part, props, required, depth + 1)?;
        }
        Ok(())
    }

    fn value_type(&self, schema: &Value) -> Result<ValueType, SpecError> {
        let schema = self.deref(schema, 0)?;
        let declared = str_field(schema, "type");
        if declared.is_empty() && (schema.get("properties").is_some() || schema.get("allOf").is_some()) {
            return Ok(ValueType::Object);
        }
        Ok(type_from_str(declared))
    }

    fn success_schema(&self, op: &Value) -> Result<Option<Schema>, SpecError> {
        let Some(responses) = op.get("responses").and_then(Value::as_object) else {
            return Ok(None);
        };
        let mut codes: Vec<&String> = responses.keys().filter(|k| k.starts_with('2')).collect();
        codes.sort();
        let Some(code) = codes.first() else {
            return Ok(None);
        };
        let resp = self.deref(&responses[code.as_str()], 0)?;
        let raw = match self.flavor {
            Flavor::Swagger2 => resp.get("schema"),
            Flavor::OpenApi3 => resp.get("content").and_then(Value::as_object).and_then(|c| {
                c.get("application/json")
                    .or_else(|| c.values().find(|m| m.get("schema").is_some()))
                    .and_then(|m| m.get("schema"))
            }),
        };
        match raw {
            Some(raw) => {
                let schema = self.to_schema(raw, 0)?;
                let mut refs = Vec::new();
                schema.refs(&mut refs);
                self.check_refs(&refs)?;
                Ok(Some(schema))
            }
            None => Ok(None),
        }
    }

    fn named_schema<'r>(&self, reference: &'r str) -> Option<&'r str> {
        let prefix = match self.flavor {
            Flavor::Swagger2 => "#/definitions/",
            Flavor::OpenApi3 => "#/components/schemas/",
        };
        reference
            .strip_prefix(prefix)
            .filter(|rest| !rest.contains('/'))
    }

    fn to_schema(&self, raw: &Value, depth: usize) -> Result<Schema, SpecError> {
        if depth > MAX_INLINE_DEPTH {
            return Ok(Schema::Any);
        }
        if let Some(reference) = raw.get("$ref").and_then(Value::as_str) {
            if let Some(name) = self.named_schema(reference) {
                let name = name.replace("~1", "/").replace("~0", "~");
                let exists = self.schemas.contains_key(&name)
                    || self.definitions().is_some_and(|d| d.contains_key(&name));
                if !exists {
                    return Err(SpecError::UnresolvedReference(reference.to_string()));
                }
                return Ok(Schema::Ref(name));
            }
            let target = self.pointer(reference)?;
            return self.to_schema(target, depth + 1);
        }
        if let Some(parts) = raw.get("allOf").and_then(Value::as_array) {
            let parts = parts
                .iter()
                .map(|p| self.to_schema(p, depth + 1))
                .collect::<Result<_, _>>()?;
            return Ok(Schema::AllOf(parts));
        }
        for key in ["oneOf", "anyOf"] {
            if let Some(first) = raw.get(key).and_then(Value::as_array).and_then(|a| a.first()) {
                return self.to_schema(first, depth + 1);
            }
        }
        match str_field(raw, "type") {
            "string" => Ok(Schema::Primitive(FieldType::String)),
            "integer" => Ok(Schema::Primitive(FieldType::Integer)),
            "number" => Ok(Schema::Primitive(FieldType::Number)),
            "boolean" => Ok(Schema::Primitive(FieldType::Boolean)),
            "array" => {
                let items = match raw.get("items") {
                    Some(items) => self.to_schema(items, depth + 1)?,
                    None => Schema::Any,
                };
                Ok(Schema::Array(Box::new(items)))
            }
            _ => match raw.get("properties").and_then(Value::as_object) {
                Some(props) => {
                    let mut out = Vec::with_capacity(props.len());
                    for (name, prop) in props {
                        out.push((name.clone(), self.to_schema(prop, depth + 1)?));
                    }
                    Ok(Schema::Object(out))
                }
                None => Ok(Schema::Any),
            },
        }
    }

    fn definitions(&self) -> Option<&Map<String, Value>> {
        match self.flavor {
            Flavor::Swagger2 => self.root.get("definitions"),
            Flavor::OpenApi3 => self.root.pointer("/components/schemas"),
        }
        .and_then(Value::as_object)
    }

    fn pointer(&self, reference: &str) -> Result<&'a Value, SpecError> {
        reference
            .strip_prefix('#')
            .and_then(|p| self.root.pointer(p))
            .ok_or_else(|| SpecError::UnresolvedReference(reference.to_string()))
    }

    /// Follows `$ref` chains of non-schema objects (parameters, request
    /// bodies, responses, path items).
    fn deref(&self, mut value: &'a Value, mut hops: usize) -> Result<&'a Value, SpecError> {
        while let Some(reference) = value.get("$ref").and_then(Value::as_str) {
            if hops > MAX_INLINE_DEPTH {
                return Err(SpecError::UnresolvedReference(reference.to_string()));
            }
            value = self.pointer(reference)?;
            hops += 1;
        }
        Ok(value)
    }
}

fn str_field<'v>(v: &'v Value, key: &str) -> &'v str {
    v.get(key).and_then(Value::as_str).unwrap_or_default()
}

fn type_from_str(t: &str) -> ValueType {
    match t {
        "integer" => ValueType::Integer,
        "number" => ValueType::Number,
        "boolean" => ValueType::Boolean,
        "object" | "array" => ValueType::Object,
        _ => ValueType::String,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG2: &str = r##"
openapi: 3.0.0
info:
  title: gitlab
paths:
  /projects:
    get:
      parameters:
        - name: order_by
          in: query
          required: false
          schema:
            type: string
            default: created_at
      responses:
        200:
          description: ok
          content:
            application/json:
              schema:
                $ref: '#/components/schemas/BasicProjectDetails'
components:
  schemas:
    BasicProjectDetails:
      type: object
      properties:
        id: {type: integer}
        name: {type: string}
        path: {type: string}
"##;

    #[test]
    fn get_projects_fragment() {
        let spec = parse_spec(FIG2.as_bytes(), FormatHint::Auto).unwrap();
        assert_eq!(spec.operations.len(), 1);
        let op = &spec.operations[0];
        assert_eq!(op.path, "/projects");
        assert_eq!(op.method, Method::Get);
        assert!(op.required_params.is_empty());
        assert_eq!(
            op.optional_params,
            vec![ParamSpec {
                name: "order_by".into(),
                location: ParamLocation::Query,
                value_type: ValueType::String,
                required: false,
            }]
        );
        let names: Vec<_> = op.response_fields.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, ["id", "name", "path"]);
    }

    #[test]
    fn empty_paths() {
        let doc = r#"{"openapi": "3.0.1", "info": {"title": "x"}, "paths": {}}"#;
        let spec = parse_spec(doc.as_bytes(), FormatHint::Auto).unwrap();
        assert!(spec.operations.is_empty());
    }

    #[test]
    fn five_sample_apis() {
        let doc = r#"
swagger: "2.0"
info: {title: gitlab}
basePath: /api/v4/
paths:
  /projects:
    get: {responses: {"200": {description: ok}}}
    post:
      parameters:
        - in: body
          name: body
          required: true
          schema:
            type: object
            required: [name]
            properties:
              name: {type: string}
              path: {type: string}
      responses: {"201": {description: ok}}
  /projects/:id:
    parameters:
      - {name: id, in: path, required: true, type: integer}
    get: {responses: {"200": {description: ok}}}
    put: {responses: {"200": {description: ok}}}
    delete: {responses: {"204": {description: ok}}}
"#;
        let spec = parse_spec(doc.as_bytes(), FormatHint::Auto).unwrap();
        assert_eq!(spec.base_path, "/api/v4");
        assert_eq!(spec.operations.len(), 5);
        let keys: Vec<String> = spec.operations.iter().map(|o| o.key().to_string()).collect();
        assert_eq!(
            keys,
            [
                "GET /projects",
                "POST /projects",
                "GET /projects/{id}",
                "PUT /projects/{id}",
                "DELETE /projects/{id}"
            ]
        );
        let post = &spec.operations[1];
        assert_eq!(post.required_params.len(), 1);
        assert_eq!(post.required_params[0].name, "name");
        assert_eq!(post.optional_params[0].name, "path");
        let get_one = &spec.operations[2];
        assert_eq!(get_one.required_params[0].location, ParamLocation::Path);
        assert_eq!(get_one.required_params[0].value_type, ValueType::Integer);
    }

    #[test]
    fn path_normalization() {
        assert_eq!(normalize_path("/a//b/"), "/a/b");
        assert_eq!(normalize_path("a/:id/c"), "/a/{id}/c");
        assert_eq!(normalize_path("/a/{id}"), "/a/{id}");
        assert_eq!(normalize_path("/"), "");
        assert_eq!(normalize_path("/a/%7Bx%7D"), "/a/%7Bx%7D");
    }

    #[test]
    fn duplicate_after_normalization() {
        let doc = r#"{"swagger":"2.0","paths":{
            "/a/:x": {"get": {}},
            "/a/{x}/": {"get": {}}
        }}"#;
        let err = parse_spec(doc.as_bytes(), FormatHint::Auto).unwrap_err();
        assert!(matches!(err, SpecError::DuplicateOperation { method: Method::Get, .. }));
    }

    #[test]
    fn dangling_reference() {
        let doc = r##"{"openapi":"3.0.0","paths":{"/a":{"get":{"responses":{"200":{
            "content":{"application/json":{"schema":{"$ref":"#/components/schemas/Nope"}}}}}}}}}"##;
        let err = parse_spec(doc.as_bytes(), FormatHint::Auto).unwrap_err();
        assert!(matches!(err, SpecError::UnresolvedReference(r) if r.contains("Nope")));

        let doc = r##"{"openapi":"3.0.0","paths":{"/a":{"get":{"parameters":[
            {"$ref":"#/components/parameters/Missing"}]}}}}"##;
        assert!(matches!(
            parse_spec(doc.as_bytes(), FormatHint::Auto),
            Err(SpecError::UnresolvedReference(_))
        ));
    }

    #[test]
    fn malformed_inputs() {
        for doc in [&b"\xff\xfe"[..], b"[1, 2", b"just a string", b"{\"info\": {}}"] {
            assert!(matches!(
                parse_spec(doc, FormatHint::Auto),
                Err(SpecError::MalformedDocument(_))
            ));
        }
    }

    #[test]
    fn undeclared_path_argument_is_synthesized() {
        let doc = r#"{"openapi":"3.0.0","paths":{"/a/{x}":{"get":{}}}}"#;
        let spec = parse_spec(doc.as_bytes(), FormatHint::Auto).unwrap();
        let p = &spec.operations[0].required_params[0];
        assert_eq!((p.name.as_str(), p.location), ("x", ParamLocation::Path));
    }

    #[test]
    fn request_body_and_refs() {
        let doc = r##"{"openapi":"3.0.0","paths":{"/p":{"post":{
            "requestBody":{"$ref":"#/components/requestBodies/P"},
            "responses":{"201":{"$ref":"#/components/responses/Created"}}}}},
          "components":{
            "requestBodies":{"P":{"required":true,"content":{"application/json":{"schema":{
                "type":"object","required":["name"],"properties":{
                  "name":{"type":"string"},"count":{"type":"integer"}}}}}}},
            "responses":{"Created":{"content":{"application/json":{"schema":{
                "type":"object","properties":{"id":{"type":"integer"},
                "owner":{"type":"object","properties":{"id":{"type":"integer"}}}}}}}}}}}"##;
        let spec = parse_spec(doc.as_bytes(), FormatHint::OpenApi3).unwrap();
        let op = &spec.operations[0];
        assert_eq!(op.required_params[0].name, "name");
        assert_eq!(op.optional_params[0].value_type, ValueType::Integer);
        let names: Vec<_> = op.response_fields.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, ["id", "owner.id"]);
    }

    proptest::proptest! {
        #[test]
        fn never_panics_on_arbitrary_bytes(bytes in proptest::collection::vec(proptest::num::u8::ANY, 0..256)) {
            let _ = parse_spec(&bytes, FormatHint::Auto);
        }

        #[test]
        fn normalization_is_idempotent(raw in "[/a-z:{}]{0,24}") {
            let once = normalize_path(&raw);
            proptest::prop_assert_eq!(normalize_path(&once), once.clone());
        }
    }
}
