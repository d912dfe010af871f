use std::collections::BTreeMap;

use crate::error::SpecError;
use crate::spec::FieldType;

/// Object nesting levels walked when flattening a schema.
pub const MAX_SCHEMA_DEPTH: usize = 8;

const MAX_REF_HOPS: usize = 64;

/// A JSON schema reduced to the shape needed for resource extraction.
#[derive(Debug, Clone, PartialEq)]
pub enum Schema {
    Object(Vec<(String, Schema)>),
    Array(Box<Schema>),
    Primitive(FieldType),
    AllOf(Vec<Schema>),
    /// Named schema in [`crate::spec::ApiSpec::schemas`].
    Ref(String),
    Any,
}

impl Schema {
    pub fn refs(&self, out: &mut Vec<String>) {
        match self {
            Schema::Object(props) => props.iter().for_each(|(_, s)| s.refs(out)),
            Schema::Array(inner) => inner.refs(out),
            Schema::AllOf(parts) => parts.iter().for_each(|s| s.refs(out)),
            Schema::Ref(name) => out.push(name.clone()),
            Schema::Primitive(_) | Schema::Any => {}
        }
    }
}

/// Flattens a resolved schema into `(dot.path, type)` pairs.
///
/// Nested objects contribute dot-joined paths, an array contributes its
/// element's paths (one array level only), arrays of primitives contribute
/// nothing. Fails with [`SpecError::SchemaTooDeep`] when object nesting
/// exceeds [`MAX_SCHEMA_DEPTH`].
pub fn flatten_response_schema(
    schema: &Schema,
    schemas: &BTreeMap<String, Schema>,
) -> Result<Vec<(String, FieldType)>, SpecError> {
    flatten(schema, schemas, true)
}

/// Same as [`flatten_response_schema`] but stops descending at the cap
/// instead of failing.
pub(crate) fn flatten_truncated(
    schema: &Schema,
    schemas: &BTreeMap<String, Schema>,
) -> Vec<(String, FieldType)> {
    flatten(schema, schemas, false).unwrap_or_default()
}

fn flatten(
    schema: &Schema,
    schemas: &BTreeMap<String, Schema>,
    strict: bool,
) -> Result<Vec<(String, FieldType)>, SpecError> {
    let mut walker = Walker {
        schemas,
        strict,
        out: Vec::new(),
    };
    walker.walk(schema, "", 0, 0, 0)?;
    let mut seen = std::collections::HashSet::new();
    walker.out.retain(|(path, _)| seen.insert(path.clone()));
    Ok(walker.out)
}

struct Walker<'a> {
    schemas: &'a BTreeMap<String, Schema>,
    strict: bool,
    out: Vec<(String, FieldType)>,
}

impl Walker<'_> {
    fn walk(
        &mut self,
        schema: &Schema,
        path: &str,
        depth: usize,
        arrays: usize,
        hops: usize,
    ) -> Result<(), SpecError> {
        match schema {
            Schema::Primitive(ty) => {
                if !path.is_empty() {
                    self.out.push((path.to_string(), *ty));
                }
            }
            Schema::Object(props) => {
                if depth >= MAX_SCHEMA_DEPTH {
                    return self.too_deep();
                }
                for (name, prop) in props {
                    let child = if path.is_empty() {
                        name.clone()
                    } else {
                        format!("{path}.{name}")
                    };
                    self.walk(prop, &child, depth + 1, arrays, hops)?;
                }
            }
            Schema::Array(inner) => {
                if arrays >= 1 {
                    return Ok(());
                }
                let element = self.resolve(inner, hops)?;
                if matches!(element, Some(Schema::Primitive(_))) {
                    return Ok(());
                }
                self.walk(inner, path, depth, arrays + 1, hops)?;
            }
            Schema::AllOf(parts) => {
                for part in parts {
                    self.walk(part, path, depth, arrays, hops)?;
                }
            }
            Schema::Ref(name) => {
                if hops >= MAX_REF_HOPS {
                    return self.too_deep();
                }
                let target = self
                    .schemas
                    .get(name)
                    .ok_or_else(|| SpecError::UnresolvedReference(name.clone()))?;
                self.walk(target, path, depth, arrays, hops + 1)?;
            }
            Schema::Any => {}
        }
        Ok(())
    }

    fn resolve<'s>(&'s self, mut schema: &'s Schema, mut hops: usize) -> Result<Option<&'s Schema>, SpecError> {
        while let Schema::Ref(name) = schema {
            if hops >= MAX_REF_HOPS {
                return Ok(None);
            }
            hops += 1;
            schema = self
                .schemas
                .get(name)
                .ok_or_else(|| SpecError::UnresolvedReference(name.clone()))?;
        }
        Ok(Some(schema))
    }

    fn too_deep(&self) -> Result<(), SpecError> {
        if self.strict {
            Err(SpecError::SchemaTooDeep {
                cap: MAX_SCHEMA_DEPTH,
            })
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obj(props: &[(&str, Schema)]) -> Schema {
        Schema::Object(
            props
                .iter()
                .map(|(n, s)| (n.to_string(), s.clone()))
                .collect(),
        )
    }

    fn prim(t: FieldType) -> Schema {
        Schema::Primitive(t)
    }

    /// Independent reference flattener: recursion over objects, arrays pass
    /// through to their element once.
    fn oracle(schema: &Schema, prefix: &str, in_array: bool, out: &mut Vec<(String, FieldType)>) {
        match schema {
            Schema::Primitive(t) if !prefix.is_empty() => out.push((prefix.into(), *t)),
            Schema::Object(props) => {
                for (n, s) in props {
                    let p = if prefix.is_empty() { n.clone() } else { format!("{prefix}.{n}") };
                    oracle(s, &p, in_array, out);
                }
            }
            Schema::Array(inner) if !in_array && !matches!(**inner, Schema::Primitive(_)) => {
                oracle(inner, prefix, true, out)
            }
            _ => {}
        }
    }

    fn flat(schema: &Schema) -> Vec<(String, FieldType)> {
        flatten_response_schema(schema, &BTreeMap::new()).unwrap()
    }

    #[test]
    fn flat_object() {
        let s = obj(&[("id", prim(FieldType::Integer)), ("name", prim(FieldType::String))]);
        assert_eq!(
            flat(&s),
            vec![
                ("id".to_string(), FieldType::Integer),
                ("name".to_string(), FieldType::String)
            ]
        );
    }

    #[test]
    fn nested_object_matches_oracle() {
        let s = obj(&[("owner", obj(&[("id", prim(FieldType::Integer))]))]);
        let mut expected = Vec::new();
        oracle(&s, "", false, &mut expected);
        assert_eq!(expected, vec![("owner.id".to_string(), FieldType::Integer)]);
        assert_eq!(flat(&s), expected);
    }

    #[test]
    fn array_of_objects_matches_oracle() {
        let s = Schema::Array(Box::new(obj(&[("path", prim(FieldType::String))])));
        let mut expected = Vec::new();
        oracle(&s, "", false, &mut expected);
        assert_eq!(expected, vec![("path".to_string(), FieldType::String)]);
        assert_eq!(flat(&s), expected);
    }

    #[test]
    fn nested_arrays_stop_after_one_level() {
        let inner = obj(&[("x", prim(FieldType::Integer))]);
        let s = Schema::Array(Box::new(Schema::Array(Box::new(inner))));
        assert!(flat(&s).is_empty());
        let tags = obj(&[("tags", Schema::Array(Box::new(prim(FieldType::String))))]);
        assert!(flat(&tags).is_empty());
    }

    #[test]
    fn refs_resolve_through_named_schemas() {
        let mut schemas = BTreeMap::new();
        schemas.insert("User".to_string(), obj(&[("id", prim(FieldType::Integer))]));
        let s = obj(&[("author", Schema::Ref("User".into()))]);
        let out = flatten_response_schema(&s, &schemas).unwrap();
        assert_eq!(out, vec![("author.id".to_string(), FieldType::Integer)]);
    }

    #[test]
    fn depth_cap_is_enforced() {
        let mut s = prim(FieldType::Integer);
        for i in 0..MAX_SCHEMA_DEPTH {
            s = obj(&[(&format!("l{i}"), s)]);
        }
        assert_eq!(flat(&s).len(), 1);
        let deeper = obj(&[("top", s)]);
        assert!(matches!(
            flatten_response_schema(&deeper, &BTreeMap::new()),
            Err(SpecError::SchemaTooDeep { cap: MAX_SCHEMA_DEPTH })
        ));
        assert_eq!(flatten_truncated(&deeper, &BTreeMap::new()), vec![]);
    }

    #[test]
    fn self_recursive_schema_is_bounded() {
        let mut schemas = BTreeMap::new();
        schemas.insert(
            "Node".to_string(),
            obj(&[("id", prim(FieldType::Integer)), ("parent", Schema::Ref("Node".into()))]),
        );
        let root = Schema::Ref("Node".into());
        assert!(flatten_response_schema(&root, &schemas).is_err());
        let fields = flatten_truncated(&root, &schemas);
        assert_eq!(fields.len(), MAX_SCHEMA_DEPTH);
        assert_eq!(fields[1].0, "parent.id");
    }
}
