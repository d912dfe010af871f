use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::{error, MockRequest, Service};
use crate::execution::HttpResponse;
use crate::spec::Method;

#[derive(Debug, Clone, PartialEq)]
pub struct Project {
    pub name: String,
    pub path: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub commit: String,
    pub protected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct User {
    pub username: String,
    pub name: String,
}

/// When a fault rule fires.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Trigger {
    /// Deleting the only branch left in a project.
    LastBranch,
    /// Every request to the route.
    Always,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultRule {
    pub path: String,
    pub method: Method,
    pub trigger: Trigger,
    pub status: u16,
}

impl FaultRule {
    pub fn last_branch_delete() -> Self {
        FaultRule {
            path: "/projects/{id}/branches/{branch}".into(),
            method: Method::Delete,
            trigger: Trigger::LastBranch,
            status: 500,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct MockState {
    pub projects: BTreeMap<u64, Project>,
    pub branches: BTreeMap<(u64, String), Branch>,
    pub users: BTreeMap<u64, User>,
    pub next_id: u64,
    pub injected_faults: Vec<FaultRule>,
}

impl MockState {
    fn take_id(&mut self) -> u64 {
        self.next_id += 1;
        self.next_id
    }

    fn branch_count(&self, project: u64) -> usize {
        self.branches.range((project, String::new())..).take_while(|((p, _), _)| *p == project).count()
    }
}

/// A small stateful service shaped like the projects and branches part of
/// a GitLab API. New projects have no branches; deleting a project deletes
/// its branches.
#[derive(Debug, Clone)]
pub struct GitlabMock {
    pub state: MockState,
}

impl Default for GitlabMock {
    fn default() -> Self {
        Self::new()
    }
}

fn project_json(id: u64, p: &Project) -> Value {
    json!({
        "id": id,
        "name": p.name,
        "path": p.path,
        "description": p.description,
        "default_branch": "main",
    })
}

fn branch_json(name: &str, b: &Branch) -> Value {
    json!({ "name": name, "commit": b.commit, "protected": b.protected })
}

fn non_empty(v: Option<&Value>) -> Option<&str> {
    v.and_then(Value::as_str).filter(|s| !s.is_empty())
}

impl GitlabMock {
    pub fn new() -> Self {
        Self::with_faults(vec![FaultRule::last_branch_delete()])
    }

    pub fn with_faults(faults: Vec<FaultRule>) -> Self {
        let mut state = MockState {
            injected_faults: faults,
            ..MockState::default()
        };
        for (username, name) in [("root", "Administrator"), ("alice", "Alice"), ("bob", "Bob")] {
            let id = state.take_id();
            state.users.insert(
                id,
                User {
                    username: username.into(),
                    name: name.into(),
                },
            );
        }
        GitlabMock { state }
    }

    fn fault(&self, template: &str, method: Method, project: Option<u64>) -> Option<HttpResponse> {
        self.state
            .injected_faults
            .iter()
            .find(|f| {
                f.path == template
                    && f.method == method
                    && match f.trigger {
                        Trigger::Always => true,
                        Trigger::LastBranch => project.is_some_and(|p| self.state.branch_count(p) == 1),
                    }
            })
            .map(|f| error(f.status, "internal server error"))
    }

    fn project_id(&self, raw: &str) -> Option<u64> {
        raw.parse().ok().filter(|id| self.state.projects.contains_key(id))
    }

    fn list_projects(&self, req: &MockRequest) -> HttpResponse {
        if req.query.contains_key("membership") {
            return error(403, "membership filter requires authentication");
        }
        if req.query.contains_key("order_by") && req.query.contains_key("search") {
            return error(400, "order_by cannot be combined with search");
        }
        let needle = req.query.get("search").map(|s| s.to_lowercase());
        let items: Vec<Value> = self
            .state
            .projects
            .iter()
            .filter(|(_, p)| needle.as_ref().is_none_or(|n| p.name.to_lowercase().contains(n)))
            .map(|(id, p)| project_json(*id, p))
            .collect();
        HttpResponse::json(200, &Value::Array(items))
    }

    fn create_project(&mut self, req: &MockRequest) -> HttpResponse {
        let body = req.body.as_ref();
        let (Some(name), Some(path)) = (
            non_empty(body.and_then(|b| b.get("name"))),
            non_empty(body.and_then(|b| b.get("path"))),
        ) else {
            return error(400, "name and path are required");
        };
        let description = match body.and_then(|b| b.get("description")) {
            None => String::new(),
            Some(Value::String(s)) => s.clone(),
            Some(_) => return error(400, "description must be a string"),
        };
        if self.state.projects.values().any(|p| p.name == name || p.path == path) {
            return error(409, "name or path has already been taken");
        }
        let project = Project {
            name: name.to_string(),
            path: path.to_string(),
            description,
        };
        let id = self.state.take_id();
        let out = project_json(id, &project);
        self.state.projects.insert(id, project);
        HttpResponse::json(201, &out)
    }

    fn update_project(&mut self, id: u64, req: &MockRequest) -> HttpResponse {
        let body = req.body.clone().unwrap_or_else(|| json!({}));
        let name = match body.get("name") {
            None => None,
            Some(v) => match non_empty(Some(v)) {
                Some(n) => Some(n.to_string()),
                None => return error(400, "name must be a non-empty string"),
            },
        };
        if let Some(n) = &name {
            if self.state.projects.iter().any(|(other, p)| *other != id && &p.name == n) {
                return error(409, "name has already been taken");
            }
        }
        let description = match body.get("description") {
            None => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => return error(400, "description must be a string"),
        };
        let project = self.state.projects.get_mut(&id).expect("checked by caller");
        if let Some(n) = name {
            project.name = n;
        }
        if let Some(d) = description {
            project.description = d;
        }
        HttpResponse::json(200, &project_json(id, project))
    }

    fn list_branches(&self, project: u64) -> HttpResponse {
        let items: Vec<Value> = self
            .state
            .branches
            .iter()
            .filter(|((p, _), _)| *p == project)
            .map(|((_, name), b)| branch_json(name, b))
            .collect();
        HttpResponse::json(200, &Value::Array(items))
    }

    fn create_branch(&mut self, project: u64, req: &MockRequest) -> HttpResponse {
        let body = req.body.as_ref();
        let (Some(name), Some(_)) = (
            non_empty(body.and_then(|b| b.get("branch"))),
            non_empty(body.and_then(|b| b.get("ref"))),
        ) else {
            return error(400, "branch and ref are required");
        };
        let key = (project, name.to_string());
        if self.state.branches.contains_key(&key) {
            return error(409, "branch already exists");
        }
        let branch = Branch {
            commit: format!("{:040x}", self.state.take_id()),
            protected: false,
        };
        let out = branch_json(name, &branch);
        self.state.branches.insert(key, branch);
        HttpResponse::json(201, &out)
    }
}

impl Service for GitlabMock {
    fn handle(&mut self, req: &MockRequest) -> HttpResponse {
        use Method::*;
        let segs: Vec<&str> = req.segments.iter().map(String::as_str).collect();
        match (req.method, segs.as_slice()) {
            (Get, ["projects"]) => self.list_projects(req),
            (Post, ["projects"]) => self.create_project(req),
            (m, ["projects", id]) => {
                let Some(id) = self.project_id(id) else {
                    return error(404, "project not found");
                };
                match m {
                    Get => HttpResponse::json(200, &project_json(id, &self.state.projects[&id])),
                    Put => self.update_project(id, req),
                    Delete => {
                        self.state.projects.remove(&id);
                        self.state.branches.retain(|(p, _), _| *p != id);
                        HttpResponse::empty(204)
                    }
                    _ => error(405, "method not allowed"),
                }
            }
            (m, ["projects", id, "branches"]) => {
                let Some(id) = self.project_id(id) else {
                    return error(404, "project not found");
                };
                match m {
                    Get => self.list_branches(id),
                    Post => self.create_branch(id, req),
                    _ => error(405, "method not allowed"),
                }
            }
            (m, ["projects", id, "branches", name]) => {
                let Some(id) = self.project_id(id) else {
                    return error(404, "project not found");
                };
                let key = (id, name.to_string());
                if !self.state.branches.contains_key(&key) {
                    return error(404, "branch not found");
                }
                match m {
                    Get => HttpResponse::json(200, &branch_json(name, &self.state.branches[&key])),
                    Put => {
                        let protected = match req.body.as_ref().and_then(|b| b.get("protected")) {
                            None => None,
                            Some(Value::Bool(p)) => Some(*p),
                            Some(_) => return error(400, "protected must be a boolean"),
                        };
                        let branch = self.state.branches.get_mut(&key).expect("checked above");
                        if let Some(p) = protected {
                            branch.protected = p;
                        }
                        HttpResponse::json(200, &branch_json(name, branch))
                    }
                    Delete => {
                        if let Some(r) = self.fault("/projects/{id}/branches/{branch}", Delete, Some(id)) {
                            return r;
                        }
                        self.state.branches.remove(&key);
                        HttpResponse::empty(204)
                    }
                    _ => error(405, "method not allowed"),
                }
            }
            (Get, ["users"]) => {
                let items: Vec<Value> = self
                    .state
                    .users
                    .iter()
                    .map(|(id, u)| json!({ "id": id, "username": u.username, "name": u.name }))
                    .collect();
                HttpResponse::json(200, &Value::Array(items))
            }
            (Get, ["users", id]) => match id.parse::<u64>().ok().and_then(|i| self.state.users.get(&i).map(|u| (i, u))) {
                Some((i, u)) => HttpResponse::json(200, &json!({ "id": i, "username": u.username, "name": u.name })),
                None => error(404, "user not found"),
            },
            _ => error(404, "not found"),
        }
    }
}
