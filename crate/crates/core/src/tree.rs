//! Endpoint forest built by splitting every operation path on `/`.
//!
//! Each node is one path segment; token nodes hold a literal segment and
//! parameter nodes hold a `{name}` argument. An operation lives at the node
//! its path ends on, so the endpoint of a node is the root-to-node label
//! path. Node identity is positional: two `{id}` nodes under different
//! parents are different nodes.

use std::fmt::Write as _;

use serde::Serialize;

use crate::spec::{ApiSpec, Method, Segment};

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "label", rename_all = "lowercase")]
pub enum NodeKind {
    Token(String),
    Param(String),
}

impl NodeKind {
    pub fn is_token(&self) -> bool {
        matches!(self, NodeKind::Token(_))
    }

    pub fn label(&self) -> &str {
        match self {
            NodeKind::Token(s) | NodeKind::Param(s) => s,
        }
    }

    fn render(&self) -> String {
        match self {
            NodeKind::Token(s) => s.clone(),
            NodeKind::Param(s) => format!("{{{s}}}"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TreeNode {
    pub id: NodeId,
    pub kind: NodeKind,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    /// Methods attached here with the index of their operation in the spec.
    pub operations: Vec<(Method, usize)>,
    pub depth: usize,
}

impl TreeNode {
    pub fn methods(&self) -> impl Iterator<Item = Method> + '_ {
        self.operations.iter().map(|(m, _)| *m)
    }

    pub fn operation(&self, method: Method) -> Option<usize> {
        self.operations
            .iter()
            .find(|(m, _)| *m == method)
            .map(|(_, i)| *i)
    }
}

/// A parent holding siblings of differing kind, or several parameter
/// siblings, at one position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeConflict {
    pub parent: String,
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ApiForest {
    nodes: Vec<TreeNode>,
    roots: Vec<NodeId>,
    conflicts: Vec<NodeConflict>,
}

impl ApiForest {
    pub fn build(spec: &ApiSpec) -> ApiForest {
        let mut forest = ApiForest::default();
        for (index, op) in spec.operations.iter().enumerate() {
            let mut parent: Option<NodeId> = None;
            for seg in crate::spec::path_segments(&op.path) {
                let kind = match seg {
                    Segment::Token(t) => NodeKind::Token(t.to_string()),
                    Segment::Param(p) => NodeKind::Param(p.to_string()),
                };
                parent = Some(forest.child_or_insert(parent, kind));
            }
            if let Some(node) = parent {
                forest.nodes[node].operations.push((op.method, index));
            }
        }
        forest.conflicts = forest.find_conflicts();
        for c in &forest.conflicts {
            log::warn!("conflicting siblings under `{}`: {:?}", c.parent, c.labels);
        }
        forest
    }

    fn child_or_insert(&mut self, parent: Option<NodeId>, kind: NodeKind) -> NodeId {
        let siblings = match parent {
            Some(p) => &self.nodes[p].children,
            None => &self.roots,
        };
        if let Some(&found) = siblings.iter().find(|&&c| self.nodes[c].kind == kind) {
            return found;
        }
        let id = self.nodes.len();
        let depth = parent.map_or(0, |p| self.nodes[p].depth + 1);
        self.nodes.push(TreeNode {
            id,
            kind,
            parent,
            children: Vec::new(),
            operations: Vec::new(),
            depth,
        });
        match parent {
            Some(p) => self.nodes[p].children.push(id),
            None => self.roots.push(id),
        }
        id
    }

    fn find_conflicts(&self) -> Vec<NodeConflict> {
        let mut groups: Vec<(String, &[NodeId])> = vec![("/".to_string(), &self.roots)];
        for node in &self.nodes {
            groups.push((self.endpoint_of(node.id), &node.children));
        }
        groups
            .into_iter()
            .filter_map(|(parent, children)| {
                let params = children.iter().filter(|&&c| !self.nodes[c].kind.is_token()).count();
                let tokens = children.len() - params;
                (params > 1 || (params >= 1 && tokens >= 1)).then(|| NodeConflict {
                    parent,
                    labels: children.iter().map(|&c| self.nodes[c].kind.render()).collect(),
                })
            })
            .collect()
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn roots(&self) -> &[NodeId] {
        &self.roots
    }

    pub fn conflicts(&self) -> &[NodeConflict] {
        &self.conflicts
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Children in visiting order: token children first, then parameter
    /// children, each group in insertion order.
    pub fn ordered_children(&self, id: NodeId) -> Vec<NodeId> {
        let children = &self.nodes[id].children;
        let (mut tokens, params): (Vec<NodeId>, Vec<NodeId>) =
            children.iter().partition(|&&c| self.nodes[c].kind.is_token());
        tokens.extend(params);
        tokens
    }

    /// Pre-order traversal of a single tree.
    pub fn dfs_from(&self, root: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            out.push(id);
            stack.extend(self.ordered_children(id).into_iter().rev());
        }
        out
    }

    /// Pre-order traversal of every tree, roots in order of first appearance.
    pub fn dfs_order(&self) -> Vec<NodeId> {
        self.roots.iter().flat_map(|&r| self.dfs_from(r)).collect()
    }

    /// Reconstructs `/v0/.../vi` for a node.
    pub fn endpoint_of(&self, id: NodeId) -> String {
        let mut labels = Vec::new();
        let mut cur = Some(id);
        while let Some(n) = cur {
            labels.push(self.nodes[n].kind.render());
            cur = self.nodes[n].parent;
        }
        labels.reverse();
        let mut out = String::new();
        for l in labels {
            out.push('/');
            out.push_str(&l);
        }
        out
    }

    /// The node itself when it is a token node, otherwise its closest token
    /// ancestor. A parameter root has no such ancestor and is returned as is.
    pub fn nearest_token_ancestor(&self, id: NodeId) -> NodeId {
        let mut cur = id;
        loop {
            let node = &self.nodes[cur];
            if node.kind.is_token() {
                return cur;
            }
            match node.parent {
                Some(p) => cur = p,
                None => {
                    log::debug!("parameter root `{}` has no token ancestor", self.endpoint_of(id));
                    return cur;
                }
            }
        }
    }

    /// Token nodes on the path from `id` to its root, nearest first.
    pub fn token_chain(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut cur = Some(id);
        while let Some(n) = cur {
            if self.nodes[n].kind.is_token() {
                out.push(n);
            }
            cur = self.nodes[n].parent;
        }
        out
    }

    /// True when `ancestor` lies on the root path of `id` (inclusive).
    pub fn is_ancestor(&self, ancestor: NodeId, id: NodeId) -> bool {
        let mut cur = Some(id);
        while let Some(n) = cur {
            if n == ancestor {
                return true;
            }
            cur = self.nodes[n].parent;
        }
        false
    }

    /// The parameter node for argument `name` on the root path of `id`.
    pub fn param_node(&self, id: NodeId, name: &str) -> Option<NodeId> {
        let mut cur = Some(id);
        while let Some(n) = cur {
            if self.nodes[n].kind == NodeKind::Param(name.to_string()) {
                return Some(n);
            }
            cur = self.nodes[n].parent;
        }
        None
    }

    /// Number of (node, method) slots, which equals the operation count.
    pub fn api_count(&self) -> usize {
        self.nodes.iter().map(|n| n.operations.len()).sum()
    }

    pub fn to_outline(&self) -> String {
        let mut out = String::new();
        for id in self.dfs_order() {
            let node = &self.nodes[id];
            let methods: Vec<&str> = node.methods().map(Method::as_str).collect();
            let _ = write!(out, "{}{}", "  ".repeat(node.depth), node.kind.render());
            if !methods.is_empty() {
                let _ = write!(out, " [{}]", methods.join(", "));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph api {\n  node [fontname=\"monospace\"];\n");
        for node in &self.nodes {
            let methods: Vec<&str> = node.methods().map(Method::as_str).collect();
            let shape = if node.kind.is_token() { "box" } else { "ellipse" };
            let mut label = node.kind.render().replace('"', "\\\"");
            if !methods.is_empty() {
                label.push_str("\\n");
                label.push_str(&methods.join(" "));
            }
            let _ = writeln!(out, "  n{} [label=\"{}\", shape={}];", node.id, label, shape);
        }
        for node in &self.nodes {
            for c in &node.children {
                let _ = writeln!(out, "  n{} -> n{};", node.id, c);
            }
        }
        out.push_str("}\n");
        out
    }
}
