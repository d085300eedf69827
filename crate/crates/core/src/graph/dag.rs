use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

pub type NodeSet = BTreeSet<NodeId>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub name: String,
    #[serde(default)]
    pub latent: bool,
    #[serde(default)]
    pub selection: bool,
}

impl Node {
    pub fn observed(name: &str) -> Self {
        Node {
            name: name.to_string(),
            latent: false,
            selection: false,
        }
    }

    pub fn latent(name: &str) -> Self {
        Node {
            latent: true,
            ..Node::observed(name)
        }
    }

    pub fn selection(name: &str) -> Self {
        Node {
            selection: true,
            ..Node::observed(name)
        }
    }
}

/// Treatments, target and proxies of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Roles {
    pub x: NodeSet,
    pub y: NodeId,
    pub z: NodeSet,
}

/// Which nodes each dataset observes: `m` under selection, `t` externally.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Scopes {
    pub m: NodeSet,
    pub t: NodeSet,
}

/// On-disk description of a DAG.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DagFile {
    pub nodes: Vec<Node>,
    #[serde(default)]
    pub edges: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roles: Option<RolesFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scopes: Option<ScopesFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RolesFile {
    #[serde(default)]
    pub x: Vec<String>,
    pub y: String,
    #[serde(default)]
    pub z: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScopesFile {
    #[serde(default)]
    pub m: Vec<String>,
    #[serde(default)]
    pub t: Vec<String>,
}

/// A causal DAG with an optional selection node, latent flags, variable
/// roles and dataset scopes. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalDag {
    nodes: Vec<Node>,
    index: BTreeMap<String, NodeId>,
    parents: Vec<Vec<NodeId>>,
    children: Vec<Vec<NodeId>>,
    roles: Option<Roles>,
    scopes: Scopes,
}

impl CausalDag {
    pub fn new(nodes: Vec<Node>, edges: &[(&str, &str)]) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if n.name.is_empty() {
                return Err(Error::InvalidGraph("node with empty name".into()));
            }
            if index.insert(n.name.clone(), NodeId(i)).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate node '{}'", n.name)));
            }
        }
        let mut parents = vec![Vec::new(); nodes.len()];
        let mut children = vec![Vec::new(); nodes.len()];
        let mut seen = BTreeSet::new();
        for &(from, to) in edges {
            let a = *index.get(from).ok_or_else(|| Error::UnknownNode(from.into()))?;
            let b = *index.get(to).ok_or_else(|| Error::UnknownNode(to.into()))?;
            if a == b {
                return Err(Error::InvalidGraph(format!("self loop on '{from}'")));
            }
            if seen.insert((a, b)) {
                children[a.0].push(b);
                parents[b.0].push(a);
            }
        }
        let dag = CausalDag {
            nodes,
            index,
            parents,
            children,
            roles: None,
            scopes: Scopes::default(),
        };
        dag.validate_structure()?;
        Ok(dag)
    }

    pub fn with_roles(mut self, x: &[&str], y: &str, z: &[&str]) -> Result<Self> {
        let roles = Roles {
            x: self.set(x)?,
            y: self.id(y)?,
            z: self.set(z)?,
        };
        self.roles = Some(roles);
        self.validate_roles_and_scopes()?;
        Ok(self)
    }

    pub fn with_scopes(mut self, m: &[&str], t: &[&str]) -> Result<Self> {
        self.scopes = Scopes {
            m: self.set(m)?,
            t: self.set(t)?,
        };
        self.validate_roles_and_scopes()?;
        Ok(self)
    }

    /// Copy with different roles; scopes are kept.
    pub fn reassign_roles(&self, x: &[&str], y: &str, z: &[&str]) -> Result<Self> {
        self.clone().with_roles(x, y, z)
    }

    pub fn from_file(file: &DagFile) -> Result<Self> {
        let edges: Vec<(&str, &str)> = file
            .edges
            .iter()
            .map(|[a, b]| (a.as_str(), b.as_str()))
            .collect();
        let mut dag = CausalDag::new(file.nodes.clone(), &edges)?;
        if let Some(r) = &file.roles {
            let x: Vec<&str> = r.x.iter().map(String::as_str).collect();
            let z: Vec<&str> = r.z.iter().map(String::as_str).collect();
            dag = dag.with_roles(&x, &r.y, &z)?;
        }
        if let Some(s) = &file.scopes {
            let m: Vec<&str> = s.m.iter().map(String::as_str).collect();
            let t: Vec<&str> = s.t.iter().map(String::as_str).collect();
            dag = dag.with_scopes(&m, &t)?;
        }
        Ok(dag)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: DagFile = serde_json::from_str(text).map_err(|e| {
            Error::Parse(format!("line {} column {}: {e}", e.line(), e.column()))
        })?;
        CausalDag::from_file(&file)
    }

    pub fn to_file(&self) -> DagFile {
        let names = |s: &NodeSet| s.iter().map(|&v| self.name(v).to_string()).collect();
        let mut edges = Vec::new();
        for (a, ch) in self.children.iter().enumerate() {
            for &b in ch {
                edges.push([self.nodes[a].name.clone(), self.name(b).to_string()]);
            }
        }
        DagFile {
            nodes: self.nodes.clone(),
            edges,
            roles: self.roles.as_ref().map(|r| RolesFile {
                x: names(&r.x),
                y: self.name(r.y).to_string(),
                z: names(&r.z),
            }),
            scopes: Some(ScopesFile {
                m: names(&self.scopes.m),
                t: names(&self.scopes.t),
            }),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("dag serializes")
    }

    fn validate_structure(&self) -> Result<()> {
        // Kahn's algorithm
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..self.len()).filter(|&i| indeg[i] == 0).collect();
        let mut visited = 0;
        while let Some(v) = queue.pop_front() {
            visited += 1;
            for c in &self.children[v] {
                indeg[c.0] -= 1;
                if indeg[c.0] == 0 {
                    queue.push_back(c.0);
                }
            }
        }
        if visited != self.len() {
            return Err(Error::InvalidGraph("graph contains a cycle".into()));
        }
        let sel: Vec<&Node> = self.nodes.iter().filter(|n| n.selection).collect();
        if sel.len() > 1 {
            return Err(Error::InvalidGraph("more than one selection node".into()));
        }
        if let Some(s) = self.selection_node() {
            if !self.children[s.0].is_empty() {
                return Err(Error::InvalidGraph(format!(
                    "selection node '{}' has outgoing edges",
                    self.name(s)
                )));
            }
            if self.nodes[s.0].latent {
                return Err(Error::InvalidGraph("selection node cannot be latent".into()));
            }
        }
        Ok(())
    }

    fn validate_roles_and_scopes(&self) -> Result<()> {
        if let Some(r) = &self.roles {
            if r.x.contains(&r.y) || r.z.contains(&r.y) {
                return Err(Error::OverlappingSets(self.name(r.y).into()));
            }
            if let Some(v) = r.x.intersection(&r.z).next() {
                return Err(Error::OverlappingSets(self.name(*v).into()));
            }
            for &v in r.x.iter().chain(&r.z).chain(std::iter::once(&r.y)) {
                if self.is_latent(v) {
                    return Err(Error::InvalidGraph(format!(
                        "latent node '{}' cannot take a role",
                        self.name(v)
                    )));
                }
                if self.is_selection(v) {
                    return Err(Error::InvalidGraph(format!(
                        "selection node '{}' cannot take a role",
                        self.name(v)
                    )));
                }
            }
        }
        for &v in self.scopes.m.iter().chain(&self.scopes.t) {
            if self.is_latent(v) {
                return Err(Error::InvalidGraph(format!(
                    "latent node '{}' cannot be in a dataset scope",
                    self.name(v)
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn id(&self, name: &str) -> Result<NodeId> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn set(&self, names: &[&str]) -> Result<NodeSet> {
        names.iter().map(|n| self.id(n)).collect()
    }

    pub fn name(&self, v: NodeId) -> &str {
        &self.nodes[v.0].name
    }

    pub fn names(&self, s: &NodeSet) -> Vec<String> {
        s.iter().map(|&v| self.name(v).to_string()).collect()
    }

    pub fn is_latent(&self, v: NodeId) -> bool {
        self.nodes[v.0].latent
    }

    pub fn is_selection(&self, v: NodeId) -> bool {
        self.nodes[v.0].selection
    }

    pub fn selection_node(&self) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.selection).map(NodeId)
    }

    pub fn parents(&self, v: NodeId) -> &[NodeId] {
        &self.parents[v.0]
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.children[v.0]
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.children[a.0].contains(&b)
    }

    pub fn edge_count(&self) -> usize {
        self.children.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.children
            .iter()
            .enumerate()
            .flat_map(|(a, ch)| ch.iter().map(move |&b| (NodeId(a), b)))
    }

    pub fn roles(&self) -> Option<&Roles> {
        self.roles.as_ref()
    }

    pub fn scopes(&self) -> &Scopes {
        &self.scopes
    }

    pub(crate) fn check_ids(&self, s: &NodeSet) -> Result<()> {
        match s.iter().find(|v| v.0 >= self.len()) {
            Some(v) => Err(Error::UnknownNode(format!("#{}", v.0))),
            None => Ok(()),
        }
    }

    /// Copy without the edges selected by `drop`.
    pub(crate) fn without_edges(&self, drop: impl Fn(NodeId, NodeId) -> bool) -> CausalDag {
        let mut out = self.clone();
        for a in 0..self.len() {
            out.children[a].retain(|&b| !drop(NodeId(a), b));
        }
        for b in 0..self.len() {
            out.parents[b].retain(|&a| !drop(a, NodeId(b)));
        }
        out
    }

    /// Renders a node sequence with arrow directions, e.g. `Z- <- U -> Y`.
    pub fn render_path(&self, path: &[NodeId]) -> String {
        let mut s = String::new();
        for (i, &v) in path.iter().enumerate() {
            if i > 0 {
                let prev = path[i - 1];
                s.push_str(if self.has_edge(prev, v) { " -> " } else { " <- " });
            }
            s.push_str(self.name(v));
        }
        s
    }
}

impl fmt::Display for CausalDag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .edges()
            .map(|(a, b)| format!("{}->{}", self.name(a), self.name(b)))
            .collect();
        write!(f, "DAG[{}]", edges.join(", "))
    }
}
