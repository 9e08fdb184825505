//! Merge trees (split and join trees) of piecewise-linear scalar fields.
//!
//! Most of the crate works on split trees: the root is the global minimum,
//! leaves are maxima and values increase along every root-to-leaf path. A
//! join tree is stored with [`Orientation::Join`] and its original values;
//! [`MergeTree::as_split`] negates it into split form when needed.

mod extract;
mod random;
mod simplify;

pub use extract::{extract_join_tree, extract_split_tree};
pub use random::{random_merge_tree, random_merge_tree_with, shuffle_children, RandomTreeParams};
pub use simplify::{simplify_persistence, simplify_to_node_count};

use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TreeError {
    #[error("a merge tree needs at least 2 nodes, got {0}")]
    TooSmall(usize),
    #[error("duplicate node id {0}")]
    DuplicateId(usize),
    #[error("unknown node id {0}")]
    UnknownId(usize),
    #[error("node {0} has a non-finite value")]
    NonFinite(usize),
    #[error("node {0} has more than one parent")]
    MultipleParents(usize),
    #[error("expected exactly one root, found {0}")]
    RootCount(usize),
    #[error("node {0} is not reachable from the root")]
    Disconnected(usize),
    #[error("root {id} must have exactly one child, has {children}")]
    RootDegree { id: usize, children: usize },
    #[error("interior node {id} must have exactly two children, has {children}")]
    InteriorDegree { id: usize, children: usize },
    #[error("edge {parent} -> {child} violates the value order")]
    NotMonotone { parent: usize, child: usize },
    #[error("node {id} declared as {declared} but is structurally a {actual}")]
    KindMismatch {
        id: usize,
        declared: &'static str,
        actual: &'static str,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Root,
    Saddle,
    Leaf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// Superlevel-set tree: values increase away from the root.
    Split,
    /// Sublevel-set tree: values decrease away from the root.
    Join,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergeNode {
    pub id: usize,
    pub value: f64,
    pub kind: NodeKind,
}

/// A rooted merge tree. Nodes are addressed by dense indices `0..len()`;
/// `id` is the external label used by the file format.
#[derive(Debug, Clone)]
pub struct MergeTree {
    orientation: Orientation,
    nodes: Vec<MergeNode>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    root: usize,
}

impl MergeTree {
    /// Builds a tree from `(id, value)` nodes and `(parent id, child id)`
    /// edges. Node kinds are derived from the structure.
    pub fn from_edges(
        orientation: Orientation,
        nodes: &[(usize, f64)],
        edges: &[(usize, usize)],
    ) -> Result<Self, TreeError> {
        let n = nodes.len();
        if n < 2 {
            return Err(TreeError::TooSmall(n));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, &(id, value)) in nodes.iter().enumerate() {
            if index.insert(id, i).is_some() {
                return Err(TreeError::DuplicateId(id));
            }
            if !value.is_finite() {
                return Err(TreeError::NonFinite(id));
            }
        }
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        for &(p, c) in edges {
            let pi = *index.get(&p).ok_or(TreeError::UnknownId(p))?;
            let ci = *index.get(&c).ok_or(TreeError::UnknownId(c))?;
            if parent[ci].is_some() {
                return Err(TreeError::MultipleParents(c));
            }
            parent[ci] = Some(pi);
            children[pi].push(ci);
        }
        let roots: Vec<usize> = (0..n).filter(|&i| parent[i].is_none()).collect();
        if roots.len() != 1 {
            return Err(TreeError::RootCount(roots.len()));
        }
        let root = roots[0];
        let nodes = nodes
            .iter()
            .enumerate()
            .map(|(i, &(id, value))| MergeNode {
                id,
                value,
                kind: if i == root {
                    NodeKind::Root
                } else if children[i].is_empty() {
                    NodeKind::Leaf
                } else {
                    NodeKind::Saddle
                },
            })
            .collect();
        let tree = Self {
            orientation,
            nodes,
            parent,
            children,
            root,
        };
        tree.validate()?;
        Ok(tree)
    }

    /// Builds a tree from dense parent pointers; `nodes[i]` has parent
    /// `parent[i]`.
    pub(crate) fn from_parents(
        orientation: Orientation,
        ids_values: Vec<(usize, f64)>,
        parent: Vec<Option<usize>>,
    ) -> Result<Self, TreeError> {
        let edges: Vec<(usize, usize)> = parent
            .iter()
            .enumerate()
            .filter_map(|(c, p)| p.map(|p| (ids_values[p].0, ids_values[c].0)))
            .collect();
        Self::from_edges(orientation, &ids_values, &edges)
    }

    fn validate(&self) -> Result<(), TreeError> {
        let root = self.root;
        if self.children[root].len() != 1 {
            return Err(TreeError::RootDegree {
                id: self.nodes[root].id,
                children: self.children[root].len(),
            });
        }
        let mut seen = vec![false; self.len()];
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            seen[i] = true;
            for &c in &self.children[i] {
                let ordered = match self.orientation {
                    Orientation::Split => self.nodes[c].value >= self.nodes[i].value,
                    Orientation::Join => self.nodes[c].value <= self.nodes[i].value,
                };
                if !ordered {
                    return Err(TreeError::NotMonotone {
                        parent: self.nodes[i].id,
                        child: self.nodes[c].id,
                    });
                }
                stack.push(c);
            }
            if i != root && !self.children[i].is_empty() && self.children[i].len() != 2 {
                return Err(TreeError::InteriorDegree {
                    id: self.nodes[i].id,
                    children: self.children[i].len(),
                });
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(TreeError::Disconnected(self.nodes[i].id));
        }
        Ok(())
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn nodes(&self) -> &[MergeNode] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &MergeNode {
        &self.nodes[i]
    }

    pub fn value(&self, i: usize) -> f64 {
        self.nodes[i].value
    }

    pub fn id(&self, i: usize) -> usize {
        self.nodes[i].id
    }

    pub fn kind(&self, i: usize) -> NodeKind {
        self.nodes[i].kind
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn is_leaf(&self, i: usize) -> bool {
        self.children[i].is_empty()
    }

    pub fn index_of(&self, id: usize) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Leaf indices, in index order.
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_leaf(i)).collect()
    }

    pub fn leaf_count(&self) -> usize {
        self.children.iter().filter(|c| c.is_empty()).count()
    }

    pub fn saddle_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Saddle)
            .count()
    }

    /// `true` if `a` is a (non-strict) ancestor of `b`.
    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        let mut cur = Some(b);
        while let Some(c) = cur {
            if c == a {
                return true;
            }
            cur = self.parent[c];
        }
        false
    }

    /// The node indices on the path from `lower` up to `upper`, inclusive,
    /// or `None` if `lower` is not an ancestor of `upper`.
    pub fn path_up(&self, lower: usize, upper: usize) -> Option<Vec<usize>> {
        let mut path = vec![upper];
        let mut cur = upper;
        while cur != lower {
            cur = self.parent[cur]?;
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }

    /// Copy with all values negated and the orientation flipped.
    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        for n in &mut out.nodes {
            n.value = -n.value;
        }
        out.orientation = match self.orientation {
            Orientation::Split => Orientation::Join,
            Orientation::Join => Orientation::Split,
        };
        out
    }

    /// This tree in split orientation (negated if it is a join tree).
    pub fn as_split(&self) -> Cow<'_, MergeTree> {
        match self.orientation {
            Orientation::Split => Cow::Borrowed(self),
            Orientation::Join => Cow::Owned(self.negated()),
        }
    }

    /// Copy with the value of node `i` replaced. Fails if the order along
    /// the tree would break.
    pub fn with_value(&self, i: usize, value: f64) -> Result<Self, TreeError> {
        let mut out = self.clone();
        out.nodes[i].value = value;
        if !value.is_finite() {
            return Err(TreeError::NonFinite(out.nodes[i].id));
        }
        out.validate()?;
        Ok(out)
    }

    /// Copy with each node's children list reversed; structurally identical.
    pub fn with_reversed_children(&self) -> Self {
        let mut out = self.clone();
        for c in &mut out.children {
            c.reverse();
        }
        out
    }

    fn canonical(&self, i: usize, out: &mut String) {
        let v = self.nodes[i].value;
        let v = if v == 0.0 { 0.0 } else { v };
        let mut parts: Vec<String> = self.children[i]
            .iter()
            .map(|&c| {
                let mut s = String::new();
                self.canonical(c, &mut s);
                s
            })
            .collect();
        parts.sort_unstable();
        let _ = write!(out, "({:016x}", v.to_bits());
        for p in parts {
            out.push_str(&p);
        }
        out.push(')');
    }

    /// Canonical string of the unordered, valued tree shape.
    pub fn canonical_form(&self) -> String {
        let mut s = String::new();
        self.canonical(self.root, &mut s);
        s
    }

    /// Serializes to the merge tree text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n {}", self.len());
        for n in &self.nodes {
            let _ = writeln!(out, "{} {} {}", n.id, n.value, self.kind_label(n.kind));
        }
        for (c, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                let _ = writeln!(out, "{} {}", self.nodes[*p].id, self.nodes[c].id);
            }
        }
        out
    }

    fn kind_label(&self, kind: NodeKind) -> &'static str {
        match (kind, self.orientation) {
            (NodeKind::Root, _) => "root",
            (NodeKind::Saddle, _) => "saddle",
            (NodeKind::Leaf, Orientation::Split) => "max",
            (NodeKind::Leaf, Orientation::Join) => "min",
        }
    }

    /// Parses the merge tree text format. Orientation is inferred from the
    /// leaf labels (`max` for split trees, `min` for join trees).
    pub fn parse(text: &str) -> Result<Self, TreeError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let perr = |line: usize, msg: String| TreeError::Parse { line, msg };

        let (hl, header) = lines.next().ok_or_else(|| perr(1, "empty file".into()))?;
        let count: usize = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["n", c] => c
                .parse()
                .map_err(|_| perr(hl, format!("bad node count `{c}`")))?,
            _ => return Err(perr(hl, "expected `n <count>`".into())),
        };

        let mut nodes = Vec::with_capacity(count);
        let mut declared = Vec::with_capacity(count);
        let mut orientation = None;
        for _ in 0..count {
            let (ln, line) = lines
                .next()
                .ok_or_else(|| perr(hl, format!("expected {count} node lines")))?;
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [id, value, kind] = parts.as_slice() else {
                return Err(perr(ln, "expected `<id> <value> <kind>`".into()));
            };
            let id: usize = id.parse().map_err(|_| perr(ln, format!("bad id `{id}`")))?;
            let value: f64 = value
                .parse()
                .map_err(|_| perr(ln, format!("bad value `{value}`")))?;
            let kind = match *kind {
                "root" => NodeKind::Root,
                "saddle" => NodeKind::Saddle,
                "max" | "min" => {
                    let o = if *kind == "max" {
                        Orientation::Split
                    } else {
                        Orientation::Join
                    };
                    if orientation.replace(o).is_some_and(|prev| prev != o) {
                        return Err(perr(ln, "mixed `max` and `min` leaves".into()));
                    }
                    NodeKind::Leaf
                }
                other => return Err(perr(ln, format!("unknown kind `{other}`"))),
            };
            nodes.push((id, value));
            declared.push(kind);
        }
        let mut edges = Vec::with_capacity(count.saturating_sub(1));
        for (ln, line) in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [p, c] = parts.as_slice() else {
                return Err(perr(ln, "expected `<parent-id> <child-id>`".into()));
            };
            let p: usize = p.parse().map_err(|_| perr(ln, format!("bad id `{p}`")))?;
            let c: usize = c.parse().map_err(|_| perr(ln, format!("bad id `{c}`")))?;
            edges.push((p, c));
        }
        let tree = Self::from_edges(orientation.unwrap_or(Orientation::Split), &nodes, &edges)?;
        for (i, kind) in declared.into_iter().enumerate() {
            if kind != tree.nodes[i].kind {
                return Err(TreeError::KindMismatch {
                    id: tree.nodes[i].id,
                    declared: kind_name(kind),
                    actual: kind_name(tree.nodes[i].kind),
                });
            }
        }
        Ok(tree)
    }
}

fn kind_name(kind: NodeKind) -> &'static str {
    match kind {
        NodeKind::Root => "root",
        NodeKind::Saddle => "saddle",
        NodeKind::Leaf => "leaf",
    }
}

/// `true` iff a value- and edge-preserving bijection exists between the trees.
pub fn is_isomorphic(a: &MergeTree, b: &MergeTree) -> bool {
    a.orientation == b.orientation && a.len() == b.len() && a.canonical_form() == b.canonical_form()
}
