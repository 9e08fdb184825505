//! Branch decomposition trees (BDTs) of merge trees.
//!
//! A branch is a monotone path from a saddle (or the root) up to a leaf. A
//! hierarchical decomposition covers every merge tree edge with exactly one
//! branch such that each branch starts on an interior node of its parent
//! branch. All values stored here are in split orientation: BDTs of join
//! trees hold negated values.

use std::fmt;

use thiserror::Error;

use crate::mergetree::MergeTree;
use crate::persistence::elder_pairs;

/// Largest number of branches a BDT may have; ancestor sets are bitmasks.
pub const MAX_BRANCHES: usize = 64;

#[derive(Debug, Error, PartialEq)]
pub enum BdtError {
    #[error("a BDT needs at least one branch")]
    Empty,
    #[error("BDT has {0} branches; at most {MAX_BRANCHES} are supported")]
    TooLarge(usize),
    #[error("branch 0 must be the root and the only branch without a parent")]
    BadRoot,
    #[error("branch {0} has an out-of-range or cyclic parent")]
    BadParent(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    /// Merge tree node index of the saddle (the root for the root branch).
    pub saddle: usize,
    /// Merge tree node index of the leaf.
    pub extremum: usize,
    pub saddle_id: usize,
    pub extremum_id: usize,
    pub saddle_value: f64,
    pub extremum_value: f64,
}

impl Branch {
    fn new(tree: &MergeTree, saddle: usize, extremum: usize) -> Self {
        Self {
            saddle,
            extremum,
            saddle_id: tree.id(saddle),
            extremum_id: tree.id(extremum),
            saddle_value: tree.value(saddle),
            extremum_value: tree.value(extremum),
        }
    }

    pub fn persistence(&self) -> f64 {
        (self.extremum_value - self.saddle_value).abs()
    }

    pub fn deletion_cost(&self) -> f64 {
        0.5 * self.persistence()
    }

    pub fn coords(&self) -> (f64, f64) {
        (self.saddle_value, self.extremum_value)
    }
}

/// A BDT stored as a flat arena; branch 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct Bdt {
    branches: Vec<Branch>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    /// Bit `a` of `ancestors[i]` is set iff `a` is a strict ancestor of `i`.
    ancestors: Vec<u64>,
}

impl Bdt {
    /// Builds a BDT from branches and parent links; only the tree shape is
    /// checked here, see [`validate_bdt`] for the decomposition property.
    pub fn from_parts(branches: Vec<Branch>, parent: Vec<Option<usize>>) -> Result<Self, BdtError> {
        let n = branches.len();
        if n == 0 {
            return Err(BdtError::Empty);
        }
        if n > MAX_BRANCHES {
            return Err(BdtError::TooLarge(n));
        }
        if parent.len() != n || parent[0].is_some() || parent[1..].iter().any(Option::is_none) {
            return Err(BdtError::BadRoot);
        }
        let mut children = vec![Vec::new(); n];
        for (i, p) in parent.iter().enumerate().skip(1) {
            let p = p.expect("checked above");
            if p >= n || p == i {
                return Err(BdtError::BadParent(i));
            }
            children[p].push(i);
        }
        let mut depth = vec![usize::MAX; n];
        let mut ancestors = vec![0u64; n];
        depth[0] = 0;
        let mut stack = vec![0];
        while let Some(i) = stack.pop() {
            for &c in &children[i] {
                depth[c] = depth[i] + 1;
                ancestors[c] = ancestors[i] | (1 << i);
                stack.push(c);
            }
        }
        if let Some(i) = depth.iter().position(|&d| d == usize::MAX) {
            return Err(BdtError::BadParent(i));
        }
        Ok(Self {
            branches,
            parent,
            children,
            depth,
            ancestors,
        })
    }

    /// BDT of a pairing given as `(saddle, leaf)` merge tree node indices of a
    /// split-oriented tree; the root pair must be present. Each branch's parent
    /// is the branch whose path passes through its saddle.
    fn from_pairing(tree: &MergeTree, pairs: &[(usize, usize)]) -> Self {
        let root = tree.root();
        let mut ordered: Vec<(usize, usize)> = pairs.to_vec();
        ordered.sort_by_key(|&(s, _)| s != root);
        // owner[node] = branch whose path contains node as a non-saddle vertex
        let mut owner = vec![usize::MAX; tree.len()];
        for (b, &(s, e)) in ordered.iter().enumerate() {
            let mut cur = e;
            while cur != s {
                owner[cur] = b;
                cur = tree.parent(cur).expect("leaf lies above its saddle");
            }
        }
        let branches: Vec<Branch> = ordered
            .iter()
            .map(|&(s, e)| Branch::new(tree, s, e))
            .collect();
        let parent = ordered
            .iter()
            .map(|&(s, _)| (s != root).then(|| owner[s]))
            .collect();
        Self::from_parts(branches, parent).expect("pairing yields a rooted tree")
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn branch(&self, i: usize) -> &Branch {
        &self.branches[i]
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn depth(&self, i: usize) -> usize {
        self.depth[i]
    }

    /// Strict ancestors of `i` as a bitmask over branch indices.
    pub fn ancestor_mask(&self, i: usize) -> u64 {
        self.ancestors[i]
    }

    /// `true` iff `a` is a strict ancestor of `b`.
    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        self.ancestors[b] >> a & 1 == 1
    }

    /// Sorted `(saddle id, extremum id)` pairs; equal keys mean equal
    /// decompositions of the same merge tree.
    pub fn pairing_key(&self) -> Vec<(usize, usize)> {
        let mut key: Vec<(usize, usize)> = self
            .branches
            .iter()
            .map(|b| (b.saddle_id, b.extremum_id))
            .collect();
        key.sort_unstable();
        key
    }

    fn fmt_node(&self, i: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = &self.branches[i];
        write!(
            f,
            "({}:{}, {}:{})",
            b.saddle_id, b.saddle_value, b.extremum_id, b.extremum_value
        )?;
        if !self.children[i].is_empty() {
            f.write_str("[")?;
            for (k, &c) in self.children[i].iter().enumerate() {
                if k > 0 {
                    f.write_str(", ")?;
                }
                self.fmt_node(c, f)?;
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}

impl fmt::Display for Bdt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_node(0, f)
    }
}

/// Interior nodes of the path from `saddle` up to `leaf`, bottom to top.
fn interior(tree: &MergeTree, saddle: usize, leaf: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut cur = tree.parent(leaf).expect("leaf is not the root");
    while cur != saddle {
        out.push(cur);
        cur = tree.parent(cur).expect("saddle is an ancestor of the leaf");
    }
    out.reverse();
    out
}

fn leaves_below(tree: &MergeTree, v: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut stack = vec![v];
    while let Some(i) = stack.pop() {
        if tree.is_leaf(i) {
            out.push(i);
        } else {
            stack.extend_from_slice(tree.children(i));
        }
    }
    out.sort_by_key(|&l| tree.id(l));
    out
}

/// Every hierarchical decomposition of `tree`, `2^(n/2 - 1)` in total.
///
/// Each placed branch fans out once over all combinations of leaf choices for
/// its interior saddles (a saddle may pair with any leaf behind its off-path
/// child). The order is lexicographic in these choices, ordered by leaf id,
/// with branches processed breadth-first. Fails if the tree is too large.
pub fn enumerate_bdts(tree: &MergeTree) -> Result<Vec<Bdt>, BdtError> {
    let split = tree.as_split();
    let t = split.as_ref();
    if t.leaf_count() > MAX_BRANCHES {
        return Err(BdtError::TooLarge(t.leaf_count()));
    }
    let root = t.root();
    let mut out = Vec::new();
    for first in leaves_below(t, root) {
        let mut pairs = vec![(root, first)];
        fan_out(t, &mut pairs, 0, &mut out);
    }
    Ok(out)
}

fn fan_out(t: &MergeTree, pairs: &mut Vec<(usize, usize)>, next: usize, out: &mut Vec<Bdt>) {
    if next == pairs.len() {
        out.push(Bdt::from_pairing(t, pairs));
        return;
    }
    let (s, e) = pairs[next];
    let path = interior(t, s, e);
    let options: Vec<Vec<usize>> = path
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let on_path = if k + 1 < path.len() { path[k + 1] } else { e };
            let off = t
                .children(v)
                .iter()
                .copied()
                .find(|&c| c != on_path)
                .expect("interior saddles have two children");
            leaves_below(t, off)
        })
        .collect();
    let base = pairs.len();
    let mut choice = vec![0usize; path.len()];
    loop {
        pairs.truncate(base);
        pairs.extend(
            path.iter()
                .zip(&choice)
                .zip(&options)
                .map(|((&v, &c), o)| (v, o[c])),
        );
        fan_out(t, pairs, next + 1, out);
        // odometer, last saddle varies fastest
        let mut k = path.len();
        loop {
            if k == 0 {
                pairs.truncate(base);
                return;
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < options[k].len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

/// The BDT whose branches are the elder-rule pairs.
pub fn persistence_bdt(tree: &MergeTree) -> Result<Bdt, BdtError> {
    let split = tree.as_split();
    let t = split.as_ref();
    if t.leaf_count() > MAX_BRANCHES {
        return Err(BdtError::TooLarge(t.leaf_count()));
    }
    Ok(Bdt::from_pairing(t, &elder_pairs(t)))
}

/// `true` iff `b` is a hierarchical decomposition of `tree`.
pub fn validate_bdt(tree: &MergeTree, b: &Bdt) -> bool {
    let split = tree.as_split();
    let t = split.as_ref();
    if b.len() * 2 != t.len() {
        return false;
    }
    let mut covered = vec![0u32; t.len()];
    let mut paths = Vec::with_capacity(b.len());
    for (i, br) in b.branches().iter().enumerate() {
        let (s, e) = (br.saddle, br.extremum);
        if s >= t.len() || e >= t.len() || !t.is_leaf(e) || s == e {
            return false;
        }
        if (br.saddle_id, br.extremum_id) != (t.id(s), t.id(e))
            || br.saddle_value.to_bits() != t.value(s).to_bits()
            || br.extremum_value.to_bits() != t.value(e).to_bits()
        {
            return false;
        }
        let Some(path) = t.path_up(s, e) else {
            return false;
        };
        if (i == b.root()) != (s == t.root()) {
            return false;
        }
        for &v in &path[1..] {
            covered[v] += 1;
        }
        paths.push(path);
    }
    if (0..t.len()).any(|v| covered[v] != u32::from(v != t.root())) {
        return false;
    }
    (0..b.len()).filter(|&i| i != b.root()).all(|i| {
        let p = b.parent(i).expect("non-root branches have parents");
        let path = &paths[p];
        path[1..path.len() - 1].contains(&b.branch(i).saddle)
    })
}
