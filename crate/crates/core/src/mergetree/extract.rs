use super::{MergeTree, Orientation};
use crate::field::SimplicialField;

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> usize {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return a;
        }
        let (big, small) = if self.size[a] >= self.size[b] {
            (a, b)
        } else {
            (b, a)
        };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        big
    }
}

/// Split tree by a union-find sweep over vertices in descending strict order.
///
/// A vertex joining `k > 2` components becomes a chain of `k - 1` saddles at
/// the same value; components are attached in ascending order of their
/// representative (the vertex where the component was born). The lowest
/// saddle of the chain keeps the vertex id, the others get fresh ids starting
/// at the vertex count.
pub fn extract_split_tree(field: &SimplicialField) -> MergeTree {
    let n = field.vertex_count();
    let mut uf = UnionFind::new(n);
    // Per union-find root: lowest tree node of the component and its birth vertex.
    let mut lowest = vec![usize::MAX; n];
    let mut rep = vec![usize::MAX; n];
    let mut processed = vec![false; n];

    let mut nodes: Vec<(usize, f64)> = Vec::new();
    let mut parent: Vec<Option<usize>> = Vec::new();
    let mut next_id = n;
    let mut last_node = None;

    for &v in field.ascending().iter().rev() {
        let mut comps: Vec<usize> = field
            .neighbors(v)
            .iter()
            .filter(|&&u| processed[u])
            .map(|&u| uf.find(u))
            .collect();
        comps.sort_unstable();
        comps.dedup();
        processed[v] = true;
        let value = field.value(v);

        match comps.len() {
            0 => {
                nodes.push((v, value));
                parent.push(None);
                lowest[v] = nodes.len() - 1;
                rep[v] = v;
                last_node = Some(nodes.len() - 1);
            }
            1 => {
                let c = comps[0];
                let (low, r) = (lowest[c], rep[c]);
                let root = uf.union(c, v);
                lowest[root] = low;
                rep[root] = r;
                last_node = None;
            }
            k => {
                comps.sort_by_key(|&c| rep[c]);
                // The oldest component (highest birth vertex) keeps its representative.
                let oldest_rep = comps
                    .iter()
                    .map(|&c| rep[c])
                    .max_by_key(|&r| field.rank(r))
                    .unwrap_or(v);
                let mut cur = lowest[comps[0]];
                for j in 1..k {
                    let id = if j == k - 1 {
                        v
                    } else {
                        next_id += 1;
                        next_id - 1
                    };
                    nodes.push((id, value));
                    parent.push(None);
                    let s = nodes.len() - 1;
                    parent[cur] = Some(s);
                    parent[lowest[comps[j]]] = Some(s);
                    cur = s;
                }
                let mut root = uf.find(v);
                for &c in &comps {
                    root = uf.union(root, c);
                }
                lowest[root] = cur;
                rep[root] = oldest_rep;
                last_node = Some(cur);
            }
        }
    }

    // The global minimum is the last vertex swept. If it was regular it
    // becomes the root; otherwise a fresh root sits below it at equal value.
    let global_min = field.ascending()[0];
    let top = lowest[uf.find(global_min)];
    let root_id = if last_node.is_some() {
        next_id
    } else {
        global_min
    };
    nodes.push((root_id, field.value(global_min)));
    parent.push(None);
    let r = nodes.len() - 1;
    parent[top] = Some(r);

    MergeTree::from_parents(Orientation::Split, nodes, parent)
        .expect("sweep produces a valid split tree")
}

/// Join tree: the split tree of the negated field with values negated back.
pub fn extract_join_tree(field: &SimplicialField) -> MergeTree {
    extract_split_tree(&field.negated()).negated()
}
