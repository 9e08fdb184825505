//! Elder-rule persistence diagrams of merge trees and the exact bottleneck
//! distance between them.

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

use crate::mergetree::MergeTree;

#[derive(Debug, Error, PartialEq)]
pub enum PersistenceError {
    #[error("cannot pair the empty node with itself")]
    BothEmpty,
}

/// One point of a persistence diagram. For split trees the extremum lies
/// above the saddle; for join trees below. The global pair uses the root as
/// its saddle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePair {
    pub saddle_id: usize,
    pub extremum_id: usize,
    pub saddle_value: f64,
    pub extremum_value: f64,
    pub is_global: bool,
}

impl PersistencePair {
    pub fn persistence(&self) -> f64 {
        (self.extremum_value - self.saddle_value).abs()
    }

    /// Cost of matching this pair to the empty node.
    pub fn deletion_cost(&self) -> f64 {
        0.5 * self.persistence()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PersistenceDiagram {
    pub pairs: Vec<PersistencePair>,
}

impl PersistenceDiagram {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn global(&self) -> Option<&PersistencePair> {
        self.pairs.iter().find(|p| p.is_global)
    }

    /// CSV with header `saddle,extremum,is_global`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("saddle,extremum,is_global\n");
        for p in &self.pairs {
            let _ = writeln!(
                out,
                "{},{},{}",
                p.saddle_value, p.extremum_value, p.is_global
            );
        }
        out
    }

    /// Persistences sorted ascending.
    pub fn sorted_persistences(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .pairs
            .iter()
            .map(PersistencePair::persistence)
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// Elder-rule pairing as node indices `(saddle or root, leaf)`. The root's
/// pair comes last. Values are compared in split orientation; among equal
/// values the larger id counts as higher.
pub(crate) fn elder_pairs(tree: &MergeTree) -> Vec<(usize, usize)> {
    let split = tree.as_split();
    let t = split.as_ref();
    let higher = |a: usize, b: usize| {
        t.value(a)
            .total_cmp(&t.value(b))
            .then(t.id(a).cmp(&t.id(b)))
            .is_gt()
    };

    // post-order
    let mut order = Vec::with_capacity(t.len());
    let mut stack = vec![t.root()];
    while let Some(i) = stack.pop() {
        order.push(i);
        stack.extend_from_slice(t.children(i));
    }
    let mut oldest = vec![usize::MAX; t.len()];
    let mut pairs = Vec::with_capacity(t.leaf_count());
    for &i in order.iter().rev() {
        match t.children(i) {
            [] => oldest[i] = i,
            [c] => oldest[i] = oldest[*c],
            [a, b] => {
                let (oa, ob) = (oldest[*a], oldest[*b]);
                let (old, young) = if higher(oa, ob) { (oa, ob) } else { (ob, oa) };
                pairs.push((i, young));
                oldest[i] = old;
            }
            _ => unreachable!("merge trees are binary"),
        }
    }
    pairs.push((t.root(), oldest[t.root()]));
    pairs
}

/// Elder-rule persistence diagram; the global pair is listed last.
pub fn elder_rule_diagram(tree: &MergeTree) -> PersistenceDiagram {
    let root = tree.root();
    let pairs = elder_pairs(tree)
        .into_iter()
        .map(|(s, e)| PersistencePair {
            saddle_id: tree.id(s),
            extremum_id: tree.id(e),
            saddle_value: tree.value(s),
            extremum_value: tree.value(e),
            is_global: s == root,
        })
        .collect();
    PersistenceDiagram { pairs }
}

pub fn relabel_cost(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

pub fn deletion_cost(a: (f64, f64)) -> f64 {
    0.5 * (a.1 - a.0).abs()
}

/// Cost of one matched pair, with `None` standing for the empty node.
pub fn pair_cost(
    x: Option<&PersistencePair>,
    y: Option<&PersistencePair>,
) -> Result<f64, PersistenceError> {
    let coords = |p: &PersistencePair| (p.saddle_value, p.extremum_value);
    match (x, y) {
        (Some(x), Some(y)) => Ok(relabel_cost(coords(x), coords(y))),
        (Some(p), None) | (None, Some(p)) => Ok(p.deletion_cost()),
        (None, None) => Err(PersistenceError::BothEmpty),
    }
}

/// Exact bottleneck distance: binary search over all candidate costs with a
/// perfect-matching feasibility test on the diagonal-augmented bipartite graph.
pub fn bottleneck_distance(d1: &PersistenceDiagram, d2: &PersistenceDiagram) -> f64 {
    let a: Vec<(f64, f64)> = d1
        .pairs
        .iter()
        .map(|p| (p.saddle_value, p.extremum_value))
        .collect();
    let b: Vec<(f64, f64)> = d2
        .pairs
        .iter()
        .map(|p| (p.saddle_value, p.extremum_value))
        .collect();
    bottleneck_points(&a, &b)
}

/// Bottleneck distance between two point sets given as `(birth, death)`.
pub fn bottleneck_points(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let (n, m) = (a.len(), b.len());
    if n == 0 && m == 0 {
        return 0.0;
    }
    let mut candidates = vec![0.0];
    for &p in a {
        candidates.push(deletion_cost(p));
        for &q in b {
            candidates.push(relabel_cost(p, q));
        }
    }
    candidates.extend(b.iter().map(|&q| deletion_cost(q)));
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // left: a[0..n] then n..n+m diagonal copies; right: b[0..m] then m..m+n
    let size = n + m;
    let cost = |i: usize, j: usize| -> f64 {
        match (i < n, j < m) {
            (true, true) => relabel_cost(a[i], b[j]),
            (true, false) => deletion_cost(a[i]),
            (false, true) => deletion_cost(b[j]),
            (false, false) => 0.0,
        }
    };
    let feasible = |t: f64| {
        let adj: Vec<Vec<usize>> = (0..size)
            .map(|i| (0..size).filter(|&j| cost(i, j) <= t).collect())
            .collect();
        hopcroft_karp(&adj, size) == size
    };
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Maximum bipartite matching size; `adj[u]` lists right vertices in `0..right`.
pub(crate) fn hopcroft_karp(adj: &[Vec<usize>], right: usize) -> usize {
    const NIL: usize = usize::MAX;
    let left = adj.len();
    let mut match_l = vec![NIL; left];
    let mut match_r = vec![NIL; right];
    let mut dist = vec![0usize; left];
    let mut matched = 0;

    loop {
        // BFS layering from free left vertices
        let mut queue = VecDeque::new();
        for u in 0..left {
            if match_l[u] == NIL {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == NIL {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        for u in 0..left {
            if match_l[u] == NIL && augment(u, adj, &mut match_l, &mut match_r, &mut dist) {
                matched += 1;
            }
        }
    }
    matched
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    match_l: &mut [usize],
    match_r: &mut [usize],
    dist: &mut [usize],
) -> bool {
    for &v in &adj[u] {
        let w = match_r[v];
        if w == usize::MAX || (dist[w] == dist[u] + 1 && augment(w, adj, match_l, match_r, dist)) {
            match_l[u] = v;
            match_r[v] = u;
            return true;
        }
    }
    dist[u] = usize::MAX;
    false
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::field::{synth_baseline, triangulate, BaselineParams};
    use crate::mergetree::{extract_split_tree, random_merge_tree, MergeTree, Orientation};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Minimum over all partial injections of `a` into `b`.
    pub(crate) fn brute_bottleneck(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
        fn go(
            i: usize,
            a: &[(f64, f64)],
            b: &[(f64, f64)],
            used: &mut Vec<bool>,
            cur: f64,
            best: &mut f64,
        ) {
            if cur >= *best {
                return;
            }
            if i == a.len() {
                let rest = b
                    .iter()
                    .zip(used.iter())
                    .filter(|(_, u)| !**u)
                    .map(|(q, _)| deletion_cost(*q))
                    .fold(cur, f64::max);
                *best = best.min(rest);
                return;
            }
            go(i + 1, a, b, used, cur.max(deletion_cost(a[i])), best);
            for j in 0..b.len() {
                if !used[j] {
                    used[j] = true;
                    go(i + 1, a, b, used, cur.max(relabel_cost(a[i], b[j])), best);
                    used[j] = false;
                }
            }
        }
        let mut best = f64::INFINITY;
        go(0, a, b, &mut vec![false; b.len()], 0.0, &mut best);
        if best.is_infinite() {
            0.0
        } else {
            best
        }
    }

    /// Elder rule by exhaustive path checks: a leaf's pair is the lowest
    /// ancestor at which an older leaf joins its component.
    fn brute_elder(t: &MergeTree) -> Vec<(usize, usize)> {
        let older = |a: usize, b: usize| (t.value(a), t.id(a)) > (t.value(b), t.id(b));
        let leaves_below = |s: usize| -> Vec<usize> {
            t.leaves()
                .into_iter()
                .filter(|&l| t.is_ancestor(s, l))
                .collect()
        };
        let mut out = Vec::new();
        for l in t.leaves() {
            let mut cur = t.parent(l);
            let mut paired = false;
            while let Some(s) = cur {
                if s != t.root() && leaves_below(s).into_iter().any(|o| older(o, l)) {
                    out.push((s, l));
                    paired = true;
                    break;
                }
                cur = t.parent(s);
            }
            if !paired {
                out.push((t.root(), l));
            }
        }
        out.sort_unstable();
        out
    }

    fn diagram(points: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram {
            pairs: points
                .iter()
                .map(|&(s, e)| PersistencePair {
                    saddle_id: 0,
                    extremum_id: 0,
                    saddle_value: s,
                    extremum_value: e,
                    is_global: false,
                })
                .collect(),
        }
    }

    #[test]
    fn single_edge_diagram() {
        let t =
            MergeTree::from_edges(Orientation::Split, &[(0, 0.0), (1, 5.0)], &[(0, 1)]).unwrap();
        let d = elder_rule_diagram(&t);
        assert_eq!(d.len(), 1);
        let g = d.global().unwrap();
        assert_eq!((g.saddle_value, g.extremum_value), (0.0, 5.0));
    }

    #[test]
    fn sample_tree_pairs_with_younger_maxima() {
        let t = crate::mergetree::tests::sample();
        let d = elder_rule_diagram(&t);
        let mut got: Vec<(usize, usize, bool)> = d
            .pairs
            .iter()
            .map(|p| (p.saddle_id, p.extremum_id, p.is_global))
            .collect();
        got.sort_unstable();
        assert_eq!(got, vec![(0, 2, true), (1, 4, false), (3, 5, false)]);
    }

    #[test]
    fn baseline_diagram() {
        let g = synth_baseline(&BaselineParams::default()).unwrap();
        let t = extract_split_tree(&triangulate(&g).unwrap());
        let d = elder_rule_diagram(&t);
        assert_eq!(d.len(), 3);
        let mut p = d.sorted_persistences();
        p.pop();
        // peaks[1] dies at saddles[1], peaks[2] at saddles[0]
        assert!((p[0] - (5.0 - 1.05)).abs() < 1e-12);
        assert!((p[1] - (5.2 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn elder_rule_matches_path_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in (2..=14).step_by(2) {
            for _ in 0..20 {
                let t = random_merge_tree(n, &mut rng);
                let mut fast = elder_pairs(&t);
                fast.sort_unstable();
                assert_eq!(fast, brute_elder(&t));
            }
        }
    }

    #[test]
    fn join_tree_diagram_mirrors_split() {
        let t = crate::mergetree::tests::sample();
        let d = elder_rule_diagram(&t);
        let dj = elder_rule_diagram(&t.negated());
        for (a, b) in d.pairs.iter().zip(&dj.pairs) {
            assert_eq!(a.saddle_value, -b.saddle_value);
            assert_eq!(a.persistence(), b.persistence());
        }
    }

    #[test]
    fn pair_costs() {
        let p = diagram(&[(0.0, 4.0), (1.0, 4.0)]).pairs;
        assert_eq!(pair_cost(Some(&p[0]), None).unwrap(), 2.0);
        assert_eq!(pair_cost(Some(&p[0]), Some(&p[1])).unwrap(), 1.0);
        assert_eq!(pair_cost(Some(&p[0]), Some(&p[0])).unwrap(), 0.0);
        assert_eq!(pair_cost(None, None), Err(PersistenceError::BothEmpty));
    }

    #[test]
    fn bottleneck_examples() {
        let d = diagram(&[(0.0, 4.0), (1.0, 3.0)]);
        assert_eq!(bottleneck_distance(&d, &d), 0.0);
        assert_eq!(
            bottleneck_distance(&diagram(&[(0.0, 4.0)]), &diagram(&[])),
            2.0
        );
        assert_eq!(bottleneck_distance(&diagram(&[]), &diagram(&[])), 0.0);
    }

    #[test]
    fn csv_header() {
        let t = crate::mergetree::tests::sample();
        let csv = elder_rule_diagram(&t).to_csv();
        assert!(csv.starts_with("saddle,extremum,is_global\n"));
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.contains("0,10,true"));
    }

    fn points(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
        proptest::collection::vec((0u8..20, 0u8..20), 0..=max).prop_map(|v| {
            v.into_iter()
                .map(|(a, b)| (f64::from(a.min(b)) / 2.0, f64::from(a.max(b)) / 2.0))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn matches_exhaustive_oracle(a in points(5), b in points(5)) {
            prop_assert_eq!(bottleneck_points(&a, &b), brute_bottleneck(&a, &b));
        }

        #[test]
        fn symmetric_and_triangle(a in points(4), b in points(4), c in points(4)) {
            let ab = bottleneck_points(&a, &b);
            prop_assert_eq!(ab, bottleneck_points(&b, &a));
            let bc = bottleneck_points(&b, &c);
            let ac = bottleneck_points(&a, &c);
            prop_assert!(ac <= ab + bc + 1e-12);
        }
    }
}
