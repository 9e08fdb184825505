//! Cost of a complete matching through its induced zigzag diagrams.
//!
//! The source BDT is edited into the target: insertions, then non-movement
//! relabels, then movement relabels, then deletions. Every merge tree vertex
//! follows its own trajectory of values; at each swap the moving saddle meets
//! the passed saddle at the passed saddle's current value and trajectories
//! may continue on either vertex. The cost of a direction is the largest
//! spread (max minus min value) over all trajectories.

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

use crate::bdt::{Bdt, Branch};
use crate::matching::{Matching, MatchingError};

#[derive(Debug, Error, PartialEq)]
pub enum ZigzagError {
    #[error("incomplete matching: {0}")]
    Incomplete(#[from] MatchingError),
    #[error("branch {0} is not in the BDT")]
    NotInBdt(usize),
    #[error("the root branch cannot move")]
    RootMove,
    #[error("target parent {target} lies in the subtree of moving branch {branch}")]
    Blocked { branch: usize, target: usize },
    #[error("{0} movements cannot be applied in any order")]
    Stuck(usize),
}

/// The edit operations of one direction, in application order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EditScript {
    /// Inserted target branches, by increasing target depth.
    pub insertions: Vec<usize>,
    /// Non-movement relabels `(source, target)` whose values change.
    pub relabels: Vec<(usize, usize)>,
    /// Movement relabels `(source, target)`.
    pub movements: Vec<(usize, usize)>,
    /// Deleted source branches, deepest first.
    pub deletions: Vec<usize>,
}

impl EditScript {
    pub fn is_empty(&self) -> bool {
        self.insertions.is_empty()
            && self.relabels.is_empty()
            && self.movements.is_empty()
            && self.deletions.is_empty()
    }
}

pub fn build_edit_script(m: &Matching, src: &Bdt, dst: &Bdt) -> Result<EditScript, ZigzagError> {
    if m.left_len() != src.len() {
        return Err(MatchingError::LeftSize {
            got: m.left_len(),
            expected: src.len(),
        }
        .into());
    }
    if m.right_len() != dst.len() {
        return Err(MatchingError::RightOutOfRange(dst.len()).into());
    }
    if m.image(src.root()) != Some(dst.root()) {
        return Err(MatchingError::RootsUnmatched.into());
    }
    let inv = m.preimage();
    let mut insertions: Vec<usize> = (0..dst.len()).filter(|&v| inv[v].is_none()).collect();
    insertions.sort_by_key(|&v| (dst.depth(v), v));
    let mut relabels = Vec::new();
    let mut movements = Vec::new();
    let mut deletions = Vec::new();
    for u in 0..src.len() {
        match m.image(u) {
            None => deletions.push(u),
            Some(v) if m.is_movement(src, dst, u) => movements.push((u, v)),
            Some(v) => {
                if src.branch(u).coords() != dst.branch(v).coords() {
                    relabels.push((u, v));
                }
            }
        }
    }
    deletions.sort_by_key(|&u| (std::cmp::Reverse(src.depth(u)), u));
    Ok(EditScript {
        insertions,
        relabels,
        movements,
        deletions,
    })
}

/// Path from `from` to `to` through their lowest common ancestor, given by
/// parent links. Returns the path and its shallowest node.
fn path_between(parent: &[Option<usize>], from: usize, to: usize) -> (Vec<usize>, usize) {
    let chain = |mut x: usize| {
        let mut out = vec![x];
        while let Some(p) = parent[x] {
            out.push(p);
            x = p;
        }
        out
    };
    let up = chain(from);
    let down = chain(to);
    let lca = *down
        .iter()
        .find(|x| up.contains(x))
        .expect("nodes of one tree share the root");
    let mut path: Vec<usize> = up.iter().copied().take_while(|&x| x != lca).collect();
    path.push(lca);
    let tail: Vec<usize> = down.iter().copied().take_while(|&x| x != lca).collect();
    path.extend(tail.into_iter().rev());
    (path, lca)
}

/// Path `u`'s parent ~> `target_parent` in `b` and its intersection (the
/// shallowest path node). Empty when `target_parent` already is the parent.
pub fn movement_path(
    b: &Bdt,
    u: usize,
    target_parent: usize,
) -> Result<(Vec<usize>, usize), ZigzagError> {
    if u >= b.len() {
        return Err(ZigzagError::NotInBdt(u));
    }
    if target_parent >= b.len() {
        return Err(ZigzagError::NotInBdt(target_parent));
    }
    let p = b.parent(u).ok_or(ZigzagError::RootMove)?;
    if p == target_parent {
        return Ok((Vec::new(), target_parent));
    }
    if target_parent == u || b.is_ancestor(u, target_parent) {
        return Err(ZigzagError::Blocked {
            branch: u,
            target: target_parent,
        });
    }
    let parents: Vec<Option<usize>> = (0..b.len()).map(|i| b.parent(i)).collect();
    Ok(path_between(&parents, p, target_parent))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwapRecord {
    pub step: usize,
    /// Working-tree index of the moving branch.
    pub moving: usize,
    /// Working-tree index of the branch whose saddle is passed.
    pub passed: usize,
    pub moving_saddle_id: usize,
    pub passed_saddle_id: usize,
    pub meeting_value: f64,
}

/// Where a node of the working tree comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Source(usize),
    Inserted(usize),
}

/// Result of running one direction of the diagram.
#[derive(Debug, Clone, PartialEq)]
pub struct ZigzagRun {
    pub cost: f64,
    pub script: EditScript,
    pub swaps: Vec<SwapRecord>,
    /// One line per step: `<step> <op> <ids> <values>`. Empty unless traced.
    pub trace: Vec<String>,
    /// Parent links of the working tree after each movement. Empty unless traced.
    pub snapshots: Vec<Vec<Option<usize>>>,
    pub origin: Vec<Origin>,
    /// Final parent links; deleted nodes keep their last parent.
    pub final_parent: Vec<Option<usize>>,
    pub deleted: Vec<bool>,
    /// Final `(saddle, extremum)` values per working node.
    pub final_values: Vec<(f64, f64)>,
}

impl ZigzagRun {
    /// The target branch each surviving working node ends up as.
    pub fn target_of(&self, m: &Matching, x: usize) -> Option<usize> {
        if self.deleted[x] {
            return None;
        }
        match self.origin[x] {
            Origin::Source(u) => m.image(u),
            Origin::Inserted(v) => Some(v),
        }
    }

    /// `true` iff the surviving working tree has the target's shape and values.
    pub fn reaches(&self, m: &Matching, dst: &Bdt) -> bool {
        let n = self.origin.len();
        let mut seen = vec![false; dst.len()];
        for x in 0..n {
            let Some(v) = self.target_of(m, x) else {
                continue;
            };
            seen[v] = true;
            let b = dst.branch(v);
            if self.final_values[x] != b.coords() {
                return false;
            }
            let p = self.final_parent[x].and_then(|p| self.target_of(m, p));
            if p != dst.parent(v) {
                return false;
            }
        }
        seen.iter().all(|&s| s)
    }
}

/// Per vertex, the value ranges of the trajectories ending there. Ranges
/// contained in another range of the same vertex are dropped: every
/// continuation widens them less.
struct Spread {
    val: Vec<f64>,
    ranges: Vec<Vec<(f64, f64)>>,
    cost: f64,
}

impl Spread {
    fn add(&mut self, value: f64) -> usize {
        self.val.push(value);
        self.ranges.push(vec![(value, value)]);
        self.val.len() - 1
    }

    fn set(&mut self, x: usize, value: f64) {
        self.val[x] = value;
        for r in &mut self.ranges[x] {
            r.0 = r.0.min(value);
            r.1 = r.1.max(value);
            self.cost = self.cost.max(r.1 - r.0);
        }
        prune(&mut self.ranges[x]);
    }

    /// Vertices `a` and `b` coincide at `meeting`; trajectories may switch.
    fn swap(&mut self, a: usize, b: usize, meeting: f64) {
        self.set(a, meeting);
        self.set(b, meeting);
        let mut all = self.ranges[a].clone();
        all.extend_from_slice(&self.ranges[b]);
        prune(&mut all);
        self.ranges[a] = all.clone();
        self.ranges[b] = all;
    }
}

fn prune(ranges: &mut Vec<(f64, f64)>) {
    // by lo ascending, then hi descending; keep a range only if its hi beats
    // every earlier one
    ranges.sort_by(|p, q| p.0.total_cmp(&q.0).then(q.1.total_cmp(&p.1)));
    let mut best = f64::NEG_INFINITY;
    ranges.retain(|r| {
        let keep = r.1 > best;
        best = best.max(r.1);
        keep
    });
}

fn midpoint(b: &Branch) -> f64 {
    0.5 * (b.saddle_value + b.extremum_value)
}

/// Applies the induced diagram of `m` from `src` to `dst` and returns its cost.
pub fn simulate(
    m: &Matching,
    src: &Bdt,
    dst: &Bdt,
    traced: bool,
) -> Result<ZigzagRun, ZigzagError> {
    let script = build_edit_script(m, src, dst)?;
    let nl = src.len();
    let mut origin: Vec<Origin> = (0..nl).map(Origin::Source).collect();
    let mut parent: Vec<Option<usize>> = (0..nl).map(|u| src.parent(u)).collect();
    let mut spread = Spread {
        val: Vec::with_capacity(2 * (nl + script.insertions.len())),
        ranges: Vec::new(),
        cost: 0.0,
    };
    // working node x owns vertices 2x (saddle) and 2x + 1 (extremum)
    for b in src.branches() {
        spread.add(b.saddle_value);
        spread.add(b.extremum_value);
    }
    let mut labels: Vec<(usize, usize)> = src
        .branches()
        .iter()
        .map(|b| (b.saddle_id, b.extremum_id))
        .collect();
    let mut dst_to_work: Vec<usize> = vec![usize::MAX; dst.len()];
    for u in 0..nl {
        if let Some(v) = m.image(u) {
            dst_to_work[v] = u;
        }
    }

    let mut step = 0;
    let mut trace = Vec::new();
    let mut snapshots = Vec::new();
    let mut swaps = Vec::new();
    let log = |trace: &mut Vec<String>,
               step: usize,
               op: &str,
               ids: (usize, usize),
               from: (f64, f64),
               to: (f64, f64)| {
        if traced {
            trace.push(format!(
                "{step} {op} {},{} {}->{},{}->{}",
                ids.0, ids.1, from.0, to.0, from.1, to.1
            ));
        }
    };

    for &v in &script.insertions {
        let b = dst.branch(v);
        let mid = midpoint(b);
        let x = origin.len();
        origin.push(Origin::Inserted(v));
        parent.push(Some(
            dst_to_work[dst.parent(v).expect("the root is never inserted")],
        ));
        dst_to_work[v] = x;
        labels.push((b.saddle_id, b.extremum_id));
        spread.add(mid);
        spread.add(mid);
        spread.set(2 * x, b.saddle_value);
        spread.set(2 * x + 1, b.extremum_value);
        step += 1;
        log(
            &mut trace,
            step,
            "insert",
            labels[x],
            (mid, mid),
            b.coords(),
        );
    }

    let relabel = |spread: &mut Spread, x: usize, to: (f64, f64)| {
        let from = (spread.val[2 * x], spread.val[2 * x + 1]);
        spread.set(2 * x, to.0);
        spread.set(2 * x + 1, to.1);
        from
    };

    for &(u, v) in &script.relabels {
        let to = dst.branch(v).coords();
        let from = relabel(&mut spread, u, to);
        step += 1;
        log(&mut trace, step, "relabel", labels[u], from, to);
    }

    let depth = |parent: &[Option<usize>], mut x: usize| {
        let mut d = 0;
        while let Some(p) = parent[x] {
            d += 1;
            x = p;
        }
        d
    };
    let mut pending: Vec<(usize, usize)> = script.movements.clone();
    pending.sort_by_key(|&(u, _)| (depth(&parent, u), u));
    let mut queue: VecDeque<(usize, usize)> = pending.into();
    let mut stalled = 0;
    while let Some((u, v)) = queue.pop_front() {
        let target = dst_to_work[dst.parent(v).expect("movements are not roots")];
        // blocked while the target sits in u's subtree
        let mut x = Some(target);
        let mut blocked = false;
        while let Some(y) = x {
            if y == u {
                blocked = true;
                break;
            }
            x = parent[y];
        }
        if blocked {
            queue.push_back((u, v));
            stalled += 1;
            if stalled >= queue.len() {
                return Err(ZigzagError::Stuck(queue.len()));
            }
            continue;
        }
        stalled = 0;
        let from_parent = parent[u].ok_or(ZigzagError::RootMove)?;
        if from_parent != target {
            let (path, intersection) = path_between(&parent, from_parent, target);
            for &w in path.iter().filter(|&&w| w != intersection) {
                let meeting = spread.val[2 * w];
                spread.swap(2 * u, 2 * w, meeting);
                step += 1;
                if traced {
                    trace.push(format!(
                        "{step} swap {},{} {meeting}",
                        labels[u].0, labels[w].0
                    ));
                }
                swaps.push(SwapRecord {
                    step,
                    moving: u,
                    passed: w,
                    moving_saddle_id: labels[u].0,
                    passed_saddle_id: labels[w].0,
                    meeting_value: meeting,
                });
            }
        }
        parent[u] = Some(target);
        let to = dst.branch(v).coords();
        let from = relabel(&mut spread, u, to);
        step += 1;
        log(&mut trace, step, "move", labels[u], from, to);
        if traced {
            snapshots.push(parent.clone());
        }
    }

    let mut deleted = vec![false; origin.len()];
    for &u in &script.deletions {
        let b = src.branch(u);
        let mid = midpoint(b);
        let from = relabel(&mut spread, u, (mid, mid));
        deleted[u] = true;
        step += 1;
        log(&mut trace, step, "delete", labels[u], from, (mid, mid));
    }

    let final_values = (0..origin.len())
        .map(|x| (spread.val[2 * x], spread.val[2 * x + 1]))
        .collect();
    Ok(ZigzagRun {
        cost: spread.cost,
        script,
        swaps,
        trace,
        snapshots,
        origin,
        final_parent: parent,
        deleted,
        final_values,
    })
}

/// Cost of one direction: the diagram carrying `src` to `dst`.
pub fn trajectory_cost(m: &Matching, src: &Bdt, dst: &Bdt) -> Result<f64, ZigzagError> {
    simulate(m, src, dst, false).map(|r| r.cost)
}

/// Cost of a matching: the cheaper of its forward and backward diagrams.
pub fn matching_cost(m: &Matching, bf: &Bdt, bg: &Bdt) -> Result<f64, ZigzagError> {
    let forward = trajectory_cost(m, bf, bg)?;
    let backward = trajectory_cost(&m.reversed(), bg, bf)?;
    Ok(forward.min(backward))
}

/// Both directions' traces, for debugging.
pub fn trace_dump(m: &Matching, bf: &Bdt, bg: &Bdt) -> Result<String, ZigzagError> {
    let mut out = String::new();
    for (name, run) in [
        ("forward", simulate(m, bf, bg, true)?),
        ("backward", simulate(&m.reversed(), bg, bf, true)?),
    ] {
        let _ = writeln!(out, "# {name} cost={}", run.cost);
        for line in &run.trace {
            let _ = writeln!(out, "{line}");
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bdt::{enumerate_bdts, persistence_bdt};
    use crate::matching::legal_matchings;
    use crate::matching::tests::{branch, chain};
    use crate::mergetree::{random_merge_tree, MergeTree, Orientation};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bdt(values: &[(f64, f64)], parent: &[Option<usize>]) -> Bdt {
        let b = values.iter().map(|&(s, e)| branch(s, e)).collect();
        Bdt::from_parts(b, parent.to_vec()).unwrap()
    }

    fn all_matchings(nl: usize, nr: usize) -> Vec<Matching> {
        legal_matchings(&vec![true; nl], &vec![true; nr])
    }

    #[test]
    fn identity_is_free() {
        let b = chain();
        let m = Matching::identity(b.len());
        let s = build_edit_script(&m, &b, &b).unwrap();
        assert!(s.is_empty());
        assert_eq!(matching_cost(&m, &b, &b).unwrap(), 0.0);
    }

    #[test]
    fn single_branch_relabel() {
        let a = bdt(&[(0.0, 4.0)], &[None]);
        let b = bdt(&[(0.0, 4.5)], &[None]);
        let m = Matching::identity(1);
        assert_eq!(trajectory_cost(&m, &a, &b).unwrap(), 0.5);
        assert_eq!(matching_cost(&m, &a, &b).unwrap(), 0.5);
    }

    #[test]
    fn pure_relabel_cost_is_coordinate_max() {
        let a = bdt(&[(0.0, 10.0), (2.0, 5.0)], &[None, Some(0)]);
        let b = bdt(&[(0.0, 10.0), (2.5, 4.0)], &[None, Some(0)]);
        assert_eq!(matching_cost(&Matching::identity(2), &a, &b).unwrap(), 1.0);
    }

    #[test]
    fn insertion_and_deletion_cost_half_persistence() {
        let a = bdt(&[(0.0, 10.0), (2.0, 5.0)], &[None, Some(0)]);
        let b = bdt(&[(0.0, 10.0)], &[None]);
        let m = Matching::new(vec![Some(0), None], 1).unwrap();
        let s = build_edit_script(&m, &a, &b).unwrap();
        assert_eq!(s.deletions, vec![1]);
        assert_eq!(matching_cost(&m, &a, &b).unwrap(), 1.5);
        let r = m.reversed();
        assert_eq!(build_edit_script(&r, &b, &a).unwrap().insertions, vec![1]);
        assert_eq!(trajectory_cost(&r, &b, &a).unwrap(), 1.5);
    }

    #[test]
    fn movement_paths() {
        let b = chain(); // 0 -> 1 -> 2, 0 -> 3
        assert_eq!(movement_path(&b, 2, 1).unwrap(), (vec![], 1));
        // sibling of the parent: up to the root, then down
        let (path, inter) = movement_path(&b, 2, 3).unwrap();
        assert_eq!(path, vec![1, 0, 3]);
        assert_eq!(inter, 0);
        // to a sibling: the shared parent is the intersection, the sibling's saddle is passed
        let b2 = bdt(
            &[(0.0, 10.0), (1.0, 8.0), (2.0, 7.0), (3.0, 6.0)],
            &[None, Some(0), Some(1), Some(1)],
        );
        let (path, inter) = movement_path(&b2, 2, 3).unwrap();
        assert_eq!((path, inter), (vec![1, 3], 1));
        assert!(matches!(
            movement_path(&b, 1, 2),
            Err(ZigzagError::Blocked { .. })
        ));
        assert_eq!(movement_path(&b, 0, 1), Err(ZigzagError::RootMove));
        assert_eq!(movement_path(&b, 9, 1), Err(ZigzagError::NotInBdt(9)));
    }

    #[test]
    fn two_level_movement_records_two_swaps() {
        // branch 2 hangs under 1; in the target its match hangs under 3
        let src = chain();
        let dst = bdt(
            &[(0.0, 10.0), (1.0, 6.0), (2.0, 5.0), (3.0, 4.0)],
            &[None, Some(0), Some(3), Some(0)],
        );
        let m = Matching::identity(4);
        let run = simulate(&m, &src, &dst, true).unwrap();
        assert_eq!(run.script.movements, vec![(2, 2)]);
        let passed: Vec<usize> = run.swaps.iter().map(|s| s.passed).collect();
        assert_eq!(passed, vec![1, 3]);
        assert_eq!(run.swaps[0].meeting_value, 1.0);
        assert_eq!(run.swaps[1].meeting_value, 3.0);
        assert!(run.reaches(&m, &dst));
        // trajectory 2_s (2) -> meets 1_s at 1 -> meets 3_s at 3 -> 2; 3_s: 3, 1 -> spread 2
        assert_eq!(run.cost, 2.0);
        assert!(run.trace.iter().any(|l| l.contains("swap")));
    }

    #[test]
    fn blocked_movement_is_retried() {
        // source 0 -> a(1) -> b(2); target 0 -> b' -> a': both move
        let src = bdt(
            &[(0.0, 10.0), (1.0, 8.0), (2.0, 7.0)],
            &[None, Some(0), Some(1)],
        );
        let dst = bdt(
            &[(0.0, 10.0), (1.0, 8.0), (2.0, 7.0)],
            &[None, Some(2), Some(0)],
        );
        let m = Matching::identity(3);
        let run = simulate(&m, &src, &dst, true).unwrap();
        assert_eq!(run.script.movements.len(), 2);
        assert_eq!(run.snapshots.len(), 2);
        // branch 1 is blocked first, so branch 2 moves first
        assert_eq!(run.snapshots[0][2], Some(0));
        assert!(run.reaches(&m, &dst));
    }

    #[test]
    fn switching_does_not_join_unrelated_ranges() {
        let mut s = Spread {
            val: Vec::new(),
            ranges: Vec::new(),
            cost: 0.0,
        };
        let a = s.add(1.0);
        let b = s.add(-1.0);
        s.swap(a, b, 0.0);
        // each trajectory spans 1; none spans [-1, 1]
        assert_eq!(s.cost, 1.0);
        assert_eq!(s.ranges[a], vec![(-1.0, 0.0), (0.0, 1.0)]);
        s.set(a, 0.5);
        assert_eq!(s.cost, 1.5);
    }

    #[test]
    fn horizontal_swap_prefers_cheaper_direction() {
        // In f the branch u hangs on w's branch; in g both hang on the root.
        // Forward meets w at its new value 0.1, backward at its old value 0.
        let f = bdt(
            &[(-1.0, 10.0), (0.0, 5.2), (0.05, 5.0)],
            &[None, Some(0), Some(1)],
        );
        let g = bdt(
            &[(-1.0, 10.0), (0.1, 5.2), (-0.3, 5.0)],
            &[None, Some(0), Some(0)],
        );
        let m = Matching::identity(3);
        let fwd = trajectory_cost(&m, &f, &g).unwrap();
        let bwd = trajectory_cost(&m.reversed(), &g, &f).unwrap();
        assert!((fwd - 0.4).abs() < 1e-12, "{fwd}");
        assert!((bwd - 0.35).abs() < 1e-12, "{bwd}");
        let cost = matching_cost(&m, &f, &g).unwrap();
        assert_eq!(cost, bwd);
        assert_eq!(cost, m.max_pair_cost(&f, &g));
    }

    #[test]
    fn script_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let f = random_merge_tree(8, &mut rng);
            let g = random_merge_tree(6, &mut rng);
            let bf = persistence_bdt(&f).unwrap();
            let bg = persistence_bdt(&g).unwrap();
            let all = all_matchings(bf.len(), bg.len());
            let m = &all[rng.gen_range(0..all.len())];
            let s = build_edit_script(m, &bf, &bg).unwrap();
            let dels = m.as_slice().iter().filter(|x| x.is_none()).count();
            assert_eq!(s.deletions.len(), dels);
            assert_eq!(s.insertions.len(), bg.len() - (bf.len() - dels));
        }
    }

    #[test]
    fn random_matchings_reach_target_and_bound_pair_costs() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut trees: Vec<MergeTree> = Vec::new();
        for n in [2, 4, 6, 8] {
            for _ in 0..3 {
                trees.push(random_merge_tree(n, &mut rng));
            }
        }
        for f in &trees {
            for g in trees.iter().take(6) {
                let bfs = enumerate_bdts(f).unwrap();
                let bgs = enumerate_bdts(g).unwrap();
                let bf = &bfs[rng.gen_range(0..bfs.len())];
                let bg = &bgs[rng.gen_range(0..bgs.len())];
                for m in all_matchings(bf.len(), bg.len()) {
                    let fwd = simulate(&m, bf, bg, false).unwrap();
                    assert!(fwd.reaches(&m, bg));
                    let bwd = simulate(&m.reversed(), bg, bf, false).unwrap();
                    assert!(bwd.reaches(&m.reversed(), bf));
                    let cost = fwd.cost.min(bwd.cost);
                    assert!(cost >= m.max_pair_cost(bf, bg));
                    assert_eq!(cost, matching_cost(&m.reversed(), bg, bf).unwrap());
                }
            }
        }
    }

    #[test]
    fn no_movements_means_bottleneck_style_cost() {
        let t = MergeTree::from_edges(
            Orientation::Split,
            &[(0, 0.0), (1, 1.0), (2, 10.0), (3, 4.0)],
            &[(0, 1), (1, 2), (1, 3)],
        )
        .unwrap();
        let u = MergeTree::from_edges(
            Orientation::Split,
            &[(0, 0.5), (1, 1.5), (2, 9.0), (3, 3.0)],
            &[(0, 1), (1, 2), (1, 3)],
        )
        .unwrap();
        let a = persistence_bdt(&t).unwrap();
        let b = persistence_bdt(&u).unwrap();
        let m = Matching::identity(2);
        assert_eq!(matching_cost(&m, &a, &b).unwrap(), m.max_pair_cost(&a, &b));
        assert_eq!(m.max_pair_cost(&a, &b), 1.0);
    }

    #[test]
    fn trace_has_both_directions() {
        let b = chain();
        let m = Matching::new(vec![Some(0), Some(3), Some(2), Some(1)], 4).unwrap();
        let dump = trace_dump(&m, &b, &b).unwrap();
        assert!(dump.contains("# forward"));
        assert!(dump.contains("# backward"));
        assert!(dump
            .lines()
            .any(|l| l.split_whitespace().nth(1) == Some("move")));
    }
}
