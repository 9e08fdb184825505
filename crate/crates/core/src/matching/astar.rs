use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use super::{ancestor_violation, heuristic_size_diff, relabel_in_range, Matching};
use crate::bdt::Bdt;
use crate::persistence::relabel_cost;
use crate::zigzag::{matching_cost, ZigzagError};

/// Toggles for the pruning devices, mainly for soundness tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub range_pruning: bool,
    pub ancestor_pruning: bool,
    pub heuristic: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            range_pruning: true,
            ancestor_pruning: true,
            heuristic: true,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub popped: u64,
    pub pushed: u64,
    pub pruned_range: u64,
    pub pruned_ancestor: u64,
    /// Complete matchings whose zigzag cost was computed.
    pub evaluated: u64,
}

impl SearchStats {
    pub fn merge(&mut self, other: &SearchStats) {
        self.popped += other.popped;
        self.pushed += other.pushed;
        self.pruned_range += other.pruned_range;
        self.pruned_ancestor += other.pruned_ancestor;
        self.evaluated += other.evaluated;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub cost: f64,
    pub matching: Matching,
}

/// A cutoff shared between concurrent searches. It only ever decreases.
#[derive(Debug)]
pub struct SharedCutoff(AtomicU64);

impl SharedCutoff {
    pub fn new(value: f64) -> Self {
        Self(AtomicU64::new(value.to_bits()))
    }

    pub fn get(&self) -> f64 {
        f64::from_bits(self.0.load(AtomicOrdering::Acquire))
    }

    /// Lowers the cutoff to `value` if that is smaller.
    pub fn lower(&self, value: f64) {
        let _ = self
            .0
            .fetch_update(AtomicOrdering::AcqRel, AtomicOrdering::Acquire, |cur| {
                (value < f64::from_bits(cur)).then_some(value.to_bits())
            });
    }
}

struct Node {
    parent: usize,
    /// Right branch given to the left branch at position `depth - 1` of the order.
    assigned: Option<usize>,
    depth: usize,
    used: u64,
    cost: f64,
    complete: bool,
    evaluated: bool,
}

struct Entry {
    key: f64,
    remaining: usize,
    seq: u64,
    node: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // reversed: BinaryHeap pops the largest
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then(other.remaining.cmp(&self.remaining))
            .then(other.seq.cmp(&self.seq))
    }
}

/// Minimum-cost matching between `bf` and `bg`, or `None` if every matching
/// costs more than `cutoff`. `del_f` / `del_g` mark branches that may be
/// deleted / inserted.
pub fn astar(
    bf: &Bdt,
    bg: &Bdt,
    del_f: &[bool],
    del_g: &[bool],
    cutoff: f64,
    opts: SearchOptions,
    stats: &mut SearchStats,
) -> Result<Option<SearchOutcome>, ZigzagError> {
    astar_shared(
        bf,
        bg,
        del_f,
        del_g,
        &SharedCutoff::new(cutoff),
        opts,
        stats,
    )
}

/// [`astar`] against a cutoff that other searches may lower concurrently.
pub fn astar_shared(
    bf: &Bdt,
    bg: &Bdt,
    del_f: &[bool],
    del_g: &[bool],
    cutoff: &SharedCutoff,
    opts: SearchOptions,
    stats: &mut SearchStats,
) -> Result<Option<SearchOutcome>, ZigzagError> {
    let (nl, nr) = (bf.len(), bg.len());
    // root first, then decreasing persistence
    let mut order: Vec<usize> = (1..nl).collect();
    order.sort_by(|&a, &b| {
        bf.branch(b)
            .persistence()
            .total_cmp(&bf.branch(a).persistence())
            .then(a.cmp(&b))
    });
    order.insert(0, bf.root());
    let left_del: Vec<f64> = (0..nl).map(|u| bf.branch(u).deletion_cost()).collect();
    let right_del: Vec<f64> = (0..nr).map(|v| bg.branch(v).deletion_cost()).collect();

    let mut arena = vec![Node {
        parent: usize::MAX,
        assigned: None,
        depth: 0,
        used: 0,
        cost: 0.0,
        complete: false,
        evaluated: false,
    }];
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    heap.push(Entry {
        key: 0.0,
        remaining: nl + nr,
        seq,
        node: 0,
    });
    stats.pushed += 1;

    let reconstruct = |arena: &[Node], mut i: usize| {
        let mut map = vec![None; nl];
        while arena[i].depth > 0 {
            map[order[arena[i].depth - 1]] = arena[i].assigned;
            i = arena[i].parent;
        }
        Matching::new(map, nr).expect("search keeps the matching injective")
    };

    while let Some(entry) = heap.pop() {
        stats.popped += 1;
        if entry.key > cutoff.get() {
            return Ok(None);
        }
        let idx = entry.node;
        if arena[idx].complete {
            let matching = reconstruct(&arena, idx);
            if arena[idx].evaluated {
                return Ok(Some(SearchOutcome {
                    cost: entry.key,
                    matching,
                }));
            }
            let total = matching_cost(&matching, bf, bg)?;
            stats.evaluated += 1;
            if heap.peek().is_none_or(|next| total <= next.key) {
                if total > cutoff.get() {
                    return Ok(None);
                }
                return Ok(Some(SearchOutcome {
                    cost: total,
                    matching,
                }));
            }
            arena[idx].evaluated = true;
            seq += 1;
            heap.push(Entry {
                key: total,
                remaining: 0,
                seq,
                node: idx,
            });
            stats.pushed += 1;
            continue;
        }

        let (depth, used, cost) = (arena[idx].depth, arena[idx].used, arena[idx].cost);
        let u = order[depth];
        let mut matched = Vec::with_capacity(depth);
        let mut i = idx;
        while arena[i].depth > 0 {
            if let Some(v) = arena[i].assigned {
                matched.push((order[arena[i].depth - 1], v));
            }
            i = arena[i].parent;
        }

        let mut candidates: Vec<(Option<usize>, f64)> = Vec::new();
        if depth == 0 {
            candidates.push((
                Some(bg.root()),
                relabel_cost(bf.branch(u).coords(), bg.branch(bg.root()).coords()),
            ));
        } else {
            if del_f[u] {
                candidates.push((None, left_del[u]));
            }
            for v in 0..nr {
                if used >> v & 1 == 1 {
                    continue;
                }
                let (bu, bv) = (bf.branch(u), bg.branch(v));
                if opts.range_pruning && !relabel_in_range(bu, bv) && !relabel_in_range(bv, bu) {
                    stats.pruned_range += 1;
                    continue;
                }
                if opts.ancestor_pruning && ancestor_violation(bf, bg, &matched, u, v) {
                    stats.pruned_ancestor += 1;
                    continue;
                }
                candidates.push((Some(v), relabel_cost(bu.coords(), bv.coords())));
            }
        }

        for (assigned, pair) in candidates {
            let used = match assigned {
                Some(v) => used | 1 << v,
                None => used,
            };
            let mut c = cost.max(pair);
            let complete = depth + 1 == nl;
            let mut h = 0.0;
            if complete {
                let rest: Vec<usize> = (0..nr).filter(|&v| used >> v & 1 == 0).collect();
                if rest.iter().any(|&v| !del_g[v]) {
                    continue;
                }
                c = rest.iter().fold(c, |acc, &v| acc.max(right_del[v]));
            } else if opts.heuristic {
                let left: Vec<f64> = order[depth + 1..].iter().map(|&x| left_del[x]).collect();
                let right: Vec<f64> = (0..nr)
                    .filter(|&v| used >> v & 1 == 0)
                    .map(|v| right_del[v])
                    .collect();
                h = heuristic_size_diff(&left, &right);
            }
            let key = entry.key.max(c).max(h);
            let remaining = if complete {
                0
            } else {
                nl - depth - 1 + nr - used.count_ones() as usize
            };
            arena.push(Node {
                parent: idx,
                assigned,
                depth: depth + 1,
                used,
                cost: c,
                complete,
                evaluated: false,
            });
            seq += 1;
            heap.push(Entry {
                key,
                remaining,
                seq,
                node: arena.len() - 1,
            });
            stats.pushed += 1;
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bdt::{enumerate_bdts, persistence_bdt};
    use crate::matching::deletable_mask;
    use crate::matching::tests::branch;
    use crate::mergetree::{random_merge_tree, random_merge_tree_with, RandomTreeParams};
    use crate::zigzag::matching_cost;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn run(
        bf: &Bdt,
        bg: &Bdt,
        df: &[bool],
        dg: &[bool],
        opts: SearchOptions,
    ) -> Option<SearchOutcome> {
        astar(
            bf,
            bg,
            df,
            dg,
            f64::INFINITY,
            opts,
            &mut SearchStats::default(),
        )
        .unwrap()
    }

    /// Minimum zigzag cost over every legal matching.
    fn brute(bf: &Bdt, bg: &Bdt, df: &[bool], dg: &[bool]) -> Option<f64> {
        crate::matching::legal_matchings(df, dg)
            .into_iter()
            .map(|m| matching_cost(&m, bf, bg).unwrap())
            .min_by(f64::total_cmp)
    }

    #[test]
    fn identical_bdts_cost_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = random_merge_tree(10, &mut rng);
        let b = persistence_bdt(&t).unwrap();
        let d = deletable_mask(&t, &b);
        let out = run(&b, &b, &d, &d, SearchOptions::default()).unwrap();
        assert_eq!(out.cost, 0.0);
    }

    #[test]
    fn single_branch_relabel() {
        let a = Bdt::from_parts(vec![branch(0.0, 4.0)], vec![None]).unwrap();
        let b = Bdt::from_parts(vec![branch(0.0, 4.5)], vec![None]).unwrap();
        let out = run(&a, &b, &[true], &[true], SearchOptions::default()).unwrap();
        assert_eq!(out.cost, 0.5);
        assert_eq!(out.matching, Matching::identity(1));
    }

    #[test]
    fn cutoff_rejects_expensive_pairs() {
        let a = Bdt::from_parts(vec![branch(0.0, 4.0)], vec![None]).unwrap();
        let b = Bdt::from_parts(vec![branch(0.0, 6.0)], vec![None]).unwrap();
        let mut stats = SearchStats::default();
        assert!(astar(
            &a,
            &b,
            &[true],
            &[true],
            1.0,
            SearchOptions::default(),
            &mut stats
        )
        .unwrap()
        .is_none());
        let out = astar(
            &a,
            &b,
            &[true],
            &[true],
            2.0,
            SearchOptions::default(),
            &mut stats,
        )
        .unwrap();
        assert_eq!(out.map(|o| o.cost), Some(2.0));
    }

    #[test]
    fn shared_cutoff_only_decreases() {
        let c = SharedCutoff::new(f64::INFINITY);
        c.lower(3.0);
        c.lower(5.0);
        assert_eq!(c.get(), 3.0);
        c.lower(1.0);
        assert_eq!(c.get(), 1.0);
    }

    fn oracle_cases(seed: u64, count: usize, quantum: Option<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = RandomTreeParams {
            quantum,
            ..Default::default()
        };
        let none = SearchOptions {
            range_pruning: false,
            ancestor_pruning: false,
            heuristic: false,
        };
        for _ in 0..count {
            let nf = 2 * rand::Rng::gen_range(&mut rng, 1..=4);
            let ng = 2 * rand::Rng::gen_range(&mut rng, 1..=4);
            let f = random_merge_tree_with(nf, &params, &mut rng);
            let g = random_merge_tree_with(ng, &params, &mut rng);
            let bfs = enumerate_bdts(&f).unwrap();
            let bgs = enumerate_bdts(&g).unwrap();
            let bf = &bfs[rand::Rng::gen_range(&mut rng, 0..bfs.len())];
            let bg = &bgs[rand::Rng::gen_range(&mut rng, 0..bgs.len())];
            let (df, dg) = (deletable_mask(&f, bf), deletable_mask(&g, bg));
            let expected = brute(bf, bg, &df, &dg);
            let plain = run(bf, bg, &df, &dg, none).map(|o| o.cost);
            assert_eq!(
                plain, expected,
                "unpruned search differs from exhaustive minimum"
            );
            let heur = run(
                bf,
                bg,
                &df,
                &dg,
                SearchOptions {
                    heuristic: true,
                    ..none
                },
            )
            .map(|o| o.cost);
            assert_eq!(heur, expected, "heuristic changed the optimum");
            if let Some(out) = run(bf, bg, &df, &dg, SearchOptions::default()) {
                assert!(out.matching.validate(bf, bg, &df, &dg).is_ok());
                assert_eq!(matching_cost(&out.matching, bf, bg).unwrap(), out.cost);
                let e = expected.expect("exhaustive search finds something when A* does");
                assert!(out.cost >= e);
            }
        }
    }

    #[test]
    fn unpruned_search_matches_exhaustive_minimum() {
        oracle_cases(17, 150, None);
    }

    #[test]
    fn unpruned_search_matches_exhaustive_minimum_with_ties() {
        oracle_cases(18, 150, Some(1.0));
    }

    #[test]
    fn result_never_exceeds_delete_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let f = random_merge_tree(8, &mut rng);
            let g = random_merge_tree(8, &mut rng);
            let bf = persistence_bdt(&f).unwrap();
            let bg = persistence_bdt(&g).unwrap();
            let (df, dg) = (deletable_mask(&f, &bf), deletable_mask(&g, &bg));
            let out = run(&bf, &bg, &df, &dg, SearchOptions::default()).unwrap();
            let mut map = vec![None; bf.len()];
            map[0] = Some(0);
            let greedy = Matching::new(map, bg.len()).unwrap();
            assert!(out.cost <= matching_cost(&greedy, &bf, &bg).unwrap());
        }
    }
}
