//! The merge tree matching distance: the cheapest matching over every pair of
//! branch decompositions.

use rayon::prelude::*;
use thiserror::Error;

use crate::bdt::{enumerate_bdts, persistence_bdt, Bdt, BdtError};
use crate::matching::{
    astar_shared, deletable_mask, legal_matchings, Matching, SearchOptions, SearchStats,
    SharedCutoff,
};
use crate::mergetree::{simplify_to_node_count, MergeTree};
use crate::zigzag::{matching_cost, ZigzagError};

/// Largest tree `brute_force_distance` accepts.
pub const BRUTE_FORCE_MAX_NODES: usize = 10;

#[derive(Debug, Error, PartialEq)]
pub enum DistanceError {
    #[error("cannot compare a split tree with a join tree")]
    OrientationMismatch,
    #[error(transparent)]
    Bdt(#[from] BdtError),
    #[error(transparent)]
    Zigzag(#[from] ZigzagError),
    #[error("brute force is limited to {max} nodes per tree, got {got}")]
    TooLarge { got: usize, max: usize },
    #[error("simplification target must be even and at least 2, got {0}")]
    BadTarget(usize),
    #[error("no legal matching between the trees")]
    NoMatching,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistanceOptions {
    pub search: SearchOptions,
    /// Search BDT pairs on the rayon pool.
    pub parallel: bool,
    /// Let every pair search see the best cost found so far.
    pub share_cutoff: bool,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        Self {
            search: SearchOptions::default(),
            parallel: true,
            share_cutoff: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DistanceResult {
    pub distance: f64,
    /// The optimal pair of decompositions and the matching between them.
    pub left: Bdt,
    pub right: Bdt,
    pub matching: Matching,
    /// Positions of `left` / `right` in the search order (persistence BDT first).
    pub pair: (usize, usize),
    pub stats: SearchStats,
}

fn check_orientation(f: &MergeTree, g: &MergeTree) -> Result<(), DistanceError> {
    if f.orientation() != g.orientation() {
        return Err(DistanceError::OrientationMismatch);
    }
    Ok(())
}

/// All BDTs of `tree` with the persistence BDT moved to the front.
fn search_order(tree: &MergeTree) -> Result<Vec<Bdt>, DistanceError> {
    let mut all = enumerate_bdts(tree)?;
    let key = persistence_bdt(tree)?.pairing_key();
    if let Some(i) = all.iter().position(|b| b.pairing_key() == key) {
        let p = all.remove(i);
        all.insert(0, p);
    }
    Ok(all)
}

pub fn merge_tree_matching_distance(f: &MergeTree, g: &MergeTree) -> Result<f64, DistanceError> {
    distance_with(f, g, DistanceOptions::default()).map(|r| r.distance)
}

/// The distance together with the optimal matching. Among equal-cost pairs the
/// first in search order is reported, independent of scheduling.
pub fn distance_with(
    f: &MergeTree,
    g: &MergeTree,
    opts: DistanceOptions,
) -> Result<DistanceResult, DistanceError> {
    check_orientation(f, g)?;
    let bfs = search_order(f)?;
    let bgs = search_order(g)?;
    let dfs: Vec<Vec<bool>> = bfs.iter().map(|b| deletable_mask(f, b)).collect();
    let dgs: Vec<Vec<bool>> = bgs.iter().map(|b| deletable_mask(g, b)).collect();
    let pairs: Vec<(usize, usize)> = (0..bfs.len())
        .flat_map(|i| (0..bgs.len()).map(move |j| (i, j)))
        .collect();

    let cutoff = SharedCutoff::new(f64::INFINITY);
    let search = |&(i, j): &(usize, usize)| {
        let mut stats = SearchStats::default();
        let own;
        let c = if opts.share_cutoff {
            &cutoff
        } else {
            own = SharedCutoff::new(f64::INFINITY);
            &own
        };
        let out = astar_shared(
            &bfs[i],
            &bgs[j],
            &dfs[i],
            &dgs[j],
            c,
            opts.search,
            &mut stats,
        )?;
        if let Some(o) = &out {
            c.lower(o.cost);
        }
        Ok::<_, ZigzagError>(((i, j), out, stats))
    };
    let results: Vec<_> = if opts.parallel {
        pairs.par_iter().map(search).collect::<Result<_, _>>()?
    } else {
        pairs.iter().map(search).collect::<Result<_, _>>()?
    };

    let mut stats = SearchStats::default();
    let mut best: Option<((usize, usize), f64, Matching)> = None;
    for (pair, out, s) in results {
        stats.merge(&s);
        if let Some(o) = out {
            if best.as_ref().is_none_or(|b| o.cost < b.1) {
                best = Some((pair, o.cost, o.matching));
            }
        }
    }
    let ((i, j), distance, matching) = best.ok_or(DistanceError::NoMatching)?;
    Ok(DistanceResult {
        distance,
        left: bfs[i].clone(),
        right: bgs[j].clone(),
        matching,
        pair: (i, j),
        stats,
    })
}

/// Minimum cost over every BDT pair and every legal matching, without any
/// pruning. Exponential; trees are limited to [`BRUTE_FORCE_MAX_NODES`].
pub fn brute_force_distance(f: &MergeTree, g: &MergeTree) -> Result<f64, DistanceError> {
    check_orientation(f, g)?;
    let got = f.len().max(g.len());
    if got > BRUTE_FORCE_MAX_NODES {
        return Err(DistanceError::TooLarge {
            got,
            max: BRUTE_FORCE_MAX_NODES,
        });
    }
    let bfs = enumerate_bdts(f)?;
    let bgs = enumerate_bdts(g)?;
    let mut best = f64::INFINITY;
    for bf in &bfs {
        let df = deletable_mask(f, bf);
        for bg in &bgs {
            let dg = deletable_mask(g, bg);
            for m in legal_matchings(&df, &dg) {
                best = best.min(matching_cost(&m, bf, bg)?);
            }
        }
    }
    if best.is_infinite() {
        return Err(DistanceError::NoMatching);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplifiedReport {
    pub distance: f64,
    pub eps1: f64,
    pub eps2: f64,
    /// Half the larger threshold: how far `distance` may exceed the exact one.
    pub bound: f64,
}

/// Simplifies both trees to at most `target_nodes` nodes and measures the
/// distance between the results.
pub fn simplified_distance_report(
    f: &MergeTree,
    g: &MergeTree,
    target_nodes: usize,
) -> Result<SimplifiedReport, DistanceError> {
    if target_nodes < 2 || !target_nodes.is_multiple_of(2) {
        return Err(DistanceError::BadTarget(target_nodes));
    }
    check_orientation(f, g)?;
    let (sf, eps1) = simplify_to_node_count(f, target_nodes);
    let (sg, eps2) = simplify_to_node_count(g, target_nodes);
    let distance = merge_tree_matching_distance(&sf, &sg)?;
    Ok(SimplifiedReport {
        distance,
        eps1,
        eps2,
        bound: 0.5 * eps1.max(eps2),
    })
}
