//! Matchings between two BDTs and the A* search for the cheapest one.

mod astar;

pub use astar::{astar, astar_shared, SearchOptions, SearchOutcome, SearchStats, SharedCutoff};

use thiserror::Error;

use crate::bdt::{Bdt, Branch};
use crate::mergetree::MergeTree;
use crate::persistence::{elder_pairs, relabel_cost};

#[derive(Debug, Error, PartialEq)]
pub enum MatchingError {
    #[error("matching covers {got} left branches, BDT has {expected}")]
    LeftSize { got: usize, expected: usize },
    #[error("right branch {0} is out of range")]
    RightOutOfRange(usize),
    #[error("right branch {0} is matched twice")]
    NotInjective(usize),
    #[error("roots must be matched to each other")]
    RootsUnmatched,
    #[error("left branch {0} is deleted but is not an elder-rule pair")]
    IllegalDeletion(usize),
    #[error("right branch {0} is inserted but is not an elder-rule pair")]
    IllegalInsertion(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairCategory {
    Relabel,
    MovementRelabel,
    Insertion,
    Deletion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchPair {
    pub left: Option<usize>,
    pub right: Option<usize>,
    pub category: PairCategory,
}

/// A complete matching: `map[u]` is the right branch matched to left branch
/// `u`, or `None` if `u` is deleted. Right branches outside the image are
/// inserted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    map: Vec<Option<usize>>,
    right_len: usize,
}

impl Matching {
    pub fn new(map: Vec<Option<usize>>, right_len: usize) -> Result<Self, MatchingError> {
        let mut seen = vec![false; right_len];
        for &v in map.iter().flatten() {
            if v >= right_len {
                return Err(MatchingError::RightOutOfRange(v));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(MatchingError::NotInjective(v));
            }
        }
        Ok(Self { map, right_len })
    }

    /// Matches branch `i` to branch `i`; both BDTs must have the same size.
    pub fn identity(len: usize) -> Self {
        Self {
            map: (0..len).map(Some).collect(),
            right_len: len,
        }
    }

    pub fn left_len(&self) -> usize {
        self.map.len()
    }

    pub fn right_len(&self) -> usize {
        self.right_len
    }

    pub fn image(&self, u: usize) -> Option<usize> {
        self.map[u]
    }

    pub fn as_slice(&self) -> &[Option<usize>] {
        &self.map
    }

    pub fn preimage(&self) -> Vec<Option<usize>> {
        let mut inv = vec![None; self.right_len];
        for (u, v) in self.map.iter().enumerate() {
            if let Some(v) = v {
                inv[*v] = Some(u);
            }
        }
        inv
    }

    /// The same matching read from right to left.
    pub fn reversed(&self) -> Self {
        Self {
            map: self.preimage(),
            right_len: self.map.len(),
        }
    }

    /// `true` if `(u, map[u])` is a relabel whose parents are not matched to
    /// each other. The root pair is never a movement.
    pub fn is_movement(&self, left: &Bdt, right: &Bdt, u: usize) -> bool {
        match (self.map[u], left.parent(u)) {
            (Some(v), Some(pu)) => match right.parent(v) {
                Some(pv) => self.map[pu] != Some(pv),
                None => true,
            },
            _ => false,
        }
    }

    pub fn pairs(&self, left: &Bdt, right: &Bdt) -> Vec<MatchPair> {
        let mut out: Vec<MatchPair> = (0..self.map.len())
            .map(|u| MatchPair {
                left: Some(u),
                right: self.map[u],
                category: match self.map[u] {
                    None => PairCategory::Deletion,
                    Some(_) if self.is_movement(left, right, u) => PairCategory::MovementRelabel,
                    Some(_) => PairCategory::Relabel,
                },
            })
            .collect();
        let inv = self.preimage();
        out.extend(
            (0..self.right_len)
                .filter(|&v| inv[v].is_none())
                .map(|v| MatchPair {
                    left: None,
                    right: Some(v),
                    category: PairCategory::Insertion,
                }),
        );
        out
    }

    /// Checks roots, coverage and the elder-rule restriction on deletions and
    /// insertions. `deletable` masks come from [`deletable_mask`].
    pub fn validate(
        &self,
        left: &Bdt,
        right: &Bdt,
        left_deletable: &[bool],
        right_deletable: &[bool],
    ) -> Result<(), MatchingError> {
        if self.map.len() != left.len() {
            return Err(MatchingError::LeftSize {
                got: self.map.len(),
                expected: left.len(),
            });
        }
        if self.right_len != right.len() {
            return Err(MatchingError::RightOutOfRange(right.len()));
        }
        if self.map[left.root()] != Some(right.root()) {
            return Err(MatchingError::RootsUnmatched);
        }
        if let Some(u) = (0..self.map.len()).find(|&u| self.map[u].is_none() && !left_deletable[u])
        {
            return Err(MatchingError::IllegalDeletion(u));
        }
        let inv = self.preimage();
        if let Some(v) = (0..self.right_len).find(|&v| inv[v].is_none() && !right_deletable[v]) {
            return Err(MatchingError::IllegalInsertion(v));
        }
        Ok(())
    }

    /// Largest single pair cost (relabel or half persistence).
    pub fn max_pair_cost(&self, left: &Bdt, right: &Bdt) -> f64 {
        let inv = self.preimage();
        let l = (0..self.map.len()).map(|u| match self.map[u] {
            Some(v) => relabel_cost(left.branch(u).coords(), right.branch(v).coords()),
            None => left.branch(u).deletion_cost(),
        });
        let r = (0..self.right_len)
            .filter(|&v| inv[v].is_none())
            .map(|v| right.branch(v).deletion_cost());
        l.chain(r).fold(0.0, f64::max)
    }
}

/// For each branch of `b`, whether its (saddle, leaf) nodes form an
/// elder-rule pair of `tree`, i.e. whether it may be deleted or inserted.
pub fn deletable_mask(tree: &MergeTree, b: &Bdt) -> Vec<bool> {
    let pairs = elder_pairs(tree);
    b.branches()
        .iter()
        .map(|br| pairs.contains(&(br.saddle, br.extremum)))
        .collect()
}

/// `true` iff both endpoints of `v` lie within half the persistence of `u`
/// around the endpoints of `u`.
pub fn relabel_in_range(u: &Branch, v: &Branch) -> bool {
    let delta = 0.5 * (u.extremum_value - u.saddle_value).abs();
    (v.saddle_value - u.saddle_value).abs() <= delta
        && (v.extremum_value - u.extremum_value).abs() <= delta
}

/// Lower bound on the cost of finishing a partial matching: the surplus
/// side must delete at least `n = ||U| - |V||` branches, so the `n`-th
/// smallest deletion cost there is unavoidable.
pub fn heuristic_size_diff(unmatched_left: &[f64], unmatched_right: &[f64]) -> f64 {
    let (surplus, other) = if unmatched_left.len() >= unmatched_right.len() {
        (unmatched_left, unmatched_right)
    } else {
        (unmatched_right, unmatched_left)
    };
    let n = surplus.len() - other.len();
    if n == 0 {
        return 0.0;
    }
    let mut costs = surplus.to_vec();
    costs.sort_by(f64::total_cmp);
    costs[n - 1]
}

/// `true` iff adding `(u, v)` to the matched pairs `matched` would map an
/// ancestor on one side to a descendant on the other.
pub fn ancestor_violation(
    left: &Bdt,
    right: &Bdt,
    matched: &[(usize, usize)],
    u: usize,
    v: usize,
) -> bool {
    matched.iter().any(|&(a, b)| {
        (left.is_ancestor(a, u) && right.is_ancestor(v, b))
            || (left.is_ancestor(u, a) && right.is_ancestor(b, v))
    })
}

/// Every complete matching with the roots (index 0) matched and deletions and
/// insertions restricted by the masks. Exponential; meant for oracles.
pub fn legal_matchings(left_deletable: &[bool], right_deletable: &[bool]) -> Vec<Matching> {
    fn go(
        u: usize,
        del_l: &[bool],
        del_r: &[bool],
        used: &mut [bool],
        map: &mut Vec<Option<usize>>,
        out: &mut Vec<Matching>,
    ) {
        if u == del_l.len() {
            if (0..used.len()).all(|v| used[v] || del_r[v]) {
                out.push(
                    Matching::new(map.clone(), used.len()).expect("injective by construction"),
                );
            }
            return;
        }
        if del_l[u] {
            map.push(None);
            go(u + 1, del_l, del_r, used, map, out);
            map.pop();
        }
        for v in 1..used.len() {
            if !used[v] {
                used[v] = true;
                map.push(Some(v));
                go(u + 1, del_l, del_r, used, map, out);
                map.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    if left_deletable.is_empty() || right_deletable.is_empty() {
        return out;
    }
    let mut used = vec![false; right_deletable.len()];
    used[0] = true;
    go(
        1,
        left_deletable,
        right_deletable,
        &mut used,
        &mut vec![Some(0)],
        &mut out,
    );
    out
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::bdt::persistence_bdt;

    /// Branches 0 -> 1 -> 2 and 0 -> 3.
    pub(crate) fn chain() -> Bdt {
        let b = vec![
            branch(0.0, 10.0),
            branch(1.0, 6.0),
            branch(2.0, 5.0),
            branch(3.0, 4.0),
        ];
        Bdt::from_parts(b, vec![None, Some(0), Some(1), Some(0)]).unwrap()
    }

    pub(crate) fn branch(s: f64, e: f64) -> Branch {
        Branch {
            saddle: 0,
            extremum: 0,
            saddle_id: 0,
            extremum_id: 0,
            saddle_value: s,
            extremum_value: e,
        }
    }

    #[test]
    fn legal_matching_counts() {
        // 2 vs 2 branches, everything deletable: {delete, keep} for the non-root
        assert_eq!(legal_matchings(&[true, true], &[true, true]).len(), 2);
        // nothing deletable forces a bijection
        assert_eq!(
            legal_matchings(&[true, false, false], &[true, false, false]).len(),
            2
        );
        assert_eq!(legal_matchings(&[true, false], &[true]).len(), 0);
        let all = legal_matchings(&[true; 4], &[true; 4]);
        // sum over k of C(3,k)^2 k!
        assert_eq!(all.len(), 1 + 9 + 18 + 6);
    }

    #[test]
    fn relabel_range_examples() {
        let u = branch(0.0, 4.0);
        assert!(relabel_in_range(&u, &branch(0.0, 4.0)));
        assert!(relabel_in_range(&u, &branch(1.0, 5.0)));
        let v = branch(3.0, 10.0);
        assert!(!relabel_in_range(&u, &v));
        assert!(!relabel_in_range(&v, &u));
    }

    #[test]
    fn size_difference_heuristic() {
        assert_eq!(heuristic_size_diff(&[1.0, 3.0], &[2.0, 0.5]), 0.0);
        assert_eq!(heuristic_size_diff(&[1.0, 3.0, 5.0], &[]), 5.0);
        assert_eq!(heuristic_size_diff(&[5.0, 1.0, 3.0], &[0.0, 0.0]), 1.0);
        assert_eq!(heuristic_size_diff(&[], &[5.0, 1.0, 3.0]), 5.0);
    }

    #[test]
    fn ancestor_violation_examples() {
        let b = chain();
        let (a, child) = (1, 2);
        assert!(b.is_ancestor(a, child));
        assert!(!ancestor_violation(&b, &b, &[], 0, 0));
        assert!(ancestor_violation(&b, &b, &[(child, a)], a, child));
        assert!(ancestor_violation(&b, &b, &[(a, child)], child, a));
        assert!(!ancestor_violation(&b, &b, &[(a, a)], 3, 3));
        assert!(!ancestor_violation(&b, &b, &[(a, a)], child, child));
    }

    #[test]
    fn categories_and_reverse() {
        let b = chain();
        let id = Matching::identity(b.len());
        assert!(id
            .pairs(&b, &b)
            .iter()
            .all(|p| p.category == PairCategory::Relabel));
        assert_eq!(id.reversed(), id);
        // move branch 2 from under 1 to under 0 by matching 1 <-> 3
        let m = Matching::new(vec![Some(0), Some(3), Some(2), Some(1)], 4).unwrap();
        let cats: Vec<PairCategory> = m.pairs(&b, &b).iter().map(|p| p.category).collect();
        assert_eq!(cats[0], PairCategory::Relabel);
        assert_eq!(cats[2], PairCategory::MovementRelabel);
        assert_eq!(m.reversed().reversed(), m);

        let d = Matching::new(vec![Some(0), None, None, None], 4).unwrap();
        let cats: Vec<PairCategory> = d.pairs(&b, &b).iter().map(|p| p.category).collect();
        assert_eq!(
            cats.iter()
                .filter(|c| **c == PairCategory::Deletion)
                .count(),
            3
        );
        assert_eq!(
            cats.iter()
                .filter(|c| **c == PairCategory::Insertion)
                .count(),
            3
        );
        assert!(Matching::new(vec![Some(0), Some(0)], 2).is_err());
    }

    #[test]
    fn validation_enforces_elder_pairs() {
        let t = crate::bdt::tests::eight();
        let all = crate::bdt::enumerate_bdts(&t).unwrap();
        let p = persistence_bdt(&t).unwrap();
        let mask = deletable_mask(&t, &p);
        assert!(mask.iter().skip(1).all(|&d| d));
        let del_all = Matching::new(vec![Some(0), None, None, None], 4).unwrap();
        assert!(del_all.validate(&p, &p, &mask, &mask).is_ok());
        let other = all
            .iter()
            .find(|b| b.pairing_key() != p.pairing_key())
            .unwrap();
        let omask = deletable_mask(&t, other);
        assert!(omask.iter().any(|&d| !d));
        assert!(matches!(
            del_all.validate(other, &p, &omask, &mask),
            Err(MatchingError::IllegalDeletion(_))
        ));
        let no_root = Matching::new(vec![Some(1), Some(0), Some(2), Some(3)], 4).unwrap();
        assert_eq!(
            no_root.validate(&p, &p, &mask, &mask),
            Err(MatchingError::RootsUnmatched)
        );
    }
}
