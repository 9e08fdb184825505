use rand::seq::SliceRandom;
use rand::Rng;

use super::{MergeTree, Orientation};

#[derive(Debug, Clone, PartialEq)]
pub struct RandomTreeParams {
    /// Value of the root (global minimum).
    pub base: f64,
    /// New leaves rise at most this far above their saddle.
    pub leaf_span: f64,
    /// When set, values are rounded to multiples of this step (creates ties).
    pub quantum: Option<f64>,
}

impl Default for RandomTreeParams {
    fn default() -> Self {
        Self {
            base: 0.0,
            leaf_span: 10.0,
            quantum: None,
        }
    }
}

/// Random split tree with `n` nodes (`n` even, at least 2).
pub fn random_merge_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> MergeTree {
    random_merge_tree_with(n, &RandomTreeParams::default(), rng)
}

/// Grows a tree from a single edge by repeatedly splitting a random edge with
/// a new saddle and hanging a new leaf above that saddle.
pub fn random_merge_tree_with<R: Rng + ?Sized>(
    n: usize,
    params: &RandomTreeParams,
    rng: &mut R,
) -> MergeTree {
    assert!(
        n >= 2 && n.is_multiple_of(2),
        "node count must be even and >= 2"
    );
    let snap = |v: f64| match params.quantum {
        Some(q) => (v / q).round() * q,
        None => v,
    };
    let span = params.leaf_span;
    let mut values = vec![
        params.base,
        snap(params.base + rng.gen_range(0.1 * span..=span)),
    ];
    let mut parent: Vec<Option<usize>> = vec![None, Some(0)];
    while values.len() < n {
        // every non-root node owns the edge to its parent
        let c = rng.gen_range(1..values.len());
        let p = parent[c].expect("non-root node has a parent");
        let (lo, hi) = (values[p], values[c]);
        let s = snap(lo + rng.gen_range(0.0..=1.0) * (hi - lo)).clamp(lo, hi);
        let leaf = snap(s + rng.gen_range(0.05 * span..=span)).max(s);
        let si = values.len();
        values.push(s);
        parent.push(Some(p));
        parent[c] = Some(si);
        values.push(leaf);
        parent.push(Some(si));
    }
    let nodes = values.into_iter().enumerate().collect();
    MergeTree::from_parents(Orientation::Split, nodes, parent).expect("valid by construction")
}

/// Copy with every children list randomly permuted.
pub fn shuffle_children<R: Rng + ?Sized>(tree: &MergeTree, rng: &mut R) -> MergeTree {
    let mut out = tree.clone();
    for c in &mut out.children {
        c.shuffle(rng);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mergetree::is_isomorphic;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sizes_and_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in (2..=16).step_by(2) {
            let t = random_merge_tree(n, &mut rng);
            assert_eq!(t.len(), n);
            assert_eq!(t.leaf_count(), n / 2);
        }
    }

    #[test]
    fn quantized_trees_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let params = RandomTreeParams {
            quantum: Some(1.0),
            ..Default::default()
        };
        for _ in 0..50 {
            let t = random_merge_tree_with(10, &params, &mut rng);
            assert!(t.nodes().iter().all(|n| n.value.fract() == 0.0));
        }
    }

    #[test]
    fn shuffled_copies_are_isomorphic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = random_merge_tree(12, &mut rng);
        assert!(is_isomorphic(&t, &shuffle_children(&t, &mut rng)));
    }
}
