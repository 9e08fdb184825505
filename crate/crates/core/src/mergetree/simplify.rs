use super::MergeTree;
use crate::persistence::elder_pairs;

/// Removes every non-global elder pair with persistence below `threshold`
/// and splices out the saddles left with a single child.
pub fn simplify_persistence(tree: &MergeTree, threshold: f64) -> MergeTree {
    let root = tree.root();
    let mut keep = vec![true; tree.len()];
    for (s, e) in elder_pairs(tree) {
        if s != root && (tree.value(e) - tree.value(s)).abs() < threshold {
            keep[s] = false;
            keep[e] = false;
        }
    }
    if keep.iter().all(|&k| k) {
        return tree.clone();
    }
    let mut new_index = vec![usize::MAX; tree.len()];
    let mut nodes = Vec::new();
    for i in 0..tree.len() {
        if keep[i] {
            new_index[i] = nodes.len();
            nodes.push((tree.id(i), tree.value(i)));
        }
    }
    let parent = (0..tree.len())
        .filter(|&i| keep[i])
        .map(|i| {
            let mut p = tree.parent(i);
            while let Some(q) = p {
                if keep[q] {
                    break;
                }
                p = tree.parent(q);
            }
            p.map(|q| new_index[q])
        })
        .collect();
    MergeTree::from_parents(tree.orientation(), nodes, parent)
        .expect("removing elder pairs keeps a valid tree")
}

/// Simplifies until at most `target` nodes remain. The threshold is the
/// midpoint between the last removed persistence and the next larger one.
/// Returns the tree and the threshold used (0 when nothing was removed).
pub fn simplify_to_node_count(tree: &MergeTree, target: usize) -> (MergeTree, f64) {
    assert!(
        target >= 2 && target.is_multiple_of(2),
        "target must be even and >= 2"
    );
    let n = tree.len();
    if target >= n {
        return (tree.clone(), 0.0);
    }
    let root = tree.root();
    let pairs = elder_pairs(tree);
    let mut local: Vec<f64> = pairs
        .iter()
        .filter(|(s, _)| *s != root)
        .map(|&(s, e)| (tree.value(e) - tree.value(s)).abs())
        .collect();
    local.sort_by(f64::total_cmp);
    let global = pairs
        .iter()
        .find(|(s, _)| *s == root)
        .map(|&(s, e)| (tree.value(e) - tree.value(s)).abs())
        .unwrap_or(0.0);

    let need = (n - target).div_ceil(2);
    let last = local[need - 1];
    let threshold = match local[need..].iter().find(|&&p| p > last) {
        Some(&next) => 0.5 * (last + next),
        None if global > last => 0.5 * (last + global),
        None => last.next_up(),
    };
    (simplify_persistence(tree, threshold), threshold)
}
