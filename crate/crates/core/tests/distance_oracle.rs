use mtmd_core::distance::{
    brute_force_distance, distance_with, merge_tree_matching_distance, DistanceOptions,
};
use mtmd_core::matching::SearchOptions;
use mtmd_core::mergetree::{random_merge_tree_with, RandomTreeParams};
use mtmd_core::persistence::{bottleneck_distance, elder_rule_diagram};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn search_agrees_with_exhaustive_enumeration() {
    for seed in 0..1500u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let quantum = [None, Some(1.0), Some(2.0)][seed as usize % 3];
        let params = RandomTreeParams {
            quantum,
            ..Default::default()
        };
        let f = random_merge_tree_with(2 * rng.gen_range(1..=5), &params, &mut rng);
        let g = random_merge_tree_with(2 * rng.gen_range(1..=5), &params, &mut rng);
        if f.len() + g.len() > 16 {
            continue;
        }
        let d = merge_tree_matching_distance(&f, &g).unwrap();
        let b = brute_force_distance(&f, &g).unwrap();
        assert!(
            (d - b).abs() <= 1e-9,
            "seed {seed}: {d} vs {b}\n{}\n{}",
            f.to_text(),
            g.to_text()
        );
        let floor = bottleneck_distance(&elder_rule_diagram(&f), &elder_rule_diagram(&g));
        assert!(d >= floor, "seed {seed}: {d} < {floor}");
        let r = merge_tree_matching_distance(&g, &f).unwrap();
        assert!((d - r).abs() <= 1e-9, "seed {seed}: asymmetric {d} vs {r}");
    }
}

#[test]
fn pruning_devices_do_not_change_the_distance() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let none = SearchOptions {
        range_pruning: false,
        ancestor_pruning: false,
        heuristic: false,
    };
    for _ in 0..100 {
        let params = RandomTreeParams {
            quantum: Some(1.0),
            ..Default::default()
        };
        let f = random_merge_tree_with(2 * rng.gen_range(1..=4), &params, &mut rng);
        let g = random_merge_tree_with(2 * rng.gen_range(1..=4), &params, &mut rng);
        let full = distance_with(&f, &g, DistanceOptions::default()).unwrap();
        let bare = distance_with(
            &f,
            &g,
            DistanceOptions {
                search: none,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(full.distance, bare.distance);
    }
}
