mod common;

use common::{edge_set, is_connected, kruskal, pfnet_oracle, random_connected_graph};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use topicburst_core::pathfinder::{pfnet, PfnetParams};

const R_VALUES: [f64; 4] = [1.0, 2.0, 6.0, f64::INFINITY];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_simple_path_enumeration(seed in any::<u64>(), n in 2usize..=7, density in 0.1f64..0.9, r_idx in 0usize..4, q_full in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let graph = random_connected_graph(&mut rng, n, density);
        let r = R_VALUES[r_idx];
        let q = if q_full { n - 1 } else { 2.min(n - 1) };
        let pruned = pfnet(&graph, PfnetParams::new(r, q)).unwrap();
        prop_assert_eq!(edge_set(&pruned), pfnet_oracle(&graph, r, q));
    }

    #[test]
    fn pruning_keeps_a_connected_subgraph(seed in any::<u64>(), n in 2usize..=12, density in 0.1f64..0.9, r_idx in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let graph = random_connected_graph(&mut rng, n, density);
        let pruned = pfnet(&graph, PfnetParams::full(R_VALUES[r_idx], n)).unwrap();
        prop_assert!(edge_set(&pruned).is_subset(&edge_set(&graph)));
        for (i, j, d) in pruned.edges() {
            prop_assert_eq!(d, graph.distance(i, j));
        }
        prop_assert!(is_connected(&pruned));
    }

    #[test]
    fn edges_nest_in_r_and_q(seed in any::<u64>(), n in 3usize..=10, density in 0.1f64..0.9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let graph = random_connected_graph(&mut rng, n, density);
        for q in [2, n - 1] {
            let sets: Vec<_> = R_VALUES.iter().rev().map(|&r| edge_set(&pfnet(&graph, PfnetParams::new(r, q)).unwrap())).collect();
            for pair in sets.windows(2) {
                prop_assert!(pair[0].is_subset(&pair[1]));
            }
        }
        for r in R_VALUES {
            let full = edge_set(&pfnet(&graph, PfnetParams::new(r, n - 1)).unwrap());
            let short = edge_set(&pfnet(&graph, PfnetParams::new(r, 2)).unwrap());
            prop_assert!(full.is_subset(&short));
        }
    }

    #[test]
    fn minimax_network_is_the_spanning_tree(seed in any::<u64>(), n in 2usize..=8, density in 0.1f64..0.9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let graph = random_connected_graph(&mut rng, n, density);
        let pruned = pfnet(&graph, PfnetParams::full(f64::INFINITY, n)).unwrap();
        prop_assert_eq!(edge_set(&pruned), kruskal(&graph));
    }
}
