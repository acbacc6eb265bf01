use proptest::prelude::*;
use radsum::cover::{
    double_cover, matching_to_cover, split_even_cycles, validate_cover, WeightedGraph,
};
use radsum::matching::{
    augment, min_weight_matching, resume_matching, verify_duals, BipartiteGraph, MatchingWithDuals,
};
use radsum_testkit::exhaustive_matching;

/// Side sizes up to 7 and an optional edge per pair.
fn bipartite(
    max: usize,
    weights: impl Strategy<Value = u32> + Clone,
) -> impl Strategy<Value = (usize, usize, Vec<Option<u32>>)> {
    (1..=max, 1..=max).prop_flat_map(move |(l, r)| {
        let cell = prop_oneof![1 => Just(None), 3 => weights.clone().prop_map(Some)];
        (Just(l), Just(r), prop::collection::vec(cell, l * r))
    })
}

fn build(l: usize, r: usize, cells: &[Option<u32>]) -> (BipartiteGraph, Vec<Vec<Option<i64>>>) {
    let mut edges = Vec::new();
    let mut w = vec![vec![None; r]; l];
    for u in 0..l {
        for v in 0..r {
            if let Some(x) = cells[u * r + v] {
                edges.push((u, v, f64::from(x)));
                w[u][v] = Some(i64::from(x));
            }
        }
    }
    (BipartiteGraph::new(l, r, edges).unwrap(), w)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn matching_matches_enumeration((l, r, cells) in bipartite(7, 0u32..50)) {
        let (g, w) = build(l, r, &cells);
        let m = min_weight_matching(&g);
        let (card, weight) = exhaustive_matching(&w);
        prop_assert_eq!(m.cardinality(), card);
        prop_assert_eq!(m.total_weight, weight as f64);
        let report = verify_duals(&g, &m);
        prop_assert!(report.ok, "{:?}", report.violations);
    }

    #[test]
    fn square_real_weights((n, cells) in (1usize..=7).prop_flat_map(|n| (Just(n), prop::collection::vec(0.0f64..1.0, n * n)))) {
        let edges = (0..n).flat_map(|u| (0..n).map(move |v| (u, v)));
        let g = BipartiteGraph::new(n, n, edges.clone().map(|(u, v)| (u, v, cells[u * n + v]))).unwrap();
        let w: Vec<Vec<Option<f64>>> = (0..n).map(|u| (0..n).map(|v| Some(cells[u * n + v])).collect()).collect();
        let m = min_weight_matching(&g);
        let (_, best) = exhaustive_matching(&w);
        prop_assert!(m.is_perfect());
        prop_assert!((m.total_weight - best).abs() <= 1e-9);
        // Weak duality is tight: the dual objective over matched vertices
        // equals the matching weight.
        prop_assert!((m.dual_objective() - m.total_weight).abs() <= 1e-9);
    }

    #[test]
    fn augmentations_add_one_and_stay_feasible((l, r, cells) in bipartite(7, 0u32..50)) {
        let (g, _) = build(l, r, &cells);
        let mut m = MatchingWithDuals::empty(&g);
        loop {
            let before = m.cardinality();
            if !augment(&g, &mut m) {
                break;
            }
            prop_assert_eq!(m.cardinality(), before + 1);
            prop_assert!(verify_duals(&g, &m).ok);
        }
        prop_assert_eq!(m.cardinality(), min_weight_matching(&g).cardinality());
        // Resuming from a maximum matching is a no-op.
        let again = resume_matching(&g, &m).unwrap();
        prop_assert_eq!(again.cardinality(), m.cardinality());
        prop_assert_eq!(again.total_weight, m.total_weight);
    }

    #[test]
    fn covers_match_enumeration(n in 2usize..=7, cells in prop::collection::vec(prop_oneof![1 => Just(None), 2 => (1u32..30).prop_map(Some)], 21)) {
        // Random graph on n vertices, weights from the upper triangle.
        let mut edges = Vec::new();
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                if let Some(x) = cells[k] {
                    edges.push((i, j, f64::from(x)));
                }
                k += 1;
            }
        }
        let g = WeightedGraph::new(n, edges.clone()).unwrap();
        // Cycle covers are fixed-point-free permutations along graph edges.
        let mut w = vec![vec![None; n]; n];
        for &(i, j, x) in &edges {
            w[i][j] = Some(x as i64);
            w[j][i] = Some(x as i64);
        }
        let (card, best) = exhaustive_matching(&w);
        let m = min_weight_matching(&double_cover(&g));
        prop_assert_eq!(m.cardinality(), card);
        if card == n {
            prop_assert_eq!(m.total_weight, best as f64);
            let cover = matching_to_cover(&m, &g).unwrap();
            prop_assert!(validate_cover(&cover, &g).valid);
            prop_assert_eq!(cover.total_weight, best as f64);
            let split = split_even_cycles(&cover, &g);
            prop_assert!(validate_cover(&split, &g).valid);
            prop_assert!(split.total_weight <= cover.total_weight);
            prop_assert!(split.cycles.iter().all(|c| c.len() == 2 || c.len() % 2 == 1));
        } else {
            prop_assert!(matching_to_cover(&m, &g).is_err());
        }
    }
}
