mod common;

use common::*;
use hyperrank_core::centrality::{self, hcc_edge_scores, Baseline, CentralityParams};
use hyperrank_core::generators::{Family, GenSpec};
use proptest::prelude::*;

#[test]
fn power_iteration_matches_dense_eigenvectors() {
    let c = checks::vc_eigen_oracle();
    assert!(c.pass, "{}", c.detail);
}

#[test]
fn hand_values_symmetry_and_equivariance() {
    let c = checks::closed_form_baselines();
    assert!(c.pass, "{}", c.detail);
}

#[test]
fn every_hand_value_individually() {
    for (what, got, want) in checks::closed_form_values() {
        assert!((got - want).abs() < 1e-12, "{what}: {got} vs {want}");
    }
}

#[test]
fn hcc_is_one_when_all_hyperedges_touch() {
    // every pair of the complete 3-uniform hypergraph on 5 nodes shares a node
    let (_, k53) = &checks::vertex_transitive()[1];
    assert!(hcc_edge_scores(k53, 1).iter().all(|&c| (c - 1.0).abs() < 1e-15));
}

#[test]
fn vc_buckets_equal_plain_shares() {
    // size-bucketed sums add up to a plain sum of per-hyperedge shares over hyperedges of size >= 2
    let h = GenSpec::new(Family::Sfh, 40, 30, 3, 8).generate().unwrap();
    let lg = hyperrank_core::sline::build_s_line_graph(&h, 1);
    let edge = centrality::hyperedge_eigenvector(&lg);
    let vc = centrality::vc(&h).unwrap().scores;
    for v in 0..h.n_nodes() {
        let plain: f64 = h
            .incident(v)
            .iter()
            .filter(|&&e| h.members(e).len() >= 2)
            .map(|&e| edge[e] / h.members(e).len() as f64)
            .sum();
        assert!((vc[v] - plain).abs() < 1e-12);
    }
}

#[test]
fn degree_is_distinct_neighbour_count() {
    for case in 0..20u64 {
        let mut rng = rng_for(51, case);
        let h = random_hypergraph(&mut rng, 20, 15, 5);
        let dc = centrality::dc(&h).unwrap().scores;
        for v in 0..h.n_nodes() {
            let neigh: std::collections::BTreeSet<usize> = (0..h.n_hyperedges())
                .filter(|&e| h.members(e).contains(&v))
                .flat_map(|e| h.members(e).iter().copied())
                .filter(|&u| u != v)
                .collect();
            assert_eq!(dc[v], neigh.len() as f64);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn scores_are_finite_and_non_negative(seed in 0u64..500, fam in 0usize..3) {
        let family = [Family::Erh, Family::Wsh, Family::Sfh][fam];
        let h = GenSpec::new(family, 30, 30, 3, seed).generate().unwrap();
        for b in Baseline::ALL {
            let s = centrality::compute(&h, b, &CentralityParams::default()).unwrap();
            prop_assert_eq!(s.len(), 30);
            prop_assert!(s.scores.iter().all(|x| x.is_finite() && *x >= 0.0));
        }
    }
}
