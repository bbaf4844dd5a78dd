//! Hypergraph container and generator properties.

mod common;

use common::*;
use hyperrank_core::generators::{Family, GenSpec};
use hyperrank_core::Hypergraph;
use proptest::prelude::*;

#[test]
fn saturated_random_hypergraph_has_every_pair() {
    let h = GenSpec::new(Family::Erh, 5, 10, 2, 3).generate().unwrap();
    let mut edges: Vec<Vec<usize>> = h.hyperedges().to_vec();
    edges.sort();
    let mut all = Vec::new();
    for a in 0..5 {
        for b in a + 1..5 {
            all.push(vec![a, b]);
        }
    }
    assert_eq!(edges, all);
}

#[test]
fn unrewired_small_world_is_a_ring() {
    let mut spec = GenSpec::new(Family::Wsh, 12, 12, 3, 1);
    spec.rewire_p = 0.0;
    let h = spec.generate().unwrap();
    assert!(h.degrees().node_hyperdegree.iter().all(|&k| k == 3));
}

#[test]
fn infeasible_specs_are_rejected() {
    assert!(GenSpec::new(Family::Erh, 4, 7, 2, 0).generate().is_err());
    assert!(GenSpec::new(Family::Sfh, 3, 2, 5, 0).generate().is_err());
}

#[test]
fn scale_free_degrees_vary_more_than_random() {
    let mut wins = 0;
    for seed in 0..20 {
        let cv = |f| GenSpec::new(f, 300, 300, 3, seed).generate().unwrap().stats().unwrap().cv_degree;
        if cv(Family::Sfh) > cv(Family::Erh) {
            wins += 1;
        }
    }
    assert_eq!(wins, 20);
}

#[test]
fn edge_list_round_trip_keeps_ids() {
    let h = GenSpec::new(Family::Sfh, 50, 40, 3, 5).generate().unwrap();
    let text = h.to_edge_list(None);
    let (back, labels) = Hypergraph::parse_auto(&text).unwrap();
    assert!(labels.is_none());
    assert_eq!(back.hyperedges(), h.hyperedges());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generators_are_uniform_unique_and_seeded(fam in 0usize..3, seed in 0u64..1000, k in 2usize..5) {
        let family = [Family::Erh, Family::Wsh, Family::Sfh][fam];
        let spec = GenSpec::new(family, 60, 50, k, seed);
        let h = spec.generate().unwrap();
        prop_assert_eq!(h.n_hyperedges(), 50);
        prop_assert!(h.hyperedges().iter().all(|e| e.len() == k));
        let mut sorted = h.hyperedges().to_vec();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), 50);
        prop_assert_eq!(spec.generate().unwrap(), h);
    }

    #[test]
    fn removal_keeps_the_survivors_structure(seed in 0u64..500, k in 0usize..10) {
        let h = random_hypergraph(&mut rng_for(81, seed), 20, 15, 5);
        let victims: Vec<usize> = (0..k.min(h.n_nodes())).collect();
        let (rest, kept) = h.remove_nodes(&victims);
        prop_assert_eq!(rest.n_nodes() + victims.len(), h.n_nodes());
        // every surviving hyperedge is an original hyperedge minus the victims
        let mut want: Vec<Vec<usize>> = h
            .hyperedges()
            .iter()
            .map(|e| e.iter().copied().filter(|v| !victims.contains(v)).collect::<Vec<_>>())
            .filter(|e| !e.is_empty())
            .collect();
        let mut got: Vec<Vec<usize>> = rest.hyperedges().iter().map(|e| e.iter().map(|&v| kept[v]).collect()).collect();
        want.sort();
        got.sort();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn hyperdegrees_sum_to_total_size(seed in 0u64..500) {
        let h = random_hypergraph(&mut rng_for(82, seed), 20, 15, 5);
        let d = h.degrees();
        prop_assert_eq!(d.node_hyperdegree.iter().sum::<usize>(), d.hyperedge_size.iter().sum::<usize>());
    }
}
