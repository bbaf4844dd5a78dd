//! The library-level acceptance checks. Each returns whether it held and a
//! one-line account of what was measured; callers decide whether to assert.

use std::time::Instant;

use hyperrank_core::centrality::{self, Baseline, CentralityParams, HdfParams};
use hyperrank_core::diffusion::{exact_influence_small, influence_labels, outbreak_sizes, SirParams, DEFAULT_EXACT_BUDGET};
use hyperrank_core::eval::{self, kendall_tau, kendall_tau_with, TauVariant};
use hyperrank_core::fractal::{box_cover_count, global_fractal_dim};
use hyperrank_core::generators::{Family, GenSpec};
use hyperrank_core::hypergraph::Hypergraph;
use hyperrank_core::neural::{ae_loss_and_grad, grad_check, rank_loss_and_grad, target_order, AeShape, Matrix, Propagator, RankerShape};
use hyperrank_core::score::rank_descending;
use hyperrank_core::sline::{build_s_line_graph, node_s_distance_matrix};
use rand::seq::SliceRandom;
use rand::Rng;

use super::*;

#[derive(Debug, Clone)]
pub struct Check {
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail }
    }
}

// 1
pub fn distance_oracle() -> Check {
    let start = Instant::now();
    let mut mismatches = 0;
    let mut entries = 0;
    for case in 0..200u64 {
        let mut rng = rng_for(1, case);
        let h = random_hypergraph(&mut rng, 20, 15, 5);
        let s = 1 + (case % 3) as usize;
        let want = node_distance_oracle(&h, s);
        let got = node_s_distance_matrix(&h, s);
        for i in 0..h.n_nodes() {
            for j in 0..h.n_nodes() {
                entries += 1;
                if as_u32(got.node_dist(i, j)) != want[i][j] {
                    mismatches += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Check::new(
        mismatches == 0 && secs < 30.0,
        format!("{mismatches} mismatches in {entries} entries over 200 hypergraphs, {secs:.2}s"),
    )
}

/// Small fixtures for the Monte Carlo check.
pub fn sir_fixtures() -> Vec<(&'static str, Hypergraph)> {
    vec![
        ("two-hyperedge", hg(4, &[&[0, 1, 2], &[2, 3]])),
        ("pair-chain", chain(5)),
        ("triangle-of-triples", hg(6, &[&[0, 1, 2], &[2, 3, 4], &[4, 5, 0], &[1, 3]])),
    ]
}

// 2
pub fn sir_exactness() -> Check {
    let start = Instant::now();
    let replicas = 100_000;
    let mut worst: f64 = 0.0;
    let mut outside = 0;
    let mut checked = 0;
    for (fi, (_, h)) in sir_fixtures().into_iter().enumerate() {
        for beta in [0.3, 0.5, 1.0] {
            let params = SirParams::new(beta, 1.0);
            let seed = 0x51 + fi as u64;
            let labels = influence_labels(&h, &params, replicas, seed).unwrap();
            for v in 0..h.n_nodes() {
                let exact = exact_influence_small(&h, v, &params, DEFAULT_EXACT_BUDGET).unwrap();
                let sizes = outbreak_sizes(&h, v, &params, replicas, seed);
                let mean = sizes.iter().sum::<usize>() as f64 / replicas as f64;
                assert_eq!(mean, labels.values[v], "labels and raw runs disagree");
                let var = sizes.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / (replicas - 1) as f64;
                let se = (var / replicas as f64).sqrt();
                let gap = (mean - exact).abs();
                checked += 1;
                let z = if se > 0.0 {
                    gap / se
                } else if gap < 1e-12 {
                    0.0
                } else {
                    f64::INFINITY
                };
                worst = worst.max(z);
                if z > 3.0 {
                    outside += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Check::new(
        outside == 0 && secs < 60.0,
        format!("{outside}/{checked} node labels beyond 3 SE (worst {worst:.2} SE), {secs:.1}s"),
    )
}

pub fn gradcheck_fixture() -> (Hypergraph, Propagator) {
    let mut rng = rng_for(3, 0);
    // every node in some hyperedge: an isolated node sits on the ReLU kink
    let edges: Vec<Vec<usize>> = (0..8)
        .map(|i| {
            let mut e = vec![i, 8 + i % 4];
            let extra = rng.random_range(0..=2);
            e.extend(rand::seq::index::sample(&mut rng, 12, extra).into_iter());
            e
        })
        .collect();
    let h = Hypergraph::new(12, edges).unwrap();
    let p = Propagator::build(&h, &mut rng);
    (h, p)
}

/// Largest relative gradient error of the reconstruction and ranking losses.
pub fn gradient_errors(decoder_relu: bool) -> (f64, f64) {
    let (h, p) = gradcheck_fixture();
    let mut rng = rng_for(3, 1);
    let shape = AeShape {
        n_nodes: 12,
        d: 8,
        depth: 2,
        decoder_relu,
    };
    let tensors = shape.init(&mut rng).unwrap();
    let degrees: Vec<f64> = h.degrees().node_degree.iter().map(|&k| k as f64).collect();
    let target = hyperrank_core::neural::minmax(&degrees);
    let (_, grads, _) = ae_loss_and_grad(&shape, &tensors, &p, &target).unwrap();
    let total: usize = tensors.iter().map(Matrix::len).sum();
    let l1 = grad_check(
        &tensors,
        &grads,
        |t| ae_loss_and_grad(&shape, t, &p, &target).unwrap().0,
        1e-6,
        total,
        &mut rng,
    )
    .unwrap();

    let rshape = RankerShape { width: 8 / 4, layers: 2 };
    let rt = rshape.init(&mut rng).unwrap();
    let features = Matrix::from_fn(12, rshape.width, |_, _| rng.random_range(-1.0..1.0));
    let labels: Vec<f64> = (0..12).map(|_| rng.random_range(1.0..5.0)).collect();
    let order = target_order(&labels);
    let (_, rgrads) = rank_loss_and_grad(&rshape, &rt, &p, &features, &order).unwrap();
    let total: usize = rt.iter().map(Matrix::len).sum();
    let l2 = grad_check(
        &rt,
        &rgrads,
        |t| rank_loss_and_grad(&rshape, t, &p, &features, &order).unwrap().0,
        1e-6,
        total,
        &mut rng,
    )
    .unwrap();
    (l1, l2)
}

// 3
pub fn gradient_fidelity() -> Check {
    let start = Instant::now();
    let (l1, l2) = gradient_errors(false);
    let (l1r, _) = gradient_errors(true);
    let worst = l1.max(l2).max(l1r);
    let secs = start.elapsed().as_secs_f64();
    Check::new(
        worst < 1e-4 && secs < 10.0,
        format!("max relative error L1 {l1:.2e} (relu decoder {l1r:.2e}), L2 {l2:.2e}, {secs:.2}s"),
    )
}

// 4
pub fn kendall_oracle() -> Check {
    let mut bad = 0;
    for case in 0..500u64 {
        let mut rng = rng_for(4, case);
        let n = rng.random_range(2..=200);
        let x = tied_vector(&mut rng, n);
        let y = if case % 5 == 0 {
            (0..n).map(|_| rng.random::<f64>()).collect()
        } else {
            tied_vector(&mut rng, n)
        };
        if kendall_tau(&x, &y).unwrap() != brute_tau(&x, &y) {
            bad += 1;
        }
        let varies = |v: &[f64]| v.iter().any(|&a| a != v[0]);
        if varies(&x) && varies(&y) && kendall_tau_with(&x, &y, TauVariant::B).unwrap() != brute_tau_b(&x, &y) {
            bad += 1;
        }
        let distinct: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let neg: Vec<f64> = distinct.iter().map(|v| -v).collect();
        if kendall_tau(&distinct, &distinct).unwrap() != 1.0 || kendall_tau(&distinct, &neg).unwrap() != -1.0 {
            bad += 1;
        }
    }
    Check::new(bad == 0, format!("{bad} disagreements over 500 vectors (tau-a, tau-b, identity, reversal)"))
}

/// Largest `|A v - lambda v|` entry, `lambda` the Rayleigh quotient of the
/// vertex's component (vertices with equal support share a component).
fn eigen_residual(adj: &[Vec<bool>], v: &[f64]) -> f64 {
    let m = adj.len();
    let av: Vec<f64> = (0..m).map(|p| (0..m).filter(|&q| adj[p][q]).map(|q| v[q]).sum()).collect();
    let mut worst: f64 = 0.0;
    for p in 0..m {
        let comp: Vec<usize> = reachable(adj, p);
        let num: f64 = comp.iter().map(|&q| v[q] * av[q]).sum();
        let den: f64 = comp.iter().map(|&q| v[q] * v[q]).sum();
        let lambda = num / den;
        worst = worst.max((av[p] - lambda * v[p]).abs());
    }
    worst
}

fn reachable(adj: &[Vec<bool>], start: usize) -> Vec<usize> {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(v) = stack.pop() {
        for w in 0..adj.len() {
            if adj[v][w] && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    (0..adj.len()).filter(|&v| seen[v]).collect()
}

// 5
pub fn vc_eigen_oracle() -> Check {
    let mut worst: f64 = 0.0;
    let mut resid: f64 = 0.0;
    for case in 0..50u64 {
        let mut rng = rng_for(5, case);
        let h = random_hypergraph(&mut rng, 14, 12, 4);
        let adj = line_adjacency(&h);
        let want = dense_component_eigenvector(&adj);
        let got = centrality::hyperedge_eigenvector(&build_s_line_graph(&h, 1));
        worst = worst.max(max_abs_diff(&got, &want));
        resid = resid.max(eigen_residual(&adj, &got));
    }
    Check::new(
        worst < 1e-8 && resid < 1e-8,
        format!("max |power - dense| = {worst:.2e}, max |Av - lambda v| = {resid:.2e} over 50 line graphs (M <= 12)"),
    )
}

/// Vertex-transitive fixtures: Fano plane, complete 3-uniform on 5 nodes, a ring of pairs.
pub fn vertex_transitive() -> Vec<(&'static str, Hypergraph)> {
    let fano: Vec<Vec<usize>> = (0..7).map(|i| vec![i, (i + 1) % 7, (i + 3) % 7]).collect();
    let mut k53 = Vec::new();
    for a in 0..5 {
        for b in a + 1..5 {
            for c in b + 1..5 {
                k53.push(vec![a, b, c]);
            }
        }
    }
    let ring: Vec<Vec<usize>> = (0..6).map(|i| vec![i, (i + 1) % 6]).collect();
    vec![
        ("fano", Hypergraph::new(7, fano).unwrap()),
        ("complete-3-uniform-5", Hypergraph::new(5, k53).unwrap()),
        ("ring-6", Hypergraph::new(6, ring).unwrap()),
    ]
}

/// Hand-computed values: (what, got, want).
pub fn closed_form_values() -> Vec<(&'static str, f64, f64)> {
    let mut out = Vec::new();
    let pair = hg(3, &[&[0, 1], &[1, 2]]);
    let hedc = centrality::hedc(&pair).unwrap().scores;
    out.push(("HEDC shared node", hedc[1], 1.0));
    out.push(("HEDC leaf", hedc[0], 0.5));
    out.push(("HEDC single hyperedge", centrality::hedc(&hg(3, &[&[0, 1, 2]])).unwrap().scores[0], 0.0));

    let vc = centrality::vc(&pair).unwrap().scores;
    let r = 1.0 / (2.0 * 2f64.sqrt());
    out.push(("VC shared node", vc[1], 2.0 * r));
    out.push(("VC leaf", vc[0], r));

    let hcc2 = centrality::hcc_edge_scores(&pair, 1);
    out.push(("HCC adjacent pair", hcc2[0], 1.0));
    let apart = centrality::hcc_edge_scores(&hg(4, &[&[0, 1], &[2, 3]]), 1);
    out.push(("HCC disconnected pair", apart[0], 0.0));
    let chain3 = centrality::hcc_edge_scores(&chain(4), 1);
    out.push(("HCC chain middle", chain3[1], 1.0));
    out.push(("HCC chain end", chain3[0], 0.75));

    let e = std::f64::consts::E;
    out.push(("HDF membership at L", centrality::fuzzy_membership(3.0, 3.0), 1.0 / e));
    let one = hg(5, &[&[0, 1, 2, 3, 4]]);
    let hdf = centrality::hdf(&one, &HdfParams::default()).unwrap().scores;
    out.push(("HDF all at distance 1", hdf[0], 1.0 / e));
    out
}

// 6
pub fn closed_form_baselines() -> Check {
    let values = closed_form_values();
    let wrong: Vec<&str> = values
        .iter()
        .filter(|(_, got, want)| (got - want).abs() > 1e-12)
        .map(|(what, _, _)| *what)
        .collect();

    let params = CentralityParams::default();
    let mut not_constant = Vec::new();
    for (name, h) in vertex_transitive() {
        for b in Baseline::ALL {
            let s = centrality::compute(&h, b, &params).unwrap().scores;
            let spread = s.iter().cloned().fold(f64::MIN, f64::max) - s.iter().cloned().fold(f64::MAX, f64::min);
            if spread > 1e-10 {
                not_constant.push(format!("{}@{name}", b.name()));
            }
        }
    }

    let mut not_equivariant = Vec::new();
    for case in 0..20u64 {
        let mut rng = rng_for(6, case);
        let h = GenSpec::new([Family::Erh, Family::Wsh, Family::Sfh][case as usize % 3], 30, 25, 3, case)
            .generate()
            .unwrap();
        let mut perm: Vec<usize> = (0..h.n_nodes()).collect();
        perm.shuffle(&mut rng);
        let hp = h.permuted(&perm).unwrap();
        for b in Baseline::ALL {
            let a = centrality::compute(&h, b, &params).unwrap().scores;
            let c = centrality::compute(&hp, b, &params).unwrap().scores;
            let moved: Vec<f64> = (0..h.n_nodes()).map(|v| c[perm[v]]).collect();
            if max_abs_diff(&a, &moved) > 1e-12 {
                not_equivariant.push(format!("{}#{case}", b.name()));
            }
        }
    }
    let pass = wrong.is_empty() && not_constant.is_empty() && not_equivariant.is_empty();
    Check::new(
        pass,
        format!(
            "{}/{} hand values off, non-constant on symmetric fixtures: {:?}, non-equivariant: {:?}",
            wrong.len(),
            values.len(),
            not_constant,
            not_equivariant
        ),
    )
}

/// Greedy box counts for `r_b = 1..=diameter + 1`.
pub fn box_counts(h: &Hypergraph) -> (Vec<usize>, Vec<Vec<u32>>) {
    let d = node_s_distance_matrix(h, 1);
    let m = d.node_matrix();
    let counts = (1..=d.diameter + 1).map(|r| box_cover_count(&m, r)).collect();
    (counts, node_distance_oracle(h, 1))
}

// 7
pub fn fractal_sanity() -> Check {
    let d_f = global_fractal_dim(&chain(30), 1).unwrap().d_f;

    let mut increases = 0;
    for case in 0..100u64 {
        let mut rng = rng_for(7, case);
        let h = random_hypergraph(&mut rng, 40, 40, 3);
        let (counts, _) = box_counts(&h);
        if counts.windows(2).any(|w| w[1] > w[0]) {
            increases += 1;
        }
    }

    let mut worst_ratio: f64 = 0.0;
    for case in 0..100u64 {
        let mut rng = rng_for(70, case);
        let h = random_hypergraph(&mut rng, 12, 10, 3);
        let (counts, oracle) = box_counts(&h);
        for (i, &greedy) in counts.iter().enumerate() {
            let exact = exact_min_boxes(&oracle, (i + 1) as u32);
            worst_ratio = worst_ratio.max(greedy as f64 / exact as f64);
        }
    }
    let pass = (0.8..=1.2).contains(&d_f) && increases == 0 && worst_ratio <= 2.0;
    Check::new(
        pass,
        format!(
            "chain d_f = {d_f:.3}; {increases}/100 instances with a box count rising in r_B; worst greedy/exact = {worst_ratio:.2}"
        ),
    )
}

pub fn dismantling_fixture(case: u64) -> Hypergraph {
    let family = [Family::Erh, Family::Wsh, Family::Sfh][case as usize % 3];
    GenSpec::new(family, 40, 40, 3, 100 + case).generate().unwrap()
}

// 11
pub fn dismantling_metric() -> Check {
    let chain_e = eval::s_efficiency(&chain(4), 1);
    let chain_ok = (chain_e - 5.0 / 6.0).abs() < 1e-12;

    let ps = eval::default_fractions();
    let mut zero_ok = true;
    let mut decreasing = Vec::new();
    let mut worst_drop: f64 = 0.0;
    for case in 0..50u64 {
        let h = dismantling_fixture(case);
        let dc = centrality::dc(&h).unwrap();
        let ranking = rank_descending(&dc.scores);
        let curve = eval::delta_efficiency_curve(&h, &ranking, &ps, eval::DEFAULT_S_MAX).unwrap();
        zero_ok &= curve[0].1 == 0.0;
        let drop = curve.windows(2).map(|w| w[0].1 - w[1].1).fold(0.0, f64::max);
        if drop > 0.0 {
            decreasing.push(case);
            worst_drop = worst_drop.max(drop);
        }
    }
    Check::new(
        chain_ok && zero_ok && decreasing.is_empty(),
        format!(
            "chain E_1 = {chain_e:.15}; dE(0) = 0 on all: {zero_ok}; {} of 50 DC curves decrease somewhere (largest drop {worst_drop:.3e}, fixtures {:?})",
            decreasing.len(),
            decreasing
        ),
    )
}
