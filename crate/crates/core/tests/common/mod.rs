//! Independent oracles and random fixtures shared by the integration tests
//! and the acceptance suite. Nothing here calls the routine it checks.

#![allow(dead_code)]

pub mod checks;

use hyperrank_core::hypergraph::Hypergraph;
use hyperrank_core::rng::{self, Rng64};
use hyperrank_core::sline::Dist;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

pub const INF: u32 = u32::MAX;

pub fn hg(n: usize, edges: &[&[usize]]) -> Hypergraph {
    Hypergraph::new(n, edges.iter().map(|e| e.to_vec()).collect()).unwrap()
}

/// `n` nodes, hyperedges `{i, i+1}`.
pub fn chain(n: usize) -> Hypergraph {
    Hypergraph::new(n, (0..n - 1).map(|i| vec![i, i + 1]).collect()).unwrap()
}

/// Random hypergraph with `1..=n_max` nodes, `1..=m_max` hyperedges of size
/// `1..=k_max`. Some nodes may be left without hyperedges.
pub fn random_hypergraph(rng: &mut Rng64, n_max: usize, m_max: usize, k_max: usize) -> Hypergraph {
    let n = rng.random_range(1..=n_max);
    let m = rng.random_range(1..=m_max);
    let edges = (0..m)
        .map(|_| {
            let k = rng.random_range(1..=k_max.min(n));
            rand::seq::index::sample(rng, n, k).into_vec()
        })
        .collect();
    Hypergraph::new(n, edges).unwrap()
}

pub fn rng_for(test: u64, case: u64) -> Rng64 {
    rng::derived(0x7E57, &[test, case])
}

pub fn as_u32(d: Dist) -> u32 {
    d.get().unwrap_or(INF)
}

// ---------------------------------------------------------------- distances

/// Hyperedge distances by Floyd-Warshall on the order-`s` line graph.
pub fn floyd_warshall_edges(h: &Hypergraph, s: usize) -> Vec<Vec<u32>> {
    let m = h.n_hyperedges();
    let mut d = vec![vec![INF; m]; m];
    for p in 0..m {
        d[p][p] = 0;
        for q in 0..m {
            if p != q {
                let shared = h.members(p).iter().filter(|v| h.members(q).contains(v)).count();
                if shared >= s {
                    d[p][q] = 1;
                }
            }
        }
    }
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                if d[i][k] != INF && d[k][j] != INF && d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Node distances lifted from hyperedge distances: one more than the closest
/// pair of order-`s` hyperedges holding the two nodes, so 1 when they share
/// one. The diagonal follows the same rule (1, or INF without an order-`s`
/// hyperedge).
pub fn node_distance_oracle(h: &Hypergraph, s: usize) -> Vec<Vec<u32>> {
    let de = floyd_warshall_edges(h, s);
    let n = h.n_nodes();
    let active = |e: usize| h.members(e).len() >= s;
    let holding: Vec<Vec<usize>> = (0..n)
        .map(|v| (0..h.n_hyperedges()).filter(|&e| active(e) && h.members(e).contains(&v)).collect())
        .collect();
    let mut out = vec![vec![INF; n]; n];
    for i in 0..n {
        for j in 0..n {
            for &e in &holding[i] {
                for &f in &holding[j] {
                    if de[e][f] != INF {
                        out[i][j] = out[i][j].min(de[e][f] + 1);
                    }
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------- kendall

/// Kendall tau-a by enumerating every pair.
pub fn brute_tau(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let mut score = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            let a = (x[i] - x[j]).partial_cmp(&0.0).unwrap() as i64;
            let b = (y[i] - y[j]).partial_cmp(&0.0).unwrap() as i64;
            score += a * b;
        }
    }
    score as f64 / (n * (n - 1) / 2) as f64
}

/// Kendall tau-b by enumerating every pair.
pub fn brute_tau_b(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let (mut s, mut tx, mut ty) = (0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let a = (x[i] - x[j]).partial_cmp(&0.0).unwrap() as i64;
            let b = (y[i] - y[j]).partial_cmp(&0.0).unwrap() as i64;
            s += a * b;
            tx += (a != 0) as i64;
            ty += (b != 0) as i64;
        }
    }
    s as f64 / ((tx as f64) * (ty as f64)).sqrt()
}

/// Vector of length `n` drawn from a small alphabet so ties are common.
pub fn tied_vector(rng: &mut Rng64, n: usize) -> Vec<f64> {
    let levels = rng.random_range(1..=(n as u32 / 2).max(2));
    (0..n).map(|_| rng.random_range(0..levels) as f64 * 0.5).collect()
}

// ---------------------------------------------------------------- eigen

/// Dominant eigenvector of every connected component of `adj`, from a dense
/// symmetric eigen-decomposition, made non-negative and scaled to norm
/// `sqrt(c / M)` for a component of `c` vertices.
pub fn dense_component_eigenvector(adj: &[Vec<bool>]) -> Vec<f64> {
    let m = adj.len();
    let mut comp = vec![usize::MAX; m];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for start in 0..m {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut stack = vec![start];
        let mut members = Vec::new();
        comp[start] = id;
        while let Some(v) = stack.pop() {
            members.push(v);
            for w in 0..m {
                if adj[v][w] && comp[w] == usize::MAX {
                    comp[w] = id;
                    stack.push(w);
                }
            }
        }
        members.sort_unstable();
        comps.push(members);
    }
    let mut out = vec![0.0; m];
    for members in comps {
        let c = members.len();
        let a = DMatrix::from_fn(c, c, |i, j| adj[members[i]][members[j]] as u8 as f64);
        let eig = SymmetricEigen::new(a);
        let top = (0..c).max_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j])).unwrap();
        let mut v: Vec<f64> = eig.eigenvectors.column(top).iter().copied().collect();
        if v.iter().sum::<f64>() < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let scale = (c as f64 / m as f64).sqrt() / norm;
        for (i, &e) in members.iter().enumerate() {
            out[e] = v[i] * scale;
        }
    }
    out
}

/// Order-1 line-graph adjacency built straight from member lists.
pub fn line_adjacency(h: &Hypergraph) -> Vec<Vec<bool>> {
    let m = h.n_hyperedges();
    (0..m)
        .map(|p| {
            (0..m)
                .map(|q| p != q && h.members(p).iter().any(|v| h.members(q).contains(v)))
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------- box covering

/// Exact minimum number of boxes `{c} + {j : d(c, j) < r_b}` covering every
/// node, by enumerating all centre sets. `n <= 16`.
pub fn exact_min_boxes(dist: &[Vec<u32>], r_b: u32) -> usize {
    let n = dist.len();
    assert!(n <= 16);
    let balls: Vec<u32> = (0..n)
        .map(|c| (0..n).filter(|&j| dist[c][j] < r_b).fold(1u32 << c, |m, j| m | (1 << j)))
        .collect();
    let full = (1u32 << n) - 1;
    let mut best = n;
    for set in 1u32..=full {
        let k = set.count_ones() as usize;
        if k >= best {
            continue;
        }
        let cover = (0..n).filter(|&c| set & (1 << c) != 0).fold(0u32, |m, c| m | balls[c]);
        if cover == full {
            best = k;
        }
    }
    best
}

// ---------------------------------------------------------------- efficiency

/// Mean of `1/d` over pairs of hyperedges with at least `s` members, from
/// Floyd-Warshall distances.
pub fn efficiency_oracle(h: &Hypergraph, s: usize) -> f64 {
    let de = floyd_warshall_edges(h, s);
    let active: Vec<usize> = (0..h.n_hyperedges()).filter(|&e| h.members(e).len() >= s).collect();
    let k = active.len();
    if k < 2 {
        return 0.0;
    }
    let mut sum = 0.0;
    for (a, &p) in active.iter().enumerate() {
        for &q in &active[a + 1..] {
            if de[p][q] != INF {
                sum += 1.0 / de[p][q] as f64;
            }
        }
    }
    sum / (k * (k - 1) / 2) as f64
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
