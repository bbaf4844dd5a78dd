//! s-line graphs and s-distances.
//!
//! Two hyperedges are s-adjacent when they share at least `s` nodes. At order
//! `s` only hyperedges with at least `s` members take part: a smaller
//! hyperedge cannot s-intersect anything, itself included, so it contributes
//! neither line-graph edges nor node distances. At `s = 1` every hyperedge
//! takes part.
//!
//! Node distances lift hyperedge distances: two nodes sharing an active
//! hyperedge are at distance 1, otherwise the distance is one more than the
//! closest pair of active hyperedges containing them.

use std::borrow::Cow;
use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hypergraph::Hypergraph;

/// Path length with an explicit unreachable value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Dist(u32);

impl Dist {
    pub const INF: Dist = Dist(u32::MAX);
    pub const ZERO: Dist = Dist(0);

    pub fn new(d: u32) -> Self {
        assert!(d != u32::MAX, "distance overflow");
        Dist(d)
    }

    pub fn is_finite(self) -> bool {
        self != Self::INF
    }

    pub fn get(self) -> Option<u32> {
        self.is_finite().then_some(self.0)
    }

    /// `1/d`, with `1/inf = 0`. Zero distances have no inverse and panic.
    pub fn inverse(self) -> f64 {
        match self.get() {
            Some(0) => panic!("inverse of zero distance"),
            Some(d) => 1.0 / d as f64,
            None => 0.0,
        }
    }

    pub fn plus_one(self) -> Dist {
        match self.get() {
            Some(d) => Dist::new(d + 1),
            None => Self::INF,
        }
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.get() {
            Some(d) => write!(f, "{d}"),
            None => write!(f, "inf"),
        }
    }
}

/// Dense square matrix of distances, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistMatrix {
    n: usize,
    data: Vec<Dist>,
}

impl DistMatrix {
    pub fn filled(n: usize, value: Dist) -> Self {
        Self {
            n,
            data: vec![value; n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Dist>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "ragged distance rows");
            data.extend(r);
        }
        Self { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Dist {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, d: Dist) {
        self.data[i * self.n + j] = d;
    }

    pub fn row(&self, i: usize) -> &[Dist] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

#[derive(Debug, Clone)]
pub struct SLineGraph {
    pub s: usize,
    /// Sorted neighbor lists, one per hyperedge of the source hypergraph.
    pub adjacency: Vec<Vec<usize>>,
    /// Whether each hyperedge has at least `s` members.
    pub active: Vec<bool>,
}

impl SLineGraph {
    pub fn n_vertices(&self) -> usize {
        self.adjacency.len()
    }

    /// Unordered edges `(p, q)` with `p < q`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(p, adj)| adj.iter().filter(move |&&q| q > p).map(move |&q| (p, q)))
    }

    pub fn n_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn degree(&self, e: usize) -> usize {
        self.adjacency[e].len()
    }

    /// Single-source BFS distances over the line graph.
    pub fn bfs(&self, source: usize) -> Vec<Dist> {
        let mut dist = vec![Dist::INF; self.n_vertices()];
        dist[source] = Dist::ZERO;
        let mut queue = VecDeque::from([source]);
        while let Some(p) = queue.pop_front() {
            let next = dist[p].plus_one();
            for &q in &self.adjacency[p] {
                if !dist[q].is_finite() {
                    dist[q] = next;
                    queue.push_back(q);
                }
            }
        }
        dist
    }

    /// Connected components as sorted vertex lists, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n_vertices();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut stack = vec![start];
            while let Some(p) = stack.pop() {
                for &q in &self.adjacency[p] {
                    if !seen[q] {
                        seen[q] = true;
                        comp.push(q);
                        stack.push(q);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// Builds the s-line graph by counting pairwise intersections through the
/// incidence lists, so only hyperedge pairs that actually overlap are visited.
pub fn build_s_line_graph(h: &Hypergraph, s: usize) -> SLineGraph {
    assert!(s >= 1, "s must be at least 1");
    let m = h.n_hyperedges();
    let active: Vec<bool> = (0..m).map(|e| h.members(e).len() >= s).collect();
    let adjacency: Vec<Vec<usize>> = (0..m)
        .into_par_iter()
        .map_init(
            || (vec![0usize; m], Vec::new()),
            |(count, touched), p| {
                if !active[p] {
                    return Vec::new();
                }
                for &v in h.members(p) {
                    for &q in h.incident(v) {
                        if q != p && active[q] {
                            if count[q] == 0 {
                                touched.push(q);
                            }
                            count[q] += 1;
                        }
                    }
                }
                let mut adj: Vec<usize> = touched.iter().copied().filter(|&q| count[q] >= s).collect();
                for &q in touched.iter() {
                    count[q] = 0;
                }
                touched.clear();
                adj.sort_unstable();
                adj
            },
        )
        .collect();
    SLineGraph {
        s,
        adjacency,
        active,
    }
}

/// All-pairs hyperedge s-distances (BFS from every line-graph vertex).
pub fn hyperedge_s_distances(h: &Hypergraph, s: usize) -> DistMatrix {
    line_graph_distances(&build_s_line_graph(h, s))
}

pub fn line_graph_distances(lg: &SLineGraph) -> DistMatrix {
    let rows: Vec<Vec<Dist>> = (0..lg.n_vertices())
        .into_par_iter()
        .map(|p| lg.bfs(p))
        .collect();
    DistMatrix::from_rows(rows)
}

/// Node matrices above this many nodes are not materialized by default.
pub const DEFAULT_DENSE_CAP: usize = 5000;

/// Node and hyperedge s-distances of one hypergraph.
///
/// The node matrix is stored densely when the node count is at most the
/// configured cap; otherwise rows are recomputed on demand from the
/// hyperedge matrix.
#[derive(Debug, Clone)]
pub struct SLineDistances {
    pub s: usize,
    pub edge_dist: DistMatrix,
    node_dist: Option<DistMatrix>,
    /// Active incident hyperedges per node.
    incident: Vec<Vec<usize>>,
    /// Largest finite off-diagonal node distance (0 if there is none).
    pub diameter: u32,
}

impl SLineDistances {
    pub fn n_nodes(&self) -> usize {
        self.incident.len()
    }

    pub fn is_dense(&self) -> bool {
        self.node_dist.is_some()
    }

    pub fn node_dist(&self, i: usize, j: usize) -> Dist {
        match &self.node_dist {
            Some(m) => m.get(i, j),
            None => self.node_row(i)[j],
        }
    }

    pub fn node_row(&self, i: usize) -> Cow<'_, [Dist]> {
        match &self.node_dist {
            Some(m) => Cow::Borrowed(m.row(i)),
            None => Cow::Owned(compute_node_row(&self.edge_dist, &self.incident, i)),
        }
    }

    /// Dense node matrix, materializing it if needed.
    pub fn node_matrix(&self) -> Cow<'_, DistMatrix> {
        match &self.node_dist {
            Some(m) => Cow::Borrowed(m),
            None => {
                let rows = (0..self.n_nodes())
                    .into_par_iter()
                    .map(|i| compute_node_row(&self.edge_dist, &self.incident, i))
                    .collect();
                Cow::Owned(DistMatrix::from_rows(rows))
            }
        }
    }
}

fn compute_node_row(edge_dist: &DistMatrix, incident: &[Vec<usize>], i: usize) -> Vec<Dist> {
    let m = edge_dist.size();
    let mut best = vec![Dist::INF; m];
    for &p in &incident[i] {
        for (b, &d) in best.iter_mut().zip(edge_dist.row(p)) {
            if d < *b {
                *b = d;
            }
        }
    }
    incident
        .iter()
        .map(|ej| {
            ej.iter()
                .map(|&q| best[q])
                .min()
                .unwrap_or(Dist::INF)
                .plus_one()
        })
        .collect()
}

fn row_max_finite(row: &[Dist], i: usize) -> u32 {
    row.iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .filter_map(|(_, d)| d.get())
        .max()
        .unwrap_or(0)
}

pub fn node_s_distance_matrix(h: &Hypergraph, s: usize) -> SLineDistances {
    node_s_distances_with_cap(h, s, DEFAULT_DENSE_CAP)
}

pub fn node_s_distances_with_cap(h: &Hypergraph, s: usize, dense_cap: usize) -> SLineDistances {
    let lg = build_s_line_graph(h, s);
    let edge_dist = line_graph_distances(&lg);
    let incident: Vec<Vec<usize>> = (0..h.n_nodes())
        .map(|v| {
            h.incident(v)
                .iter()
                .copied()
                .filter(|&e| lg.active[e])
                .collect()
        })
        .collect();
    let n = h.n_nodes();
    if n <= dense_cap {
        let rows: Vec<Vec<Dist>> = (0..n)
            .into_par_iter()
            .map(|i| compute_node_row(&edge_dist, &incident, i))
            .collect();
        let diameter = rows
            .iter()
            .enumerate()
            .map(|(i, r)| row_max_finite(r, i))
            .max()
            .unwrap_or(0);
        SLineDistances {
            s,
            edge_dist,
            node_dist: Some(DistMatrix::from_rows(rows)),
            incident,
            diameter,
        }
    } else {
        let diameter = (0..n)
            .into_par_iter()
            .map(|i| row_max_finite(&compute_node_row(&edge_dist, &incident, i), i))
            .max()
            .unwrap_or(0);
        SLineDistances {
            s,
            edge_dist,
            node_dist: None,
            incident,
            diameter,
        }
    }
}

/// Per-order histogram of finite node distances over unordered pairs `i < j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceHistogram {
    pub s: usize,
    pub counts: BTreeMap<u32, u64>,
}

pub fn histogram_of(dist: &SLineDistances) -> DistanceHistogram {
    let n = dist.n_nodes();
    let counts = (0..n)
        .into_par_iter()
        .map(|i| {
            let row = dist.node_row(i);
            let mut c: BTreeMap<u32, u64> = BTreeMap::new();
            for d in row[i + 1..].iter().filter_map(|d| d.get()) {
                *c.entry(d).or_default() += 1;
            }
            c
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });
    DistanceHistogram { s: dist.s, counts }
}

pub fn s_distance_histogram(h: &Hypergraph, s_max: usize) -> Vec<DistanceHistogram> {
    (1..=s_max)
        .map(|s| histogram_of(&node_s_distance_matrix(h, s)))
        .collect()
}

/// CSV with columns s, distance, count.
pub fn histogram_csv(hists: &[DistanceHistogram]) -> String {
    let mut out = String::from("s,distance,count\n");
    for hist in hists {
        for (d, c) in &hist.counts {
            out.push_str(&format!("{},{},{}\n", hist.s, d, c));
        }
    }
    out
}
