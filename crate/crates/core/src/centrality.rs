//! Baseline node rankings: DC, HEDC, VC, HCC and HDF.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::score::ScoreVector;
use crate::sline::{build_s_line_graph, line_graph_distances, node_s_distance_matrix, SLineDistances, SLineGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Baseline {
    Dc,
    Hedc,
    Vc,
    Hcc,
    Hdf,
}

impl Baseline {
    pub const ALL: [Baseline; 5] = [Baseline::Dc, Baseline::Hedc, Baseline::Vc, Baseline::Hcc, Baseline::Hdf];

    pub fn name(self) -> &'static str {
        match self {
            Baseline::Dc => "DC",
            Baseline::Hedc => "HEDC",
            Baseline::Vc => "VC",
            Baseline::Hcc => "HCC",
            Baseline::Hdf => "HDF",
        }
    }
}

impl FromStr for Baseline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dc" => Ok(Baseline::Dc),
            "hedc" => Ok(Baseline::Hedc),
            "vc" => Ok(Baseline::Vc),
            "hcc" => Ok(Baseline::Hcc),
            "hdf" => Ok(Baseline::Hdf),
            other => Err(Error::InvalidParameter(format!("unknown baseline {other:?}"))),
        }
    }
}

/// Tunables of the parameterized baselines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentralityParams {
    /// HCC order.
    pub hcc_s: usize,
    pub hdf: HdfParams,
}

impl Default for CentralityParams {
    fn default() -> Self {
        Self {
            hcc_s: 1,
            hdf: HdfParams::default(),
        }
    }
}

pub fn compute(h: &Hypergraph, method: Baseline, params: &CentralityParams) -> Result<ScoreVector> {
    match method {
        Baseline::Dc => dc(h),
        Baseline::Hedc => hedc(h),
        Baseline::Vc => vc(h),
        Baseline::Hcc => hcc(h, params.hcc_s),
        Baseline::Hdf => hdf(h, &params.hdf),
    }
}

/// Node score `sum_{e ∋ i} c(e) / |e|`.
fn spread_to_nodes(h: &Hypergraph, edge_scores: &[f64]) -> Vec<f64> {
    (0..h.n_nodes())
        .map(|v| {
            h.incident(v)
                .iter()
                .map(|&e| edge_scores[e] / h.members(e).len() as f64)
                .sum()
        })
        .collect()
}

pub fn dc(h: &Hypergraph) -> Result<ScoreVector> {
    let scores = h.degrees().node_degree.into_iter().map(|k| k as f64).collect();
    ScoreVector::new("DC", scores)
}

pub fn hedc(h: &Hypergraph) -> Result<ScoreVector> {
    let lg = build_s_line_graph(h, 1);
    let edge_scores: Vec<f64> = (0..h.n_hyperedges()).map(|e| lg.degree(e) as f64).collect();
    ScoreVector::new("HEDC", spread_to_nodes(h, &edge_scores))
}

pub const VC_TOLERANCE: f64 = 1e-10;
pub const VC_MAX_ITER: usize = 100_000;

/// Hyperedge eigenvector centrality on the 1-line graph.
///
/// Each connected component gets its own dominant eigenvector (power
/// iteration on `A + I`, which shares eigenvectors with `A` and has no
/// competing eigenvalue of equal modulus). A component of `c` vertices is
/// scaled to L2 norm `sqrt(c / M)`, so the concatenated vector has unit norm
/// and a connected line graph gets the ordinary unit eigenvector.
pub fn hyperedge_eigenvector(lg: &SLineGraph) -> Vec<f64> {
    let m = lg.n_vertices();
    let mut out = vec![0.0; m];
    for comp in lg.components() {
        let local: std::collections::HashMap<usize, usize> =
            comp.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let c = comp.len();
        let mut x = vec![1.0 / (c as f64).sqrt(); c];
        let mut y = vec![0.0; c];
        for _ in 0..VC_MAX_ITER {
            for (i, &p) in comp.iter().enumerate() {
                y[i] = x[i] + lg.adjacency[p].iter().map(|q| x[local[q]]).sum::<f64>();
            }
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            let mut diff = 0.0f64;
            for i in 0..c {
                let v = y[i] / norm;
                diff = diff.max((v - x[i]).abs());
                x[i] = v;
            }
            if diff < VC_TOLERANCE {
                break;
            }
        }
        let scale = (c as f64 / m as f64).sqrt();
        for (i, &p) in comp.iter().enumerate() {
            out[p] = x[i] * scale;
        }
    }
    out
}

/// VC node scores: each hyperedge's eigenvector score is split evenly over
/// its members and accumulated per hyperedge-size bucket `K = 2..K_max`;
/// the node score is the sum of its buckets. Size-1 hyperedges fall outside
/// every bucket.
pub fn vc(h: &Hypergraph) -> Result<ScoreVector> {
    let lg = build_s_line_graph(h, 1);
    let edge_scores = hyperedge_eigenvector(&lg);
    let k_max = h.max_hyperedge_size();
    let scores = (0..h.n_nodes())
        .map(|v| {
            let mut buckets = vec![0.0; k_max + 1];
            for &e in h.incident(v) {
                let k = h.members(e).len();
                buckets[k] += edge_scores[e] / k as f64;
            }
            buckets.iter().skip(2).sum()
        })
        .collect();
    ScoreVector::new("VC", scores)
}

/// Harmonic closeness of each hyperedge at order `s`, with `1/inf = 0`.
pub fn hcc_edge_scores(h: &Hypergraph, s: usize) -> Vec<f64> {
    let m = h.n_hyperedges();
    if m < 2 {
        return vec![0.0; m];
    }
    let dist = line_graph_distances(&build_s_line_graph(h, s));
    (0..m)
        .map(|g| {
            let sum: f64 = (0..m).filter(|&q| q != g).map(|q| dist.get(g, q).inverse()).sum();
            sum / (m - 1) as f64
        })
        .collect()
}

pub fn hcc(h: &Hypergraph, s: usize) -> Result<ScoreVector> {
    if s == 0 {
        return Err(Error::InvalidParameter("s must be >= 1".into()));
    }
    ScoreVector::new("HCC", spread_to_nodes(h, &hcc_edge_scores(h, s)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HdfParams {
    /// Radius divisor `r`: the sphere radius is `ceil(z / r)`.
    pub r: f64,
    /// Highest order `s_m`; scores are averaged over `s = 1..=s_m`.
    pub s_max: usize,
    /// Square the membership degree in the fuzzy count (`n x^2`); otherwise `n x`.
    pub squared_membership: bool,
}

impl Default for HdfParams {
    fn default() -> Self {
        Self {
            r: 2.0,
            s_max: 3,
            squared_membership: true,
        }
    }
}

/// Fuzzy membership `exp(-l^2 / L^2)`.
pub fn fuzzy_membership(l: f64, radius: f64) -> f64 {
    (-(l * l) / (radius * radius)).exp()
}

/// Entropy score of one node at one order from its distance row.
pub fn hdf_node_score(row: &[i64], r: f64, squared: bool) -> f64 {
    // row holds finite distances to every other node (negative = unreachable)
    let z = row.iter().copied().filter(|&d| d > 0).max().unwrap_or(0);
    if z == 0 {
        return 0.0;
    }
    let radius = (z as f64 / r).ceil() as i64;
    let mut counts = vec![0usize; radius as usize + 1];
    for &d in row {
        if d > 0 && d <= radius {
            counts[d as usize] += 1;
        }
    }
    let fuzzy: Vec<f64> = (1..=radius)
        .map(|l| {
            let x = fuzzy_membership(l as f64, radius as f64);
            counts[l as usize] as f64 * if squared { x * x } else { x }
        })
        .collect();
    let total: f64 = fuzzy.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    fuzzy
        .iter()
        .enumerate()
        .map(|(idx, &f)| {
            let l = (idx + 1) as f64;
            let p = f / (std::f64::consts::E * total);
            if p > 0.0 {
                -p * p.ln() / (l * l)
            } else {
                0.0
            }
        })
        .sum()
}

fn hdf_scores_at(dist: &SLineDistances, params: &HdfParams) -> Vec<f64> {
    (0..dist.n_nodes())
        .map(|i| {
            let row: Vec<i64> = dist
                .node_row(i)
                .iter()
                .enumerate()
                .map(|(j, d)| if j == i { -1 } else { d.get().map_or(-1, i64::from) })
                .collect();
            hdf_node_score(&row, params.r, params.squared_membership)
        })
        .collect()
}

pub fn hdf(h: &Hypergraph, params: &HdfParams) -> Result<ScoreVector> {
    if !(params.r > 0.0) || params.s_max == 0 {
        return Err(Error::InvalidParameter("HDF needs r > 0 and s_max >= 1".into()));
    }
    let mut total = vec![0.0; h.n_nodes()];
    for s in 1..=params.s_max {
        let dist = node_s_distance_matrix(h, s);
        for (t, x) in total.iter_mut().zip(hdf_scores_at(&dist, params)) {
            *t += x;
        }
    }
    let scores = total.into_iter().map(|t| t / params.s_max as f64).collect();
    ScoreVector::new("HDF", scores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, SQRT_2};

    fn hg(n: usize, edges: &[&[usize]]) -> Hypergraph {
        Hypergraph::new(n, edges.iter().map(|e| e.to_vec()).collect()).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn dc_examples() {
        assert_eq!(dc(&hg(3, &[&[0, 1, 2]])).unwrap().scores, vec![2.0; 3]);
        let star = hg(6, &[&[0, 1], &[0, 2], &[0, 3], &[0, 4], &[0, 5]]);
        assert_eq!(dc(&star).unwrap().scores, vec![5.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(dc(&hg(2, &[&[0], &[1]])).unwrap().scores, vec![0.0, 0.0]);
    }

    #[test]
    fn hedc_examples() {
        let s = hedc(&hg(3, &[&[0, 1], &[1, 2]])).unwrap().scores;
        assert!(close(s[0], 0.5) && close(s[1], 1.0) && close(s[2], 0.5));
        assert_eq!(hedc(&hg(3, &[&[0, 1, 2]])).unwrap().scores, vec![0.0; 3]);
    }

    #[test]
    fn vc_two_hyperedges() {
        let s = vc(&hg(3, &[&[0, 1], &[1, 2]])).unwrap().scores;
        let leaf = 1.0 / (2.0 * SQRT_2);
        assert!((s[0] - leaf).abs() < 1e-9);
        assert!((s[1] - 2.0 * leaf).abs() < 1e-9);
        assert!((s[2] - leaf).abs() < 1e-9);
    }

    #[test]
    fn vc_bipartite_line_graph_converges() {
        // line graph is a 4-cycle (bipartite)
        let h = hg(4, &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]]);
        let lg = build_s_line_graph(&h, 1);
        let v = hyperedge_eigenvector(&lg);
        assert!(v.iter().all(|x| (x - 0.5).abs() < 1e-9));
    }

    #[test]
    fn vc_edgeless_line_graph_is_uniform() {
        let h = hg(4, &[&[0, 1], &[2, 3]]);
        let v = hyperedge_eigenvector(&build_s_line_graph(&h, 1));
        assert!(v.iter().all(|x| (x - 1.0 / SQRT_2).abs() < 1e-12));
        let s = vc(&h).unwrap().scores;
        assert!(s.windows(2).all(|w| close(w[0], w[1])));
    }

    #[test]
    fn vc_buckets_equal_plain_sum_without_singletons() {
        let h = hg(6, &[&[0, 1, 2], &[2, 3], &[3, 4, 5, 0], &[1, 5]]);
        let lg = build_s_line_graph(&h, 1);
        let edge = hyperedge_eigenvector(&lg);
        let plain = spread_to_nodes(&h, &edge);
        let bucketed = vc(&h).unwrap().scores;
        for (a, b) in plain.iter().zip(&bucketed) {
            assert!(close(*a, *b));
        }
        // a singleton hyperedge falls outside the buckets
        let hs = hg(3, &[&[0, 1], &[1, 2], &[1]]);
        let edge = hyperedge_eigenvector(&build_s_line_graph(&hs, 1));
        let s = vc(&hs).unwrap().scores;
        assert!(close(s[1], edge[0] / 2.0 + edge[1] / 2.0));
    }

    #[test]
    fn hcc_examples() {
        assert_eq!(hcc_edge_scores(&hg(3, &[&[0, 1], &[1, 2]]), 1), vec![1.0, 1.0]);
        assert_eq!(hcc_edge_scores(&hg(4, &[&[0, 1], &[2, 3]]), 1), vec![0.0, 0.0]);
        let chain = hcc_edge_scores(&hg(4, &[&[0, 1], &[1, 2], &[2, 3]]), 1);
        assert!(close(chain[1], 1.0) && close(chain[0], 0.75) && close(chain[2], 0.75));
        assert_eq!(hcc(&hg(2, &[&[0, 1]]), 1).unwrap().scores, vec![0.0, 0.0]);
    }

    #[test]
    fn hcc_all_adjacent_is_one() {
        let h = hg(5, &[&[0, 1, 2], &[0, 3], &[0, 4], &[0, 1]]);
        assert!(hcc_edge_scores(&h, 1).iter().all(|&c| close(c, 1.0)));
    }

    #[test]
    fn hdf_membership_at_radius() {
        assert!(close(fuzzy_membership(3.0, 3.0), (-1.0f64).exp()));
        assert!((fuzzy_membership(1.0, 1.0) - 0.3679).abs() < 1e-4);
    }

    #[test]
    fn hdf_all_at_distance_one() {
        // z = 1, L = ceil(1/2) = 1, p(1) = 1/e
        let row = [-1, 1, 1, 1];
        assert!(close(hdf_node_score(&row, 2.0, true), 1.0 / E));
        let h = hg(4, &[&[0, 1, 2, 3]]);
        let s = hdf(&h, &HdfParams { r: 2.0, s_max: 1, squared_membership: true }).unwrap().scores;
        assert!(s.iter().all(|&x| close(x, 1.0 / E)));
    }

    #[test]
    fn hdf_hand_computed_chain_node() {
        // distances 1,1,2,3 from one node, r = 1: L = 3
        let row = [-1, 1, 1, 2, 3];
        let x = |l: f64| (-(l * l) / 9.0).exp();
        let f = [2.0 * x(1.0).powi(2), x(2.0).powi(2), x(3.0).powi(2)];
        let total: f64 = f.iter().sum();
        let want: f64 = f
            .iter()
            .enumerate()
            .map(|(i, &fi)| {
                let p = fi / (E * total);
                -p * p.ln() / ((i + 1) as f64).powi(2)
            })
            .sum();
        assert!(close(hdf_node_score(&row, 1.0, true), want));
        // single-factor reading differs
        assert!(!close(hdf_node_score(&row, 1.0, false), want));
    }

    #[test]
    fn hdf_unreachable_scores_zero() {
        assert_eq!(hdf_node_score(&[-1, -1, -1], 2.0, true), 0.0);
    }

    #[test]
    fn parse_names() {
        assert_eq!("HdF".parse::<Baseline>().unwrap(), Baseline::Hdf);
        assert!("pagerank".parse::<Baseline>().is_err());
    }
}
