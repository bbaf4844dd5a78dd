//! Fractal dimensions and representative-node selection.
//!
//! Box covering uses center-based balls: the box opened at center `c` with
//! size `r_B` holds every node `j` with `d(c, j) < r_B`. Size 1 therefore
//! means singleton boxes, and the largest size `r_B = d^G` covers any graph
//! whose radius is below its diameter with one box.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::score::rank_descending;
use crate::sline::{node_s_distance_matrix, DistMatrix, SLineDistances};

/// Ordinary least squares `y = intercept + slope * x`, returning
/// `(slope, intercept, rss)`.
pub fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    assert!(!xs.is_empty());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rss = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - intercept - slope * x;
            e * e
        })
        .sum();
    (slope, intercept, rss)
}

fn within(dist: &DistMatrix, c: usize, j: usize, r_b: u32) -> bool {
    dist.get(c, j).get().is_some_and(|d| d < r_b)
}

/// Greedy box count at size `r_b`.
///
/// Repeatedly opens a box at the uncovered node whose ball holds the most
/// uncovered nodes (ties to the smallest id). Gains only shrink, so stale
/// heap entries are re-scored lazily.
pub fn box_cover_count(dist: &DistMatrix, r_b: u32) -> usize {
    let n = dist.size();
    let mut covered = vec![false; n];
    let gain = |c: usize, covered: &[bool]| (0..n).filter(|&j| !covered[j] && within(dist, c, j, r_b)).count();
    let mut heap: BinaryHeap<(usize, Reverse<usize>)> = (0..n).map(|c| (gain(c, &covered), Reverse(c))).collect();
    let mut boxes = 0;
    let mut left = n;
    while left > 0 {
        let Some((_, Reverse(c))) = heap.pop() else { break };
        if covered[c] {
            continue;
        }
        let g = gain(c, &covered);
        if let Some(&top) = heap.peek() {
            if (g, Reverse(c)).cmp(&top) == Ordering::Less {
                heap.push((g, Reverse(c)));
                continue;
            }
        }
        for j in 0..n {
            if !covered[j] && within(dist, c, j, r_b) {
                covered[j] = true;
                left -= 1;
            }
        }
        boxes += 1;
    }
    boxes
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractalEstimate {
    pub d_f: f64,
    pub c1: f64,
    /// `(ln r_B, ln B(r_B))` for `r_B = 1..=d^G`.
    pub fit_points: Vec<(f64, f64)>,
    pub residual: f64,
    /// Every box count was equal, so the slope carries no information.
    pub degenerate: bool,
}

/// Fits a global fractal dimension from precomputed box counts `B(1..)`.
pub fn fit_global(box_counts: &[usize]) -> FractalEstimate {
    let fit_points: Vec<(f64, f64)> = box_counts
        .iter()
        .enumerate()
        .map(|(i, &b)| (((i + 1) as f64).ln(), (b as f64).ln()))
        .collect();
    let xs: Vec<f64> = fit_points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = fit_points.iter().map(|p| p.1).collect();
    let (slope, c1, residual) = ols(&xs, &ys);
    FractalEstimate {
        d_f: -slope,
        c1,
        fit_points,
        residual,
        degenerate: box_counts.windows(2).all(|w| w[0] == w[1]),
    }
}

pub fn global_fractal_dim_from(dist: &SLineDistances) -> Result<FractalEstimate> {
    if dist.diameter < 2 {
        return Err(Error::DegenerateDiameter(dist.diameter));
    }
    let matrix = dist.node_matrix();
    let counts: Vec<usize> = (1..=dist.diameter)
        .into_par_iter()
        .map(|r| box_cover_count(&matrix, r))
        .collect();
    Ok(fit_global(&counts))
}

pub fn global_fractal_dim(h: &Hypergraph, s: usize) -> Result<FractalEstimate> {
    global_fractal_dim_from(&node_s_distance_matrix(h, s))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalFractalProfile {
    pub d_l: Vec<f64>,
    pub radii: Vec<u32>,
    /// `|N_i^r|` per node, one entry per radius.
    pub sizes: Vec<Vec<usize>>,
    /// Only one radius was available; `d_l` is `|N_i^1|`.
    pub single_point: bool,
}

/// Local dimension of one node from its neighborhood sizes over `radii`.
pub fn fit_local(radii: &[u32], sizes: &[usize]) -> f64 {
    if radii.len() == 1 {
        return sizes[0] as f64;
    }
    let xs: Vec<f64> = radii.iter().map(|&r| r as f64).collect();
    let ys: Vec<f64> = sizes.iter().map(|&c| c as f64).collect();
    ols(&xs, &ys).0
}

pub fn local_fractal_dims_from(dist: &SLineDistances) -> Result<LocalFractalProfile> {
    let r_max = dist.diameter / 2;
    if r_max < 1 {
        return Err(Error::DegenerateDiameter(dist.diameter));
    }
    let radii: Vec<u32> = (1..=r_max).collect();
    let sizes: Vec<Vec<usize>> = (0..dist.n_nodes())
        .into_par_iter()
        .map(|i| {
            let row = dist.node_row(i);
            let mut at = vec![0usize; r_max as usize + 1];
            for (j, d) in row.iter().enumerate() {
                if let Some(d) = d.get() {
                    if j != i && d <= r_max {
                        at[d as usize] += 1;
                    }
                }
            }
            let mut acc = 0;
            radii
                .iter()
                .map(|&r| {
                    acc += at[r as usize];
                    acc
                })
                .collect()
        })
        .collect();
    let d_l = sizes.iter().map(|sz| fit_local(&radii, sz)).collect();
    Ok(LocalFractalProfile {
        d_l,
        single_point: radii.len() == 1,
        radii,
        sizes,
    })
}

pub fn local_fractal_dims(h: &Hypergraph, s: usize) -> Result<LocalFractalProfile> {
    local_fractal_dims_from(&node_s_distance_matrix(h, s))
}

/// Per-node degree-profile proportions `P_i^K`, keyed by distinct-neighbor
/// degree `K`. Absent keys are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeProportions {
    pub r_l: u32,
    pub by_node: Vec<BTreeMap<usize, f64>>,
    /// Nodes whose neighborhood carried no local-dimension mass.
    pub zero_mass: Vec<usize>,
}

/// Proportions over `N_i^{r_l}` given node degrees and local dimensions.
pub fn degree_profile_proportions(
    dist: &SLineDistances,
    degree: &[usize],
    d_l: &[f64],
    r_l: u32,
) -> DegreeProportions {
    let rows: Vec<(BTreeMap<usize, f64>, bool)> = (0..dist.n_nodes())
        .into_par_iter()
        .map(|i| {
            let row = dist.node_row(i);
            let mut mass: BTreeMap<usize, f64> = BTreeMap::new();
            let mut total = 0.0;
            for (j, d) in row.iter().enumerate() {
                if j != i && d.get().is_some_and(|d| d <= r_l) {
                    *mass.entry(degree[j]).or_default() += d_l[j];
                    total += d_l[j];
                }
            }
            if total > 0.0 {
                for v in mass.values_mut() {
                    *v /= total;
                }
                mass.retain(|_, v| *v != 0.0);
                (mass, false)
            } else {
                (BTreeMap::new(), true)
            }
        })
        .collect();
    let zero_mass = rows.iter().enumerate().filter(|(_, r)| r.1).map(|(i, _)| i).collect();
    DegreeProportions {
        r_l,
        by_node: rows.into_iter().map(|r| r.0).collect(),
        zero_mass,
    }
}

/// Tolerance below which `d_f` is treated as exactly 1.
pub const UNIT_DIM_EPS: f64 = 1e-9;

/// One summand of the directed similarity for ratio `x = P_i / P_j`.
pub fn similarity_term(x: f64, d_f: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if (1.0 - d_f).abs() < UNIT_DIM_EPS {
        -x * x.ln()
    } else {
        (x.powf(d_f) - x) / (1.0 - d_f)
    }
}

/// Directed similarity `S_ij`.
pub fn directed_similarity(p_i: &BTreeMap<usize, f64>, p_j: &BTreeMap<usize, f64>, k_max: usize, d_f: f64) -> f64 {
    p_j.range(..=k_max)
        .map(|(k, &pj)| similarity_term(p_i.get(k).copied().unwrap_or(0.0) / pj, d_f))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelevanceMatrix {
    pub n: usize,
    /// Directed similarity, row-major.
    pub s: Vec<f64>,
    /// Symmetrized relevance `S + S^T`, row-major.
    pub r: Vec<f64>,
    /// Nodes without a degree profile (zero mass). Their similarities are
    /// 0 by the skip rules, not by resemblance, so selection ignores them.
    pub undefined: Vec<bool>,
}

impl RelevanceMatrix {
    pub fn s(&self, i: usize, j: usize) -> f64 {
        self.s[i * self.n + j]
    }

    pub fn r(&self, i: usize, j: usize) -> f64 {
        self.r[i * self.n + j]
    }
}

pub fn similarity_matrices(props: &DegreeProportions, degree: &[usize], d_f: f64) -> Result<RelevanceMatrix> {
    if !d_f.is_finite() {
        return Err(Error::InvalidParameter("fractal dimension must be finite".into()));
    }
    let n = props.by_node.len();
    let s: Vec<f64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (0..n).map(move |j| {
                if i == j {
                    0.0
                } else {
                    let k_max = degree[i].max(degree[j]);
                    directed_similarity(&props.by_node[i], &props.by_node[j], k_max, d_f)
                }
            })
        })
        .collect();
    let mut r = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = s[i * n + j] + s[j * n + i];
            r[i * n + j] = v;
            r[j * n + i] = v;
        }
    }
    let mut undefined = vec![false; n];
    for &v in &props.zero_mass {
        undefined[v] = true;
    }
    Ok(RelevanceMatrix { n, s, r, undefined })
}

/// Linear-interpolation quantile (type 7) of unsorted values.
pub fn quantile(values: &mut [f64], q: f64) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(|a, b| a.total_cmp(b));
    let h = (values.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    values[lo] + (h - lo as f64) * (values[hi] - values[lo])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum Threshold {
    /// Quantile of the off-diagonal relevance values.
    Quantile(f64),
    Absolute(f64),
}

impl Default for Threshold {
    fn default() -> Self {
        Threshold::Quantile(0.90)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub theta: f64,
    pub node_ids: Vec<usize>,
    /// How many trailing entries of `node_ids` came from the degree fill.
    pub dc_filled: usize,
    pub threshold_graph_edges: usize,
}

/// Prunes the threshold graph to at most `n_rep` representatives, then tops
/// up from `fallback_scores` (highest first) if the graph ran out.
pub fn select_representatives(
    rel: &RelevanceMatrix,
    threshold: Threshold,
    n_rep: usize,
    fallback_scores: &[f64],
) -> Result<Selection> {
    let n = rel.n;
    let theta = match threshold {
        Threshold::Quantile(q) => {
            if !(q > 0.0 && q < 1.0) {
                return Err(Error::InvalidParameter(format!("theta quantile {q} outside (0, 1)")));
            }
            let defined: Vec<usize> = (0..n).filter(|&i| !rel.undefined[i]).collect();
            if defined.len() < 2 {
                0.0
            } else {
                let mut off: Vec<f64> = defined
                    .iter()
                    .flat_map(|&i| defined.iter().filter(move |&&j| j != i).map(move |&j| rel.r(i, j)))
                    .collect();
                quantile(&mut off, q)
            }
        }
        Threshold::Absolute(t) => t,
    };
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            if rel.undefined[i] {
                return Vec::new();
            }
            (0..n)
                .filter(|&j| j != i && !rel.undefined[j] && rel.r(i, j) > theta)
                .collect()
        })
        .collect();
    let n_edges = adj.iter().map(Vec::len).sum::<usize>() / 2;
    let mut alive: Vec<bool> = adj.iter().map(|a| !a.is_empty()).collect();
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut picked = Vec::new();
    while picked.len() < n_rep {
        let best = (0..n).filter(|&i| alive[i]).max_by(|&a, &b| degree[a].cmp(&degree[b]).then(b.cmp(&a)));
        let Some(v) = best else { break };
        picked.push(v);
        let mut removed = vec![v];
        removed.extend(adj[v].iter().copied().filter(|&u| alive[u]));
        for &u in &removed {
            alive[u] = false;
        }
        for &u in &removed {
            for &w in &adj[u] {
                if alive[w] {
                    degree[w] -= 1;
                }
            }
        }
    }
    for (a, &u) in picked.iter().enumerate() {
        for &w in &picked[a + 1..] {
            assert!(!adj[u].contains(&w), "representatives {u} and {w} are adjacent");
        }
    }
    let pruned = picked.len();
    for v in rank_descending(fallback_scores) {
        if picked.len() >= n_rep.min(n) {
            break;
        }
        if !picked.contains(&v) {
            picked.push(v);
        }
    }
    Ok(Selection {
        theta,
        node_ids: picked.clone(),
        dc_filled: picked.len() - pruned,
        threshold_graph_edges: n_edges,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectConfig {
    pub s: usize,
    pub threshold: Threshold,
    pub n_rep: usize,
    /// Circle radius for the degree proportions; `None` uses `floor(d^G/2)`.
    pub r_l: Option<u32>,
}

impl Default for SelectConfig {
    fn default() -> Self {
        Self {
            s: 2,
            threshold: Threshold::default(),
            n_rep: 10,
            r_l: None,
        }
    }
}

/// Output of the whole selection stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Representatives {
    pub s: usize,
    pub theta_quantile: Option<f64>,
    pub theta: f64,
    pub d_f: f64,
    pub node_ids: Vec<usize>,
    pub dc_filled: usize,
    pub fractal_degenerate: bool,
    pub local_single_point: bool,
    pub zero_mass_nodes: usize,
}

pub fn representatives(h: &Hypergraph, cfg: &SelectConfig) -> Result<Representatives> {
    let dist = node_s_distance_matrix(h, cfg.s);
    let global = global_fractal_dim_from(&dist)?;
    let local = local_fractal_dims_from(&dist)?;
    let degree = h.degrees().node_degree;
    let r_l = cfg.r_l.unwrap_or((dist.diameter / 2).max(1));
    let props = degree_profile_proportions(&dist, &degree, &local.d_l, r_l);
    let rel = similarity_matrices(&props, &degree, global.d_f)?;
    let dc: Vec<f64> = degree.iter().map(|&k| k as f64).collect();
    let sel = select_representatives(&rel, cfg.threshold, cfg.n_rep, &dc)?;
    Ok(Representatives {
        s: cfg.s,
        theta_quantile: match cfg.threshold {
            Threshold::Quantile(q) => Some(q),
            Threshold::Absolute(_) => None,
        },
        theta: sel.theta,
        d_f: global.d_f,
        node_ids: sel.node_ids,
        dc_filled: sel.dc_filled,
        fractal_degenerate: global.degenerate,
        local_single_point: local.single_point,
        zero_mass_nodes: props.zero_mass.len(),
    })
}
