//! Uniform synthetic hypergraphs: Erdős–Rényi (ERH), Watts–Strogatz (WSH)
//! and scale-free (SFH). Every generated hyperedge has exactly `k` distinct
//! members and no hyperedge appears twice.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::rng::{self, Rng64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Erh,
    Wsh,
    Sfh,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Erh => "erh",
            Family::Wsh => "wsh",
            Family::Sfh => "sfh",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "erh" => Ok(Family::Erh),
            "wsh" => Ok(Family::Wsh),
            "sfh" => Ok(Family::Sfh),
            other => Err(Error::InvalidParameter(format!("unknown family {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub family: Family,
    pub n_nodes: usize,
    pub n_hyperedges: usize,
    pub hyperedge_size: usize,
    /// Rewiring probability (WSH).
    pub rewire_p: f64,
    /// Power-law exponent of the node weight distribution (SFH).
    pub gamma: f64,
    pub seed: u64,
}

/// Consecutive rejected SFH candidates before giving up.
pub const MAX_REJECTIONS: u64 = 1_000_000;

impl GenSpec {
    pub fn new(family: Family, n_nodes: usize, n_hyperedges: usize, hyperedge_size: usize, seed: u64) -> Self {
        Self {
            family,
            n_nodes,
            n_hyperedges,
            hyperedge_size,
            rewire_p: 0.5,
            gamma: 2.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.hyperedge_size;
        if k < 1 {
            return Err(Error::InvalidParameter("hyperedge size must be >= 1".into()));
        }
        if k > self.n_nodes {
            return Err(Error::InvalidParameter(format!(
                "hyperedge size {k} exceeds node count {}",
                self.n_nodes
            )));
        }
        if !(0.0..=1.0).contains(&self.rewire_p) {
            return Err(Error::InvalidParameter("rewire_p must lie in [0, 1]".into()));
        }
        if self.gamma.is_nan() || self.gamma <= 1.0 {
            return Err(Error::InvalidParameter("gamma must exceed 1".into()));
        }
        Ok(())
    }

    /// `# key=value ...` header written above generated edge lists.
    pub fn header(&self) -> String {
        format!(
            "# family={} n={} m={} k={} p={} gamma={} seed={}",
            self.family, self.n_nodes, self.n_hyperedges, self.hyperedge_size, self.rewire_p, self.gamma, self.seed
        )
    }

    pub fn generate(&self) -> Result<Hypergraph> {
        match self.family {
            Family::Erh => gen_erh(self),
            Family::Wsh => gen_wsh(self),
            Family::Sfh => gen_sfh(self),
        }
    }
}

/// `binom(n, k) >= m`, without overflow.
fn enough_subsets(n: usize, k: usize, m: usize) -> bool {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
        if c >= m as u128 {
            return true;
        }
    }
    c >= m as u128
}

fn sorted(mut e: Vec<usize>) -> Vec<usize> {
    e.sort_unstable();
    e
}

/// Rejection-samples `m` distinct `k`-subsets uniformly.
pub fn gen_erh(spec: &GenSpec) -> Result<Hypergraph> {
    spec.validate()?;
    let (n, m, k) = (spec.n_nodes, spec.n_hyperedges, spec.hyperedge_size);
    if !enough_subsets(n, k, m) {
        return Err(Error::Infeasible(format!(
            "binom({n}, {k}) < {m} distinct hyperedges"
        )));
    }
    let mut rng = rng::seeded(spec.seed);
    let mut seen = HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let e = sorted(index::sample(&mut rng, n, k).into_vec());
        if seen.insert(e.clone()) {
            edges.push(e);
        }
    }
    Hypergraph::new(n, edges)
}

/// Ring lattice `e_i = {i, ..., i+k-1 (mod n)}` followed by one rewiring
/// pass: hyperedges in index order, members in ascending id, each member
/// replaced with probability `p` by a uniform node outside the hyperedge.
/// Replacements that would duplicate another hyperedge are redrawn.
pub fn gen_wsh(spec: &GenSpec) -> Result<Hypergraph> {
    spec.validate()?;
    let (n, m, k, p) = (spec.n_nodes, spec.n_hyperedges, spec.hyperedge_size, spec.rewire_p);
    if m > n {
        return Err(Error::Infeasible(format!("ring needs m <= n, got m={m} n={n}")));
    }
    if k == n && m > 1 {
        return Err(Error::Infeasible("k = n leaves a single distinct hyperedge".into()));
    }
    if k == 1 && m == n && p > 0.0 {
        return Err(Error::Infeasible(
            "every node already forms a singleton; no rewiring target exists".into(),
        ));
    }
    let mut rng = rng::seeded(spec.seed);
    let mut edges: Vec<Vec<usize>> = (0..m)
        .map(|i| sorted((0..k).map(|j| (i + j) % n).collect()))
        .collect();
    let mut seen: HashSet<Vec<usize>> = edges.iter().cloned().collect();
    if p == 0.0 {
        return Hypergraph::new(n, edges);
    }

    for i in 0..m {
        let original = edges[i].clone();
        for old in original {
            if rng::unit(&mut rng) >= p {
                continue;
            }
            let current = edges[i].clone();
            if let Some(next) = rewire_member(&mut rng, n, &current, old, &seen) {
                seen.remove(&current);
                seen.insert(next.clone());
                edges[i] = next;
            }
        }
    }
    Hypergraph::new(n, edges)
}

/// Replaces `old` in `edge` by a node outside it so that the result is not
/// already present. Returns `None` when no such replacement exists.
fn rewire_member(
    rng: &mut Rng64,
    n: usize,
    edge: &[usize],
    old: usize,
    seen: &HashSet<Vec<usize>>,
) -> Option<Vec<usize>> {
    let outside = n - edge.len();
    if outside == 0 {
        return None;
    }
    let candidate = |new: usize| -> Vec<usize> {
        sorted(edge.iter().map(|&v| if v == old { new } else { v }).collect())
    };
    // draw a uniform node of V \ e by rank among the non-members
    let nth_outside = |mut r: usize| -> usize {
        for &v in edge {
            if v <= r {
                r += 1;
            }
        }
        r
    };
    for _ in 0..64 {
        let new = nth_outside(rng::index(rng, outside));
        let next = candidate(new);
        if !seen.contains(&next) {
            return Some(next);
        }
    }
    let valid: Vec<Vec<usize>> = (0..n)
        .filter(|v| !edge.contains(v))
        .map(candidate)
        .filter(|e| !seen.contains(e))
        .collect();
    if valid.is_empty() {
        None
    } else {
        let pick = rng::index(rng, valid.len());
        Some(valid[pick].clone())
    }
}

/// Node selection weights: each node draws a degree from `P(k) ∝ k^-gamma`
/// on `{1, ..., n-1}`; weights are those degrees normalized to sum to one.
pub fn sfh_weights(n: usize, gamma: f64, rng: &mut Rng64) -> Vec<f64> {
    if n <= 1 {
        return vec![1.0; n];
    }
    let pmf: Vec<f64> = (1..n).map(|k| (k as f64).powf(-gamma)).collect();
    let degree_dist = WeightedIndex::new(&pmf).expect("power-law pmf is positive at k = 1");
    let degrees: Vec<f64> = (0..n).map(|_| (degree_dist.sample(rng) + 1) as f64).collect();
    let total: f64 = degrees.iter().sum();
    degrees.into_iter().map(|d| d / total).collect()
}

pub fn gen_sfh(spec: &GenSpec) -> Result<Hypergraph> {
    spec.validate()?;
    let (n, m, k) = (spec.n_nodes, spec.n_hyperedges, spec.hyperedge_size);
    if !enough_subsets(n, k, m) {
        return Err(Error::Infeasible(format!(
            "binom({n}, {k}) < {m} distinct hyperedges"
        )));
    }
    let mut rng = rng::seeded(spec.seed);
    let weights = sfh_weights(n, spec.gamma, &mut rng);
    let pick = WeightedIndex::new(&weights).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut seen = HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    let mut rejections = 0u64;
    while edges.len() < m {
        let mut e: Vec<usize> = Vec::with_capacity(k);
        let mut draws = 0u64;
        while e.len() < k {
            let v = pick.sample(&mut rng);
            if !e.contains(&v) {
                e.push(v);
            }
            draws += 1;
            if draws > MAX_REJECTIONS {
                return Err(Error::TooConcentrated(draws));
            }
        }
        let e = sorted(e);
        if seen.insert(e.clone()) {
            edges.push(e);
            rejections = 0;
        } else {
            rejections += 1;
            if rejections > MAX_REJECTIONS {
                return Err(Error::TooConcentrated(rejections));
            }
        }
    }
    Hypergraph::new(n, edges)
}
