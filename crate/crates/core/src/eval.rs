//! Ranking quality and dismantling metrics.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::score::ScoreVector;
use crate::sline::{build_s_line_graph, line_graph_distances};

/// Pair counts behind Kendall's tau.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts {
    pub concordant: u64,
    pub discordant: u64,
    /// Pairs tied in `x` (including joint ties).
    pub ties_x: u64,
    /// Pairs tied in `y` (including joint ties).
    pub ties_y: u64,
    pub total: u64,
}

fn cmp(a: f64, b: f64) -> Ordering {
    a.partial_cmp(&b).expect("non-finite value in tau input")
}

fn tied_pairs(sorted: &[f64]) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Merge sort counting strict inversions (`a[i] > a[j]`, `i < j`).
fn count_inversions(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut inv = count_inversions(&mut v[..mid], &mut buf[..mid]) + count_inversions(&mut v[mid..], &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            inv += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    inv
}

/// O(n log n) pair counting (Knight's algorithm).
pub fn pair_counts(x: &[f64], y: &[f64]) -> Result<PairCounts> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::TooShort { needed: 2, got: n });
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| cmp(x[a], x[b]).then(cmp(y[a], y[b])));
    let total = (n as u64) * (n as u64 - 1) / 2;

    let xs: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
    let ties_x = tied_pairs(&xs);
    // pairs tied in both
    let mut ties_xy = 0u64;
    let mut run = 1u64;
    for w in idx.windows(2) {
        if x[w[0]] == x[w[1]] && y[w[0]] == y[w[1]] {
            run += 1;
        } else {
            ties_xy += run * (run - 1) / 2;
            run = 1;
        }
    }
    ties_xy += run * (run - 1) / 2;

    let mut ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    let mut buf = vec![0.0; n];
    let discordant = count_inversions(&mut ys, &mut buf);
    let ties_y = tied_pairs(&ys);
    let concordant = total + ties_xy - ties_x - ties_y - discordant;
    Ok(PairCounts {
        concordant,
        discordant,
        ties_x,
        ties_y,
        total,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TauVariant {
    /// Ties count in neither concordant nor discordant pairs but stay in
    /// the denominator.
    #[default]
    A,
    B,
}

pub fn kendall_tau_with(x: &[f64], y: &[f64], variant: TauVariant) -> Result<f64> {
    let c = pair_counts(x, y)?;
    let num = c.concordant as f64 - c.discordant as f64;
    Ok(match variant {
        TauVariant::A => num / c.total as f64,
        TauVariant::B => {
            let den = ((c.total - c.ties_x) as f64 * (c.total - c.ties_y) as f64).sqrt();
            if den == 0.0 {
                0.0
            } else {
                num / den
            }
        }
    })
}

/// Kendall tau-a.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64> {
    kendall_tau_with(x, y, TauVariant::A)
}

pub const DEFAULT_OVERLAP_PERCENTS: [u32; 5] = [5, 10, 15, 20, 25];

/// Percentage of the top `f%` of `truth` also in the top `f%` of `pred`.
pub fn rank_overlap(truth: &ScoreVector, pred: &ScoreVector, f_percent: u32) -> Result<f64> {
    if truth.len() != pred.len() {
        return Err(Error::LengthMismatch(truth.len(), pred.len()));
    }
    let n_f = truth.len() * f_percent as usize / 100;
    if n_f == 0 {
        return Err(Error::InvalidParameter(format!(
            "top {f_percent}% of {} nodes is empty",
            truth.len()
        )));
    }
    let t: HashSet<usize> = truth.top(n_f).iter().copied().collect();
    let common = pred.top(n_f).iter().filter(|v| t.contains(v)).count();
    Ok(common as f64 / n_f as f64 * 100.0)
}

/// Mean inverse s-distance over pairs of hyperedges with at least `s`
/// members; 0 when fewer than two such hyperedges exist.
pub fn s_efficiency(h: &Hypergraph, s: usize) -> f64 {
    let lg = build_s_line_graph(h, s);
    let active: Vec<usize> = (0..h.n_hyperedges()).filter(|&e| lg.active[e]).collect();
    let k = active.len();
    if k < 2 {
        return 0.0;
    }
    let dist = line_graph_distances(&lg);
    let mut sum = 0.0;
    for (a, &p) in active.iter().enumerate() {
        for &q in &active[a + 1..] {
            sum += dist.get(p, q).inverse();
        }
    }
    sum / (k * (k - 1) / 2) as f64
}

pub const DEFAULT_S_MAX: usize = 6;

/// `sum_{s=1}^{s_max} E_s` of one hypergraph. An empty hypergraph scores 0.
pub fn total_efficiency(h: Option<&Hypergraph>, s_max: usize) -> f64 {
    h.map_or(0.0, |h| (1..=s_max).map(|s| s_efficiency(h, s)).sum())
}

/// Hypergraph left after deleting the first `floor(p N)` nodes of `ranking`,
/// or `None` when nothing survives.
pub fn dismantle(h: &Hypergraph, ranking: &[usize], p: f64) -> Result<Option<Hypergraph>> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::InvalidParameter(format!("removal fraction {p} outside [0, 0.5]")));
    }
    let k = (p * h.n_nodes() as f64).floor() as usize;
    let (rest, _) = h.remove_nodes(&ranking[..k]);
    Ok((rest.n_hyperedges() > 0).then_some(rest))
}

/// Efficiency loss `ΔE(p)` after removing the top `floor(p N)` ranked nodes.
pub fn delta_efficiency(h: &Hypergraph, ranking: &[usize], p: f64, s_max: usize) -> Result<f64> {
    let before = total_efficiency(Some(h), s_max);
    let after = dismantle(h, ranking, p)?;
    Ok(before - total_efficiency(after.as_ref(), s_max))
}

/// Same as [`delta_efficiency`] over several fractions, reusing the
/// baseline efficiency.
pub fn delta_efficiency_curve(h: &Hypergraph, ranking: &[usize], ps: &[f64], s_max: usize) -> Result<Vec<(f64, f64)>> {
    let before = total_efficiency(Some(h), s_max);
    ps.iter()
        .map(|&p| {
            let after = dismantle(h, ranking, p)?;
            Ok((p, before - total_efficiency(after.as_ref(), s_max)))
        })
        .collect()
}

/// Fractions `0, 0.05, ..., 0.5`.
pub fn default_fractions() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 20.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: String,
    pub tau: f64,
    /// Keyed by `f` percent.
    pub overlap: BTreeMap<u32, f64>,
    /// Keyed by `p` formatted with two decimals.
    pub delta_eff: BTreeMap<String, f64>,
    pub s_max: usize,
}

pub struct EvalOptions<'a> {
    pub overlap_percents: &'a [u32],
    pub fractions: &'a [f64],
    pub s_max: usize,
    pub tau: TauVariant,
}

impl Default for EvalOptions<'_> {
    fn default() -> Self {
        Self {
            overlap_percents: &DEFAULT_OVERLAP_PERCENTS,
            fractions: &[],
            s_max: DEFAULT_S_MAX,
            tau: TauVariant::A,
        }
    }
}

pub fn evaluate(h: &Hypergraph, truth: &ScoreVector, pred: &ScoreVector, opts: &EvalOptions) -> Result<EvalReport> {
    let tau = kendall_tau_with(&truth.scores, &pred.scores, opts.tau)?;
    let mut overlap = BTreeMap::new();
    for &f in opts.overlap_percents {
        overlap.insert(f, rank_overlap(truth, pred, f)?);
    }
    let delta_eff = delta_efficiency_curve(h, &pred.ranking, opts.fractions, opts.s_max)?
        .into_iter()
        .map(|(p, d)| (format!("{p:.2}"), d))
        .collect();
    Ok(EvalReport {
        method: pred.method.clone(),
        tau,
        overlap,
        delta_eff,
        s_max: opts.s_max,
    })
}
