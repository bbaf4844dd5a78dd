//! Hypergraph SIR with single-hyperedge activation.
//!
//! At every step each infected node picks one of its hyperedges uniformly at
//! random and tries to infect every susceptible member independently with
//! probability `beta`; it then recovers with probability `gamma`. Updates are
//! synchronous: all infections of a step are computed from the infected set at
//! the start of that step.
//!
//! Randomness is per node: within one run, node `v` draws its hyperedge
//! choices, transmission coins and recovery coins from its own ChaCha stream.
//! A node's behaviour is therefore independent of when it gets infected, which
//! couples runs with different `beta` monotonically under a shared run seed.

use std::collections::HashMap;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::rng::{self, Rng64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SirParams {
    pub beta: f64,
    pub gamma: f64,
    /// Step cap; 0 means run until no infected node remains.
    pub max_steps: usize,
}

impl Default for SirParams {
    fn default() -> Self {
        Self {
            beta: 0.02,
            gamma: 1.0,
            max_steps: 0,
        }
    }
}

impl SirParams {
    pub fn new(beta: f64, gamma: f64) -> Self {
        Self {
            beta,
            gamma,
            max_steps: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::InvalidParameter(format!("beta {} not in [0, 1]", self.beta)));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::InvalidParameter(format!("gamma {} not in (0, 1]", self.gamma)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Susceptible,
    Infected,
    Recovered,
}

/// Per-step history of one run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Timeline {
    /// (S, I, R) at t = 0, 1, ..., steps.
    pub counts: Vec<[usize; 3]>,
    /// Step at which each node became infected (0 for the seed).
    pub infected_at: Vec<Option<usize>>,
    pub recovered_at: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SirResult {
    /// Number of nodes ever infected.
    pub outbreak_size: usize,
    pub steps: usize,
    pub timeline: Option<Timeline>,
}

/// Source of the random decisions of a run.
pub trait SirDraws {
    /// Index in `0..options` of the incident hyperedge `node` activates.
    fn choose(&mut self, node: usize, options: usize) -> usize;
    /// Transmission coin of `node` towards one co-member. Called for every
    /// other member of the chosen hyperedge in ascending id order, whether or
    /// not that member is still susceptible.
    fn transmits(&mut self, node: usize, beta: f64) -> bool;
    fn recovers(&mut self, node: usize, gamma: f64) -> bool;
}

/// Independent ChaCha8 stream per node, all derived from one run seed.
pub struct NodeStreams {
    base: ChaCha8Rng,
    slots: Vec<Option<Rng64>>,
    touched: Vec<usize>,
}

impl NodeStreams {
    pub fn new(n_nodes: usize, run_seed: u64) -> Self {
        Self {
            base: rng::seeded(run_seed),
            slots: vec![None; n_nodes],
            touched: Vec::new(),
        }
    }

    /// Starts a fresh run, reusing the allocated slots.
    pub fn reset(&mut self, run_seed: u64) {
        for &v in &self.touched {
            self.slots[v] = None;
        }
        self.touched.clear();
        self.base = rng::seeded(run_seed);
    }

    fn stream(&mut self, node: usize) -> &mut Rng64 {
        if self.slots[node].is_none() {
            let mut r = self.base.clone();
            r.set_stream(node as u64);
            self.slots[node] = Some(r);
            self.touched.push(node);
        }
        self.slots[node].as_mut().expect("slot initialized above")
    }
}

impl SirDraws for NodeStreams {
    fn choose(&mut self, node: usize, options: usize) -> usize {
        rng::index(self.stream(node), options)
    }

    fn transmits(&mut self, node: usize, beta: f64) -> bool {
        rng::unit(self.stream(node)) < beta
    }

    fn recovers(&mut self, node: usize, gamma: f64) -> bool {
        rng::unit(self.stream(node)) < gamma
    }
}

/// Reusable buffers for repeated runs on one hypergraph.
struct Workspace {
    state: Vec<State>,
    infected: Vec<usize>,
    next: Vec<usize>,
    newly: Vec<usize>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            state: vec![State::Susceptible; n],
            infected: Vec::new(),
            next: Vec::new(),
            newly: Vec::new(),
        }
    }
}

/// One SIR run seeded at `seed_node`.
pub fn sir_run<D: SirDraws>(
    h: &Hypergraph,
    seed_node: usize,
    params: &SirParams,
    draws: &mut D,
    record_timeline: bool,
) -> SirResult {
    let mut ws = Workspace::new(h.n_nodes());
    run_with(h, seed_node, params, draws, &mut ws, record_timeline)
}

/// One run with per-node streams derived from `run_seed`.
pub fn sir_run_seeded(h: &Hypergraph, seed_node: usize, params: &SirParams, run_seed: u64) -> SirResult {
    let mut streams = NodeStreams::new(h.n_nodes(), run_seed);
    sir_run(h, seed_node, params, &mut streams, false)
}

fn run_with<D: SirDraws>(
    h: &Hypergraph,
    seed_node: usize,
    params: &SirParams,
    draws: &mut D,
    ws: &mut Workspace,
    record_timeline: bool,
) -> SirResult {
    let n = h.n_nodes();
    assert!(seed_node < n, "seed node {seed_node} out of range");
    ws.state.clear();
    ws.state.resize(n, State::Susceptible);
    ws.infected.clear();
    ws.state[seed_node] = State::Infected;
    ws.infected.push(seed_node);

    let mut timeline = record_timeline.then(|| {
        let mut t = Timeline {
            counts: vec![[n - 1, 1, 0]],
            infected_at: vec![None; n],
            recovered_at: vec![None; n],
        };
        t.infected_at[seed_node] = Some(0);
        t
    });
    let (mut n_inf, mut n_rec) = (1usize, 0usize);
    let mut steps = 0;

    while !ws.infected.is_empty() && (params.max_steps == 0 || steps < params.max_steps) {
        steps += 1;
        ws.newly.clear();
        ws.next.clear();
        for idx in 0..ws.infected.len() {
            let v = ws.infected[idx];
            let edges = h.incident(v);
            if !edges.is_empty() {
                let e = edges[draws.choose(v, edges.len())];
                for &u in h.members(e) {
                    if u == v {
                        continue;
                    }
                    let hit = draws.transmits(v, params.beta);
                    if hit && ws.state[u] == State::Susceptible {
                        // mark now so later infectors of this step skip u
                        ws.state[u] = State::Infected;
                        ws.newly.push(u);
                    }
                }
            }
            if draws.recovers(v, params.gamma) {
                ws.state[v] = State::Recovered;
                n_rec += 1;
                if let Some(t) = timeline.as_mut() {
                    t.recovered_at[v] = Some(steps);
                }
            } else {
                ws.next.push(v);
            }
        }
        n_inf = n_inf + ws.newly.len() - (ws.infected.len() - ws.next.len());
        if let Some(t) = timeline.as_mut() {
            for &u in &ws.newly {
                t.infected_at[u] = Some(steps);
            }
            t.counts.push([n - n_inf - n_rec, n_inf, n_rec]);
        }
        ws.next.extend_from_slice(&ws.newly);
        ws.next.sort_unstable();
        std::mem::swap(&mut ws.infected, &mut ws.next);
    }

    SirResult {
        outbreak_size: n_inf + n_rec,
        steps,
        timeline,
    }
}

/// Outbreak sizes of `replicas` independent runs from `node`. Replica `r`
/// uses the run seed derived from `(master_seed, node, r)`.
pub fn outbreak_sizes(h: &Hypergraph, node: usize, params: &SirParams, replicas: usize, master_seed: u64) -> Vec<usize> {
    let mut ws = Workspace::new(h.n_nodes());
    let mut streams = NodeStreams::new(h.n_nodes(), 0);
    (0..replicas)
        .map(|r| {
            streams.reset(rng::derive_seed(master_seed, &[node as u64, r as u64]));
            run_with(h, node, params, &mut streams, &mut ws, false).outbreak_size
        })
        .collect()
}

/// Mean outbreak size per seed node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluenceLabels {
    pub values: Vec<f64>,
    pub replicas: usize,
    pub params: SirParams,
    pub master_seed: u64,
}

impl InfluenceLabels {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node_id,label\n");
        for (v, x) in self.values.iter().enumerate() {
            out.push_str(&format!("{v},{x:e}\n"));
        }
        out
    }

    /// Provenance sidecar (everything except the values).
    pub fn sidecar(&self) -> serde_json::Value {
        serde_json::json!({
            "beta": self.params.beta,
            "gamma": self.params.gamma,
            "max_steps": self.params.max_steps,
            "replicas": self.replicas,
            "master_seed": self.master_seed,
        })
    }

    /// Parses the `node_id,label` CSV written by [`InfluenceLabels::to_csv`].
    pub fn values_from_csv(text: &str) -> Result<Vec<f64>> {
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let id: usize = parts
                .next()
                .and_then(|t| t.trim().parse().ok())
                .ok_or_else(|| Error::Parse { line: i + 1, msg: "bad node id".into() })?;
            let x: f64 = parts
                .next()
                .and_then(|t| t.trim().parse().ok())
                .ok_or_else(|| Error::Parse { line: i + 1, msg: "bad label".into() })?;
            if id != values.len() {
                return Err(Error::Parse { line: i + 1, msg: "node ids must be consecutive".into() });
            }
            values.push(x);
        }
        Ok(values)
    }
}

/// Ground-truth influence of every node: mean outbreak size over `replicas`
/// runs. Nodes are simulated in parallel; the result does not depend on the
/// thread count.
pub fn influence_labels(h: &Hypergraph, params: &SirParams, replicas: usize, master_seed: u64) -> Result<InfluenceLabels> {
    params.validate()?;
    if replicas == 0 {
        return Err(Error::InvalidParameter("replicas must be >= 1".into()));
    }
    let values = (0..h.n_nodes())
        .into_par_iter()
        .map(|v| {
            let total: usize = outbreak_sizes(h, v, params, replicas, master_seed).iter().sum();
            total as f64 / replicas as f64
        })
        .collect();
    Ok(InfluenceLabels {
        values,
        replicas,
        params: *params,
        master_seed,
    })
}

/// Labels restricted to a subset of nodes, computed with the same streams as
/// [`influence_labels`] so the values coincide.
pub fn influence_labels_for(h: &Hypergraph, nodes: &[usize], params: &SirParams, replicas: usize, master_seed: u64) -> Vec<f64> {
    nodes
        .par_iter()
        .map(|&v| {
            let total: usize = outbreak_sizes(h, v, params, replicas, master_seed).iter().sum();
            total as f64 / replicas as f64
        })
        .collect()
}

/// Default cap on expanded transition outcomes for [`exact_influence_small`].
pub const DEFAULT_EXACT_BUDGET: usize = 5_000_000;

/// Exact expected outbreak size by exhaustive expansion of the Markov chain
/// over (node states x hyperedge choices x transmission coins x recovery
/// coins). Only for tiny hypergraphs; the step cap is ignored.
pub fn exact_influence_small(h: &Hypergraph, seed_node: usize, params: &SirParams, budget: usize) -> Result<f64> {
    params.validate()?;
    let n = h.n_nodes();
    if n > 20 {
        return Err(Error::InvalidParameter(format!("{n} nodes is too many for exact enumeration")));
    }
    if seed_node >= n {
        return Err(Error::NodeOutOfRange { node: seed_node, n_nodes: n });
    }
    let masks: Vec<u32> = h
        .hyperedges()
        .iter()
        .map(|e| e.iter().fold(0u32, |m, &v| m | (1 << v)))
        .collect();
    let mut solver = ExactSolver {
        h,
        masks,
        params,
        memo: HashMap::new(),
        budget,
        expanded: 0,
    };
    solver.expected(1 << seed_node, 0)
}

struct ExactSolver<'a> {
    h: &'a Hypergraph,
    masks: Vec<u32>,
    params: &'a SirParams,
    memo: HashMap<(u32, u32), f64>,
    budget: usize,
    expanded: usize,
}

impl ExactSolver<'_> {
    fn expected(&mut self, infected: u32, recovered: u32) -> Result<f64> {
        if infected == 0 {
            return Ok(recovered.count_ones() as f64);
        }
        if let Some(&v) = self.memo.get(&(infected, recovered)) {
            return Ok(v);
        }
        let outcomes = self.transitions(infected, recovered)?;
        let mut p_self = 0.0;
        let mut acc = 0.0;
        for ((hit, rec), p) in outcomes {
            if hit == 0 && rec == 0 {
                p_self += p;
                continue;
            }
            let next_inf = (infected & !rec) | hit;
            acc += p * self.expected(next_inf, recovered | rec)?;
        }
        let value = acc / (1.0 - p_self);
        self.memo.insert((infected, recovered), value);
        Ok(value)
    }

    /// Distribution of (newly infected mask, recovered-this-step mask).
    fn transitions(&mut self, infected: u32, recovered: u32) -> Result<Vec<((u32, u32), f64)>> {
        let n = self.h.n_nodes();
        let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        let susceptible = all & !infected & !recovered;
        let (beta, gamma) = (self.params.beta, self.params.gamma);
        let mut dist: HashMap<(u32, u32), f64> = HashMap::from([((0, 0), 1.0)]);
        for v in (0..n).filter(|&v| infected & (1 << v) != 0) {
            let edges = self.h.incident(v);
            let mut after: HashMap<(u32, u32), f64> = HashMap::new();
            for (&(hit, rec), &p) in &dist {
                let mut push = |key: (u32, u32), q: f64| {
                    if q > 0.0 {
                        *after.entry(key).or_insert(0.0) += q;
                    }
                };
                let mut spread: Vec<(u32, f64)> = Vec::new();
                if edges.is_empty() {
                    spread.push((hit, p));
                } else {
                    let pe = p / edges.len() as f64;
                    for &e in edges {
                        let targets = self.masks[e] & susceptible;
                        let k = targets.count_ones();
                        // enumerate subsets of the susceptible targets
                        let mut sub = targets;
                        loop {
                            let j = sub.count_ones();
                            let q = beta.powi(j as i32) * (1.0 - beta).powi((k - j) as i32);
                            if q > 0.0 {
                                spread.push((hit | sub, pe * q));
                            }
                            if sub == 0 {
                                break;
                            }
                            sub = (sub - 1) & targets;
                        }
                    }
                }
                for (h2, q) in spread {
                    push((h2, rec | (1 << v)), q * gamma);
                    push((h2, rec), q * (1.0 - gamma));
                }
            }
            self.expanded += after.len();
            if self.expanded > self.budget {
                return Err(Error::BudgetExceeded(self.budget));
            }
            dist = after;
        }
        let mut out: Vec<((u32, u32), f64)> = dist.into_iter().collect();
        out.sort_by_key(|&(k, _)| k);
        Ok(out)
    }
}
