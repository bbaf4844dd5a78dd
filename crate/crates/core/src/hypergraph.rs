//! Incidence-list hypergraph.
//!
//! A [`Hypergraph`] stores both directions of the incidence relation: the
//! sorted member list of every hyperedge and the sorted list of hyperedges
//! incident to every node. It is immutable once built; node removal returns
//! a new, re-indexed hypergraph.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    n_nodes: usize,
    members: Vec<Vec<usize>>,
    incident: Vec<Vec<usize>>,
}

/// Bidirectional mapping between the text labels of an input file and node ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeLabels {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl NodeLabels {
    fn intern(&mut self, label: &str) -> usize {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len();
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), id);
        id
    }

    pub fn label(&self, id: usize) -> Option<&str> {
        self.labels.get(id).map(String::as_str)
    }

    pub fn id(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// K^V, K^H and K^E.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    /// Number of distinct nodes sharing at least one hyperedge with each node.
    pub node_degree: Vec<usize>,
    /// Number of hyperedges containing each node.
    pub node_hyperdegree: Vec<usize>,
    pub hyperedge_size: Vec<usize>,
}

/// Summary statistics in the column order N, M, <K^V>, <K^H>, <K^E>, CV(K^V).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    pub avg_degree: f64,
    pub avg_hyperdegree: f64,
    pub avg_hyperedge_size: f64,
    pub cv_degree: f64,
}

impl GraphStats {
    pub const CSV_HEADER: &'static str = "N,M,avg_degree,avg_hyperdegree,avg_hyperedge_size,cv_degree";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.6},{:.6},{:.6},{:.6}",
            self.n,
            self.m,
            self.avg_degree,
            self.avg_hyperdegree,
            self.avg_hyperedge_size,
            self.cv_degree
        )
    }
}

fn tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
}

impl Hypergraph {
    /// Builds a hypergraph over nodes `0..n_nodes`. Member lists are sorted and
    /// deduplicated; duplicate hyperedges are kept as distinct hyperedges.
    pub fn new(n_nodes: usize, hyperedges: Vec<Vec<usize>>) -> Result<Self> {
        let mut members = Vec::with_capacity(hyperedges.len());
        let mut incident = vec![Vec::new(); n_nodes];
        for (e, mut nodes) in hyperedges.into_iter().enumerate() {
            nodes.sort_unstable();
            nodes.dedup();
            if nodes.is_empty() {
                return Err(Error::EmptyHyperedge(e));
            }
            if let Some(&last) = nodes.last() {
                if last >= n_nodes {
                    return Err(Error::NodeOutOfRange {
                        node: last,
                        n_nodes,
                    });
                }
            }
            for &v in &nodes {
                incident[v].push(e);
            }
            members.push(nodes);
        }
        Ok(Self {
            n_nodes,
            members,
            incident,
        })
    }

    /// Parses the hyperedge-list text format: one hyperedge per line, labels
    /// separated by whitespace or commas, `#` lines ignored. Labels map to ids
    /// in first-seen order.
    pub fn from_edge_list<I, S>(lines: I) -> Result<(Self, NodeLabels)>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut labels = NodeLabels::default();
        let mut hyperedges = Vec::new();
        for line in lines {
            let line = line.as_ref().trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let edge: Vec<usize> = tokens(line).map(|t| labels.intern(t)).collect();
            if !edge.is_empty() {
                hyperedges.push(edge);
            }
        }
        if hyperedges.is_empty() {
            return Err(Error::NoHyperedges);
        }
        let h = Self::new(labels.len(), hyperedges)?;
        Ok((h, labels))
    }

    pub fn parse(text: &str) -> Result<(Self, NodeLabels)> {
        Self::from_edge_list(text.lines())
    }

    /// Like [`Hypergraph::parse`], but when every token is a non-negative
    /// integer the tokens are used as node ids directly and no labels are
    /// returned. A generator header (`# ... n=<N> ...`) then fixes the node
    /// count, so isolated nodes survive a write/read round trip.
    pub fn parse_auto(text: &str) -> Result<(Self, Option<NodeLabels>)> {
        let body = || text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let numeric = body().flat_map(tokens).all(|t| t.parse::<usize>().is_ok());
        if !numeric {
            let (h, labels) = Self::parse(text)?;
            return Ok((h, Some(labels)));
        }
        let header_n = text
            .lines()
            .filter(|l| l.trim_start().starts_with('#'))
            .flat_map(|l| l.split_whitespace())
            .find_map(|t| t.strip_prefix("n=").and_then(|v| v.parse::<usize>().ok()));
        let hyperedges: Vec<Vec<usize>> = body()
            .map(|l| tokens(l).map(|t| t.parse().unwrap_or(0)).collect())
            .collect();
        if hyperedges.is_empty() {
            return Err(Error::NoHyperedges);
        }
        let max_id = hyperedges.iter().flatten().copied().max().unwrap_or(0);
        let n = header_n.unwrap_or(0).max(max_id + 1);
        Ok((Self::new(n, hyperedges)?, None))
    }

    /// Serializes to the hyperedge-list format, using `labels` when given and
    /// numeric ids otherwise.
    pub fn to_edge_list(&self, labels: Option<&NodeLabels>) -> String {
        let mut out = String::new();
        for edge in &self.members {
            let mut first = true;
            for &v in edge {
                if !first {
                    out.push(' ');
                }
                first = false;
                match labels.and_then(|l| l.label(v)) {
                    Some(l) => out.push_str(l),
                    None => {
                        let _ = write!(out, "{v}");
                    }
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_hyperedges(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self, e: usize) -> &[usize] {
        &self.members[e]
    }

    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn hyperedges(&self) -> &[Vec<usize>] {
        &self.members
    }

    /// Sorted distinct co-members of `v`.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.incident[v]
            .iter()
            .flat_map(|&e| self.members[e].iter().copied())
            .filter(|&u| u != v)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn degrees(&self) -> DegreeProfile {
        let mut mark = vec![usize::MAX; self.n_nodes];
        let mut node_degree = vec![0; self.n_nodes];
        for v in 0..self.n_nodes {
            let mut count = 0;
            for &e in &self.incident[v] {
                for &u in &self.members[e] {
                    if u != v && mark[u] != v {
                        mark[u] = v;
                        count += 1;
                    }
                }
            }
            node_degree[v] = count;
        }
        DegreeProfile {
            node_degree,
            node_hyperdegree: self.incident.iter().map(Vec::len).collect(),
            hyperedge_size: self.members.iter().map(Vec::len).collect(),
        }
    }

    pub fn stats(&self) -> Result<GraphStats> {
        if self.n_nodes == 0 {
            return Err(Error::EmptyHypergraph);
        }
        let deg = self.degrees();
        let n = self.n_nodes as f64;
        let mean = |xs: &[usize]| {
            if xs.is_empty() {
                0.0
            } else {
                xs.iter().sum::<usize>() as f64 / xs.len() as f64
            }
        };
        let avg_degree = mean(&deg.node_degree);
        let var = deg
            .node_degree
            .iter()
            .map(|&k| (k as f64 - avg_degree).powi(2))
            .sum::<f64>()
            / n;
        let cv_degree = if avg_degree > 0.0 {
            var.sqrt() / avg_degree
        } else {
            0.0
        };
        Ok(GraphStats {
            n: self.n_nodes,
            m: self.members.len(),
            avg_degree,
            avg_hyperdegree: mean(&deg.node_hyperdegree),
            avg_hyperedge_size: mean(&deg.hyperedge_size),
            cv_degree,
        })
    }

    /// Removes `victims` and re-indexes the survivors in ascending order of
    /// their old ids. Hyperedges left empty are dropped. Returns the reduced
    /// hypergraph and, for each new node id, its old id.
    pub fn remove_nodes(&self, victims: &[usize]) -> (Hypergraph, Vec<usize>) {
        let mut removed = vec![false; self.n_nodes];
        for &v in victims {
            if v < self.n_nodes {
                removed[v] = true;
            }
        }
        let mut new_id = vec![usize::MAX; self.n_nodes];
        let mut kept = Vec::new();
        for v in 0..self.n_nodes {
            if !removed[v] {
                new_id[v] = kept.len();
                kept.push(v);
            }
        }
        let mut members = Vec::with_capacity(self.members.len());
        let mut incident = vec![Vec::new(); kept.len()];
        for edge in &self.members {
            let shrunk: Vec<usize> = edge
                .iter()
                .filter(|&&v| !removed[v])
                .map(|&v| new_id[v])
                .collect();
            if shrunk.is_empty() {
                continue;
            }
            let e = members.len();
            for &v in &shrunk {
                incident[v].push(e);
            }
            members.push(shrunk);
        }
        (
            Hypergraph {
                n_nodes: kept.len(),
                members,
                incident,
            },
            kept,
        )
    }

    /// Relabels nodes: node `v` becomes `perm[v]`. Hyperedge order is kept.
    pub fn permuted(&self, perm: &[usize]) -> Result<Hypergraph> {
        if perm.len() != self.n_nodes {
            return Err(Error::LengthMismatch(perm.len(), self.n_nodes));
        }
        let edges = self
            .members
            .iter()
            .map(|e| e.iter().map(|&v| perm[v]).collect())
            .collect();
        Hypergraph::new(self.n_nodes, edges)
    }

    /// Largest hyperedge size (0 when there are no hyperedges).
    pub fn max_hyperedge_size(&self) -> usize {
        self.members.iter().map(Vec::len).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hg(n: usize, edges: &[&[usize]]) -> Hypergraph {
        Hypergraph::new(n, edges.iter().map(|e| e.to_vec()).collect()).unwrap()
    }

    #[test]
    fn parse_single_hyperedge() {
        let (h, labels) = Hypergraph::from_edge_list(["1 2 3"]).unwrap();
        assert_eq!(h.n_nodes(), 3);
        assert_eq!(h.n_hyperedges(), 1);
        assert_eq!(h.members(0), &[0, 1, 2]);
        assert_eq!(labels.id("3"), Some(2));
    }

    #[test]
    fn parse_shared_node() {
        let (h, labels) = Hypergraph::from_edge_list(["a b", "b c"]).unwrap();
        assert_eq!((h.n_nodes(), h.n_hyperedges()), (3, 2));
        let b = labels.id("b").unwrap();
        assert_eq!(h.incident(b), &[0, 1]);
    }

    #[test]
    fn parse_dedups_within_line() {
        let (h, _) = Hypergraph::from_edge_list(["1 1 2"]).unwrap();
        assert_eq!(h.members(0), &[0, 1]);
    }

    #[test]
    fn parse_commas_comments_blank_lines_and_duplicates() {
        let text = "# header\n1,2\n\n   \n2 3\n1, 2\n";
        let (h, _) = Hypergraph::parse(text).unwrap();
        assert_eq!(h.n_hyperedges(), 3);
        assert_eq!(h.members(0), h.members(2));
        assert_eq!(h.degrees().node_hyperdegree, vec![2, 3, 1]);
    }

    #[test]
    fn parse_auto_keeps_numeric_ids_and_isolated_nodes() {
        let h = Hypergraph::new(6, vec![vec![4, 1], vec![1, 2]]).unwrap();
        let text = format!("# family=erh n=6 m=2\n{}", h.to_edge_list(None));
        let (back, labels) = Hypergraph::parse_auto(&text).unwrap();
        assert!(labels.is_none());
        assert_eq!(back, h);
        let (_, labels) = Hypergraph::parse_auto("a b\nb c\n").unwrap();
        assert_eq!(labels.unwrap().len(), 3);
    }

    #[test]
    fn parse_empty_input_errors() {
        assert!(matches!(
            Hypergraph::parse("\n  \n# only comment\n"),
            Err(Error::NoHyperedges)
        ));
    }

    #[test]
    fn new_rejects_bad_ids() {
        assert!(Hypergraph::new(2, vec![vec![0, 2]]).is_err());
        assert!(Hypergraph::new(2, vec![vec![]]).is_err());
    }

    #[test]
    fn degrees_clique() {
        let d = hg(3, &[&[0, 1, 2]]).degrees();
        assert_eq!(d.node_degree, vec![2, 2, 2]);
        assert_eq!(d.hyperedge_size, vec![3]);
    }

    #[test]
    fn degrees_path() {
        let d = hg(3, &[&[0, 1], &[1, 2]]).degrees();
        assert_eq!(d.node_degree[1], 2);
        assert_eq!(d.node_hyperdegree[1], 2);
    }

    #[test]
    fn degrees_singleton() {
        let d = hg(1, &[&[0]]).degrees();
        assert_eq!(d.node_degree, vec![0]);
        assert_eq!(d.node_hyperdegree, vec![1]);
    }

    #[test]
    fn degree_counts_distinct_neighbors() {
        // 0 and 1 share two hyperedges but are neighbors once
        let d = hg(3, &[&[0, 1], &[0, 1, 2]]).degrees();
        assert_eq!(d.node_degree, vec![2, 2, 2]);
        assert_eq!(d.node_hyperdegree, vec![2, 2, 1]);
    }

    #[test]
    fn remove_nothing_is_identity() {
        let h = hg(4, &[&[0, 1, 2], &[2, 3]]);
        let (r, kept) = h.remove_nodes(&[]);
        assert_eq!(r, h);
        assert_eq!(kept, vec![0, 1, 2, 3]);
        assert_eq!(r.stats().unwrap(), h.stats().unwrap());
    }

    #[test]
    fn remove_middle_reindexes() {
        let (r, kept) = hg(3, &[&[0, 1, 2]]).remove_nodes(&[1]);
        assert_eq!(r.members(0), &[0, 1]);
        assert_eq!(kept, vec![0, 2]);
    }

    #[test]
    fn remove_drops_emptied_hyperedges() {
        let (r, _) = hg(2, &[&[0, 1], &[1]]).remove_nodes(&[1]);
        assert_eq!(r.n_hyperedges(), 1);
        assert_eq!(r.members(0), &[0]);
    }

    #[test]
    fn remove_everything() {
        let (r, kept) = hg(2, &[&[0, 1]]).remove_nodes(&[0, 1]);
        assert_eq!((r.n_nodes(), r.n_hyperedges()), (0, 0));
        assert!(kept.is_empty());
        assert!(r.stats().is_err());
    }

    #[test]
    fn stats_ring_has_zero_cv() {
        let n = 8;
        let edges: Vec<Vec<usize>> = (0..n).map(|i| vec![i, (i + 1) % n, (i + 2) % n]).collect();
        let s = Hypergraph::new(n, edges).unwrap().stats().unwrap();
        assert_eq!(s.cv_degree, 0.0);
        assert_eq!(s.avg_degree, 4.0);
        assert_eq!(s.avg_hyperdegree, 3.0);
    }

    #[test]
    fn stats_single_big_hyperedge() {
        let s = hg(5, &[&[0, 1, 2, 3, 4]]).stats().unwrap();
        assert_eq!(s.avg_hyperedge_size, 5.0);
        assert_eq!(s.m, 1);
    }

    #[test]
    fn edge_list_round_trip_with_labels() {
        let (h, labels) = Hypergraph::parse("x y z\nz w\n").unwrap();
        let text = h.to_edge_list(Some(&labels));
        assert_eq!(text, "x y z\nz w\n");
        let (h2, _) = Hypergraph::parse(&text).unwrap();
        assert_eq!(h, h2);
    }
}
