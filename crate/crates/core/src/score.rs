use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-node importance scores with a deterministic ranking: descending score,
/// ties broken by ascending node id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreVector {
    pub method: String,
    pub scores: Vec<f64>,
    pub ranking: Vec<usize>,
}

/// Node ids sorted by descending score, ascending id on ties.
pub fn rank_descending(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

impl ScoreVector {
    pub fn new(method: impl Into<String>, scores: Vec<f64>) -> Result<Self> {
        if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite score at node {i}"
            )));
        }
        let ranking = rank_descending(&scores);
        Ok(Self {
            method: method.into(),
            scores,
            ranking,
        })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// First `k` node ids of the ranking.
    pub fn top(&self, k: usize) -> &[usize] {
        &self.ranking[..k.min(self.ranking.len())]
    }

    /// Rank position of every node (0 = most important).
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.ranking.len()];
        for (r, &v) in self.ranking.iter().enumerate() {
            pos[v] = r;
        }
        pos
    }

    /// Reads the first two columns (node_id, score) of a CSV with a header
    /// row, as written by [`ScoreVector::to_csv`]. Ids must be 0..n in order.
    pub fn from_csv(method: impl Into<String>, text: &str) -> Result<Self> {
        let mut scores = Vec::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let bad = |msg: &str| Error::Parse { line: i + 1, msg: msg.to_string() };
            let id: usize = cols.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("bad node id"))?;
            let x: f64 = cols.next().and_then(|t| t.parse().ok()).ok_or_else(|| bad("bad score"))?;
            if id != scores.len() {
                return Err(bad("node ids must be consecutive from 0"));
            }
            scores.push(x);
        }
        Self::new(method, scores)
    }

    /// CSV with columns node_id, score, rank (rank is 1-based).
    pub fn to_csv(&self) -> String {
        let pos = self.positions();
        let mut out = String::from("node_id,score,rank\n");
        for (v, s) in self.scores.iter().enumerate() {
            out.push_str(&format!("{v},{s:e},{}\n", pos[v] + 1));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_break_by_ascending_id() {
        let s = ScoreVector::new("x", vec![1.0, 3.0, 1.0, 3.0]).unwrap();
        assert_eq!(s.ranking, vec![1, 3, 0, 2]);
        assert_eq!(s.positions(), vec![2, 0, 3, 1]);
    }

    #[test]
    fn rejects_nan() {
        assert!(ScoreVector::new("x", vec![f64::NAN]).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let s = ScoreVector::new("x", vec![0.1, -2.5e-7, 1.0 / 3.0]).unwrap();
        let back = ScoreVector::from_csv("x", &s.to_csv()).unwrap();
        assert_eq!(back, s);
        assert!(ScoreVector::from_csv("x", "node_id,score\n1,2.0\n").is_err());
    }
}
