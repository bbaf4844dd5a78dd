use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use crate::error::Result;
use crate::hypergraph::Hypergraph;

/// Sparse symmetric HGNN operator
/// `Dv^{-1/2} H W De^{-1} H^T Dv^{-1/2}` in CSR form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Propagator {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    /// Frozen hyperedge weights.
    pub weights: Vec<f64>,
    /// Nodes without hyperedges; their rows and columns are zero.
    pub isolated: Vec<usize>,
}

impl Propagator {
    /// Draws the hyperedge weights from `U[0, 1)`.
    pub fn build<R: Rng + ?Sized>(h: &Hypergraph, rng: &mut R) -> Self {
        let w: Vec<f64> = (0..h.n_hyperedges()).map(|_| rng.random::<f64>()).collect();
        Self::with_weights(h, w)
    }

    pub fn with_weights(h: &Hypergraph, weights: Vec<f64>) -> Self {
        assert_eq!(weights.len(), h.n_hyperedges());
        let n = h.n_nodes();
        let inv_sqrt: Vec<f64> = (0..n)
            .map(|v| {
                let k = h.incident(v).len();
                if k == 0 {
                    0.0
                } else {
                    1.0 / (k as f64).sqrt()
                }
            })
            .collect();
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut acc = vec![0.0; n];
        let mut seen = vec![false; n];
        let mut touched: Vec<usize> = Vec::new();
        for i in 0..n {
            for &e in h.incident(i) {
                let share = weights[e] / h.members(e).len() as f64;
                for &j in h.members(e) {
                    if !seen[j] {
                        seen[j] = true;
                        touched.push(j);
                    }
                    acc[j] += share;
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                cols.push(j);
                vals.push(acc[j] * (inv_sqrt[i] * inv_sqrt[j]));
                acc[j] = 0.0;
                seen[j] = false;
            }
            touched.clear();
            row_ptr.push(cols.len());
        }
        let isolated = (0..n).filter(|&v| h.incident(v).is_empty()).collect();
        Self {
            n,
            row_ptr,
            cols,
            vals,
            weights,
            isolated,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                m.set(i, self.cols[k], self.vals[k]);
            }
        }
        m
    }

    /// `P * x`. `P` is symmetric, so this also serves as `P^T * x`.
    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if x.rows() != self.n {
            return Err(crate::error::Error::Shape(format!(
                "propagator of size {} applied to {} rows",
                self.n,
                x.rows()
            )));
        }
        let c = x.cols();
        let mut out = Matrix::zeros(self.n, c);
        out.data_mut()
            .par_chunks_mut(c.max(1))
            .enumerate()
            .for_each(|(i, row)| {
                for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                    let v = self.vals[k];
                    for (o, &xv) in row.iter_mut().zip(x.row(self.cols[k])) {
                        *o += v * xv;
                    }
                }
            });
        Ok(out)
    }

    /// Largest absolute row sum (bounds the spectral radius).
    pub fn max_row_sum(&self) -> f64 {
        (0..self.n)
            .map(|i| self.vals[self.row_ptr[i]..self.row_ptr[i + 1]].iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// One HGNN layer `ReLU(P X Theta)`, returning `(P X, pre-activation, output)`.
pub fn hgnn_layer(p: &Propagator, x: &Matrix, theta: &Matrix) -> Result<(Matrix, Matrix, Matrix)> {
    let px = p.apply(x)?;
    let pre = px.matmul(theta)?;
    let out = pre.relu();
    Ok((px, pre, out))
}
