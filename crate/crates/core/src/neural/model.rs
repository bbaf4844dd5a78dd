//! Autoencoder and ranking head with hand-written backward passes.
//!
//! Parameters live in flat `Vec<Matrix>` lists so the optimizer, the
//! gradient checker and serialization treat every model alike.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::listmle::listmle;
use super::matrix::Matrix;
use super::propagator::Propagator;
use crate::error::{Error, Result};

/// Cached activations of a stack of HGNN layers.
struct StackCache {
    /// `P X_l` per layer; `None` for an identity input.
    px: Vec<Option<Matrix>>,
    pre: Vec<Matrix>,
    out: Matrix,
}

/// Runs `ReLU(P X Theta)` layer by layer. `input = None` means `X_0 = I`,
/// in which case `P X_0 Theta_0` is just `P Theta_0`.
fn stack_forward(p: &Propagator, input: Option<&Matrix>, thetas: &[Matrix]) -> Result<StackCache> {
    let mut px = Vec::with_capacity(thetas.len());
    let mut pre = Vec::with_capacity(thetas.len());
    let mut x: Option<Matrix> = input.cloned();
    for theta in thetas {
        let a = match &x {
            None => {
                px.push(None);
                p.apply(theta)?
            }
            Some(x) => {
                let m = p.apply(x)?;
                let a = m.matmul(theta)?;
                px.push(Some(m));
                a
            }
        };
        x = Some(a.relu());
        pre.push(a);
    }
    let out = match x {
        Some(x) => x,
        None => return Err(Error::Shape("empty layer stack without input".into())),
    };
    Ok(StackCache { px, pre, out })
}

/// Back-propagates `d_out` through the stack, writing one gradient per theta.
fn stack_backward(p: &Propagator, cache: &StackCache, thetas: &[Matrix], mut d_out: Matrix) -> Result<Vec<Matrix>> {
    let mut grads = vec![Matrix::zeros(0, 0); thetas.len()];
    for l in (0..thetas.len()).rev() {
        d_out.relu_backward(&cache.pre[l]);
        match &cache.px[l] {
            None => {
                grads[l] = p.apply(&d_out)?;
            }
            Some(px) => {
                grads[l] = px.t_matmul(&d_out)?;
                if l > 0 {
                    let d_px = d_out.matmul_t(&thetas[l])?;
                    d_out = p.apply(&d_px)?;
                }
            }
        }
    }
    Ok(grads)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AeShape {
    pub n_nodes: usize,
    /// Hidden width; embeddings have width `d / 4`.
    pub d: usize,
    /// Number of encoder HGNN layers.
    pub depth: usize,
    /// ReLU between the two decoder layers.
    pub decoder_relu: bool,
}

impl AeShape {
    pub fn validate(&self) -> Result<()> {
        if self.d < 4 || self.d % 4 != 0 {
            return Err(Error::InvalidParameter(format!("d = {} must be a positive multiple of 4", self.d)));
        }
        if self.depth == 0 {
            return Err(Error::InvalidParameter("encoder depth must be >= 1".into()));
        }
        Ok(())
    }

    pub fn emb_width(&self) -> usize {
        self.d / 4
    }

    /// `(in, out)` of each encoder layer: `N -> d -> ... -> d -> d/4`.
    pub fn encoder_dims(&self) -> Vec<(usize, usize)> {
        (0..self.depth)
            .map(|l| {
                let input = if l == 0 { self.n_nodes } else { self.d };
                let output = if l + 1 == self.depth { self.emb_width() } else { self.d };
                (input, output)
            })
            .collect()
    }

    /// Encoder thetas, then decoder `W0, b0, W1, b1`.
    pub fn init<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<Matrix>> {
        self.validate()?;
        let mut t: Vec<Matrix> = self
            .encoder_dims()
            .into_iter()
            .map(|(i, o)| Matrix::glorot(i, o, rng))
            .collect();
        t.push(Matrix::glorot(self.emb_width(), self.d, rng));
        t.push(Matrix::zeros(1, self.d));
        t.push(Matrix::glorot(self.d, 1, rng));
        t.push(Matrix::zeros(1, 1));
        Ok(t)
    }

    fn check(&self, tensors: &[Matrix]) -> Result<()> {
        if tensors.len() != self.depth + 4 {
            return Err(Error::Shape(format!(
                "autoencoder expects {} tensors, got {}",
                self.depth + 4,
                tensors.len()
            )));
        }
        Ok(())
    }
}

/// Encoder output `X^depth`, the node embeddings.
pub fn encode(shape: &AeShape, tensors: &[Matrix], p: &Propagator) -> Result<Matrix> {
    shape.check(tensors)?;
    Ok(stack_forward(p, None, &tensors[..shape.depth])?.out)
}

/// Decoder output `Z` (N x 1) for given embeddings.
pub fn decode(shape: &AeShape, tensors: &[Matrix], emb: &Matrix) -> Result<Matrix> {
    shape.check(tensors)?;
    let k = shape.depth;
    let mut y = emb.matmul(&tensors[k])?;
    y.add_row(&tensors[k + 1])?;
    if shape.decoder_relu {
        y = y.relu();
    }
    let mut z = y.matmul(&tensors[k + 2])?;
    z.add_row(&tensors[k + 3])?;
    Ok(z)
}

/// Min-max scaled degrees; a constant vector maps to all 0.5.
pub fn minmax(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return vec![0.5; values.len()];
    }
    values.iter().map(|v| (v - lo) / (hi - lo)).collect()
}

/// `||Z - target||_2`.
pub fn reconstruction_loss(z: &[f64], target: &[f64]) -> f64 {
    z.iter().zip(target).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Reconstruction loss, gradients for every tensor, and the embeddings.
pub fn ae_loss_and_grad(
    shape: &AeShape,
    tensors: &[Matrix],
    p: &Propagator,
    target: &[f64],
) -> Result<(f64, Vec<Matrix>, Matrix)> {
    shape.check(tensors)?;
    let k = shape.depth;
    let enc = stack_forward(p, None, &tensors[..k])?;
    let mut y_pre = enc.out.matmul(&tensors[k])?;
    y_pre.add_row(&tensors[k + 1])?;
    let y = if shape.decoder_relu { y_pre.relu() } else { y_pre.clone() };
    let mut z = y.matmul(&tensors[k + 2])?;
    z.add_row(&tensors[k + 3])?;
    if target.len() != z.rows() {
        return Err(Error::LengthMismatch(z.rows(), target.len()));
    }
    let resid = z.sub(&Matrix::column(target))?;
    let loss = resid.norm();
    let mut dz = resid;
    if loss > 0.0 {
        dz.scale(1.0 / loss);
    } else {
        dz.scale(0.0);
    }
    let g_w1 = y.t_matmul(&dz)?;
    let g_b1 = dz.column_sums();
    let mut dy = dz.matmul_t(&tensors[k + 2])?;
    if shape.decoder_relu {
        dy.relu_backward(&y_pre);
    }
    let g_w0 = enc.out.t_matmul(&dy)?;
    let g_b0 = dy.column_sums();
    let d_emb = dy.matmul_t(&tensors[k])?;
    let mut grads = stack_backward(p, &enc, &tensors[..k], d_emb)?;
    grads.extend([g_w0, g_b0, g_w1, g_b1]);
    Ok((loss, grads, enc.out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankerShape {
    /// Feature width (`d / 4`).
    pub width: usize,
    /// Number of HGNN layers before the scoring layer.
    pub layers: usize,
}

impl RankerShape {
    /// Layer thetas, then scoring weight and bias.
    pub fn init<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<Matrix>> {
        if self.width == 0 {
            return Err(Error::InvalidParameter("ranker width must be positive".into()));
        }
        let mut t: Vec<Matrix> = (0..self.layers)
            .map(|_| Matrix::glorot(self.width, self.width, rng))
            .collect();
        t.push(Matrix::glorot(self.width, 1, rng));
        t.push(Matrix::zeros(1, 1));
        Ok(t)
    }

    fn check(&self, tensors: &[Matrix], features: &Matrix) -> Result<()> {
        if tensors.len() != self.layers + 2 {
            return Err(Error::Shape(format!(
                "ranker expects {} tensors, got {}",
                self.layers + 2,
                tensors.len()
            )));
        }
        if features.cols() != self.width {
            return Err(Error::Shape(format!(
                "ranker width {} but features have {} columns",
                self.width,
                features.cols()
            )));
        }
        Ok(())
    }
}

/// Ranking scores for every node.
pub fn rank_forward(shape: &RankerShape, tensors: &[Matrix], p: &Propagator, features: &Matrix) -> Result<Vec<f64>> {
    shape.check(tensors, features)?;
    let l = shape.layers;
    let x = if l == 0 {
        features.clone()
    } else {
        stack_forward(p, Some(features), &tensors[..l])?.out
    };
    let mut s = x.matmul(&tensors[l])?;
    s.add_row(&tensors[l + 1])?;
    Ok(s.into_data())
}

/// ListMLE loss over `order` (best first) and gradients for every tensor.
pub fn rank_loss_and_grad(
    shape: &RankerShape,
    tensors: &[Matrix],
    p: &Propagator,
    features: &Matrix,
    order: &[usize],
) -> Result<(f64, Vec<Matrix>)> {
    shape.check(tensors, features)?;
    let l = shape.layers;
    let cache = if l == 0 {
        None
    } else {
        Some(stack_forward(p, Some(features), &tensors[..l])?)
    };
    let x = cache.as_ref().map_or(features, |c| &c.out);
    let mut s = x.matmul(&tensors[l])?;
    s.add_row(&tensors[l + 1])?;
    let (loss, g) = listmle(s.data(), order);
    let ds = Matrix::column(&g);
    let g_w = x.t_matmul(&ds)?;
    let g_b = ds.column_sums();
    let mut grads = match &cache {
        Some(c) => stack_backward(p, c, &tensors[..l], ds.matmul_t(&tensors[l])?)?,
        None => Vec::new(),
    };
    grads.extend([g_w, g_b]);
    Ok((loss, grads))
}
