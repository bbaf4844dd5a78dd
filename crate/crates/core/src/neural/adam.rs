use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Adam with bias correction, one moment pair per tensor.
#[derive(Debug, Clone)]
pub struct Adam {
    pub cfg: AdamConfig,
    pub m: Vec<Matrix>,
    pub v: Vec<Matrix>,
    pub t: i32,
}

impl Adam {
    pub fn new(cfg: AdamConfig, params: &[Matrix]) -> Self {
        let zeros: Vec<Matrix> = params.iter().map(|p| Matrix::zeros(p.rows(), p.cols())).collect();
        Self {
            cfg,
            m: zeros.clone(),
            v: zeros,
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut [Matrix], grads: &[Matrix]) -> Result<()> {
        if params.len() != grads.len() || params.len() != self.m.len() {
            return Err(Error::Shape(format!(
                "adam: {} params, {} grads, {} moments",
                params.len(),
                grads.len(),
                self.m.len()
            )));
        }
        self.t += 1;
        let AdamConfig { lr, beta1, beta2, eps } = self.cfg;
        let c1 = 1.0 - beta1.powi(self.t);
        let c2 = 1.0 - beta2.powi(self.t);
        for (((p, g), m), v) in params.iter_mut().zip(grads).zip(&mut self.m).zip(&mut self.v) {
            if p.shape() != g.shape() {
                return Err(Error::Shape(format!("adam: param {:?} vs grad {:?}", p.shape(), g.shape())));
            }
            let pd = p.data_mut();
            for (((x, &gi), mi), vi) in pd.iter_mut().zip(g.data()).zip(m.data_mut()).zip(v.data_mut()) {
                *mi = beta1 * *mi + (1.0 - beta1) * gi;
                *vi = beta2 * *vi + (1.0 - beta2) * gi * gi;
                let mhat = *mi / c1;
                let vhat = *vi / c2;
                *x -= lr * mhat / (vhat.sqrt() + eps);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_keeps_params() {
        let mut p = vec![Matrix::from_vec(1, 2, vec![1.0, -2.0]).unwrap()];
        let mut adam = Adam::new(AdamConfig::default(), &p);
        adam.m[0].data_mut()[0] = 1.0;
        adam.step(&mut p, &[Matrix::zeros(1, 2)]).unwrap();
        assert_eq!(adam.m[0].data()[0], 0.9);
        let mut q = vec![Matrix::from_vec(1, 1, vec![3.0]).unwrap()];
        let mut fresh = Adam::new(AdamConfig::default(), &q);
        fresh.step(&mut q, &[Matrix::zeros(1, 1)]).unwrap();
        assert_eq!(q[0].data()[0], 3.0);
    }

    #[test]
    fn first_step_is_lr_sign() {
        let mut p = vec![Matrix::from_vec(1, 3, vec![0.0, 0.0, 0.0]).unwrap()];
        let mut adam = Adam::new(AdamConfig::default(), &p);
        let g = Matrix::from_vec(1, 3, vec![5.0, -0.3, 100.0]).unwrap();
        adam.step(&mut p, &[g]).unwrap();
        let want = [-0.01, 0.01, -0.01];
        for (x, w) in p[0].data().iter().zip(want) {
            assert!((x - w).abs() < 1e-8);
        }
    }

    #[test]
    fn deterministic() {
        let run = || {
            let mut p = vec![Matrix::from_vec(1, 2, vec![0.5, 0.25]).unwrap()];
            let mut adam = Adam::new(AdamConfig::default(), &p);
            for i in 0..10 {
                let g = Matrix::from_vec(1, 2, vec![i as f64 * 0.1, -0.3]).unwrap();
                adam.step(&mut p, &[g]).unwrap();
            }
            p
        };
        assert_eq!(run(), run());
    }
}
