use rand::seq::index::sample;
use rand::Rng;

use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Relative error `|a - n| / max(1, |a|, |n|)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / 1f64.max(analytic.abs()).max(numeric.abs())
}

/// Compares `analytic` gradients with central differences of `loss` on a
/// random sample of at least `min_coords` coordinates (all of them if there
/// are fewer), including at least one coordinate of every non-empty tensor.
/// Returns the largest relative error.
pub fn grad_check<R, F>(
    tensors: &[Matrix],
    analytic: &[Matrix],
    mut loss: F,
    eps: f64,
    min_coords: usize,
    rng: &mut R,
) -> Result<f64>
where
    R: Rng + ?Sized,
    F: FnMut(&[Matrix]) -> f64,
{
    if !(1e-7..=1e-3).contains(&eps) {
        return Err(Error::InvalidParameter(format!("finite-difference step {eps} outside [1e-7, 1e-3]")));
    }
    if tensors.len() != analytic.len() || tensors.iter().zip(analytic).any(|(t, a)| t.shape() != a.shape()) {
        return Err(Error::Shape("gradient list does not match parameters".into()));
    }
    let offsets: Vec<usize> = tensors
        .iter()
        .scan(0, |acc, t| {
            let start = *acc;
            *acc += t.len();
            Some(start)
        })
        .collect();
    let total: usize = tensors.iter().map(Matrix::len).sum();
    let mut coords: Vec<(usize, usize)> = Vec::new();
    for (t, m) in tensors.iter().enumerate() {
        if !m.is_empty() {
            coords.push((t, rng.random_range(0..m.len())));
        }
    }
    let extra = min_coords.min(total).saturating_sub(coords.len());
    for flat in sample(rng, total, extra.min(total)).into_iter() {
        let t = offsets.partition_point(|&o| o <= flat) - 1;
        coords.push((t, flat - offsets[t]));
    }
    coords.sort_unstable();
    coords.dedup();

    let mut work = tensors.to_vec();
    let mut worst = 0.0f64;
    for (t, i) in coords {
        let orig = work[t].data()[i];
        work[t].data_mut()[i] = orig + eps;
        let up = loss(&work);
        work[t].data_mut()[i] = orig - eps;
        let down = loss(&work);
        work[t].data_mut()[i] = orig;
        let numeric = (up - down) / (2.0 * eps);
        worst = worst.max(relative_error(analytic[t].data()[i], numeric));
    }
    Ok(worst)
}
