//! ListMLE: negative Plackett-Luce log-likelihood of a target order.

use crate::score::rank_descending;

/// Target order from labels: descending label, ascending id on ties.
pub fn target_order(labels: &[f64]) -> Vec<usize> {
    rank_descending(labels)
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `log sum_{t >= k} exp(scores[order[t]])` for every position `k`.
fn suffix_lse(scores: &[f64], order: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; order.len()];
    let mut acc = f64::NEG_INFINITY;
    for k in (0..order.len()).rev() {
        acc = log_add_exp(acc, scores[order[k]]);
        out[k] = acc;
    }
    out
}

/// Loss over the items listed in `order` (best first). Items of `scores`
/// not in `order` are ignored.
pub fn listmle_loss(scores: &[f64], order: &[usize]) -> f64 {
    suffix_lse(scores, order)
        .iter()
        .zip(order)
        .map(|(lse, &j)| lse - scores[j])
        .sum()
}

/// Loss and gradient with respect to every entry of `scores`.
///
/// Item at position `k` receives `sum_{t <= k} softmax_t(item) - 1`, where
/// `softmax_t` is taken over the suffix starting at `t`.
pub fn listmle(scores: &[f64], order: &[usize]) -> (f64, Vec<f64>) {
    let lse = suffix_lse(scores, order);
    let loss = lse.iter().zip(order).map(|(l, &j)| l - scores[j]).sum();
    let mut grad = vec![0.0; scores.len()];
    let mut prefix = f64::NEG_INFINITY;
    for (k, &j) in order.iter().enumerate() {
        prefix = log_add_exp(prefix, -lse[k]);
        grad[j] = (scores[j] + prefix).exp() - 1.0;
    }
    (loss, grad)
}

pub fn listmle_grad(scores: &[f64], order: &[usize]) -> Vec<f64> {
    listmle(scores, order).1
}
