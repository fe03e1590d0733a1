//! Deterministic reductions over per-sample values.

use crate::par::pairwise_sum;

/// Mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(xs) / n as f64;
    if n == 1 {
        return (mean, f64::NAN);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
    let var = pairwise_sum(&dev) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// `log((1/n) Σ e^{x_k})` and its delta-method standard error.
pub fn log_mean_exp(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = xs.iter().map(|x| (x - max).exp()).collect();
    let (mw, sw) = mean_stderr(&w);
    (max + mw.ln(), sw / mw)
}

/// Largest summand's share of `Σ e^{x_k}`.
pub fn max_share(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = xs.iter().map(|x| (x - max).exp()).collect();
    1.0 / pairwise_sum(&w)
}

/// Hill estimate of the tail index of `e^{x}` from the top `k` order
/// statistics of `x`.
pub fn hill_index(xs: &[f64], k: usize) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    let k = k.clamp(1, v.len().saturating_sub(1).max(1));
    let base = v[k.min(v.len() - 1)];
    let s: Vec<f64> = v[..k].iter().map(|x| x - base).collect();
    k as f64 / pairwise_sum(&s)
}
