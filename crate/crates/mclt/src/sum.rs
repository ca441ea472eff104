//! Deterministic pairwise summation.
//!
//! All Monte Carlo aggregations in this crate sum per-replicate values in a
//! fixed order with a fixed reduction tree, so the result never depends on
//! how work was split across threads, and rounding error grows like
//! `O(log n)` instead of `O(n)`.

/// Sum a slice by recursive halving. Empty slices sum to 0.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        let mut acc = 0.0;
        for &v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Mean via [`pairwise_sum`], sharpened by one pass over the residuals.
/// The correction makes the mean of a constant slice exact (deterministic
/// per-path functionals must average to themselves, bit for bit) and cuts
/// the accumulated rounding everywhere else. Empty slices have mean 0.
pub(crate) fn pairwise_mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let m = values.len() as f64;
    let first = pairwise_sum(values) / m;
    if !first.is_finite() {
        return first;
    }
    let residuals: Vec<f64> = values.iter().map(|v| v - first).collect();
    first + pairwise_sum(&residuals) / m
}

/// Sample standard deviation (ddof = 1) of `values`, and the standard error
/// of their mean. Returns `(0.0, 0.0)` for fewer than two values.
pub(crate) fn sd_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n < 2 {
        return (0.0, 0.0);
    }
    let mean = pairwise_mean(values);
    let mut sq = vec![0.0_f64; n];
    for (slot, &v) in sq.iter_mut().zip(values) {
        let d = v - mean;
        *slot = d * d;
    }
    let var = pairwise_sum(&sq) / (n - 1) as f64;
    let sd = var.max(0.0).sqrt();
    (sd, sd / (n as f64).sqrt())
}
