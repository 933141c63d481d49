//! Small numeric helpers shared across modules.

/// `ceil(log2 x)` for `x >= 1`; `ceil_log2(1) == 0`.
pub fn ceil_log2(x: u64) -> usize {
    assert!(x >= 1, "ceil_log2 of zero");
    (64 - (x - 1).leading_zeros()) as usize
}

/// Probability that strictly more than half of `votes` independent trials
/// fail when each fails with probability `e`.
pub fn majority_failure(votes: usize, e: f64) -> f64 {
    if e <= 0.0 {
        return 0.0;
    }
    let need = votes / 2 + 1;
    (need..=votes)
        .map(|k| binomial(votes, k) * e.powi(k as i32) * (1.0 - e).powi((votes - k) as i32))
        .sum()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    slope(&lx, &ly)
}

/// Constant `c` minimising `sum (y - c x)^2`.
pub fn fit_through_origin(xs: &[f64], ys: &[f64]) -> f64 {
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    sxy / sxx
}
